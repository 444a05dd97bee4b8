// View-model for annotating one item: per-token tag selection with a
// cursor, one-keystroke acceptance of model pre-annotations, optional
// MAE-equivalent text per token, and submit gating.  All state is
// local; the server stays authoritative and a rejected submission rolls
// back to editable state with the offending token highlighted.

import { ItemPayload, SubmitLabelsRequest } from "./schemas.js";

export interface RejectionView {
  message: string;
  tokenIndex: number | null;
}

export class ItemAnnotationModel {
  readonly itemId: number;
  readonly tokens: readonly string[];
  readonly preAnnotations: readonly string[] | null;
  readonly tagset: readonly string[];
  private selected: (string | null)[];
  private maeEquivalents: string[];
  private cursorIndex = 0;
  private rejection: RejectionView | null = null;
  private submitted = false;

  constructor(payload: ItemPayload) {
    this.itemId = payload.item_id;
    this.tokens = payload.tokens;
    this.preAnnotations = payload.pre_annotations;
    this.tagset = payload.tagset;
    this.selected = payload.tokens.map(() => null);
    this.maeEquivalents = payload.tokens.map(() => "");
  }

  get cursor(): number {
    return this.cursorIndex;
  }

  get lastRejection(): RejectionView | null {
    return this.rejection;
  }

  get isSubmitted(): boolean {
    return this.submitted;
  }

  selectedTag(index: number): string | null {
    return this.selected[index] ?? null;
  }

  ghostTag(index: number): string | null {
    // Pre-annotation shown ghosted until the annotator decides.
    if (this.selected[index] !== null) return null;
    return this.preAnnotations?.[index] ?? null;
  }

  moveCursor(index: number): void {
    if (index < 0 || index >= this.tokens.length) return;
    this.cursorIndex = index;
  }

  nextToken(): void {
    this.moveCursor(this.cursorIndex + 1);
  }

  previousToken(): void {
    this.moveCursor(this.cursorIndex - 1);
  }

  selectTag(tag: string): void {
    this.selectTagAt(this.cursorIndex, tag);
    this.advancePastTagged();
  }

  selectTagAt(index: number, tag: string): void {
    if (!this.tagset.includes(tag)) {
      throw new Error(`tag ${tag} is not in the inventory`);
    }
    if (index < 0 || index >= this.tokens.length) {
      throw new Error(`token index ${index} out of range`);
    }
    this.selected[index] = tag;
    this.rejection = null;
  }

  acceptPreAnnotation(): boolean {
    const ghost = this.preAnnotations?.[this.cursorIndex];
    if (ghost === undefined || ghost === null) return false;
    this.selectTagAt(this.cursorIndex, ghost);
    this.advancePastTagged();
    return true;
  }

  acceptAllPreAnnotations(): boolean {
    if (this.preAnnotations === null) return false;
    this.preAnnotations.forEach((tag, index) => this.selectTagAt(index, tag));
    return true;
  }

  setMaeEquivalent(index: number, text: string): void {
    if (index < 0 || index >= this.tokens.length) {
      throw new Error(`token index ${index} out of range`);
    }
    this.maeEquivalents[index] = text;
  }

  untaggedIndices(): number[] {
    return this.selected
      .map((tag, index) => (tag === null ? index : -1))
      .filter((index) => index >= 0);
  }

  canSubmit(): boolean {
    return this.untaggedIndices().length === 0;
  }

  buildSubmission(annotator: string): SubmitLabelsRequest {
    if (!this.canSubmit()) {
      throw new Error(
        `tokens without a tag: ${this.untaggedIndices().join(", ")}`,
      );
    }
    const tags = this.selected.map((tag) => tag as string) as [string, ...string[]];
    const anyMae = this.maeEquivalents.some((text) => text.trim() !== "");
    return {
      annotator,
      tags,
      mae_equivalents: anyMae ? this.maeEquivalents.slice() : null,
    };
  }

  markSubmitted(): void {
    this.submitted = true;
    this.rejection = null;
  }

  handleRejection(detail: string): RejectionView {
    // Highlight the first token carrying a tag the server refused, when
    // the diagnostic names one.
    let tokenIndex: number | null = null;
    const match = detail.match(/tag '([^']+)' not in inventory/);
    if (match) {
      const offender = this.selected.findIndex((tag) => tag === match[1]);
      tokenIndex = offender >= 0 ? offender : null;
    }
    this.submitted = false;
    this.rejection = { message: detail, tokenIndex };
    return this.rejection;
  }

  private advancePastTagged(): void {
    const pending = this.untaggedIndices().filter((i) => i > this.cursorIndex);
    if (pending.length > 0) {
      this.cursorIndex = pending[0]!;
    } else if (this.cursorIndex < this.tokens.length - 1) {
      this.cursorIndex += 1;
    }
  }
}
