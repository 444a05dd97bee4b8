// Browser wiring: a minimal annotation screen on top of the typed API
// client and the item view-model.  All state of record lives on the
// server; this layer only renders and forwards decisions.

import { AnnotationApi, ApiError } from "./api.js";
import { formatAlpha, loadDashboard } from "./dashboard.js";
import { ItemAnnotationModel } from "./item_model.js";
import { handleKey, keyBindings } from "./keyboard.js";
import { ItemPayload } from "./schemas.js";

interface AppState {
  api: AnnotationApi;
  sessionId: string;
  annotator: string;
  model: ItemAnnotationModel | null;
  bindings: Map<string, string>;
  alpha: number | null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderItem(state: AppState, root: HTMLElement): void {
  const model = state.model;
  root.replaceChildren();

  const badge = el("div", "alpha-badge", formatAlpha(state.alpha));
  root.appendChild(badge);

  if (model === null) {
    root.appendChild(el("p", "done", "All items complete. Thank you!"));
    return;
  }

  const tokensRow = el("div", "tokens");
  model.tokens.forEach((token, index) => {
    const chip = el("span", "token", token);
    const tag = model.selectedTag(index);
    const ghost = model.ghostTag(index);
    const label = el("span", "tag", tag ?? ghost ?? "·");
    if (tag === null && ghost !== null) label.classList.add("ghost");
    if (index === model.cursor) chip.classList.add("cursor");
    if (model.lastRejection?.tokenIndex === index) chip.classList.add("rejected");
    chip.appendChild(label);
    chip.addEventListener("click", () => {
      model.moveCursor(index);
      renderItem(state, root);
    });
    const mae = el("input", "mae") as HTMLInputElement;
    mae.placeholder = "MAE equivalent (optional)";
    mae.addEventListener("change", () => model.setMaeEquivalent(index, mae.value));
    const cell = el("div", "cell");
    cell.append(chip, mae);
    tokensRow.appendChild(cell);
  });
  root.appendChild(tokensRow);

  const picker = el("div", "picker");
  for (const tag of model.tagset) {
    const button = el("button", "tag-btn", tag);
    button.addEventListener("click", () => {
      model.selectTag(tag);
      renderItem(state, root);
    });
    picker.appendChild(button);
  }
  root.appendChild(picker);

  if (model.lastRejection) {
    root.appendChild(el("p", "error", model.lastRejection.message));
  }

  const submit = el("button", "submit", "Submit") as HTMLButtonElement;
  submit.disabled = !model.canSubmit();
  submit.addEventListener("click", () => void submitItem(state, root));
  root.appendChild(submit);
}

async function fetchNext(state: AppState): Promise<void> {
  const next = await state.api.nextItem(state.sessionId, state.annotator);
  state.model = next.done ? null : new ItemAnnotationModel(next as ItemPayload);
  if (state.model !== null) {
    state.bindings = keyBindings(state.model.tagset);
  }
}

async function submitItem(state: AppState, root: HTMLElement): Promise<void> {
  const model = state.model;
  if (model === null || !model.canSubmit()) return;
  try {
    const response = await state.api.submitLabels(
      state.sessionId,
      model.itemId,
      model.buildSubmission(state.annotator),
    );
    model.markSubmitted();
    state.alpha = response.alpha;
    await fetchNext(state);
  } catch (error) {
    if (error instanceof ApiError) {
      model.handleRejection(error.detail);
    } else {
      model.handleRejection(String(error));
    }
  }
  renderItem(state, root);
}

export async function startAnnotating(
  baseUrl: string,
  sessionId: string,
  annotator: string,
  root: HTMLElement,
): Promise<void> {
  const state: AppState = {
    api: new AnnotationApi(baseUrl),
    sessionId,
    annotator,
    model: null,
    bindings: new Map(),
    alpha: await new AnnotationApi(baseUrl).agreement(sessionId),
  };
  await fetchNext(state);
  document.addEventListener("keydown", (event) => {
    if (state.model === null) return;
    if ((event.target as HTMLElement | null)?.tagName === "INPUT") return;
    const outcome = handleKey(state.model, event.key, state.bindings);
    if (outcome !== "ignored") {
      event.preventDefault();
      renderItem(state, root);
    }
  });
  renderItem(state, root);
}

export async function showDashboard(
  baseUrl: string,
  sessionId: string,
  root: HTMLElement,
): Promise<void> {
  const api = new AnnotationApi(baseUrl);
  const view = await loadDashboard(api, sessionId);
  root.replaceChildren();
  root.appendChild(el("div", "alpha-badge", view.alphaBadge));
  const list = el("ul", "progress");
  for (const annotator of view.annotators) {
    list.appendChild(
      el(
        "li",
        "annotator",
        `${annotator.id}: ${annotator.completed}/${annotator.total}` +
          ` (${annotator.percent.toFixed(0)}%)`,
      ),
    );
  }
  root.appendChild(list);
}

declare global {
  interface Window {
    dialectpos: {
      startAnnotating: typeof startAnnotating;
      showDashboard: typeof showDashboard;
    };
  }
}

if (typeof window !== "undefined") {
  window.dialectpos = { startAnnotating, showDashboard };
}
