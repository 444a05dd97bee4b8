// Keyboard-first tagging: the digit row maps to the most frequent tags
// so high-volume token labeling rarely needs the mouse.

import { ItemAnnotationModel } from "./item_model.js";

// Frequency order observed on tweet POS corpora; tags missing from a
// session's inventory are skipped when binding keys.
export const DEFAULT_FREQUENCY_ORDER: readonly string[] = [
  "NN", "PRP", "VBP", "DT", "IN", "JJ", "RB", "VBZ", "VBD", "NNP",
  "UH", "VB", "TO", "CC", "NNS", "VBG", "PRP$", "MD",
];

const DIGIT_KEYS = ["1", "2", "3", "4", "5", "6", "7", "8", "9", "0"] as const;

export function keyBindings(
  tagset: readonly string[],
  frequencyOrder: readonly string[] = DEFAULT_FREQUENCY_ORDER,
): Map<string, string> {
  const ranked = [
    ...frequencyOrder.filter((tag) => tagset.includes(tag)),
    ...tagset.filter((tag) => !frequencyOrder.includes(tag)),
  ];
  const bindings = new Map<string, string>();
  DIGIT_KEYS.forEach((key, i) => {
    const tag = ranked[i];
    if (tag !== undefined) bindings.set(key, tag);
  });
  return bindings;
}

export type KeyOutcome = "tagged" | "accepted" | "moved" | "ignored";

export function handleKey(
  model: ItemAnnotationModel,
  key: string,
  bindings: Map<string, string>,
): KeyOutcome {
  const bound = bindings.get(key);
  if (bound !== undefined) {
    model.selectTag(bound);
    return "tagged";
  }
  if (key === "Enter" || key === " ") {
    return model.acceptPreAnnotation() ? "accepted" : "ignored";
  }
  if (key === "ArrowRight") {
    model.nextToken();
    return "moved";
  }
  if (key === "ArrowLeft") {
    model.previousToken();
    return "moved";
  }
  return "ignored";
}
