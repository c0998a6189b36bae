/**
 * State inference: ask the LLM to name the patient's state after an utterance.
 *
 * Classification is an explicit call with its own short system prompt rather
 * than something folded into the dialogue prompt, so the inferred label is
 * auditable in the transcript. One retry on malformed output, then error.
 */

import type { LLMClient } from "./client.js";
import { STATE_LABELS, isStateLabel, type StateLabel } from "./labels.js";

export class ClassificationError extends Error {}

export const CLASSIFIER_PROMPT = [
  "You label patient utterances from a reminiscence session.",
  "Reply with exactly one state label and nothing else.",
  "A label is RP_E_C where RP is NR/IR/RR (response relevance),",
  "E is Neg/Neu/Pos (emotion), C is Yes/No (confusion).",
  "Valid labels: " + STATE_LABELS.join(", "),
].join("\n");

const RETRY_NUDGE =
  "That was not a valid label. Reply with exactly one of the listed state labels, nothing else.";

/** Infer the patient state for one utterance, retrying once on malformed output. */
export async function classifyState(utterance: string, llm: LLMClient): Promise<StateLabel> {
  if (utterance === "") {
    throw new ClassificationError("cannot classify an empty utterance");
  }

  const first = (await llm.complete(CLASSIFIER_PROMPT, [{ role: "user", content: utterance }])).trim();
  if (isStateLabel(first)) {
    return first;
  }

  const second = (
    await llm.complete(CLASSIFIER_PROMPT, [
      { role: "user", content: utterance },
      { role: "assistant", content: first },
      { role: "user", content: RETRY_NUDGE },
    ])
  ).trim();
  if (isStateLabel(second)) {
    return second;
  }

  throw new ClassificationError(
    `state classification failed twice for utterance ${JSON.stringify(utterance)}: ` +
      `got ${JSON.stringify(first)} then ${JSON.stringify(second)}`,
  );
}
