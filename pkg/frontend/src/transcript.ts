/** Transcript schema and validation. */

import { isActionLabel, isStateLabel, type ActionLabel, type StateLabel } from "./labels.js";

export interface DialogueTurn {
  speaker: "agent" | "patient";
  utterance: string;
  /** Patient turns: the state the classifier assigned. */
  inferred_state?: StateLabel;
  /** Agent turns: the action the policy chose. */
  chosen_action?: ActionLabel;
  /** Patient turns only: why classification failed, when it did. */
  error?: string;
}

export type SessionEnd = "script-end" | "max-turns" | "classification-error" | "transport-failure";

export interface Transcript {
  session_hook: string;
  turns: DialogueTurn[];
  ended_by: SessionEnd;
}

const SESSION_ENDS: readonly string[] = ["script-end", "max-turns", "classification-error", "transport-failure"];

export class TranscriptError extends Error {}

function checkTurn(turn: unknown, index: number): void {
  if (typeof turn !== "object" || turn === null) {
    throw new TranscriptError(`turn ${index} is not an object`);
  }
  const t = turn as Record<string, unknown>;
  if (typeof t.utterance !== "string") {
    throw new TranscriptError(`turn ${index} has no utterance`);
  }
  if (t.speaker === "agent") {
    if (!isActionLabel(t.chosen_action)) {
      throw new TranscriptError(`agent turn ${index} lacks a valid chosen_action`);
    }
    if (t.inferred_state !== undefined || t.error !== undefined) {
      throw new TranscriptError(`agent turn ${index} carries patient-only fields`);
    }
  } else if (t.speaker === "patient") {
    const hasState = isStateLabel(t.inferred_state);
    const hasError = typeof t.error === "string" && t.error !== "";
    if (hasState === hasError) {
      throw new TranscriptError(`patient turn ${index} needs exactly one of inferred_state or error`);
    }
    if (t.chosen_action !== undefined) {
      throw new TranscriptError(`patient turn ${index} carries chosen_action`);
    }
  } else {
    throw new TranscriptError(`turn ${index} has unknown speaker ${JSON.stringify(t.speaker)}`);
  }
}

/**
 * Validate a parsed transcript and return it typed. Every agent turn must
 * carry an action and every patient turn a state (or a recorded error).
 */
export function validateTranscript(raw: unknown): Transcript {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new TranscriptError("transcript must be a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  if (typeof obj.session_hook !== "string" || obj.session_hook === "") {
    throw new TranscriptError("transcript needs a nonempty session_hook");
  }
  if (!SESSION_ENDS.includes(obj.ended_by as string)) {
    throw new TranscriptError(`transcript ended_by must be one of ${SESSION_ENDS.join(", ")}`);
  }
  if (!Array.isArray(obj.turns)) {
    throw new TranscriptError("transcript turns must be an array");
  }
  obj.turns.forEach(checkTurn);
  return obj as unknown as Transcript;
}
