/**
 * Shared label vocabulary for patient states and agent actions.
 *
 * Order matches the tabular workbench's encoding (response relevance,
 * then emotion, then confusion), so index i here is state index i there.
 */

export const STATE_LABELS = [
  "NR_Neg_No",
  "NR_Neg_Yes",
  "NR_Neu_No",
  "NR_Neu_Yes",
  "NR_Pos_No",
  "NR_Pos_Yes",
  "IR_Neg_No",
  "IR_Neg_Yes",
  "IR_Neu_No",
  "IR_Neu_Yes",
  "IR_Pos_No",
  "IR_Pos_Yes",
  "RR_Neg_No",
  "RR_Neg_Yes",
  "RR_Neu_No",
  "RR_Neu_Yes",
  "RR_Pos_No",
  "RR_Pos_Yes",
] as const;

export const ACTION_LABELS = [
  "EasyPrompt",
  "ModeratePrompt",
  "DifficultPrompt",
  "Repeat",
  "Explain",
  "Comfort",
  "GiveChoice",
] as const;

export type StateLabel = (typeof STATE_LABELS)[number];
export type ActionLabel = (typeof ACTION_LABELS)[number];

export function isStateLabel(value: unknown): value is StateLabel {
  return typeof value === "string" && (STATE_LABELS as readonly string[]).includes(value);
}

export function isActionLabel(value: unknown): value is ActionLabel {
  return typeof value === "string" && (ACTION_LABELS as readonly string[]).includes(value);
}
