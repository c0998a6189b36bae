/**
 * System prompt builder — embeds the frozen policy array into instructions
 * for the dialogue agent.
 */

import { STATE_LABELS } from "./labels.js";
import { validatePolicy, PolicyError, type PolicyArray } from "./policy.js";

// How the agent should turn each abstract action into an utterance.
const ACTION_REALIZATIONS: ReadonlyArray<readonly [string, string]> = [
  ["EasyPrompt", "ask a simple, concrete question about the session image that invites a yes/no or one-word answer"],
  ["ModeratePrompt", "ask an open question about the image that invites a short personal memory"],
  ["DifficultPrompt", "ask a reflective question connecting the image to the patient's own life story"],
  ["Repeat", "gently restate your previous question in the same words, slower and simpler"],
  ["Explain", "clarify what you meant, describing the image detail in plain language before asking again"],
  ["Comfort", "set the question aside and respond warmly to the patient's feelings; reassure, do not quiz"],
  ["GiveChoice", "offer the patient an explicit choice between continuing this topic and moving to another"],
];

/**
 * Build the deterministic system prompt for a session.
 *
 * The prompt spells out the state taxonomy, the full state-to-action table,
 * how to realize each action, and the hook (e.g. the photo) the session is
 * grounded in. Same policy and hook always give the same text.
 */
export function buildSystemPrompt(policy: PolicyArray, sessionHook: string): string {
  const checked = validatePolicy(policy);
  if (sessionHook.trim() === "") {
    throw new PolicyError("session hook must be a nonempty description");
  }

  const sections: string[] = [];

  sections.push(
    "You are a companion robot leading a reminiscence session with an older adult.",
    "Each of your turns must realize exactly one supportive action chosen by a fixed policy.",
    "",
  );

  sections.push("## Patient state taxonomy");
  sections.push(
    "A patient state is written RP_E_C:",
    "- RP, response relevance: NR (no response), IR (irrelevant response), RR (relevant response)",
    "- E, emotion: Neg (negative), Neu (neutral), Pos (positive)",
    "- C, confusion: Yes (confused), No (clear)",
    "The 18 states are: " + STATE_LABELS.join(", ") + ".",
    "",
  );

  sections.push("## Policy: state to action");
  for (const label of STATE_LABELS) {
    sections.push(`- ${label}: ${checked[label]}`);
  }
  sections.push("");

  sections.push("## Realizing actions");
  for (const [action, how] of ACTION_REALIZATIONS) {
    sections.push(`- ${action}: ${how}`);
  }
  sections.push("");

  sections.push("## Session hook");
  sections.push(sessionHook.trim());
  sections.push(
    "",
    "Keep every reply to one or two short sentences, warm in tone, and never mention states, actions, or the policy.",
  );

  return sections.join("\n");
}
