/**
 * Policy array loading and validation.
 *
 * A policy array is the JSON exported by `reminq report --export-policy`:
 * a flat object mapping each of the 18 state labels to one action label.
 */

import { readFileSync } from "node:fs";

import { ACTION_LABELS, STATE_LABELS, isActionLabel, type ActionLabel, type StateLabel } from "./labels.js";

export type PolicyArray = Record<StateLabel, ActionLabel>;

export class PolicyError extends Error {}

/** Check an arbitrary parsed value and return it as a complete policy array. */
export function validatePolicy(raw: unknown): PolicyArray {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new PolicyError("policy must be a JSON object mapping state labels to action labels");
  }
  const entries = raw as Record<string, unknown>;

  const missing = STATE_LABELS.filter((label) => !(label in entries));
  if (missing.length > 0) {
    throw new PolicyError(`policy is missing states: ${missing.join(", ")}`);
  }

  for (const [key, value] of Object.entries(entries)) {
    if (!(STATE_LABELS as readonly string[]).includes(key)) {
      throw new PolicyError(`policy has unknown state label: ${key}`);
    }
    if (!isActionLabel(value)) {
      throw new PolicyError(
        `policy maps ${key} to ${JSON.stringify(value)}, expected one of: ${ACTION_LABELS.join(", ")}`,
      );
    }
  }

  return entries as PolicyArray;
}

export function loadPolicyFile(path: string): PolicyArray {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new PolicyError(`cannot read policy file ${path}: ${(err as Error).message}`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch (err) {
    throw new PolicyError(`policy file ${path} is not valid JSON: ${(err as Error).message}`);
  }
  return validatePolicy(parsed);
}
