import { describe, it, expect } from "vitest";

import { validateTranscript } from "../src/index.js";

const base = {
  session_hook: "a photo",
  ended_by: "script-end",
  turns: [
    { speaker: "patient", utterance: "hi", inferred_state: "RR_Pos_No" },
    { speaker: "agent", utterance: "hello!", chosen_action: "EasyPrompt" },
  ],
};

function withTurns(turns: unknown[]): unknown {
  return { ...base, turns };
}

describe("validateTranscript", () => {
  it("accepts a well-formed transcript", () => {
    expect(validateTranscript(base).turns).toHaveLength(2);
  });

  it("rejects agent turns without a valid action", () => {
    expect(() => validateTranscript(withTurns([{ speaker: "agent", utterance: "x" }]))).toThrowError(
      /lacks a valid chosen_action/,
    );
    expect(() =>
      validateTranscript(withTurns([{ speaker: "agent", utterance: "x", chosen_action: "Wave" }])),
    ).toThrowError(/lacks a valid chosen_action/);
  });

  it("rejects patient turns with both or neither of state and error", () => {
    expect(() => validateTranscript(withTurns([{ speaker: "patient", utterance: "x" }]))).toThrowError(
      /exactly one of/,
    );
    expect(() =>
      validateTranscript(
        withTurns([{ speaker: "patient", utterance: "x", inferred_state: "RR_Pos_No", error: "boom" }]),
      ),
    ).toThrowError(/exactly one of/);
  });

  it("rejects field bleed between speakers", () => {
    expect(() =>
      validateTranscript(
        withTurns([{ speaker: "patient", utterance: "x", inferred_state: "RR_Pos_No", chosen_action: "Comfort" }]),
      ),
    ).toThrowError(/carries chosen_action/);
    expect(() =>
      validateTranscript(
        withTurns([{ speaker: "agent", utterance: "x", chosen_action: "Comfort", inferred_state: "RR_Pos_No" }]),
      ),
    ).toThrowError(/patient-only fields/);
  });

  it("rejects unknown speakers, bad endings, and non-object shells", () => {
    expect(() => validateTranscript(withTurns([{ speaker: "narrator", utterance: "x" }]))).toThrowError(
      /unknown speaker/,
    );
    expect(() => validateTranscript({ ...base, ended_by: "gave-up" })).toThrowError(/ended_by/);
    expect(() => validateTranscript({ ...base, session_hook: "" })).toThrowError(/session_hook/);
    expect(() => validateTranscript([])).toThrowError(/JSON object/);
  });
});
