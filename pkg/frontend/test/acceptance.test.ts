/**
 * Offline policy-fidelity gate: with a mock client, the deployed dialogue
 * loop must reproduce the frozen policy exactly, with no network access.
 */
import { describe, it, expect, beforeAll, afterAll } from "vitest";
import { fileURLToPath } from "node:url";

import {
  MockLLM,
  STATE_LABELS,
  buildSystemPrompt,
  loadPolicyFile,
  runSession,
  validateTranscript,
  type StateLabel,
} from "../src/index.js";

const policy = loadPolicyFile(fileURLToPath(new URL("./fixtures/policy.json", import.meta.url)));
const HOOK = "A photo of Glacier Bay, ice cliffs over calm water.";

// deterministic PRNG so the 100 scripted sequences are reproducible
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const realFetch = globalThis.fetch;
beforeAll(() => {
  globalThis.fetch = (() => {
    throw new Error("network access attempted during offline acceptance run");
  }) as typeof fetch;
});
afterAll(() => {
  globalThis.fetch = realFetch;
});

describe("mock-driven policy fidelity", () => {
  it("system prompt contains all 18 state labels", () => {
    const prompt = buildSystemPrompt(policy, HOOK);
    for (const label of STATE_LABELS) {
      expect(prompt).toContain(label);
    }
  });

  it("chosen actions equal policy lookups on 100 random scripted sequences", async () => {
    for (let run = 0; run < 100; run++) {
      const rng = mulberry32(1000 + run);
      const length = 1 + Math.floor(rng() * 10);
      const states: StateLabel[] = [];
      const utterances: string[] = [];
      const mock = new MockLLM();
      for (let i = 0; i < length; i++) {
        const state = STATE_LABELS[Math.floor(rng() * STATE_LABELS.length)];
        states.push(state);
        utterances.push(`scripted line ${run}.${i}`);
        mock.when(utterances[i], state);
      }

      const transcript = await runSession(utterances, { policy, llm: mock, sessionHook: HOOK });

      const patientStates = transcript.turns
        .filter((t) => t.speaker === "patient")
        .map((t) => t.inferred_state);
      const agentActions = transcript.turns
        .filter((t) => t.speaker === "agent")
        .map((t) => t.chosen_action);
      expect(patientStates).toEqual(states);
      expect(agentActions).toEqual(states.map((s) => policy[s]));
      expect(transcript.ended_by).toBe("script-end");
      validateTranscript(JSON.parse(JSON.stringify(transcript)));
    }
  });
});
