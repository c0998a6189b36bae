/**
 * Session loop: patient utterance → state classification → policy lookup →
 * agent utterance realizing the chosen action → transcript entry.
 *
 * The loop never picks actions itself. With a mock client and a scripted
 * state sequence, the chosen actions are a pure function of the policy array.
 */

import { TransportError, type ChatMessage, type LLMClient } from "./client.js";
import { ClassificationError, classifyState } from "./classify.js";
import { buildSystemPrompt } from "./prompt.js";
import { validatePolicy, type PolicyArray } from "./policy.js";
import type { DialogueTurn, Transcript } from "./transcript.js";

export interface SessionOptions {
  policy: PolicyArray;
  llm: LLMClient;
  sessionHook: string;
  /** Maximum patient/agent exchanges; 0 yields an empty transcript. */
  maxTurns?: number;
}

function realizationRequest(utterance: string, state: string, action: string): ChatMessage {
  return {
    role: "user",
    content: `Patient: ${JSON.stringify(utterance)}\n[state ${state} -> respond with action ${action}]`,
  };
}

/**
 * Drive one session over the given patient utterances (an array, or any
 * iterable for interactive use) and return the transcript. A transport
 * failure or a twice-malformed classification aborts the session; whatever
 * was logged up to that point is kept.
 */
export async function runSession(
  utterances: Iterable<string> | AsyncIterable<string>,
  options: SessionOptions,
): Promise<Transcript> {
  const policy = validatePolicy(options.policy);
  const system = buildSystemPrompt(policy, options.sessionHook);
  const maxTurns = options.maxTurns ?? 50;
  if (!Number.isInteger(maxTurns) || maxTurns < 0) {
    throw new RangeError(`maxTurns must be a nonnegative integer, got ${maxTurns}`);
  }

  const turns: DialogueTurn[] = [];
  const history: ChatMessage[] = [];
  const transcript = (ended: Transcript["ended_by"]): Transcript => ({
    session_hook: options.sessionHook.trim(),
    turns,
    ended_by: ended,
  });

  let exchanges = 0;
  if (maxTurns === 0) {
    return transcript("max-turns");
  }

  for await (const utterance of utterances) {
    let state;
    try {
      state = await classifyState(utterance, options.llm);
    } catch (err) {
      if (err instanceof ClassificationError) {
        turns.push({ speaker: "patient", utterance, error: err.message });
        return transcript("classification-error");
      }
      if (err instanceof TransportError) {
        turns.push({ speaker: "patient", utterance, error: `transport failure: ${err.message}` });
        return transcript("transport-failure");
      }
      throw err;
    }
    turns.push({ speaker: "patient", utterance, inferred_state: state });

    const action = policy[state];
    history.push(realizationRequest(utterance, state, action));
    let reply: string;
    try {
      reply = await options.llm.complete(system, history);
    } catch (err) {
      if (err instanceof TransportError) {
        return transcript("transport-failure");
      }
      throw err;
    }
    history.push({ role: "assistant", content: reply });
    turns.push({ speaker: "agent", utterance: reply, chosen_action: action });

    exchanges += 1;
    if (exchanges >= maxTurns) {
      return transcript("max-turns");
    }
  }
  return transcript("script-end");
}
