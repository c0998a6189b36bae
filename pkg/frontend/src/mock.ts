/** Scriptable offline stand-in for the chat client. */

import { TransportError, type ChatMessage, type LLMClient } from "./client.js";
import { CLASSIFIER_PROMPT } from "./classify.js";

/** Utterance the mock treats as patient silence. */
export const SILENCE_TOKEN = "...";

export interface MockOptions {
  /** Label returned when the patient is silent; must stay in the NR family. */
  silenceLabel?: string;
}

/**
 * MockLLM answers classification calls from a scripted utterance→label table
 * and dialogue calls with numbered canned lines. Classifying an utterance
 * nobody scripted is a test bug, so it throws rather than guessing.
 */
export class MockLLM implements LLMClient {
  private readonly classifications = new Map<string, string[]>();
  private readonly silenceLabel: string;
  private calls = 0;
  private generated = 0;
  private failAt: number | null = null;

  constructor(options: MockOptions = {}) {
    this.silenceLabel = options.silenceLabel ?? "NR_Neu_No";
    if (!this.silenceLabel.startsWith("NR_")) {
      throw new Error(`silence label must be an NR_* state, got ${this.silenceLabel}`);
    }
  }

  /**
   * Script classification replies for an utterance. Successive calls consume
   * the replies in order; the last one repeats. Non-label strings are allowed
   * on purpose, to exercise the malformed-output path.
   */
  when(utterance: string, ...replies: string[]): this {
    if (replies.length === 0) {
      throw new Error("when() needs at least one scripted reply");
    }
    this.classifications.set(utterance, [...replies]);
    return this;
  }

  /** Make the n-th complete() call (1-based, counting every call) throw a TransportError. */
  failOnCall(n: number): this {
    this.failAt = n;
    return this;
  }

  async complete(system: string, messages: ChatMessage[]): Promise<string> {
    this.calls += 1;
    if (this.failAt !== null && this.calls >= this.failAt) {
      throw new TransportError("scripted transport failure");
    }

    if (system === CLASSIFIER_PROMPT) {
      const utterance = messages.find((m) => m.role === "user")?.content;
      if (utterance === undefined) {
        throw new Error("classification call carried no user message");
      }
      const queue = this.classifications.get(utterance);
      if (queue !== undefined) {
        return queue.length > 1 ? (queue.shift() as string) : queue[0];
      }
      if (utterance === SILENCE_TOKEN) {
        return this.silenceLabel;
      }
      throw new Error(`no mock classification registered for: ${utterance}`);
    }

    this.generated += 1;
    return `(scripted agent line ${this.generated})`;
  }
}
