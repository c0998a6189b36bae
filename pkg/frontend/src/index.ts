export { STATE_LABELS, ACTION_LABELS, isStateLabel, isActionLabel } from "./labels.js";
export type { StateLabel, ActionLabel } from "./labels.js";
export { validatePolicy, loadPolicyFile, PolicyError } from "./policy.js";
export type { PolicyArray } from "./policy.js";
export { buildSystemPrompt } from "./prompt.js";
export { classifyState, ClassificationError, CLASSIFIER_PROMPT } from "./classify.js";
export { HttpLLMClient, TransportError } from "./client.js";
export type { LLMClient, ChatMessage } from "./client.js";
export { MockLLM, SILENCE_TOKEN } from "./mock.js";
export { runSession } from "./session.js";
export type { SessionOptions } from "./session.js";
export { validateTranscript, TranscriptError } from "./transcript.js";
export type { DialogueTurn, Transcript, SessionEnd } from "./transcript.js";
