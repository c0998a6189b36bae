/** Minimal chat-completion client interface plus the HTTP implementation. */

export interface ChatMessage {
  role: "user" | "assistant";
  content: string;
}

export interface LLMClient {
  complete(system: string, messages: ChatMessage[]): Promise<string>;
}

/** Raised when the transport layer fails; sessions abort and keep the partial transcript. */
export class TransportError extends Error {}

export interface HttpClientOptions {
  apiKey?: string;
  baseUrl?: string;
  model?: string;
}

const DEFAULT_URL = "https://api.openai.com/v1/chat/completions";
const DEFAULT_MODEL = "gpt-4o-mini";

/**
 * OpenAI-compatible chat completion client.
 *
 * The key comes from REMINQ_DIALOGUE_API_KEY unless passed explicitly;
 * REMINQ_DIALOGUE_API_URL and REMINQ_DIALOGUE_MODEL override the endpoint
 * and model the same way.
 */
export class HttpLLMClient implements LLMClient {
  private readonly apiKey: string;
  private readonly baseUrl: string;
  private readonly model: string;

  constructor(options: HttpClientOptions = {}) {
    const key = options.apiKey ?? process.env.REMINQ_DIALOGUE_API_KEY;
    if (!key) {
      throw new Error("no API key: pass apiKey or set REMINQ_DIALOGUE_API_KEY");
    }
    this.apiKey = key;
    this.baseUrl = options.baseUrl ?? process.env.REMINQ_DIALOGUE_API_URL ?? DEFAULT_URL;
    this.model = options.model ?? process.env.REMINQ_DIALOGUE_MODEL ?? DEFAULT_MODEL;
  }

  async complete(system: string, messages: ChatMessage[]): Promise<string> {
    const body = {
      model: this.model,
      messages: [{ role: "system", content: system }, ...messages],
    };
    let response: Response;
    try {
      response = await fetch(this.baseUrl, {
        method: "POST",
        headers: {
          "content-type": "application/json",
          authorization: `Bearer ${this.apiKey}`,
        },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new TransportError(`request failed: ${(err as Error).message}`);
    }
    if (!response.ok) {
      throw new TransportError(`completion endpoint returned ${response.status}`);
    }
    const payload = (await response.json()) as {
      choices?: Array<{ message?: { content?: string } }>;
    };
    const content = payload.choices?.[0]?.message?.content;
    if (typeof content !== "string") {
      throw new TransportError("completion response carried no message content");
    }
    return content;
  }
}
