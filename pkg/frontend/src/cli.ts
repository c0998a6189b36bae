#!/usr/bin/env node
/**
 * Command line entry: run one dialogue session from a frozen policy.
 *
 * Exit codes: 0 session completed, 1 usage error, 2 bad input data,
 * 3 session aborted (partial transcript still written).
 */

import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";
import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import { createInterface } from "node:readline";

import { HttpLLMClient, type LLMClient } from "./client.js";
import { MockLLM } from "./mock.js";
import { buildSystemPrompt } from "./prompt.js";
import { loadPolicyFile, PolicyError } from "./policy.js";
import { runSession } from "./session.js";

const USAGE = `usage: reminq-dialogue --policy policy.json --hook TEXT [options]

options:
  --policy PATH      policy array JSON exported by the workbench (required)
  --hook TEXT        session hook description, e.g. what the photo shows
  --hook-file PATH   read the hook from a file instead
  --script PATH      JSON array of patient utterances; omit for interactive stdin
  --mock PATH        run offline against a scripted mock (see README)
  --max-turns N      stop after N exchanges (default 50)
  --out PATH         where to write the transcript JSON (default transcript.json)
  --print-prompt     print the system prompt and exit
`;

interface MockConfig {
  classifications?: Record<string, string | string[]>;
  silence_label?: string;
}

function buildMock(path: string): MockLLM {
  const config = JSON.parse(readFileSync(path, "utf8")) as MockConfig;
  const mock = new MockLLM({ silenceLabel: config.silence_label });
  for (const [utterance, replies] of Object.entries(config.classifications ?? {})) {
    mock.when(utterance, ...(Array.isArray(replies) ? replies : [replies]));
  }
  return mock;
}

function readScript(path: string): string[] {
  const parsed: unknown = JSON.parse(readFileSync(path, "utf8"));
  if (!Array.isArray(parsed) || parsed.some((u) => typeof u !== "string")) {
    throw new PolicyError(`script ${path} must be a JSON array of strings`);
  }
  return parsed as string[];
}

export async function main(argv: string[]): Promise<number> {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        policy: { type: "string" },
        hook: { type: "string" },
        "hook-file": { type: "string" },
        script: { type: "string" },
        mock: { type: "string" },
        "max-turns": { type: "string" },
        out: { type: "string", default: "transcript.json" },
        "print-prompt": { type: "boolean", default: false },
        help: { type: "boolean", default: false },
      },
    }).values;
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n${USAGE}`);
    return 1;
  }
  if (args.help) {
    process.stdout.write(USAGE);
    return 0;
  }
  if (!args.policy) {
    process.stderr.write(`--policy is required\n${USAGE}`);
    return 1;
  }
  const hook = args.hook ?? (args["hook-file"] ? readFileSync(args["hook-file"], "utf8") : undefined);
  if (!hook) {
    process.stderr.write(`--hook or --hook-file is required\n${USAGE}`);
    return 1;
  }
  const maxTurns = args["max-turns"] === undefined ? 50 : Number(args["max-turns"]);
  if (!Number.isInteger(maxTurns) || maxTurns < 0) {
    process.stderr.write("--max-turns must be a nonnegative integer\n");
    return 1;
  }

  try {
    const policy = loadPolicyFile(args.policy);
    if (args["print-prompt"]) {
      process.stdout.write(buildSystemPrompt(policy, hook) + "\n");
      return 0;
    }

    const llm: LLMClient = args.mock ? buildMock(args.mock) : new HttpLLMClient();
    const utterances: Iterable<string> | AsyncIterable<string> = args.script
      ? readScript(args.script)
      : createInterface({ input: process.stdin });

    const transcript = await runSession(utterances, { policy, llm, sessionHook: hook, maxTurns });
    writeFileSync(args.out, JSON.stringify(transcript, null, 2) + "\n");
    process.stderr.write(`wrote ${args.out} (${transcript.turns.length} turns, ${transcript.ended_by})\n`);
    return transcript.ended_by === "script-end" || transcript.ended_by === "max-turns" ? 0 : 3;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
}

const entry = process.argv[1];
if (entry !== undefined && import.meta.url === pathToFileURL(realpathSync(entry)).href) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
