import { describe, it, expect } from "vitest";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { main } from "../src/cli.js";
import { validateTranscript } from "../src/index.js";

const POLICY = fileURLToPath(new URL("./fixtures/policy.json", import.meta.url));

function tempSession(): { script: string; mock: string; out: string } {
  const dir = mkdtempSync(join(tmpdir(), "dialogue-cli-"));
  const script = join(dir, "script.json");
  const mock = join(dir, "mock.json");
  writeFileSync(script, JSON.stringify(["hello there", "..."]));
  writeFileSync(mock, JSON.stringify({ classifications: { "hello there": "RR_Pos_No" } }));
  return { script, mock, out: join(dir, "transcript.json") };
}

describe("cli", () => {
  it("runs a scripted mock session end to end", async () => {
    const { script, mock, out } = tempSession();
    const code = await main(["--policy", POLICY, "--hook", "a lake photo", "--script", script, "--mock", mock, "--out", out]);
    expect(code).toBe(0);
    const transcript = validateTranscript(JSON.parse(readFileSync(out, "utf8")));
    expect(transcript.turns).toHaveLength(4);
    expect(transcript.ended_by).toBe("script-end");
  });

  it("prints the system prompt without running a session", async () => {
    const code = await main(["--policy", POLICY, "--hook", "a lake photo", "--print-prompt"]);
    expect(code).toBe(0);
  });

  it("fails usage without required flags", async () => {
    expect(await main([])).toBe(1);
    expect(await main(["--policy", POLICY])).toBe(1);
    expect(await main(["--unknown-flag"])).toBe(1);
    expect(await main(["--policy", POLICY, "--hook", "x", "--max-turns", "-2"])).toBe(1);
  });

  it("exits 2 on a broken policy file", async () => {
    const { script, mock } = tempSession();
    const dir = mkdtempSync(join(tmpdir(), "dialogue-cli-"));
    const bad = join(dir, "bad.json");
    writeFileSync(bad, JSON.stringify({ NR_Neg_No: "Comfort" }));
    expect(await main(["--policy", bad, "--hook", "x", "--script", script, "--mock", mock])).toBe(2);
  });

  it("exits 3 but writes the partial transcript when the session aborts", async () => {
    const { script, mock, out } = tempSession();
    writeFileSync(mock, JSON.stringify({ classifications: { "hello there": ["um", "er"] } }));
    const code = await main(["--policy", POLICY, "--hook", "x", "--script", script, "--mock", mock, "--out", out]);
    expect(code).toBe(3);
    const transcript = validateTranscript(JSON.parse(readFileSync(out, "utf8")));
    expect(transcript.ended_by).toBe("classification-error");
  });
});
