/**
 * Golden-master parity with the core package.
 *
 * The fixtures were produced by the Python implementation
 * (tools/make_fixtures.py); every replayed session step and every detection
 * report must reproduce the recorded outputs bit for bit.
 */
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { configFromJson, detectTokens, openSession } from "../src/index.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

function loadFixture(name: string): any {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8"));
}

interface SessionFixture {
  name: string;
  config: Record<string, unknown>;
  vocab_size: number;
  prompt: number[];
  steps: { logits: number[]; expected: number[]; token: number }[];
}

describe("process_logits golden parity", () => {
  const fixture = loadFixture("process_logits.json");
  const sessions: SessionFixture[] = fixture.sessions;

  it("covers 1000 steps", () => {
    const total = sessions.reduce((acc, s) => acc + s.steps.length, 0);
    expect(total).toBe(1000);
  });

  for (const sessionFixture of sessions) {
    it(`replays session ${sessionFixture.name} bit-exactly`, () => {
      const cfg = configFromJson(sessionFixture.config);
      const session = openSession(cfg, sessionFixture.vocab_size);
      const prefix = [...sessionFixture.prompt];
      for (const [stepIndex, step] of sessionFixture.steps.entries()) {
        const out = session.processLogits(prefix, step.logits);
        for (let i = 0; i < out.length; i++) {
          if (out[i] !== step.expected[i]) {
            throw new Error(
              `${sessionFixture.name} step ${stepIndex} logit ${i}: ` +
                `${out[i]} != ${step.expected[i]}`,
            );
          }
        }
        prefix.push(step.token);
      }
    });
  }
});

interface DetectFixture {
  config: Record<string, unknown>;
  vocab_size: number;
  tokens: number[];
  entropies: number[];
  expected: {
    scheme: string;
    tau: number | null;
    n_scored: number;
    weighted_green: number;
    z: number | null;
    decision: boolean;
    mode: string;
    error: string | null;
  };
}

describe("detect_tokens golden parity", () => {
  const cases: DetectFixture[] = loadFixture("detect_tokens.json").cases;

  it("covers 100 detections", () => {
    expect(cases.length).toBe(100);
  });

  it("reproduces every report bit-exactly", () => {
    for (const [index, c] of cases.entries()) {
      const report = detectTokens(c.tokens, c.entropies, configFromJson(c.config), c.vocab_size);
      const where = `case ${index} (${c.expected.scheme})`;
      expect(report.scheme, where).toBe(c.expected.scheme);
      expect(report.tau, where).toBe(c.expected.tau);
      expect(report.nScored, where).toBe(c.expected.n_scored);
      expect(report.weightedGreen, where).toBe(c.expected.weighted_green);
      expect(report.z, where).toBe(c.expected.z);
      expect(report.decision, where).toBe(c.expected.decision);
      expect(report.mode, where).toBe(c.expected.mode);
      expect(report.error === null, where).toBe(c.expected.error === null);
    }
  });

  it("includes both error-state cases", () => {
    const withError = cases.filter((c) => c.expected.error !== null);
    expect(withError.length).toBeGreaterThanOrEqual(2);
    for (const c of withError) {
      expect(c.expected.decision).toBe(false);
      expect(c.expected.z).toBeNull();
    }
  });
});
