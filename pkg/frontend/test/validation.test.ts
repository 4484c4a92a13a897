import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import {
  rhoLowerBound,
  validatePower,
  validateSampleSize,
  validateTest,
} from "../src/validation.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixtures = JSON.parse(
  readFileSync(join(here, "..", "shared", "validation-fixtures.json"), "utf-8"));

function verdict(endpoint: string, payload: any): boolean {
  if (endpoint === "test") {
    return validateTest(payload).length === 0;
  }
  if (endpoint === "power") {
    return validatePower(payload).length === 0;
  }
  if (endpoint === "samplesize") {
    return validateSampleSize(payload).length === 0;
  }
  throw new Error(`unknown endpoint ${endpoint}`);
}

describe("validation parity with the service", () => {
  it("covers at least 20 shared cases", () => {
    expect(fixtures.cases.length).toBeGreaterThanOrEqual(20);
  });

  for (const c of fixtures.cases) {
    it(`${c.name} -> ${c.valid ? "accepted" : "rejected"}`, () => {
      expect(verdict(c.endpoint, c.payload)).toBe(c.valid);
    });
  }
});

describe("violated cells are named", () => {
  it("names the both-respond cell when rho is too negative", () => {
    const errors = validatePower({
      pi1: 0.1, rho: -0.5, delta1: 0.1, m: 20, n: 20,
      alpha: 0.05, replicates: 100, seed: 0,
    });
    expect(errors.join(" ")).toMatch(/p2 would be negative/);
  });

  it("names the none-respond cell on the mirrored side", () => {
    const errors = validatePower({
      pi1: 0.9, rho: -0.5, delta1: -0.1, m: 20, n: 20,
      alpha: 0.05, replicates: 100, seed: 0,
    });
    expect(errors.join(" ")).toMatch(/p0 would be negative/);
  });

  it("accepts the exact admissibility floor", () => {
    const pi1 = 0.3;
    const floor = Math.max(rhoLowerBound(pi1), rhoLowerBound(pi1 + 0.1));
    const errors = validatePower({
      pi1, rho: floor, delta1: 0.1, m: 20, n: 20,
      alpha: 0.05, replicates: 100, seed: 0,
    });
    expect(errors).toEqual([]);
  });
});
