import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import type { PowerResponse, TestResponse } from "../src/api.js";
import { fmt, renderPowerResult, renderTestResult } from "../src/render.js";

const here = dirname(fileURLToPath(import.meta.url));

function shared(name: string): any {
  return JSON.parse(readFileSync(join(here, "..", "shared", name), "utf-8"));
}

describe("test-mode panel shows exactly the service's numbers", () => {
  const response = shared("ome-test-response.json") as TestResponse;
  const html = renderTestResult(response);

  it("shows each statistic and p-value to 4 decimals", () => {
    for (const name of ["lr", "wald", "score"] as const) {
      const entry = response.tests[name]!;
      expect(html).toContain(`data-field="statistic">${entry.statistic.toFixed(4)}<`);
      expect(html).toContain(`data-field="p_value">${entry.p_value.toFixed(4)}<`);
    }
  });

  it("shows both fits' estimates verbatim", () => {
    for (const fit of [response.unconstrained, response.constrained]) {
      for (const field of ["delta", "pi1", "pi2", "rho"] as const) {
        expect(html).toContain(`data-field="${field}">${fit[field].toFixed(4)}<`);
      }
    }
  });

  it("matches the published example values", () => {
    expect(html).toContain("0.0293");
    expect(html).toContain("0.8641");
    expect(html).toContain("0.6482");
    expect(html).toContain("-0.0119");
  });

  it("keeps decisions in words, not recomputed numbers", () => {
    expect(html).toContain(">keep<");
    expect(html).not.toContain(">reject<");
  });
});

describe("power panel", () => {
  const response = shared("power-response-sample.json") as PowerResponse;
  const html = renderPowerResult(response);

  it("shows each rate and its Monte Carlo error verbatim", () => {
    for (const name of ["lr", "wald", "score"] as const) {
      const entry = response.tests[name];
      expect(html).toContain(`data-field="rate">${fmt(entry.rate)}<`);
      expect(html).toContain(`data-field="mc_se">${fmt(entry.mc_se)}<`);
    }
  });
});

describe("formatting", () => {
  it("renders finite numbers to 4 decimals and gaps as n/a", () => {
    expect(fmt(0.02930123)).toBe("0.0293");
    expect(fmt(null)).toBe("n/a");
    expect(fmt(Number.NaN)).toBe("n/a");
  });
});
