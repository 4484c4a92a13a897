/** Typed client for the calculator service; see docs/api.md for schemas. */

import type { PowerInput, SampleSizeInput, TestInput } from "./validation.js";

export interface TestEntry {
  statistic: number;
  p_value: number;
  reject: boolean;
}

export interface FitSummary {
  delta: number;
  pi1: number;
  pi2: number;
  rho: number;
  log_likelihood: number | null;
  converged: boolean;
  iterations: number;
  boundary: string;
  rho_identified: boolean;
}

export interface TestResponse {
  schema_version: string;
  delta0: number;
  alpha: number;
  tests: { lr: TestEntry | null; wald: TestEntry | null; score: TestEntry | null };
  unconstrained: FitSummary;
  constrained: FitSummary;
  warnings: string[];
}

export interface RateEntry {
  rate: number | null;
  mc_se: number | null;
  nonconverged: number;
}

export interface PowerResponse {
  schema_version: string;
  kind: string;
  config: Record<string, number>;
  tests: { lr: RateEntry; wald: RateEntry; score: RateEntry };
}

export interface SampleSizeResponse {
  schema_version: string;
  sample_size: number;
  test: string;
  target_power: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class NetworkError extends Error {}

async function post<T>(path: string, body: unknown): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  } catch (err) {
    throw new NetworkError(`could not reach the service: ${String(err)}`);
  }
  let payload: any = null;
  try {
    payload = await resp.json();
  } catch {
    /* non-JSON error body */
  }
  if (!resp.ok) {
    const detail = payload?.error
      ? payload.details
        ? `${payload.error}: ${payload.details
            .map((d: any) => `${d.field}: ${d.message}`)
            .join("; ")}`
        : String(payload.error)
      : `HTTP ${resp.status}`;
    throw new ApiError(resp.status, detail);
  }
  return payload as T;
}

export const submitTest = (input: TestInput) => post<TestResponse>("/api/test", input);
export const submitPower = (input: PowerInput) => post<PowerResponse>("/api/power", input);
export const submitSampleSize = (input: SampleSizeInput) =>
  post<SampleSizeResponse>("/api/samplesize", input);
