/**
 * Client-side input validation, mirroring the server's admissibility rules
 * exactly: a form submits if and only if the service would answer 200.
 * Parity is pinned by shared/validation-fixtures.json, which both test
 * suites run.
 */

export interface TableGroupInput {
  label?: string;
  bilateral: [number, number, number];
  unilateral: [number, number];
}

export interface TestInput {
  table: { groups: [TableGroupInput, TableGroupInput] };
  delta0: number;
  alpha: number;
}

export interface PowerInput {
  pi1: number;
  rho: number;
  delta1: number;
  m: number;
  n: number;
  alpha: number;
  replicates: number;
  seed: number;
}

export interface SampleSizeInput {
  pi1: number;
  rho: number;
  delta1: number;
  power: number;
  alpha: number;
  test: string;
  replicates: number;
  seed: number;
}

export const TEST_NAMES = ["lr", "wald", "score"] as const;

/** Smallest correlation keeping all cell probabilities of one group >= 0. */
export function rhoLowerBound(pi: number): number {
  return Math.max(-pi / (1 - pi), -(1 - pi) / pi);
}

function isInt(x: number): boolean {
  return Number.isFinite(x) && Math.floor(x) === x;
}

function checkCommonRates(pi1: number, rho: number, delta: number,
                          deltaName: string, errors: string[]): void {
  if (!Number.isFinite(pi1) || pi1 <= 0 || pi1 >= 1) {
    errors.push("pi1 must lie strictly between 0 and 1");
  }
  if (!Number.isFinite(delta) || delta <= -1 || delta >= 1) {
    errors.push(`${deltaName} must lie strictly between -1 and 1`);
  }
  if (!Number.isFinite(rho) || rho >= 1) {
    errors.push("rho must be below 1 (otherwise the one-response cell p1 goes negative)");
  }
  if (errors.length > 0) {
    return;
  }
  const pi2 = pi1 + delta;
  if (pi2 <= 0 || pi2 >= 1) {
    errors.push(`group-2 rate pi1 + ${deltaName} = ${pi2.toPrecision(6)} must lie strictly between 0 and 1`);
    return;
  }
  for (const [g, pi] of [[1, pi1], [2, pi2]] as const) {
    if (rho < -pi / (1 - pi)) {
      errors.push(`group-${g} both-respond cell p2 would be negative: rho must be >= ${(-pi / (1 - pi)).toPrecision(6)}`);
    } else if (rho < -(1 - pi) / pi) {
      errors.push(`group-${g} none-respond cell p0 would be negative: rho must be >= ${(-(1 - pi) / pi).toPrecision(6)}`);
    }
  }
}

function checkAlpha(alpha: number, errors: string[]): void {
  if (!Number.isFinite(alpha) || alpha < 0 || alpha > 1) {
    errors.push("alpha must lie in [0, 1]");
  }
}

function checkSimSizes(m: number, n: number, replicates: number, seed: number,
                       errors: string[]): void {
  if (!isInt(m) || m < 0) {
    errors.push("m (bilateral subjects per group) must be a non-negative integer");
  }
  if (!isInt(n) || n < 0) {
    errors.push("n (unilateral subjects per group) must be a non-negative integer");
  }
  if (isInt(m) && isInt(n) && 2 * m + n < 1) {
    errors.push("each group needs at least one subject (m and n cannot both be 0)");
  }
  if (!isInt(replicates) || replicates < 1) {
    errors.push("replicates must be a positive integer");
  }
  if (!isInt(seed)) {
    errors.push("seed must be an integer");
  }
}

export function validateTest(input: TestInput): string[] {
  const errors: string[] = [];
  const groups = input.table?.groups;
  if (!groups || groups.length !== 2) {
    errors.push("exactly two groups are required");
    return errors;
  }
  groups.forEach((g, i) => {
    const counts = [...g.bilateral, ...g.unilateral];
    if (g.bilateral.length !== 3 || g.unilateral.length !== 2) {
      errors.push(`group ${i + 1} needs 3 bilateral and 2 unilateral counts`);
      return;
    }
    if (counts.some((c) => !isInt(c) || c < 0)) {
      errors.push(`group ${i + 1} counts must be non-negative integers`);
      return;
    }
    const organs = 2 * (g.bilateral[0] + g.bilateral[1] + g.bilateral[2])
      + g.unilateral[0] + g.unilateral[1];
    if (organs === 0) {
      errors.push(`group ${i + 1} has no observed organs`);
    }
  });
  if (!Number.isFinite(input.delta0) || input.delta0 <= -1 || input.delta0 >= 1) {
    errors.push("delta0 must lie strictly between -1 and 1");
  }
  checkAlpha(input.alpha, errors);
  return errors;
}

export function validatePower(input: PowerInput): string[] {
  const errors: string[] = [];
  checkCommonRates(input.pi1, input.rho, input.delta1, "delta1", errors);
  checkSimSizes(input.m, input.n, input.replicates, input.seed, errors);
  checkAlpha(input.alpha, errors);
  return errors;
}

export function validateSampleSize(input: SampleSizeInput): string[] {
  const errors: string[] = [];
  checkCommonRates(input.pi1, input.rho, input.delta1, "delta1", errors);
  if (!Number.isFinite(input.power) || input.power <= 0 || input.power >= 1) {
    errors.push("target power must lie strictly between 0 and 1");
  }
  if (!(TEST_NAMES as readonly string[]).includes(input.test)) {
    errors.push(`test must be one of ${TEST_NAMES.join(", ")}`);
  }
  if (!isInt(input.replicates) || input.replicates < 1) {
    errors.push("replicates must be a positive integer");
  }
  if (!isInt(input.seed)) {
    errors.push("seed must be an integer");
  }
  checkAlpha(input.alpha, errors);
  return errors;
}
