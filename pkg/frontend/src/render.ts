/**
 * Result-panel rendering as pure HTML-string functions.
 *
 * Numbers shown are exactly the service's JSON values, formatted to four
 * decimal places for display; nothing is recomputed client-side.
 */

import type { PowerResponse, SampleSizeResponse, TestEntry, TestResponse } from "./api.js";

export const TEST_LABELS: Record<string, string> = {
  lr: "Likelihood ratio",
  wald: "Wald",
  score: "Score",
};

export function fmt(x: number | null | undefined, digits = 4): string {
  if (x === null || x === undefined || !Number.isFinite(x)) {
    return "n/a";
  }
  return x.toFixed(digits);
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function testRow(name: string, entry: TestEntry | null): string {
  const label = TEST_LABELS[name] ?? name;
  if (!entry) {
    return `<tr><td>${label}</td><td colspan="3" class="muted">unavailable</td></tr>`;
  }
  const verdict = entry.reject ? "reject" : "keep";
  return `<tr data-test="${name}">
    <td>${label}</td>
    <td class="num" data-field="statistic">${fmt(entry.statistic)}</td>
    <td class="num" data-field="p_value">${fmt(entry.p_value)}</td>
    <td class="${entry.reject ? "reject" : "keep"}">${verdict}</td>
  </tr>`;
}

export function renderTestResult(r: TestResponse): string {
  const u = r.unconstrained;
  const c = r.constrained;
  const warnings = r.warnings.length
    ? `<p class="warnings">${r.warnings.map(esc).join("; ")}</p>`
    : "";
  return `<h3>Tests of delta = ${fmt(r.delta0)} (alpha = ${fmt(r.alpha, 2)})</h3>
  <table class="results">
    <thead><tr><th>test</th><th>statistic</th><th>p-value</th>
      <th>decision</th></tr></thead>
    <tbody>
      ${testRow("lr", r.tests.lr)}
      ${testRow("wald", r.tests.wald)}
      ${testRow("score", r.tests.score)}
    </tbody>
  </table>
  <table class="estimates">
    <thead><tr><th></th><th>delta</th><th>pi1</th><th>pi2</th><th>rho</th></tr></thead>
    <tbody>
      <tr data-fit="unconstrained"><td>free fit</td>
        <td class="num" data-field="delta">${fmt(u.delta)}</td>
        <td class="num" data-field="pi1">${fmt(u.pi1)}</td>
        <td class="num" data-field="pi2">${fmt(u.pi2)}</td>
        <td class="num" data-field="rho">${fmt(u.rho)}</td></tr>
      <tr data-fit="constrained"><td>fixed-difference fit</td>
        <td class="num" data-field="delta">${fmt(c.delta)}</td>
        <td class="num" data-field="pi1">${fmt(c.pi1)}</td>
        <td class="num" data-field="pi2">${fmt(c.pi2)}</td>
        <td class="num" data-field="rho">${fmt(c.rho)}</td></tr>
    </tbody>
  </table>
  ${warnings}`;
}

export function renderPowerResult(r: PowerResponse): string {
  const rows = (["lr", "wald", "score"] as const)
    .map((name) => {
      const entry = r.tests[name];
      return `<tr data-test="${name}">
        <td>${TEST_LABELS[name]}</td>
        <td class="num" data-field="rate">${fmt(entry.rate)}</td>
        <td class="num" data-field="mc_se">${fmt(entry.mc_se)}</td>
        <td class="num">${entry.nonconverged}</td>
      </tr>`;
    })
    .join("\n");
  return `<h3>Power against delta = 0 (${r.config.replicates} replicates)</h3>
  <table class="results">
    <thead><tr><th>test</th><th>power</th><th>MC std. error</th>
      <th>unavailable replicates</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

export function renderSampleSizeResult(r: SampleSizeResponse): string {
  return `<h3>Sample size</h3>
  <p class="headline">m = n = <strong data-field="sample_size">${r.sample_size}</strong>
  reaches ${fmt(r.target_power, 2)} power for the ${TEST_LABELS[r.test] ?? r.test} test.</p>`;
}

export function renderErrors(errors: string[]): string {
  return `<ul class="errors">${errors.map((e) => `<li>${esc(e)}</li>`).join("")}</ul>`;
}
