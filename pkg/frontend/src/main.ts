/** DOM wiring for the calculator page. */

import {
  ApiError,
  NetworkError,
  submitPower,
  submitSampleSize,
  submitTest,
} from "./api.js";
import { SessionHistory } from "./history.js";
import {
  renderErrors,
  renderPowerResult,
  renderSampleSizeResult,
  renderTestResult,
} from "./render.js";
import {
  PowerInput,
  SampleSizeInput,
  TestInput,
  validatePower,
  validateSampleSize,
  validateTest,
} from "./validation.js";

type Mode = "test" | "power" | "samplesize";

const history = new SessionHistory();
let inFlight = false;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function num(id: string): number {
  const raw = el<HTMLInputElement>(id).value.trim();
  return raw === "" ? NaN : Number(raw);
}

function currentMode(): Mode {
  const checked = document.querySelector<HTMLInputElement>(
    'input[name="mode"]:checked');
  return (checked?.value ?? "test") as Mode;
}

function collectTestInput(): TestInput {
  return {
    table: {
      groups: [
        {
          label: el<HTMLInputElement>("g1-label").value || "group 1",
          bilateral: [num("g1-x0"), num("g1-x1"), num("g1-x2")],
          unilateral: [num("g1-y0"), num("g1-y1")],
        },
        {
          label: el<HTMLInputElement>("g2-label").value || "group 2",
          bilateral: [num("g2-x0"), num("g2-x1"), num("g2-x2")],
          unilateral: [num("g2-y0"), num("g2-y1")],
        },
      ],
    },
    delta0: num("delta0"),
    alpha: num("test-alpha"),
  };
}

function collectPowerInput(): PowerInput {
  return {
    pi1: num("pi1"),
    rho: num("rho"),
    delta1: num("delta1"),
    m: num("m"),
    n: num("n"),
    alpha: num("sim-alpha"),
    replicates: num("replicates"),
    seed: num("seed"),
  };
}

function collectSampleSizeInput(): SampleSizeInput {
  return {
    pi1: num("pi1"),
    rho: num("rho"),
    delta1: num("delta1"),
    power: num("target-power"),
    alpha: num("sim-alpha"),
    test: el<HTMLSelectElement>("which-test").value,
    replicates: num("replicates"),
    seed: num("seed"),
  };
}

function describeSubmission(mode: Mode): string {
  if (mode === "test") {
    return `test, delta0=${num("delta0")}`;
  }
  const base = `pi1=${num("pi1")}, rho=${num("rho")}, delta1=${num("delta1")}`;
  return mode === "power"
    ? `power, ${base}, m=${num("m")}, n=${num("n")}`
    : `sample size, ${base}`;
}

function refreshValidation(): string[] {
  const mode = currentMode();
  let errors: string[];
  if (mode === "test") {
    errors = validateTest(collectTestInput());
  } else if (mode === "power") {
    errors = validatePower(collectPowerInput());
  } else {
    errors = validateSampleSize(collectSampleSizeInput());
  }
  const box = el<HTMLDivElement>("validation");
  box.innerHTML = errors.length ? renderErrors(errors) : "";
  el<HTMLButtonElement>("submit").disabled = errors.length > 0 || inFlight;
  return errors;
}

function showModePanels(): void {
  const mode = currentMode();
  el("panel-table").hidden = mode !== "test";
  el("panel-sim").hidden = mode === "test";
  el("panel-power-only").hidden = mode !== "power";
  el("panel-size-only").hidden = mode !== "samplesize";
  refreshValidation();
}

function renderHistory(): void {
  const box = el<HTMLDivElement>("history");
  if (history.list().length === 0) {
    box.innerHTML = '<p class="muted">no submissions yet</p>';
    return;
  }
  box.innerHTML = history
    .list()
    .map(
      (entry, i) => `<details ${i === 0 ? "open" : ""}>
        <summary>${entry.at.toLocaleTimeString()} — ${entry.summary}</summary>
        <div class="panel">${entry.html}</div>
      </details>`)
    .join("\n");
}

async function submit(): Promise<void> {
  if (refreshValidation().length > 0 || inFlight) {
    return;
  }
  const mode = currentMode();
  const result = el<HTMLDivElement>("result");
  inFlight = true;
  el<HTMLButtonElement>("submit").disabled = true;
  result.innerHTML = '<p class="muted">computing…</p>';
  try {
    let html: string;
    if (mode === "test") {
      html = renderTestResult(await submitTest(collectTestInput()));
    } else if (mode === "power") {
      html = renderPowerResult(await submitPower(collectPowerInput()));
    } else {
      html = renderSampleSizeResult(await submitSampleSize(collectSampleSizeInput()));
    }
    result.innerHTML = html;
    history.add(mode, describeSubmission(mode), html);
    renderHistory();
  } catch (err) {
    if (err instanceof NetworkError) {
      result.innerHTML = `<p class="error">${err.message}</p>
        <button id="retry" type="button">retry</button>`;
      el<HTMLButtonElement>("retry").addEventListener("click", () => void submit());
    } else if (err instanceof ApiError) {
      result.innerHTML = `<p class="error">service rejected the request
        (HTTP ${err.status}): ${err.message}</p>`;
    } else {
      result.innerHTML = `<p class="error">unexpected failure: ${String(err)}</p>`;
    }
  } finally {
    inFlight = false;
    refreshValidation();
  }
}

export function init(): void {
  document
    .querySelectorAll<HTMLInputElement>('input[name="mode"]')
    .forEach((r) => r.addEventListener("change", showModePanels));
  document
    .querySelectorAll<HTMLInputElement>("#calculator input, #calculator select")
    .forEach((i) => i.addEventListener("input", () => void refreshValidation()));
  el<HTMLButtonElement>("submit").addEventListener("click", () => void submit());
  showModePanels();
  renderHistory();
}

if (typeof document !== "undefined" && document.getElementById("calculator")) {
  init();
}
