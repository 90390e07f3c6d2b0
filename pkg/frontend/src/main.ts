/** Single-page UI wiring for the threshold-session explorer. */

import { ApiError, SessionApi } from "./api.js";
import { histogramSvg } from "./histogram.js";
import { SessionViewModel } from "./viewmodel.js";

const api = new SessionApi("");
const vm = new SessionViewModel(api);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

const inputBox = el<HTMLTextAreaElement>("pvalues-input");
const openBtn = el<HTMLButtonElement>("open-btn");
const advanceBtn = el<HTMLButtonElement>("advance-btn");
const stopBtn = el<HTMLButtonElement>("stop-btn");
const finalizeBtn = el<HTMLButtonElement>("finalize-btn");
const methodSelect = el<HTMLSelectElement>("method-select");
const errorBanner = el<HTMLDivElement>("error-banner");
const sessionPanel = el<HTMLDivElement>("session-panel");
const tauLabel = el<HTMLSpanElement>("tau-label");
const hiddenBadge = el<HTMLSpanElement>("hidden-badge");
const suggestionChip = el<HTMLSpanElement>("suggestion-chip");
const histogramBox = el<HTMLDivElement>("histogram-box");
const resultPanel = el<HTMLDivElement>("result-panel");
const transcriptBox = el<HTMLPreElement>("transcript-box");

function parsePValues(text: string): number[] {
  const values = text
    .split(/[\s,;]+/)
    .filter((t) => t.length > 0)
    .map(Number);
  if (values.length === 0 || values.some((v) => !Number.isFinite(v))) {
    throw new Error("enter numeric p-values separated by spaces or commas");
  }
  return values;
}

function showError(message: string): void {
  errorBanner.textContent = message;
  errorBanner.hidden = false;
}

function render(): void {
  errorBanner.hidden = true;
  if (!vm.hasSession()) {
    sessionPanel.hidden = true;
    return;
  }
  const s = vm.getState();
  sessionPanel.hidden = false;
  tauLabel.textContent = s.currentTau.toFixed(2);
  hiddenBadge.textContent = `${s.hiddenCount} of ${s.n} hidden`;
  const active = s.status === "active";
  advanceBtn.disabled = !active;
  stopBtn.disabled = !active;
  finalizeBtn.disabled = active;
  if (s.heuristicSuggestion !== null) {
    suggestionChip.hidden = false;
    suggestionChip.textContent = `heuristic: ${s.heuristicSuggestion}`;
    suggestionChip.className = `chip chip-${s.heuristicSuggestion}`;
  } else {
    suggestionChip.hidden = true;
  }
  histogramBox.innerHTML = histogramSvg(s.maskedHistogram);
  transcriptBox.textContent = s.transcript
    .map((t) => `${t.action.padEnd(8)} tau=${t.tau.toFixed(2)}`)
    .join("\n");
  if (s.finalization !== null) {
    const c = s.finalization.conditional;
    const u = s.finalization.unconditional;
    resultPanel.hidden = false;
    resultPanel.innerHTML =
      `<h3>${c.method}</h3>` +
      `<p>conditional (tau = ${c.tau}, ${c.n_used} selected): ` +
      `<strong>p = ${c.p_combined.toPrecision(3)}</strong></p>` +
      `<p>unconditional (tau = 1, all ${u.n_used}): ` +
      `<strong>p = ${u.p_combined.toPrecision(3)}</strong></p>`;
  } else {
    resultPanel.hidden = true;
  }
}

async function guard(action: () => Promise<unknown>): Promise<void> {
  try {
    await action();
    render();
  } catch (err) {
    render();
    if (err instanceof ApiError) {
      showError(`request failed (${err.status}): ${err.message}`);
    } else {
      showError(err instanceof Error ? err.message : String(err));
    }
  }
}

openBtn.addEventListener("click", () =>
  guard(() => vm.open({ pvalues: parsePValues(inputBox.value) })),
);
advanceBtn.addEventListener("click", () => guard(() => vm.advance()));
stopBtn.addEventListener("click", () => guard(() => vm.stop()));
finalizeBtn.addEventListener("click", () =>
  guard(() => vm.finalize(methodSelect.value)),
);

render();
