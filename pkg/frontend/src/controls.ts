/** Control panel: stepping, shift slider, deflate, timeline, readouts.
 *
 * Every readout value passes through displayNumber (verbatim payload
 * strings); controls are disabled while a request is in flight, so there
 * is a single in-flight request per session.
 */

import { displayNumber } from "./format.js";
import type { StatePayload, TraceRecord } from "./types.js";

export interface ControlCallbacks {
  onStep: (count: number) => void;
  onShiftCommit: (mu: number) => void;
  onShiftPreview: (mu: number) => void;
  onDeflate: () => void;
  onScrub: (k: number) => void;
}

export class ControlPanel {
  readonly root: HTMLElement;
  readonly stepButton: HTMLButtonElement;
  readonly step10Button: HTMLButtonElement;
  readonly deflateButton: HTMLButtonElement;
  readonly shiftSlider: HTMLInputElement;
  readonly shiftApply: HTMLButtonElement;
  readonly scrubber: HTMLInputElement;
  readonly readouts: Record<string, HTMLElement>;
  readonly branchBadge: HTMLElement;
  private sliderMax = 0;

  constructor(doc: Document, private callbacks: ControlCallbacks) {
    this.root = doc.createElement("div");
    this.root.setAttribute("data-role", "control-panel");

    this.stepButton = this.button(doc, "Step", "step");
    this.stepButton.addEventListener("click", () => this.callbacks.onStep(1));
    this.step10Button = this.button(doc, "Step ×10", "step10");
    this.step10Button.addEventListener("click", () => this.callbacks.onStep(10));
    this.deflateButton = this.button(doc, "Deflate", "deflate");
    this.deflateButton.addEventListener("click", () => this.callbacks.onDeflate());

    const sliderRow = doc.createElement("div");
    const sliderLabel = doc.createElement("label");
    sliderLabel.textContent = "shift μ";
    this.shiftSlider = doc.createElement("input");
    this.shiftSlider.type = "range";
    this.shiftSlider.min = "0";
    this.shiftSlider.max = "1000";
    this.shiftSlider.value = "0";
    this.shiftSlider.setAttribute("data-role", "shift-slider");
    this.shiftSlider.addEventListener("input", () =>
      this.callbacks.onShiftPreview(this.sliderMu()),
    );
    this.shiftApply = this.button(doc, "Apply shift", "shift-apply");
    this.shiftApply.addEventListener("click", () => this.callbacks.onShiftCommit(this.sliderMu()));
    sliderRow.append(sliderLabel, this.shiftSlider, this.shiftApply);

    this.scrubber = doc.createElement("input");
    this.scrubber.type = "range";
    this.scrubber.min = "0";
    this.scrubber.max = "0";
    this.scrubber.value = "0";
    this.scrubber.setAttribute("data-role", "scrubber");
    this.scrubber.addEventListener("change", () =>
      this.callbacks.onScrub(Number(this.scrubber.value)),
    );
    this.branchBadge = doc.createElement("span");
    this.branchBadge.setAttribute("data-role", "branch-badge");
    this.branchBadge.style.display = "none";
    this.branchBadge.textContent = "branched history";

    const table = doc.createElement("dl");
    this.readouts = {};
    for (const key of [
      "k", "theta", "axisRatio", "offdiagNorm", "eccentricityClass",
      "fixedPointClass", "eigenvalueEstimates", "muOffset", "shift", "error",
    ]) {
      const dt = doc.createElement("dt");
      dt.textContent = key;
      const dd = doc.createElement("dd");
      dd.setAttribute("data-role", `readout-${key}`);
      table.append(dt, dd);
      this.readouts[key] = dd;
    }

    this.root.append(
      this.stepButton, this.step10Button, this.deflateButton,
      sliderRow, this.scrubber, this.branchBadge, table,
    );
  }

  private button(doc: Document, label: string, role: string): HTMLButtonElement {
    const b = doc.createElement("button");
    b.textContent = label;
    b.setAttribute("data-role", role);
    return b;
  }

  private sliderMu(): number {
    return (Number(this.shiftSlider.value) / 1000) * this.sliderMax;
  }

  setBusy(busy: boolean): void {
    for (const el of [this.stepButton, this.step10Button, this.deflateButton,
                      this.shiftApply, this.shiftSlider, this.scrubber]) {
      el.disabled = busy;
    }
  }

  showError(message: string | null): void {
    this.readouts.error.textContent = message ?? "";
  }

  setBranched(branched: boolean): void {
    this.branchBadge.style.display = branched ? "" : "none";
  }

  update(state: StatePayload, records: TraceRecord[]): void {
    this.sliderMax = state.gershgorinBound;
    this.scrubber.max = String(records.length - 1);
    this.scrubber.value = String(records.length - 1);
    // Deflate maps to one strategy step: at a classified fixed point the
    // step leaves the matrix alone and the pending deflation fires.
    this.deflateButton.disabled = state.fixedPointClass === "NotFixed";

    this.readouts.k.textContent = displayNumber(state.k);
    const theta =
      state.view && state.view.type === "ellipse2d" ? state.view.theta : null;
    this.readouts.theta.textContent = displayNumber(theta);
    this.readouts.axisRatio.textContent = displayNumber(state.metrics?.axisRatio ?? null);
    this.readouts.offdiagNorm.textContent = displayNumber(state.metrics?.offdiagNorm ?? null);
    this.readouts.eccentricityClass.textContent = state.metrics?.eccentricityClass ?? "-";
    this.readouts.fixedPointClass.textContent = state.fixedPointClass;
    this.readouts.eigenvalueEstimates.textContent =
      state.eigenvalueEstimates.map(displayNumber).join(", ");
    this.readouts.muOffset.textContent = displayNumber(state.muOffset);
    this.readouts.shift.textContent = state.shift;
  }
}
