/** Bootstrap: mount the explorer against a running session service.
 *
 * The service URL comes from the ?api= query parameter and defaults to
 * http://127.0.0.1:8080 (start it with: eigenlab serve --port 8080).
 */

import { ApiClient } from "./api.js";
import { ExplorerApp } from "./app.js";
import { EllipseCanvas } from "./canvas.js";
import { ControlPanel } from "./controls.js";

const WORKED_EXAMPLE = { n: 2, data: [[1.5, 0.5], [0.5, 1.5]] };

function mount(): void {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? "http://127.0.0.1:8080";
  const api = new ApiClient(base);

  const canvasHost = document.getElementById("canvas-host")!;
  const panelHost = document.getElementById("panel-host")!;
  const form = document.getElementById("session-form") as HTMLFormElement;
  const matrixInput = document.getElementById("matrix-input") as HTMLTextAreaElement;
  const algoSelect = document.getElementById("algo-select") as HTMLSelectElement;
  const shiftSelect = document.getElementById("shift-select") as HTMLSelectElement;
  const autoShift = document.getElementById("auto-shift") as HTMLInputElement;
  const axisLock = document.getElementById("axis-lock") as HTMLInputElement;
  const ghostToggles = {
    input: document.getElementById("show-input") as HTMLInputElement,
    qr: document.getElementById("show-qr") as HTMLInputElement,
    lr: document.getElementById("show-lr") as HTMLInputElement,
  };

  const canvas = new EllipseCanvas(document);
  canvasHost.appendChild(canvas.svg);
  const panel = new ControlPanel(document, {
    onStep: (count) => void app.step(count),
    onShiftCommit: (mu) => void app.step(1, mu),
    onShiftPreview: (mu) => void app.previewShift(mu),
    onDeflate: () => void app.step(1),
    onScrub: (k) => void app.rewind(k),
  });
  panelHost.appendChild(panel.root);
  const app = new ExplorerApp(api, canvas, panel);

  const applyPrefs = () => {
    if (!app.model) return;
    app.model.prefs.axisLock = axisLock.checked;
    app.model.prefs.showInput = ghostToggles.input.checked;
    app.model.prefs.showQrGhost = ghostToggles.qr.checked;
    app.model.prefs.showLrGhost = ghostToggles.lr.checked;
    app.redraw();
  };
  axisLock.addEventListener("change", applyPrefs);
  for (const toggle of Object.values(ghostToggles)) {
    toggle.addEventListener("change", applyPrefs);
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    let matrix;
    try {
      matrix = JSON.parse(matrixInput.value);
    } catch (error) {
      panel.showError(`matrix is not valid JSON: ${error}`);
      return;
    }
    void app.createSession(matrix, {
      algorithm: algoSelect.value as "qr" | "lr",
      shift: shiftSelect.value,
      autoShift: autoShift.checked,
    });
  });

  matrixInput.value = JSON.stringify(WORKED_EXAMPLE);
  void app.createSession(WORKED_EXAMPLE);
}

mount();
