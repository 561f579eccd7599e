/** Explorer controller: wires the API client, the canvas, and the panel.
 *
 * State transitions happen exclusively through ApiClient calls (create /
 * step / rewind), so the UI adds no hidden transitions; ghost previews
 * are dry-run steps the service computes and discards.
 */

import { ApiClient, ApiError } from "./api.js";
import { EllipseCanvas, GhostViews } from "./canvas.js";
import { ControlPanel } from "./controls.js";
import { EllipseParams, matrixFromEllipse, normaliseParams } from "./ellipse.js";
import { defaultPrefs as makePrefs } from "./types.js";
import type { MatrixObj, UiSessionModel, View } from "./types.js";

export class ExplorerApp {
  model: UiSessionModel | null = null;
  private ghosts: GhostViews = { qr: null, lr: null };
  private busy = false;
  private branched = false;

  constructor(
    public api: ApiClient,
    public canvas: EllipseCanvas,
    public panel: ControlPanel,
  ) {
    canvas.onEdit = (params) => void this.editEllipse(params);
  }

  private async guard<T>(work: () => Promise<T>): Promise<T | null> {
    if (this.busy) return null;
    this.busy = true;
    this.panel.setBusy(true);
    this.panel.showError(null);
    try {
      return await work();
    } catch (error) {
      // Service errors render inline and never crash the session view.
      const message = error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : String(error);
      this.panel.showError(message);
      return null;
    } finally {
      this.busy = false;
      this.panel.setBusy(false);
    }
  }

  async createSession(matrix: MatrixObj, options: Parameters<ApiClient["createSession"]>[1] = {}):
      Promise<void> {
    await this.guard(async () => {
      const created = await this.api.createSession(matrix, options);
      this.branched = false;
      await this.reload(created.sessionId);
    });
  }

  /** Pull full state + history, refresh ghosts, redraw. */
  private async reload(sessionId: string): Promise<void> {
    const full = await this.api.getState(sessionId);
    this.model = {
      state: full.state,
      records: full.records,
      summaries: full.summaries,
      prefs: this.model?.prefs ?? makePrefs(),
    };
    await this.refreshGhosts();
    this.redraw();
  }

  /** Ghosts are dry-run single steps for both algorithms. */
  private async refreshGhosts(): Promise<void> {
    this.ghosts = { qr: null, lr: null };
    const model = this.model;
    if (!model || model.state.converged) return;
    for (const algorithm of ["qr", "lr"] as const) {
      try {
        const preview = await this.api.step(model.state.sessionId, {
          count: 1, dryRun: true, algorithm,
        });
        this.ghosts[algorithm] = preview.summaries[0]?.view ?? null;
      } catch {
        this.ghosts[algorithm] = null; // e.g. SingularMatrix for LR
      }
    }
  }

  redraw(): void {
    const model = this.model;
    if (!model) return;
    this.canvas.render(model.state.view, this.ghosts, model.prefs);
    this.panel.update(model.state, model.records);
    this.panel.setBranched(this.branched);
  }

  async step(count: number, mu?: number): Promise<void> {
    const model = this.model;
    if (!model) return;
    await this.guard(async () => {
      await this.api.step(model.state.sessionId, mu === undefined ? { count } : { count, mu });
      await this.reload(model.state.sessionId);
    });
  }

  /** Live pancake preview while the slider moves: dry-run with mu. */
  async previewShift(mu: number): Promise<void> {
    const model = this.model;
    if (!model || model.state.converged) return;
    try {
      const preview = await this.api.step(model.state.sessionId, {
        count: 1, mu, dryRun: true,
      });
      const view: View | null = preview.summaries[0]?.view ?? null;
      this.ghosts.qr = view;
      this.redraw();
    } catch {
      // slider beyond the PSD cone: drop the ghost, keep the session view
      this.ghosts.qr = null;
      this.redraw();
    }
  }

  async rewind(k: number): Promise<void> {
    const model = this.model;
    if (!model) return;
    await this.guard(async () => {
      await this.api.rewind(model.state.sessionId, k);
      this.branched = true;
      await this.reload(model.state.sessionId);
    });
  }

  /** Drag-to-edit never mutates history: it starts a fresh session. */
  async editEllipse(params: EllipseParams): Promise<void> {
    const model = this.model;
    const clean = normaliseParams(params);
    await this.createSession(matrixFromEllipse(clean), {
      algorithm: model?.state.algorithm ?? "qr",
      shift: model?.state.shift ?? "none",
    });
  }
}
