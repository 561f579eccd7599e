/** Interactive ellipse view rendered as inline SVG.
 *
 * Blue: the session's current ellipse (server view).  Red/green ghosts:
 * the next QR / LR step, fetched from the service as dry-run previews,
 * never computed client-side.  Drag handles sit on the axis tips; a
 * completed drag re-parameterises (a, b, theta) and asks the controller
 * for a fresh session.
 */

import {
  dragMajor,
  dragMinor,
  EllipseParams,
  hitTest,
  majorHandle,
  minorHandle,
} from "./ellipse.js";
import type { EllipseView, View, ViewPrefs } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const SIZE = 460;
const HALF = SIZE / 2;

export interface GhostViews {
  qr: View | null;
  lr: View | null;
}

export class EllipseCanvas {
  readonly svg: SVGSVGElement;
  private scale = 80; // pixels per unit, auto-fit unless axis-locked
  private dragging: "major" | "minor" | null = null;
  private dragParams: EllipseParams | null = null;
  private current: EllipseView | null = null;
  onEdit: ((params: EllipseParams) => void) | null = null;

  constructor(private doc: Document) {
    this.svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("viewBox", `0 0 ${SIZE} ${SIZE}`);
    this.svg.setAttribute("width", String(SIZE));
    this.svg.setAttribute("height", String(SIZE));
    this.svg.setAttribute("data-role", "ellipse-canvas");
    this.svg.addEventListener("pointerdown", (e) => this.onPointerDown(e as PointerEvent));
    this.svg.addEventListener("pointermove", (e) => this.onPointerMove(e as PointerEvent));
    this.svg.addEventListener("pointerup", () => this.onPointerUp());
    this.svg.addEventListener("pointerleave", () => this.onPointerUp());
  }

  /** Math coords (y up, origin centred) from a pointer event. */
  private toMath(event: PointerEvent): { x: number; y: number } {
    const rect = this.svg.getBoundingClientRect();
    const sx = rect.width > 0 ? SIZE / rect.width : 1;
    const px = (event.clientX - rect.left) * sx - HALF;
    const py = HALF - (event.clientY - rect.top) * sx;
    return { x: px / this.scale, y: py / this.scale };
  }

  private onPointerDown(event: PointerEvent): void {
    if (!this.current) return;
    const params = this.paramsOfCurrent();
    const p = this.toMath(event);
    const grab = 14 / this.scale;
    if (hitTest(p.x, p.y, majorHandle(params), grab)) {
      this.dragging = "major";
    } else if (hitTest(p.x, p.y, minorHandle(params), grab)) {
      this.dragging = "minor";
    } else {
      return;
    }
    this.dragParams = params;
    event.preventDefault();
  }

  private onPointerMove(event: PointerEvent): void {
    if (!this.dragging || !this.dragParams) return;
    const p = this.toMath(event);
    this.dragParams =
      this.dragging === "major"
        ? dragMajor(this.dragParams, p.x, p.y)
        : dragMinor(this.dragParams, p.x, p.y);
    this.renderDragPreview(this.dragParams);
  }

  private onPointerUp(): void {
    if (this.dragging && this.dragParams && this.onEdit) {
      this.onEdit(this.dragParams);
    }
    this.dragging = null;
    this.dragParams = null;
  }

  private paramsOfCurrent(): EllipseParams {
    const v = this.current as EllipseView;
    return { a: v.a, b: v.b, theta: v.theta };
  }

  render(view: View | null, ghosts: GhostViews, prefs: ViewPrefs): void {
    this.svg.textContent = "";
    this.current = view && view.type === "ellipse2d" ? view : null;
    const radii: number[] = [];
    for (const v of [view, ghosts.qr, ghosts.lr]) {
      if (v && v.type === "ellipse2d") radii.push(v.a);
      if (v && v.type === "ellipsoid" && v.axes.length) radii.push(v.axes[0]);
    }
    const radius = Math.max(...radii, 1e-12);
    if (!prefs.axisLock || !Number.isFinite(this.scale)) {
      this.scale = (0.42 * SIZE) / Math.max(radius, 1e-12);
    }

    const group = this.doc.createElementNS(SVG_NS, "g");
    group.setAttribute("transform", `translate(${HALF},${HALF}) scale(1,-1)`);
    this.svg.appendChild(group);
    this.axis(group, -HALF, 0, HALF, 0);
    this.axis(group, 0, -HALF, 0, HALF);

    if (prefs.showLrGhost && ghosts.lr) this.drawView(group, ghosts.lr, "#0a8f0a", "ghost-lr");
    if (prefs.showQrGhost && ghosts.qr) this.drawView(group, ghosts.qr, "#d42a2a", "ghost-qr");
    if (prefs.showInput && view) this.drawView(group, view, "#2148c0", "current");
    if (this.current) this.drawHandles(group, this.paramsOfCurrent());
  }

  private renderDragPreview(params: EllipseParams): void {
    const old = this.svg.querySelector('[data-role="drag-preview"]');
    if (old) old.remove();
    const group = this.svg.querySelector("g");
    if (!group) return;
    const preview = this.ellipseElement(params.a, params.b, params.theta, "#555555");
    preview.setAttribute("stroke-dasharray", "4 3");
    preview.setAttribute("data-role", "drag-preview");
    group.appendChild(preview);
  }

  private axis(parent: Element, x1: number, y1: number, x2: number, y2: number): void {
    const line = this.doc.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(x1));
    line.setAttribute("y1", String(y1));
    line.setAttribute("x2", String(x2));
    line.setAttribute("y2", String(y2));
    line.setAttribute("stroke", "#cccccc");
    parent.appendChild(line);
  }

  private ellipseElement(a: number, b: number, theta: number, color: string): SVGElement {
    const deg = (theta * 180) / Math.PI;
    if (b * this.scale < 0.5) {
      const line = this.doc.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(-a * this.scale));
      line.setAttribute("y1", "0");
      line.setAttribute("x2", String(a * this.scale));
      line.setAttribute("y2", "0");
      line.setAttribute("transform", `rotate(${deg})`);
      line.setAttribute("stroke", color);
      line.setAttribute("stroke-width", "2");
      return line;
    }
    const el = this.doc.createElementNS(SVG_NS, "ellipse");
    el.setAttribute("rx", String(a * this.scale));
    el.setAttribute("ry", String(b * this.scale));
    el.setAttribute("transform", `rotate(${deg})`);
    el.setAttribute("fill", "none");
    el.setAttribute("stroke", color);
    el.setAttribute("stroke-width", "2");
    return el;
  }

  private drawView(parent: Element, view: View, color: string, role: string): void {
    if (view.type === "ellipse2d") {
      const el = this.ellipseElement(view.a, view.b, view.theta, color);
      el.setAttribute("data-role", role);
      parent.appendChild(el);
      return;
    }
    // 3x3 sessions render a static projection of the principal sections.
    const axes = view.axes;
    const basis = view.orientation;
    const iso = [
      [1 / Math.sqrt(2), -1 / Math.sqrt(2), 0],
      [-1 / Math.sqrt(6), -1 / Math.sqrt(6), 2 / Math.sqrt(6)],
    ];
    const project = (v: number[]): [number, number] => [
      iso[0][0] * v[0] + iso[0][1] * v[1] + iso[0][2] * v[2],
      iso[1][0] * v[0] + iso[1][1] * v[1] + iso[1][2] * v[2],
    ];
    for (const [i, j] of [[0, 1], [0, 2], [1, 2]] as const) {
      const ui = project(basis.map((row) => row[i] * axes[i]));
      const uj = project(basis.map((row) => row[j] * axes[j]));
      const points: string[] = [];
      for (let t = 0; t <= 120; t += 1) {
        const angle = (2 * Math.PI * t) / 120;
        const x = (ui[0] * Math.cos(angle) + uj[0] * Math.sin(angle)) * this.scale;
        const y = (ui[1] * Math.cos(angle) + uj[1] * Math.sin(angle)) * this.scale;
        points.push(`${x},${y}`);
      }
      const poly = this.doc.createElementNS(SVG_NS, "polyline");
      poly.setAttribute("points", points.join(" "));
      poly.setAttribute("fill", "none");
      poly.setAttribute("stroke", color);
      poly.setAttribute("data-role", role);
      parent.appendChild(poly);
    }
  }

  private drawHandles(parent: Element, params: EllipseParams): void {
    for (const [pos, role] of [
      [majorHandle(params), "handle-major"],
      [minorHandle(params), "handle-minor"],
    ] as const) {
      const dot = this.doc.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(pos.x * this.scale));
      dot.setAttribute("cy", String(pos.y * this.scale));
      dot.setAttribute("r", "6");
      dot.setAttribute("fill", "#2148c0");
      dot.setAttribute("data-role", role);
      dot.setAttribute("style", "cursor: grab");
      parent.appendChild(dot);
    }
  }
}
