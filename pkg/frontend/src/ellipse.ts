/** Pure geometry for the editable ellipse.
 *
 * The only matrix the client ever constructs is the input for a fresh
 * session, rebuilt from dragged (a, b, theta) parameters; reading
 * eigenvalues back out is always the server's job.
 */

import type { MatrixObj } from "./types.js";

export interface EllipseParams {
  a: number;
  b: number;
  theta: number;
}

/** Fold an angle into (-pi/2, pi/2]. */
export function foldAngle(theta: number): number {
  let t = theta;
  while (t > Math.PI / 2) t -= Math.PI;
  while (t <= -Math.PI / 2) t += Math.PI;
  return t;
}

/** R(theta) diag(a, b) R(theta)^T as a matrix object. */
export function matrixFromEllipse(params: EllipseParams): MatrixObj {
  const { a, b, theta } = params;
  const c = Math.cos(theta);
  const s = Math.sin(theta);
  const m00 = a * c * c + b * s * s;
  const m11 = a * s * s + b * c * c;
  const m01 = (a - b) * s * c;
  return { n: 2, data: [[m00, m01], [m01, m11]] };
}

/** Normalise dragged parameters: a dragged minor axis longer than the
 * major axis is still a valid ellipse, the labels just swap. */
export function normaliseParams(params: EllipseParams): EllipseParams {
  let { a, b, theta } = params;
  a = Math.max(0, a);
  b = Math.max(0, b);
  if (b > a) {
    [a, b] = [b, a];
    theta = foldAngle(theta + Math.PI / 2);
  }
  return { a, b, theta: foldAngle(theta) };
}

/** Handle positions in math coordinates (y up). */
export function majorHandle(params: EllipseParams): { x: number; y: number } {
  return {
    x: params.a * Math.cos(params.theta),
    y: params.a * Math.sin(params.theta),
  };
}

export function minorHandle(params: EllipseParams): { x: number; y: number } {
  return {
    x: -params.b * Math.sin(params.theta),
    y: params.b * Math.cos(params.theta),
  };
}

/** Dragging the major handle re-aims the major axis and sets its length. */
export function dragMajor(params: EllipseParams, x: number, y: number): EllipseParams {
  const length = Math.hypot(x, y);
  const theta = length > 0 ? foldAngle(Math.atan2(y, x)) : params.theta;
  return normaliseParams({ a: length, b: params.b, theta });
}

/** Dragging the minor handle only changes the minor length (projected). */
export function dragMinor(params: EllipseParams, x: number, y: number): EllipseParams {
  const ux = -Math.sin(params.theta);
  const uy = Math.cos(params.theta);
  const length = Math.abs(x * ux + y * uy);
  return normaliseParams({ a: params.a, b: length, theta: params.theta });
}

export function hitTest(
  px: number,
  py: number,
  target: { x: number; y: number },
  radius: number,
): boolean {
  return Math.hypot(px - target.x, py - target.y) <= radius;
}
