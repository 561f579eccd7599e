/** Wire types mirroring the session-service protocol (see ../protocol.md). */

export interface MatrixObj {
  n: number;
  data: number[][];
}

export interface EllipseView {
  type: "ellipse2d";
  a: number;
  b: number;
  theta: number;
  quadrantSign: number;
}

export interface EllipsoidView {
  type: "ellipsoid";
  axes: number[];
  orientation: number[][];
}

export type View = EllipseView | EllipsoidView;

export interface Metrics {
  offdiagNorm: number;
  axisRatio: number;
  eccentricityClass: "Circle" | "Generic" | "Pancake";
}

export type FixedPointClass =
  | "StableDescending"
  | "UnstableOrdering"
  | "MarginalTies"
  | "NotFixed";

export interface StatePayload {
  sessionId: string;
  algorithm: "qr" | "lr";
  shift: string;
  n: number;
  k: number;
  converged: boolean;
  active: MatrixObj;
  assembled: MatrixObj;
  deflations: [number, number][];
  eigenvalueEstimates: number[];
  muOffset: number;
  gershgorinBound: number;
  fixedPointClass: FixedPointClass;
  view: View | null;
  metrics: Metrics | null;
  historyLength: number;
}

export interface TraceRecord {
  k: number;
  matrix: MatrixObj;
  offdiag: number;
  angle2d: number | null;
  shift: number;
  deflations: [number, number][];
}

export interface RecordSummary {
  view: View | null;
  metrics: Metrics | null;
}

export interface CreateResponse {
  sessionId: string;
  state: StatePayload;
}

export interface StepResponse {
  records: TraceRecord[];
  summaries: RecordSummary[];
  state: StatePayload;
}

export interface GetResponse {
  state: StatePayload;
  records: TraceRecord[];
  summaries: RecordSummary[];
}

export interface ErrorBody {
  error: { code: string; message: string };
}

/** Client-side session model: server payloads plus view preferences.
 * Every displayed number comes from the payloads verbatim; the client
 * never re-derives eigenvalues. */
export interface UiSessionModel {
  state: StatePayload;
  records: TraceRecord[];
  summaries: RecordSummary[];
  prefs: ViewPrefs;
}

export interface ViewPrefs {
  axisLock: boolean; // keep the canvas scale fixed while stepping
  showInput: boolean;
  showQrGhost: boolean;
  showLrGhost: boolean;
}

export const defaultPrefs = (): ViewPrefs => ({
  axisLock: false,
  showInput: true,
  showQrGhost: true,
  showLrGhost: true,
});
