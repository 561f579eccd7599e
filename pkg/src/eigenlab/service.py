"""Stateful session API for steering iterations interactively.

The protocol (documented in protocol.md at the repo root) exposes
create / step / rewind / read over HTTP with JSON bodies.  Sessions are
in-memory only, capped with LRU eviction; each session's operations are
serialised, distinct sessions proceed independently.

Two kinds of shift act on a session:

* the session's ShiftStrategy drives plain engine steps, identical to
  what the CLI run command produces (similarity-preserving, spectrum
  fixed);
* an explicit per-call ``mu`` override applies the shift to the object
  itself: the active block becomes step(active - mu*I), which is the
  hands-on "pancaking" move.  The accumulated frame offset is tracked per
  session and per deflated entry so original eigenvalues stay
  recoverable.
"""

from __future__ import annotations

import logging
import threading
import uuid
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from .dynamics import classify_fixed_point
from .ellipse import alignment_metrics, to_ellipse2d, to_ellipsoid
from .engine import (
    IterationState,
    RunConfig,
    ShiftStrategy,
    TraceRecord,
    _record,
    _shifted_step_transform,
    advance,
    deflate_if_converged,
    gershgorin_lower_bound,
    initial_state,
    make_psd,
    select_shift,
)
from .errors import EigenLabError, IndexOutOfRange, UnknownSession, ValidationError
from .linalg import check_sym_psd, check_symmetric, jacobi_eigen
from .serialize import dumps_canonical, matrix_from_obj, matrix_to_obj

log = logging.getLogger("eigenlab.service")

MAX_SESSIONS = 64
MAX_DIMENSION = 8
MAX_STEPS_PER_CALL = 1000


@dataclass(frozen=True)
class Snapshot:
    """Everything needed to restore a session to one history position."""

    state: IterationState
    offset: float  # stored active block = original-similar + offset * I
    peel_offsets: tuple[float, ...]  # offset at the time of each deflation


@dataclass
class Session:
    session_id: str
    config: RunConfig
    snapshots: list[Snapshot]
    records: list[TraceRecord]
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def current(self) -> Snapshot:
        return self.snapshots[-1]


def _new_record(state: IterationState, snapshot_matrix, mu, events) -> TraceRecord:
    return _record(state, snapshot_matrix, mu, events, 0.0)


def _record_summary(record: TraceRecord) -> dict:
    """View and alignment metrics of a record's snapshot matrix.

    Records themselves carry exactly the CLI trace fields (they must stay
    byte-identical to cmd_run output); the explorer needs server-computed
    metrics for ghost previews and for pancake/deflation readouts, so
    those ride alongside in a parallel summary.
    """
    matrix = record.matrix
    n = matrix.shape[0] if matrix.size else 0
    view = None
    metrics = None
    if n == 2:
        e = to_ellipse2d(matrix)
        view = {"type": "ellipse2d", "a": e.a, "b": e.b, "theta": e.theta,
                "quadrantSign": e.quadrant_sign}
    elif n >= 3:
        ev = to_ellipsoid(matrix)
        view = {"type": "ellipsoid", "axes": list(ev.axes),
                "orientation": [[float(x) for x in row] for row in ev.orientation]}
    if n:
        met = alignment_metrics(matrix)
        metrics = {"offdiagNorm": met.offdiag_norm, "axisRatio": met.axis_ratio,
                   "eccentricityClass": met.eccentricity_class}
    return {"view": view, "metrics": metrics}


class SessionService:
    """Protocol logic, HTTP-free; the handler below is a thin shell."""

    def __init__(self, max_sessions: int = MAX_SESSIONS):
        self._sessions: OrderedDict[str, Session] = OrderedDict()
        self._registry_lock = threading.RLock()
        self._max_sessions = max_sessions

    def _get(self, session_id: str) -> Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise UnknownSession(f"no session {session_id!r}")
            self._sessions.move_to_end(session_id)
            return session

    def create_session(self, body: dict) -> dict:
        matrix_obj = body.get("matrix")
        if matrix_obj is None:
            raise ValidationError('request must carry a "matrix" field')
        matrix = matrix_from_obj(matrix_obj)
        if matrix.shape[0] > MAX_DIMENSION:
            raise ValidationError(
                f"interactive sessions are capped at {MAX_DIMENSION}x{MAX_DIMENSION}, "
                f"got {matrix.shape[0]}"
            )
        algorithm = body.get("algorithm", "qr")
        shift_text = body.get("shift", "none")
        if not isinstance(shift_text, str):
            raise ValidationError(f'"shift" must be a string, got {shift_text!r}')
        tol = body.get("tol", 1e-10)
        if not isinstance(tol, (int, float)) or isinstance(tol, bool):
            raise ValidationError(f'"tol" must be a number, got {tol!r}')
        auto_shift = bool(body.get("autoShift", False))
        config = RunConfig(tol=float(tol), shift=ShiftStrategy.parse(shift_text),
                           algorithm=algorithm)

        check_symmetric(matrix)
        offset = 0.0
        if auto_shift:
            matrix, offset = make_psd(matrix)
        matrix = check_sym_psd(matrix)

        state = initial_state(matrix, algorithm, validate=False)
        snapshot0 = state.active.copy()
        state = deflate_if_converged(state, config.tol)
        record = _new_record(state, snapshot0, 0.0, state.deflated)
        session = Session(
            session_id=uuid.uuid4().hex,
            config=config,
            snapshots=[Snapshot(state, offset, (offset,) * len(state.deflated))],
            records=[record],
        )
        with self._registry_lock:
            while len(self._sessions) >= self._max_sessions:
                evicted, _ = self._sessions.popitem(last=False)
                log.info("evicted least-recently-used session %s", evicted)
            self._sessions[session.session_id] = session
        return {"sessionId": session.session_id, "state": self._state_payload(session)}

    def step(self, session_id: str, body: dict) -> dict:
        session = self._get(session_id)
        count = body.get("count", 1)
        if not isinstance(count, int) or isinstance(count, bool) \
                or not (1 <= count <= MAX_STEPS_PER_CALL):
            raise ValidationError(f"count must be an integer in 1..{MAX_STEPS_PER_CALL}")
        mu = body.get("mu")
        if mu is not None:
            if not isinstance(mu, (int, float)) or isinstance(mu, bool):
                raise ValidationError(f'"mu" must be a number, got {mu!r}')
            mu = float(mu)
            if not np.isfinite(mu) or mu < 0.0:
                raise ValidationError("mu override must be a finite non-negative number")
        dry_run = bool(body.get("dryRun", False))
        algorithm = body.get("algorithm")
        if algorithm is not None:
            if not dry_run:
                raise ValidationError("algorithm override is only allowed on dry runs")
            if algorithm not in ("qr", "lr"):
                raise ValidationError(f"unknown algorithm {algorithm!r}")

        with session.lock:
            new_snapshots, new_records = self._advance(
                session, count, mu, algorithm or session.config.algorithm
            )
            if not dry_run:
                session.snapshots.extend(new_snapshots)
                session.records.extend(new_records)
            # A dry run reports the would-be records but the state payload
            # always reflects what is actually committed.
            return {
                "records": [rec.to_obj() for rec in new_records],
                "summaries": [_record_summary(rec) for rec in new_records],
                "state": self._state_payload(session),
            }

    def _advance(
        self, session: Session, count: int, mu: float | None, algorithm: str
    ) -> tuple[list[Snapshot], list[TraceRecord]]:
        """Compute ``count`` steps transactionally: nothing is committed here."""
        snap = session.current
        state, offset, peel_offsets = snap.state, snap.offset, list(snap.peel_offsets)
        snapshots: list[Snapshot] = []
        records: list[TraceRecord] = []
        for _ in range(count):
            if state.converged:
                state = advance(state, 0.0)
                records.append(_new_record(state, state.active.copy(), 0.0, ()))
                snapshots.append(Snapshot(state, offset, tuple(peel_offsets)))
                continue
            if mu is None:
                mu_used = select_shift(session.config.shift, state.active)
            else:
                lam_min = float(jacobi_eigen(state.active).eigenvalues[-1])
                if mu > lam_min + 1e-12 * state.scale:
                    raise ValidationError(
                        f"mu override {mu!r} exceeds the smallest eigenvalue "
                        f"{lam_min!r} of the active block; the object would leave "
                        "the PSD cone"
                    )
                mu_used = mu
            nxt, u = _shifted_step_transform(state.active, mu_used, algorithm)
            if mu is not None:
                # Object-level shift: keep the pancaked matrix itself.
                nxt = nxt - mu_used * np.eye(nxt.shape[0])
                offset -= mu_used
            accum = state.accum_q.copy()
            m = state.m
            accum[:, :m] = accum[:, :m] @ u
            state = replace(state, active=nxt, k=state.k + 1, accum_q=accum)
            snapshot_matrix = state.active.copy()
            before = len(state.deflated)
            state = deflate_if_converged(state, session.config.tol)
            events = state.deflated[before:]
            peel_offsets.extend([offset] * len(events))
            records.append(_new_record(state, snapshot_matrix, mu_used, events))
            snapshots.append(Snapshot(state, offset, tuple(peel_offsets)))
        return snapshots, records

    def rewind(self, session_id: str, body: dict) -> dict:
        session = self._get(session_id)
        k = body.get("k")
        if not isinstance(k, int) or isinstance(k, bool):
            raise ValidationError('rewind requires an integer "k"')
        with session.lock:
            if not (0 <= k < len(session.snapshots)):
                raise IndexOutOfRange(
                    f"k={k} outside history of length {len(session.snapshots)}"
                )
            del session.snapshots[k + 1:]
            del session.records[k + 1:]
            return {"state": self._state_payload(session)}

    def get_state(self, session_id: str) -> dict:
        session = self._get(session_id)
        with session.lock:
            return {
                "state": self._state_payload(session),
                "records": [rec.to_obj() for rec in session.records],
                "summaries": [_record_summary(rec) for rec in session.records],
            }

    def _state_payload(self, session: Session) -> dict:
        return self._payload_for(session, session.current)

    def _payload_for(self, session: Session, snap: Snapshot) -> dict:
        state = snap.state
        active = state.active
        assembled = self._assembled_current_frame(snap)
        estimates = self._eigenvalue_estimates(snap)
        # The view tracks the object being steered; once everything has
        # deflated the assembled diagonal is the final, axis-aligned shape.
        # Axes destroyed by pancaking render at length zero.
        view_matrix = active if state.m else assembled
        view = None
        metrics = None
        if view_matrix.shape[0] == 2:
            e = to_ellipse2d(view_matrix)
            view = {"type": "ellipse2d", "a": e.a, "b": e.b, "theta": e.theta,
                    "quadrantSign": e.quadrant_sign}
        elif view_matrix.shape[0] >= 3:
            ev = to_ellipsoid(view_matrix)
            view = {"type": "ellipsoid", "axes": list(ev.axes),
                    "orientation": [[float(x) for x in row] for row in ev.orientation]}
        if state.m:
            met = alignment_metrics(active)
            metrics = {"offdiagNorm": met.offdiag_norm, "axisRatio": met.axis_ratio,
                       "eccentricityClass": met.eccentricity_class}
        return {
            "sessionId": session.session_id,
            "algorithm": session.config.algorithm,
            "shift": str(session.config.shift),
            "n": state.n,
            "k": state.k,
            "converged": state.converged,
            "active": matrix_to_obj(active),
            "assembled": matrix_to_obj(assembled),
            "deflations": [[slot, float(v)] for slot, v in state.deflated],
            "eigenvalueEstimates": estimates,
            "muOffset": snap.offset,
            "gershgorinBound": max(0.0, gershgorin_lower_bound(active)) if state.m else 0.0,
            "fixedPointClass": classify_fixed_point(assembled, session.config.tol),
            "view": view,
            "metrics": metrics,
            "historyLength": len(session.snapshots),
        }

    def _assembled_current_frame(self, snap: Snapshot) -> np.ndarray:
        """Assembled matrix with every deflated entry re-expressed in the
        current frame, so ordering-based classification stays meaningful
        even after object-level shifts."""
        state = snap.state
        out = np.zeros((state.n, state.n))
        m = state.m
        if m:
            out[:m, :m] = state.active
        for (slot, value), peel in zip(state.deflated, snap.peel_offsets):
            out[slot, slot] = value - peel + snap.offset
        return out

    def _eigenvalue_estimates(self, snap: Snapshot) -> list[float]:
        """Original-frame eigenvalue estimates, descending."""
        values = [value - peel for (_, value), peel in zip(snap.state.deflated, snap.peel_offsets)]
        values.extend(float(d) - snap.offset for d in np.diag(snap.state.active))
        return sorted(values, reverse=True)


ERROR_STATUS = {
    "ValidationError": 400,
    "UnknownSession": 404,
    "IndexOutOfRange": 400,
    "SingularMatrix": 409,
}


def _error_obj(exc: EigenLabError) -> tuple[int, dict]:
    code = type(exc).__name__
    status = ERROR_STATUS.get(code, 400)
    return status, {"error": {"code": code, "message": str(exc)}}


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    service: SessionService = None  # injected by serve()

    def log_message(self, fmt, *args):  # one line per request, through logging
        log.info("%s %s", self.address_string(), fmt % args)

    def _send(self, status: int, obj: dict) -> None:
        body = (dumps_canonical(obj) + "\n").encode("ascii")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", 0) or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        import json

        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"request body is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ValidationError("request body must be a JSON object")
        return obj

    def _dispatch(self, method: str) -> None:
        parts = [p for p in self.path.split("?")[0].split("/") if p]
        try:
            if method == "POST" and parts == ["sessions"]:
                self._send(201, self.service.create_session(self._read_body()))
            elif method == "POST" and len(parts) == 3 and parts[0] == "sessions" \
                    and parts[2] == "step":
                self._send(200, self.service.step(parts[1], self._read_body()))
            elif method == "POST" and len(parts) == 3 and parts[0] == "sessions" \
                    and parts[2] == "rewind":
                self._send(200, self.service.rewind(parts[1], self._read_body()))
            elif method == "GET" and len(parts) == 2 and parts[0] == "sessions":
                self._send(200, self.service.get_state(parts[1]))
            else:
                self._send(404, {"error": {"code": "ValidationError",
                                           "message": f"no such endpoint: {method} {self.path}"}})
        except EigenLabError as exc:
            status, obj = _error_obj(exc)
            self._send(status, obj)
        except Exception as exc:  # keep the process alive on unexpected errors
            log.exception("unhandled error")
            self._send(500, {"error": {"code": "InternalError", "message": str(exc)}})

    def do_POST(self):
        self._dispatch("POST")

    def do_GET(self):
        self._dispatch("GET")

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()


def serve(host: str = "127.0.0.1", port: int = 8080,
          service: SessionService | None = None) -> ThreadingHTTPServer:
    """Bind and return the server; callers drive serve_forever()."""
    handler = type("BoundHandler", (_Handler,), {"service": service or SessionService()})
    return ThreadingHTTPServer((host, port), handler)
