"""One-step maps, shift selection, deflation, and full convergence runs.

The two iterations under study:

* QR step: factor M = QR, continue with RQ = Q^T M Q.
* LR (Cholesky) step: factor M = L L^T, continue with L^T L = L^{-1} M L.

Both preserve the spectrum; every diagonal PSD matrix is a fixed point.
Shifted variants factor M - mu*I and add mu*I back afterwards, so every
trace stays orthogonally similar to its starting matrix and eigenvalue
recovery needs no shift bookkeeping.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .ellipse import to_ellipse2d
from .errors import MaxItersExceeded, ShiftNotPancaking, SingularMatrix, ValidationError
from .linalg import (
    SpectralDecomp,
    as_matrix,
    check_sym_psd,
    check_symmetric,
    cholesky,
    jacobi_eigen,
    offdiag_norm,
    qr_decompose,
    scale_of,
)
from .serialize import matrix_to_obj

SHIFT_KINDS = ("none", "constant", "gershgorin", "wilkinson")


@dataclass(frozen=True)
class ShiftStrategy:
    """Per-iteration shift policy: none, a constant, or an adaptive rule."""

    kind: str = "none"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in SHIFT_KINDS:
            raise ValidationError(f"unknown shift kind {self.kind!r}; expected one of {SHIFT_KINDS}")
        if not math.isfinite(self.value):
            raise ValidationError("constant shift must be finite")

    @classmethod
    def parse(cls, text: str) -> "ShiftStrategy":
        """Parse the flat flag grammar: none | constant:<float> | gershgorin | wilkinson."""
        if text.startswith("constant:"):
            try:
                return cls("constant", float(text.split(":", 1)[1]))
            except ValueError as exc:
                raise ValidationError(f"bad constant shift {text!r}") from exc
        if text in ("none", "gershgorin", "wilkinson"):
            return cls(text)
        raise ValidationError(
            f"unknown shift {text!r}; expected none|constant:<float>|gershgorin|wilkinson"
        )

    def __str__(self) -> str:
        return f"constant:{self.value!r}" if self.kind == "constant" else self.kind


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-10  # per-row off-diagonal threshold, relative to scale(M0)
    max_iters: int = 10000
    shift: ShiftStrategy = field(default_factory=ShiftStrategy)
    algorithm: str = "qr"  # "qr" | "lr"
    trace_every: int = 1

    def __post_init__(self):
        if not (self.tol > 0.0):
            raise ValidationError("tol must be positive")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if self.trace_every < 1:
            raise ValidationError("trace_every must be >= 1")
        if self.algorithm not in ("qr", "lr"):
            raise ValidationError(f"unknown algorithm {self.algorithm!r}; expected qr or lr")


@dataclass(frozen=True)
class TraceRecord:
    """One trace line: the active block as the step saw it, plus diagnostics.

    ``matrix`` snapshots the active block before any deflation that the
    step triggered; ``deflations`` lists the (slot, eigenvalue) pairs that
    were peeled right after.  ``wall_clock`` is diagnostic only and is
    never serialised (trace bytes must be reproducible).
    """

    k: int
    matrix: np.ndarray
    offdiag: float
    angle2d: float | None
    shift: float
    deflations: tuple[tuple[int, float], ...]
    wall_clock: float = 0.0

    def to_obj(self) -> dict:
        return {
            "k": self.k,
            "matrix": matrix_to_obj(self.matrix),
            "offdiag": self.offdiag,
            "angle2d": self.angle2d,
            "shift": self.shift,
            "deflations": [[slot, float(v)] for slot, v in self.deflations],
        }


@dataclass(frozen=True)
class IterationState:
    """One point of the dynamical system.

    ``active`` is the still-iterating leading block (m x m, possibly
    empty); ``deflated`` holds (original slot, eigenvalue) pairs already
    peeled off; ``accum_q`` accumulates every similarity transform as an
    n x n orthogonal matrix with deflated coordinates frozen, so
    ``accum_q.T @ M0 @ accum_q`` always reconstructs the block assembly.
    """

    n: int
    active: np.ndarray
    k: int
    accum_q: np.ndarray
    deflated: tuple[tuple[int, float], ...]
    algorithm: str
    scale: float

    @property
    def m(self) -> int:
        return self.active.shape[0] if self.active.size else 0

    @property
    def converged(self) -> bool:
        return self.m == 0

    def assembled(self) -> np.ndarray:
        """Full n x n matrix: active block plus deflated diagonal entries."""
        out = np.zeros((self.n, self.n))
        m = self.m
        if m:
            out[:m, :m] = self.active
        for slot, value in self.deflated:
            out[slot, slot] = value
        return out


def initial_state(m0, algorithm: str = "qr", validate: bool = True) -> IterationState:
    mat = check_sym_psd(m0) if validate else as_matrix(m0)
    n = mat.shape[0]
    return IterationState(
        n=n,
        active=mat.copy(),
        k=0,
        accum_q=np.eye(n),
        deflated=(),
        algorithm=algorithm,
        scale=scale_of(mat),
    )


def _is_diagonal(m: np.ndarray) -> bool:
    return bool(np.all(m == np.diag(np.diag(m))))


def _symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def _qr_step_transform(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q, r = qr_decompose(m)
    return _symmetrize(r @ q), q


def _lr_step_transform(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cholesky-LR step plus the orthogonal transform connecting input to output.

    M = L L^T and the successor is L^T L.  The similarity by L is not
    orthogonal, so the accumulated transform uses the polar factor
    U = L (L^T L)^{-1/2}, for which U^T M U = L^T L exactly.
    """
    lower = cholesky(m)
    if _is_diagonal(m):
        # Diagonal matrices are exact fixed points; sqrt followed by
        # squaring would perturb the entries by one ulp.
        return m.copy(), np.eye(m.shape[0])
    nxt = _symmetrize(lower.T @ lower)
    eigenvalues, vectors = jacobi_eigen(nxt)
    inv_sqrt = vectors @ np.diag(1.0 / np.sqrt(eigenvalues)) @ vectors.T
    return nxt, lower @ inv_sqrt


def qr_step(m) -> np.ndarray:
    """One naive QR iteration: M -> RQ, orthogonally similar to M."""
    mat = as_matrix(m)
    check_symmetric(mat)
    nxt, _ = _qr_step_transform(mat)
    return nxt


def lr_step(m) -> np.ndarray:
    """One Cholesky-LR iteration: M -> L^T L; requires M positive definite."""
    mat = as_matrix(m)
    check_symmetric(mat)
    nxt, _ = _lr_step_transform(mat)
    return nxt


def _shifted_step_transform(
    m: np.ndarray, mu: float, algorithm: str
) -> tuple[np.ndarray, np.ndarray]:
    """Factor M - mu*I, step, add mu*I back; returns (successor, transform)."""
    if mu == 0.0:
        return (_qr_step_transform if algorithm == "qr" else _lr_step_transform)(m)
    shifted = m - mu * np.eye(m.shape[0])
    if algorithm == "qr":
        q, r = qr_decompose(shifted)
        nxt = _symmetrize(r @ q) + mu * np.eye(m.shape[0])
        return nxt, q
    stepped, u = _lr_step_transform(shifted)
    return stepped + mu * np.eye(m.shape[0]), u


def shifted_qr_step(m, mu: float) -> np.ndarray:
    """Shift-factor-unshift QR step: factor M - mu*I = QR, return RQ + mu*I.

    Spectrum is preserved for every mu.  When mu exceeds the smallest
    eigenvalue the intermediate has a negative axis and the ellipsoid
    picture of the shift breaks down; that is flagged with a
    ShiftNotPancaking warning but the computation proceeds.
    """
    mat = as_matrix(m)
    check_symmetric(mat)
    if not math.isfinite(mu):
        raise ValidationError("shift must be finite")
    if mu != 0.0:
        lam_min = float(jacobi_eigen(mat).eigenvalues[-1])
        if mu > lam_min + 1e-12 * scale_of(mat):
            warnings.warn(
                f"shift {mu!r} exceeds the smallest eigenvalue {lam_min!r}; "
                "the shifted intermediate is not an ellipsoid",
                ShiftNotPancaking,
                stacklevel=2,
            )
    nxt, _ = _shifted_step_transform(mat, mu, "qr")
    return nxt


def gershgorin_lower_bound(m: np.ndarray) -> float:
    """min_i (a_ii - sum_{j != i} |a_ij|); every eigenvalue is >= this."""
    mat = as_matrix(m)
    radii = np.sum(np.abs(mat), axis=1) - np.abs(np.diag(mat))
    return float(np.min(np.diag(mat) - radii))


def wilkinson_shift(block) -> float:
    """Eigenvalue of a symmetric 2x2 block closest to its corner entry.

    mu = c - sign(d) b^2 / (|d| + sqrt(d^2 + b^2)) with d = (a - c)/2 and
    sign(0) := +1.  The sign(d) dependence makes this map discontinuous
    across d = 0, which is exactly what the continuity probes target.
    """
    mat = as_matrix(block)
    if mat.shape != (2, 2):
        raise ValidationError(f"wilkinson shift needs a 2x2 block, got {mat.shape}")
    a, b, c = mat[0, 0], mat[0, 1], mat[1, 1]
    if b == 0.0:
        return float(c)
    delta = 0.5 * (a - c)
    sign = 1.0 if delta >= 0.0 else -1.0
    return float(c - sign * b * b / (abs(delta) + math.hypot(delta, b)))


def select_shift(strategy: ShiftStrategy, m) -> float:
    """Scalar shift for this iteration on the active block."""
    mat = as_matrix(m)
    if strategy.kind == "none":
        return 0.0
    if strategy.kind == "constant":
        return strategy.value
    if strategy.kind == "gershgorin":
        return max(0.0, gershgorin_lower_bound(mat))
    if mat.shape[0] == 1:
        return float(mat[0, 0])
    return wilkinson_shift(mat[-2:, -2:])


def make_psd(s) -> tuple[np.ndarray, float]:
    """Shift a symmetric matrix up to PSD: returns (S + mu0*I, mu0).

    mu0 = max(0, -gershgorin lower bound); callers subtract mu0 from the
    recovered eigenvalues.
    """
    mat = as_matrix(s)
    check_symmetric(mat)
    mu0 = max(0.0, -gershgorin_lower_bound(mat))
    if mu0 == 0.0:
        return mat.copy(), 0.0
    return mat + mu0 * np.eye(mat.shape[0]), mu0


def _last_row_offdiag(m: np.ndarray) -> float:
    if m.shape[0] <= 1:
        return 0.0
    return float(np.sqrt(np.sum(m[-1, :-1] ** 2)))


def deflate_if_converged(state: IterationState, tol: float) -> IterationState:
    """Peel converged trailing rows.

    While the off-diagonal norm of the last active row is <= tol * scale,
    record (slot, corner entry) and shrink; accum_q is left unchanged
    because the accumulated transform already aligned that axis.
    """
    active = state.active
    deflated = list(state.deflated)
    while active.size and _last_row_offdiag(active) <= tol * state.scale:
        m = active.shape[0]
        deflated.append((m - 1, float(active[m - 1, m - 1])))
        active = active[: m - 1, : m - 1].copy()
    if len(deflated) == len(state.deflated):
        return state
    return replace(state, active=active, deflated=tuple(deflated))


def advance(state: IterationState, mu: float) -> IterationState:
    """One step of the state's algorithm on the active block with shift mu.

    A converged (empty) state just ticks the iteration counter.  Raises
    SingularMatrix unchanged for LR on a non-positive-definite block.
    """
    if state.converged:
        return replace(state, k=state.k + 1)
    nxt, u = _shifted_step_transform(state.active, mu, state.algorithm)
    accum = state.accum_q.copy()
    m = state.m
    accum[:, :m] = accum[:, :m] @ u
    return replace(state, active=nxt, k=state.k + 1, accum_q=accum)


def _record(state: IterationState, snapshot: np.ndarray, mu: float,
            new_deflations: tuple[tuple[int, float], ...], wall: float) -> TraceRecord:
    angle = to_ellipse2d(snapshot).theta if snapshot.shape == (2, 2) else None
    return TraceRecord(
        k=state.k,
        matrix=snapshot,
        offdiag=offdiag_norm(snapshot),
        angle2d=angle,
        shift=mu,
        deflations=new_deflations,
        wall_clock=wall,
    )


def run(m0, cfg: RunConfig | None = None) -> tuple[list[TraceRecord], IterationState]:
    """Iterate to convergence: step, then deflate, until nothing is active.

    The k = 0 record snapshots the input before any deflation.  Later
    records are taken every cfg.trace_every steps, plus whenever a
    deflation fires and at the final step, so the trace always contains
    the events needed to replay eigenvalue extraction.
    """
    cfg = cfg or RunConfig()
    state = initial_state(m0, cfg.algorithm)
    if cfg.algorithm == "lr":
        cholesky(state.active)  # LR needs strictly positive-definite input
    snapshot0 = state.active.copy()
    state = deflate_if_converged(state, cfg.tol)
    trace = [_record(state, snapshot0, 0.0, state.deflated, 0.0)]
    while not state.converged:
        if state.k >= cfg.max_iters:
            raise MaxItersExceeded(
                f"no convergence after {cfg.max_iters} iterations "
                f"(active block {state.m}x{state.m}, off-diagonal "
                f"{offdiag_norm(state.active):.3e}); the iterate may be stalled "
                "near an unstable fixed point or tol may be too tight",
                trace=trace,
                state=state,
            )
        mu = select_shift(cfg.shift, state.active)
        t0 = time.perf_counter()
        state = advance(state, mu)
        wall = time.perf_counter() - t0
        snapshot = state.active.copy()
        before = len(state.deflated)
        state = deflate_if_converged(state, cfg.tol)
        events = state.deflated[before:]
        if state.k % cfg.trace_every == 0 or events or state.converged:
            trace.append(_record(state, snapshot, mu, events, wall))
    return trace, state


def reconstruct_eigensystem(final: IterationState, mu0: float = 0.0) -> SpectralDecomp:
    """Assemble eigenvalue/vector estimates from a finished state.

    Eigenvalues are the deflated entries plus any remaining active
    diagonal, sorted descending with mu0 (from make_psd) subtracted;
    eigenvector i is the matching accum_q column.  Near-multiple
    eigenvalues keep valid values but may carry inaccurate vectors.
    """
    pairs = list(final.deflated)
    for i in range(final.m):
        pairs.append((i, float(final.active[i, i])))
    pairs.sort(key=lambda p: (-p[1], p[0]))
    eigenvalues = np.array([v - mu0 for _, v in pairs])
    vectors = np.column_stack([final.accum_q[:, slot] for slot, _ in pairs])
    return SpectralDecomp(eigenvalues, vectors)
