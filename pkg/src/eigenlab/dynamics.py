"""Empirical verification of the iteration dynamics.

Each numbered observation about the 2D ellipse picture is pinned to one
testable predicate and swept over seeded samples; the axiom audit does the
same for the general fixed-point-iteration axioms (spectrum preservation,
convergence, diagonal fixed points, attractiveness), and the continuity
probe measures difference quotients to expose discontinuities of shifted
step maps.  Reports carry violating inputs so failures are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .ellipse import to_ellipse2d
from .engine import (
    RunConfig,
    ShiftStrategy,
    _shifted_step_transform,
    run,
    select_shift,
)
from .errors import MaxItersExceeded, SingularMatrix, ValidationError
from .linalg import jacobi_eigen, offdiag_norm, scale_of
from .sampling import rotated_diag
from .serialize import matrix_to_obj

OBSERVATION_IDS = tuple(range(1, 11))
TWO_BY_TWO_ONLY = frozenset({2, 3, 5, 6, 7, 8})

OBSERVATION_SUMMARIES = {
    1: "iteration converges for every sampled PSD matrix",
    2: "one step never increases the major-axis tilt",
    3: "one step preserves the sign of the off-diagonal entry",
    4: "exactly the diagonal matrices are fixed points",
    5: "descending-diagonal alignment is reached faster than from the swapped start",
    6: "escape from a near-ascending start slows as the start approaches it",
    7: "rotation per step shrinks as the axis ratio approaches 1",
    8: "rotation per step grows as the axis ratio approaches 0",
    9: "rescaling the matrix leaves the rotation angle unchanged",
    10: "one step preserves the semi-axis multiset (congruence)",
}

CONVERGENCE_BUDGET = 3000
CONVERGENCE_TOL = 1e-8  # relative to scale, like RunConfig.tol


@dataclass
class ObservationReport:
    observation_id: int
    samples_tested: int
    violations: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_obj(self) -> dict:
        return {
            "observationId": self.observation_id,
            "summary": OBSERVATION_SUMMARIES.get(self.observation_id, ""),
            "samplesTested": self.samples_tested,
            "passed": self.passed,
            "violations": self.violations,
            "details": self.details,
        }


@dataclass
class ContinuityProbeResult:
    center: np.ndarray
    radius: float
    max_amplification: float
    witness_pair: tuple[np.ndarray, np.ndarray] | None
    pairs_tested: int

    def to_obj(self) -> dict:
        return {
            "center": matrix_to_obj(self.center),
            "radius": self.radius,
            "maxAmplification": self.max_amplification,
            "witnessPair": None
            if self.witness_pair is None
            else [matrix_to_obj(self.witness_pair[0]), matrix_to_obj(self.witness_pair[1])],
            "pairsTested": self.pairs_tested,
        }


@dataclass
class AxiomAuditReport:
    algorithm: str
    shift: str
    samples_tested: int
    axiom_passed: dict[int, bool]
    witnesses: dict[int, list[dict]]

    def to_obj(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "shift": self.shift,
            "samplesTested": self.samples_tested,
            "axioms": {str(k): v for k, v in sorted(self.axiom_passed.items())},
            "witnesses": {str(k): v for k, v in sorted(self.witnesses.items())},
        }


def classify_fixed_point(m, tol: float = 1e-10) -> str:
    """NotFixed / StableDescending / MarginalTies / UnstableOrdering.

    Fixed points of both iterations are diagonal; among those, strictly
    descending diagonals are the attractors, ties are marginal (the angle
    observable is undefined there), everything else is an unstable order.
    """
    mat = np.asarray(m, dtype=float)
    threshold = tol * scale_of(mat)
    if offdiag_norm(mat) > threshold:
        return "NotFixed"
    diag = np.diag(mat)
    gaps = diag[:-1] - diag[1:]
    if np.all(gaps > threshold):
        return "StableDescending"
    if np.any(np.abs(gaps) <= threshold):
        return "MarginalTies"
    return "UnstableOrdering"


def make_step_fn(algorithm: str = "qr", shift: ShiftStrategy | None = None) -> Callable:
    """Single-step map M -> M' with per-call shift selection.

    Uses the engine's internal path: no pancaking warnings, suitable for
    tight probe loops.
    """
    strategy = shift or ShiftStrategy()
    if algorithm not in ("qr", "lr"):
        raise ValidationError(f"unknown algorithm {algorithm!r}")

    def step(m: np.ndarray) -> np.ndarray:
        mu = select_shift(strategy, m)
        nxt, _ = _shifted_step_transform(np.asarray(m, dtype=float), mu, algorithm)
        return nxt

    return step


def project_psd(m: np.ndarray) -> np.ndarray:
    """Nearest-ish PSD matrix: clip negative eigenvalues to zero."""
    eigenvalues, vectors = jacobi_eigen(m)
    clipped = np.maximum(eigenvalues, 0.0)
    out = vectors @ np.diag(clipped) @ vectors.T
    return 0.5 * (out + out.T)


def _angle(m: np.ndarray) -> float:
    return to_ellipse2d(m).theta


def _iters_to_converge(m: np.ndarray, algorithm: str, tol_abs: float = 1e-8,
                       budget: int = CONVERGENCE_BUDGET) -> int | None:
    cfg = RunConfig(tol=tol_abs / scale_of(m), max_iters=budget, algorithm=algorithm)
    try:
        _, final = run(m, cfg)
    except MaxItersExceeded:
        return None
    return final.k


def _sorted_eigenvalues(m: np.ndarray) -> np.ndarray:
    return jacobi_eigen(m).eigenvalues


def _spectra_match(before: np.ndarray, after: np.ndarray, rel: float = 1e-9) -> bool:
    denom = np.maximum(np.abs(before), 1e-12 * max(1.0, float(np.max(np.abs(before)))))
    return bool(np.all(np.abs(after - before) <= rel * denom))


def check_observation(
    observation_id: int,
    algorithm: str,
    sampler: Callable[[], np.ndarray],
    count: int,
) -> ObservationReport:
    """Run one observation's predicate over ``count`` samples.

    The sampler must emit 2x2 matrices for the angle/quadrant observations
    (ids 2, 3, 5, 6, 7, 8); any dimension works for 1, 4, 9, 10.  LR
    requires positive-definite samples.
    """
    if observation_id not in OBSERVATION_IDS:
        raise ValidationError(f"observation id must be in 1..10, got {observation_id}")
    if algorithm not in ("qr", "lr"):
        raise ValidationError(f"unknown algorithm {algorithm!r}")
    step = make_step_fn(algorithm)
    report = ObservationReport(observation_id=observation_id, samples_tested=count)
    report.details["algorithm"] = algorithm

    for index in range(count):
        m = sampler()
        if observation_id in TWO_BY_TWO_ONLY and m.shape != (2, 2):
            raise ValidationError(
                f"observation {observation_id} needs 2x2 samples, got {m.shape}"
            )
        violation = _observation_predicate(observation_id, algorithm, step, m)
        if violation is not None:
            violation["sampleIndex"] = index
            violation["matrix"] = matrix_to_obj(m)
            report.violations.append(violation)
    return report


def _observation_predicate(obs_id: int, algorithm: str, step, m: np.ndarray) -> dict | None:
    """Returns a violation dict, or None when the sample satisfies the claim."""
    scale = scale_of(m)

    if obs_id == 1:
        k = _iters_to_converge(m, algorithm)
        if k is None:
            return {"measured": f"no convergence within {CONVERGENCE_BUDGET} iterations"}
        return None

    if obs_id == 2:
        theta0 = _angle(m)
        theta1 = _angle(step(m))
        if abs(theta0) <= 1e-12:
            ok = abs(theta1) <= 1e-12
        else:
            ok = abs(theta1) < abs(theta0)
        if not ok:
            return {"measured": {"theta0": theta0, "theta1": theta1}}
        return None

    if obs_id == 3:
        off0 = m[0, 1]
        if off0 == 0.0:
            return None
        off1 = step(m)[0, 1]
        if math.copysign(1.0, off0) != math.copysign(1.0, off1) or off1 == 0.0:
            return {"measured": {"offdiag0": float(off0), "offdiag1": float(off1)}}
        return None

    if obs_id == 4:
        moved = float(np.sqrt(np.sum((step(m) - m) ** 2)))
        if offdiag_norm(m) > 1e-12 * scale and moved <= 1e-12 * scale:
            return {"measured": {"stepDistance": moved, "kind": "non-diagonal fixed point"}}
        diag = np.diag(_sorted_eigenvalues(m))
        if not np.array_equal(step(diag), diag):
            return {"measured": {"kind": "diagonal matrix not fixed bitwise"}}
        return None

    if obs_id == 5:
        lam = _sorted_eigenvalues(m)
        if lam[0] - lam[1] <= 1e-6 * scale:
            return None  # near-tie: stability ordering is undefined
        eps = 0.1
        near_stable = rotated_diag(eps, (lam[0], lam[1]))
        near_unstable = rotated_diag(eps, (lam[1], lam[0]))
        k_stable = _iters_to_converge(near_stable, algorithm)
        k_unstable = _iters_to_converge(near_unstable, algorithm)
        if k_stable is None or k_unstable is None or k_stable >= k_unstable:
            return {"measured": {"itersFromStableSide": k_stable, "itersFromUnstableSide": k_unstable}}
        return None

    if obs_id == 6:
        lam = _sorted_eigenvalues(m)
        if lam[0] - lam[1] <= 1e-6 * scale:
            return None
        ascending = (lam[1], lam[0])
        k_far = _iters_to_converge(rotated_diag(1e-1, ascending), algorithm)
        k_near = _iters_to_converge(rotated_diag(1e-3, ascending), algorithm)
        if k_far is None or k_near is None or k_near <= k_far:
            return {"measured": {"itersEps1e-1": k_far, "itersEps1e-3": k_near}}
        return None

    if obs_id in (7, 8):
        lam = _sorted_eigenvalues(m)
        if lam[0] <= 0.0:
            return None
        ratio = max(1e-4, min(0.9, float(lam[1] / lam[0])))
        theta0 = min(1.35, max(0.15, abs(_angle(m))))
        other = 0.5 * (1.0 + ratio) if obs_id == 7 else 0.5 * ratio
        deltas = {}
        for r in (ratio, other):
            mat = rotated_diag(theta0, (1.0, r))
            deltas[r] = abs(_angle(step(mat)) - _angle(mat))
        ok = deltas[other] < deltas[ratio] if obs_id == 7 else deltas[other] > deltas[ratio]
        if not ok:
            return {"measured": {"theta0": theta0, "rotationByRatio": {repr(k): v for k, v in deltas.items()}}}
        return None

    if obs_id == 9:
        for lam, tol_angle in ((1e-3, 1e-13), (1e3, 1e-13), (0.0009765625, 0.0), (1024.0, 0.0)):
            stepped_scaled = step(lam * m)
            scaled_stepped = lam * step(m)
            err = float(np.max(np.abs(stepped_scaled - scaled_stepped)))
            if err > 1e-12 * scale_of(lam * m):
                return {"measured": {"lambda": lam, "matrixError": err}}
            if m.shape == (2, 2):
                da = abs(_angle(stepped_scaled) - _angle(step(m)))
                if da > tol_angle:
                    return {"measured": {"lambda": lam, "angleError": da}}
        return None

    if obs_id == 10:
        before = _sorted_eigenvalues(m)
        after = _sorted_eigenvalues(step(m))
        if not _spectra_match(before, after):
            return {"measured": {"before": before.tolist(), "after": after.tolist()}}
        return None

    raise ValidationError(f"observation id must be in 1..10, got {obs_id}")


def rotation_speed_profile(
    step_fn: Callable, ratios: Sequence[float], theta0: float
) -> list[tuple[float, float]]:
    """Angle change of one step on R(theta0) diag(1, r) R(theta0)^T per ratio.

    Asserts the profile is monotone non-increasing in r with strict
    decrease between distinct ratios: rounder ellipses rotate slower.
    """
    if not (0.0 < theta0 < 0.5 * math.pi):
        raise ValidationError("theta0 must lie strictly between 0 and pi/2")
    out = []
    for r in ratios:
        if not (0.0 < r <= 1.0):
            raise ValidationError(f"ratios must lie in (0, 1], got {r}")
        m = rotated_diag(theta0, (1.0, r))
        delta = abs(_angle(step_fn(m)) - _angle(m))
        out.append((float(r), float(delta)))
    for (r1, d1), (r2, d2) in zip(out, out[1:]):
        if (r1 < r2 and d1 <= d2) or (r1 > r2 and d1 >= d2):
            raise AssertionError(
                f"rotation speed not monotone decreasing in ratio: "
                f"ratio {r1} -> {d1}, ratio {r2} -> {d2}"
            )
    return out


def angle_update_law_check(
    seed: int = 0, count: int = 1000, tolerance: float = 1e-9
) -> ObservationReport:
    """Quantitative sharpening of the tilt observations for one QR step:
    tan(theta') = (lambda2/lambda1) * tan(theta).

    Confirmed against direct computation before being promoted to an
    acceptance invariant; the report carries the worst residual seen.
    Samples keep theta away from 0 and pi/2 where tan degenerates.
    """
    rng = np.random.default_rng(seed)
    step = make_step_fn("qr")
    report = ObservationReport(observation_id=2, samples_tested=count)
    worst = 0.0
    for index in range(count):
        lam1 = rng.uniform(0.5, 3.0)
        ratio = rng.uniform(0.02, 0.98)
        theta = rng.uniform(0.05, 1.4) * (1.0 if rng.random() < 0.5 else -1.0)
        m = rotated_diag(theta, (lam1, lam1 * ratio))
        theta0 = _angle(m)
        theta1 = _angle(step(m))
        residual = abs(math.tan(theta1) - ratio * math.tan(theta0))
        worst = max(worst, residual)
        if residual > tolerance:
            report.violations.append(
                {"sampleIndex": index, "matrix": matrix_to_obj(m),
                 "measured": {"residual": residual, "theta0": theta0, "theta1": theta1}}
            )
    report.details["law"] = "tan(theta') = (lambda2/lambda1) * tan(theta)"
    report.details["worstResidual"] = worst
    report.details["tolerance"] = tolerance
    return report


def continuity_probe(
    step_fn: Callable,
    center,
    radius: float,
    pairs: int,
    seed: int = 0,
) -> ContinuityProbeResult:
    """Max difference quotient ||f(X)-f(Y)||_F / ||X-Y||_F over sampled
    pairs in the PSD-projected ball around ``center``.

    Quotients that blow up as the radius shrinks witness a discontinuity
    of the step map at or near the center.
    """
    if radius <= 0.0:
        raise ValidationError("radius must be positive")
    if pairs < 1:
        raise ValidationError("pairs must be >= 1")
    center = np.asarray(center, dtype=float)
    rng = np.random.default_rng(seed)
    n = center.shape[0]
    best = 0.0
    witness = None

    def draw():
        d = rng.normal(size=(n, n))
        d = 0.5 * (d + d.T)
        norm = float(np.sqrt(np.sum(d * d)))
        d *= radius * rng.uniform(0.0, 1.0) / norm
        return project_psd(center + d)

    for _ in range(pairs):
        x, y = draw(), draw()
        dist = float(np.sqrt(np.sum((x - y) ** 2)))
        if dist == 0.0:
            continue
        amp = float(np.sqrt(np.sum((step_fn(x) - step_fn(y)) ** 2))) / dist
        if amp > best:
            best = amp
            witness = (x, y)
    return ContinuityProbeResult(
        center=center, radius=radius, max_amplification=best,
        witness_pair=witness, pairs_tested=pairs,
    )


# Canonical 2x2 fixed points probed in every audit: the descending
# (stable under the naive maps) and ascending (unstable) arrangements.
CANONICAL_FIXED_POINTS = (np.diag([2.0, 1.0]), np.diag([1.0, 2.0]))

ATTRACT_PERTURBATION = 1e-6
ATTRACT_RETURN_TOL = 1e-8
ATTRACT_SAME_POINT_TOL = 1e-4


def _attractiveness_probe(
    fixed_point: np.ndarray, algorithm: str, strategy: ShiftStrategy, rng: np.random.Generator
) -> dict | None:
    """Perturb a diagonal fixed point and iterate.

    Returns None when the iteration lands back on the probed point (it is
    attractive); otherwise a witness dict saying where it went.
    """
    n = fixed_point.shape[0]
    scale = scale_of(fixed_point)
    d = rng.normal(size=(n, n))
    d = 0.5 * (d + d.T)
    d *= ATTRACT_PERTURBATION * scale / float(np.sqrt(np.sum(d * d)))
    start = project_psd(fixed_point + d)
    cfg = RunConfig(
        tol=ATTRACT_RETURN_TOL / scale, max_iters=CONVERGENCE_BUDGET,
        shift=strategy, algorithm=algorithm,
    )
    try:
        _, final = run(start, cfg)
    except (MaxItersExceeded, SingularMatrix) as exc:
        return {
            "fixedPoint": matrix_to_obj(fixed_point),
            "outcome": f"perturbed iterate did not return to any fixed point ({type(exc).__name__})",
        }
    landed = final.assembled()
    distance = float(np.sqrt(np.sum((landed - fixed_point) ** 2)))
    if distance > ATTRACT_SAME_POINT_TOL * scale:
        return {
            "fixedPoint": matrix_to_obj(fixed_point),
            "outcome": "perturbed iterate converged to a different fixed point",
            "landedOn": matrix_to_obj(landed),
            "distance": distance,
        }
    return None


def axiom_audit(
    algorithm: str,
    sampler: Callable[[], np.ndarray],
    count: int,
    shift: ShiftStrategy | None = None,
    seed: int = 0,
) -> AxiomAuditReport:
    """Empirical pass over the fixed-point-iteration axioms.

    1. iterates a map on PSD matrices -- structural, true by construction;
    2. each step preserves the spectrum;
    3. every sampled run converges within budget;
    4. no non-diagonal (near-)fixed points show up, and detected limits
       are diagonal;
    5. perturbed fixed points return to the point they were perturbed
       from.  The probe set is each sample's descending and ascending
       eigenvalue arrangements plus the canonical 2x2 pair, so a
       non-attractive arrangement always gets witnessed.
    """
    strategy = shift or ShiftStrategy()
    step = make_step_fn(algorithm, strategy)
    rng = np.random.default_rng(seed)
    passed = {1: True, 2: True, 3: True, 4: True, 5: True}
    witnesses: dict[int, list[dict]] = {2: [], 3: [], 4: [], 5: []}

    probe_points: list[np.ndarray] = list(CANONICAL_FIXED_POINTS)
    for index in range(count):
        m = sampler()
        before = _sorted_eigenvalues(m)
        after = _sorted_eigenvalues(step(m))
        if not _spectra_match(before, after):
            passed[2] = False
            witnesses[2].append(
                {"sampleIndex": index, "matrix": matrix_to_obj(m),
                 "before": before.tolist(), "after": after.tolist()}
            )
        cfg = RunConfig(
            tol=CONVERGENCE_TOL / scale_of(m), max_iters=CONVERGENCE_BUDGET,
            shift=strategy, algorithm=algorithm,
        )
        try:
            _, final = run(m, cfg)
        except (MaxItersExceeded, SingularMatrix) as exc:
            passed[3] = False
            witnesses[3].append(
                {"sampleIndex": index, "matrix": matrix_to_obj(m), "error": type(exc).__name__}
            )
            continue
        landed = final.assembled()
        if offdiag_norm(landed) > CONVERGENCE_TOL * scale_of(m):
            passed[4] = False
            witnesses[4].append({"sampleIndex": index, "landedOn": matrix_to_obj(landed)})
        moved = float(np.sqrt(np.sum((step(m) - m) ** 2)))
        if offdiag_norm(m) > 1e-12 * scale_of(m) and moved <= 1e-12 * scale_of(m):
            passed[4] = False
            witnesses[4].append(
                {"sampleIndex": index, "matrix": matrix_to_obj(m),
                 "kind": "non-diagonal fixed point"}
            )
        lam = before
        probe_points.append(np.diag(lam))
        probe_points.append(np.diag(lam[::-1].copy()))

    for point in probe_points:
        witness = _attractiveness_probe(point, algorithm, strategy, rng)
        if witness is not None:
            passed[5] = False
            witnesses[5].append(witness)

    return AxiomAuditReport(
        algorithm=algorithm,
        shift=str(strategy),
        samples_tested=count,
        axiom_passed=passed,
        witnesses={k: v for k, v in witnesses.items() if v},
    )
