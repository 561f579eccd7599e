"""Deterministic dense small-matrix primitives.

Everything here is written out explicitly (no LAPACK dispatch) so that the
maps under study are bit-reproducible and their conventions are pinned:

* ``qr_decompose`` -- Householder reflections, post-normalised so that
  ``diag(R) >= 0``.  This makes the QR map deterministic and unique for
  nonsingular input.
* ``cholesky`` -- non-pivoted lower-triangular factorisation; a
  non-positive pivot is an error, never a silent semi-definite completion.
* ``jacobi_eigen`` -- cyclic Jacobi eigensolver, deliberately a different
  algorithm family from the iterations under study; it serves as the
  independent oracle for every spectral claim in the test suite.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NoConvergence, SingularMatrix, ValidationError

SYM_TOL = 1e-12
PSD_TOL = 1e-10
PIVOT_TOL = 1e-13
JACOBI_OFFDIAG_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


class QrFactors(NamedTuple):
    q: np.ndarray
    r: np.ndarray


class SpectralDecomp(NamedTuple):
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # column i pairs with eigenvalues[i]


def as_matrix(entries) -> np.ndarray:
    """Coerce to a square float64 array and check every entry is finite."""
    m = np.array(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"expected a square matrix of dimension >= 1, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix entries must be finite (no NaN/Inf)")
    return m


def scale_of(m: np.ndarray) -> float:
    """Scale used by every relative tolerance: max(1, largest |entry|)."""
    if m.size == 0:
        return 1.0
    return max(1.0, float(np.max(np.abs(m))))


def offdiag_norm(m: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part."""
    if m.size == 0:
        return 0.0
    off = m - np.diag(np.diag(m))
    return float(np.sqrt(np.sum(off * off)))


def check_symmetric(m: np.ndarray, tol: float = SYM_TOL) -> None:
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asym > tol * scale_of(m):
        raise ValidationError(
            f"matrix is not symmetric: max |a_ij - a_ji| = {asym:.3e} exceeds {tol:.1e} * scale"
        )


def check_sym_psd(m: np.ndarray, sym_tol: float = SYM_TOL, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Validate the symmetric-PSD contract; returns the array unchanged.

    Symmetry is checked entrywise; positive semi-definiteness via the Jacobi
    oracle with a small negative slack for round-off.
    """
    m = as_matrix(m)
    check_symmetric(m, sym_tol)
    eigenvalues, _ = jacobi_eigen(m)
    lam_min = float(eigenvalues[-1])
    if lam_min < -psd_tol * scale_of(m):
        raise ValidationError(
            f"matrix is not positive semi-definite: smallest eigenvalue {lam_min:.3e}"
        )
    return m


def qr_decompose(m) -> QrFactors:
    """Householder QR with the sign convention diag(R) >= 0.

    Columns whose below-diagonal part is exactly zero get the identity
    reflector, which defines the map on singular and degenerate input.
    Output is a deterministic function of the input bits.
    """
    a = as_matrix(m)
    n = a.shape[0]
    r = a.copy()
    q = np.eye(n)
    for j in range(n - 1):
        x = r[j:, j]
        sigma = float(np.dot(x[1:], x[1:]))
        if sigma == 0.0:
            continue
        alpha = math.sqrt(x[0] * x[0] + sigma)
        v = x.copy()
        v[0] = x[0] + alpha if x[0] >= 0.0 else x[0] - alpha
        beta = 2.0 / float(np.dot(v, v))
        r[j:, j:] -= np.outer(v, beta * (v @ r[j:, j:]))
        r[j + 1:, j] = 0.0
        q[:, j:] -= np.outer(beta * (q[:, j:] @ v), v)
    for i in range(n):
        if r[i, i] < 0.0:
            r[i, i:] = -r[i, i:]
            q[:, i] = -q[:, i]
    return QrFactors(q, r)


def cholesky(m) -> np.ndarray:
    """Lower-triangular L with L L^T = M, diag(L) > 0.

    Raises SingularMatrix when a pivot is <= PIVOT_TOL * scale; callers that
    need the factor of a semi-definite matrix must pre-shift.
    """
    a = as_matrix(m)
    check_symmetric(a)
    n = a.shape[0]
    scale = scale_of(a)
    lower = np.zeros_like(a)
    for i in range(n):
        for j in range(i + 1):
            s = a[i, j] - float(np.dot(lower[i, :j], lower[j, :j]))
            if i == j:
                if s <= PIVOT_TOL * scale:
                    raise SingularMatrix(
                        f"pivot {i} is {s:.3e}, not strictly positive; "
                        "matrix is singular or indefinite at working precision"
                    )
                lower[i, i] = math.sqrt(s)
            else:
                lower[i, j] = s / lower[j, j]
    return lower


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """One Jacobi rotation zeroing a[p, q], applied in place to a and v."""
    apq = a[p, q]
    app = a[p, p]
    aqq = a[q, q]
    diff = aqq - app
    if abs(apq) < 1e-36 * abs(diff):
        t = apq / diff
    else:
        theta = diff / (2.0 * apq)
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    # The rotation annihilates the (p, q) element analytically; the
    # Rutishauser diagonal updates are more accurate than the generic ones.
    a[p, p] = app - t * apq
    a[q, q] = aqq + t * apq
    a[p, q] = 0.0
    a[q, p] = 0.0

    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def jacobi_eigen(m) -> SpectralDecomp:
    """Full spectral decomposition of a symmetric matrix by cyclic Jacobi.

    Sweeps until the off-diagonal Frobenius norm is <= 1e-14 * scale.
    Eigenvalues come back sorted descending (ties keep original order) and
    each eigenvector column has its largest-magnitude component positive,
    so the oracle output is deterministic.
    """
    a = as_matrix(m)
    check_symmetric(a)
    n = a.shape[0]
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    scale = scale_of(a)
    threshold = JACOBI_OFFDIAG_TOL * scale
    sweeps = 0
    while offdiag_norm(a) > threshold:
        if sweeps == JACOBI_MAX_SWEEPS:
            raise NoConvergence(
                f"jacobi sweep budget ({JACOBI_MAX_SWEEPS}) exhausted at off-diagonal "
                f"norm {offdiag_norm(a):.3e}"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] != 0.0:
                    _jacobi_rotate(a, v, p, q)
        sweeps += 1

    diag = np.diag(a).copy()
    order = sorted(range(n), key=lambda i: (-diag[i], i))
    eigenvalues = diag[order]
    vectors = v[:, order]
    for i in range(n):
        col = vectors[:, i]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0.0:
            vectors[:, i] = -col
    return SpectralDecomp(eigenvalues, vectors)


def eigenvalues_2x2(m: np.ndarray) -> tuple[float, float]:
    """Closed-form eigenvalues of a symmetric 2x2, descending."""
    if m.shape != (2, 2):
        raise DimensionMismatch(f"need a 2x2 matrix, got {m.shape}")
    mean = 0.5 * (m[0, 0] + m[1, 1])
    half_gap = 0.5 * (m[0, 0] - m[1, 1])
    radius = math.hypot(half_gap, m[0, 1])
    return mean + radius, mean - radius
