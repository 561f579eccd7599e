"""Seeded random PSD matrices for sweeps, audits, and tests.

Samples are built as Q diag(lambda) Q^T with Q drawn Haar-ish from the QR
factorisation of a Gaussian matrix, so eigenvalues and conditioning are
under direct control.  Everything is driven by numpy Generators seeded by
the caller; there is no hidden global randomness anywhere in the repo.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .linalg import qr_decompose


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, _ = qr_decompose(rng.normal(size=(n, n)))
    return q


def random_eigenvalues(
    rng: np.random.Generator,
    n: int,
    lam_range: tuple[float, float] = (0.1, 1.0),
    ratio_cap: float | None = None,
) -> np.ndarray:
    """Descending positive eigenvalues; ratio_cap bounds every consecutive
    ratio lambda_{i+1}/lambda_i, which bounds the slowest convergence mode."""
    lo, hi = lam_range
    if ratio_cap is None:
        lam = np.sort(rng.uniform(lo, hi, size=n))[::-1]
    else:
        lam = np.empty(n)
        lam[0] = rng.uniform(0.5 * (lo + hi), hi)
        for i in range(1, n):
            lam[i] = lam[i - 1] * rng.uniform(0.1, ratio_cap)
        lam = np.maximum(lam, 1e-6)
    return lam


def sample_psd(
    rng: np.random.Generator,
    n: int,
    lam_range: tuple[float, float] = (0.1, 1.0),
    ratio_cap: float | None = None,
) -> np.ndarray:
    lam = random_eigenvalues(rng, n, lam_range, ratio_cap)
    q = random_orthogonal(rng, n)
    m = q @ np.diag(lam) @ q.T
    return 0.5 * (m + m.T)


def psd_sampler(
    seed: int,
    dims: tuple[int, ...] = (2,),
    lam_range: tuple[float, float] = (0.1, 1.0),
    ratio_cap: float | None = 0.9,
) -> Callable[[], np.ndarray]:
    """Returns a zero-argument sampler cycling over the given dimensions."""
    rng = np.random.default_rng(seed)
    counter = {"i": 0}

    def draw() -> np.ndarray:
        n = dims[counter["i"] % len(dims)]
        counter["i"] += 1
        return sample_psd(rng, n, lam_range, ratio_cap)

    return draw


def rotation_2d(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotated_diag(theta: float, lam: tuple[float, ...] | np.ndarray) -> np.ndarray:
    """R(theta) diag(lam) R(theta)^T for 2x2, generalised via a Givens
    rotation in the (0, 1) plane for larger n."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[0]
    rot = np.eye(n)
    rot[:2, :2] = rotation_2d(theta)
    m = rot @ np.diag(lam) @ rot.T
    return 0.5 * (m + m.T)
