"""PSD matrix <-> ellipsoid correspondence.

A symmetric PSD matrix M maps to the origin-centred ellipsoid
{ M v : ||v|| = 1 }: semi-axis lengths are the eigenvalues, semi-axis
directions the eigenvectors.  These views are what the iteration traces
and the interactive explorer render.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .linalg import (
    as_matrix,
    eigenvalues_2x2,
    jacobi_eigen,
    offdiag_norm,
    scale_of,
)

# Angle treated as undefined (set to 0) when the off-diagonal entry is
# this small relative to scale; circles and diagonal matrices land here.
DIAGONAL_ANGLE_TOL = 1e-14

CIRCLE_RATIO = 0.99
PANCAKE_RATIO = 0.01


@dataclass(frozen=True)
class EllipseView2D:
    a: float  # major semi-axis length
    b: float  # minor semi-axis length
    theta: float  # major-axis angle, radians, in (-pi/2, pi/2]
    quadrant_sign: int  # sign of the off-diagonal entry


@dataclass(frozen=True)
class EllipsoidView:
    axes: tuple[float, ...]  # semi-axis lengths, descending
    orientation: np.ndarray  # orthogonal; column i pairs with axes[i]


@dataclass(frozen=True)
class AlignmentMetrics:
    offdiag_norm: float
    axis_ratio: float  # lambda_min / lambda_max, in [0, 1]
    eccentricity_class: str  # "Circle" | "Generic" | "Pancake"


def to_ellipse2d(m) -> EllipseView2D:
    """Closed-form 2x2 view; theta folds into (-pi/2, pi/2].

    Orientation is undefined for circles and diagonal matrices, so theta
    is pinned to 0 there; that pin is exactly where the angle observable
    is discontinuous.
    """
    mat = as_matrix(m)
    if mat.shape != (2, 2):
        raise DimensionMismatch(f"2x2 view requires a 2x2 matrix, got {mat.shape}")
    lam_hi, lam_lo = eigenvalues_2x2(mat)
    off = mat[0, 1]
    if abs(off) <= DIAGONAL_ANGLE_TOL * scale_of(mat):
        theta = 0.0
    else:
        theta = 0.5 * math.atan2(2.0 * off, mat[0, 0] - mat[1, 1])
        if theta <= -0.5 * math.pi:
            theta += math.pi
    sign = 1 if off > 0.0 else (-1 if off < 0.0 else 0)
    return EllipseView2D(a=lam_hi, b=max(0.0, lam_lo), theta=theta, quadrant_sign=sign)


def to_ellipsoid(m) -> EllipsoidView:
    decomp = jacobi_eigen(m)
    axes = tuple(max(0.0, float(v)) for v in decomp.eigenvalues)
    return EllipsoidView(axes=axes, orientation=decomp.eigenvectors)


def alignment_metrics(m) -> AlignmentMetrics:
    mat = as_matrix(m)
    eigenvalues, _ = jacobi_eigen(mat)
    lam_max = float(eigenvalues[0])
    lam_min = float(eigenvalues[-1])
    if lam_max <= 0.0:
        ratio = 1.0  # zero matrix: a point is a degenerate circle
    else:
        ratio = min(1.0, max(0.0, lam_min / lam_max))
    if ratio > CIRCLE_RATIO:
        klass = "Circle"
    elif ratio < PANCAKE_RATIO:
        klass = "Pancake"
    else:
        klass = "Generic"
    return AlignmentMetrics(offdiag_norm=offdiag_norm(mat), axis_ratio=ratio, eccentricity_class=klass)


def ellipse_from_params(a: float, b: float, theta: float) -> np.ndarray:
    """Rebuild the 2x2 PSD matrix R(theta) diag(a, b) R(theta)^T."""
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    return rot @ np.diag([a, b]) @ rot.T
