"""SVG rendering of ellipse/ellipsoid frames.

One frame = one standalone SVG 1.1 document holding coordinate axes, a
legend, and one ellipse outline per overlay (blue input, red QR output,
green LR output by convention).  The canvas auto-scales to the largest
semi-axis across all overlays so shift and pancake sequences stay in
frame.  Output bytes are a pure function of the input.

3D views use a fixed isometric projection drawn in painter's order: the
silhouette of the ellipsoid plus its three principal cross-sections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ellipse import EllipseView2D, EllipsoidView

DEFAULT_COLORS = ("blue", "red", "green", "orange", "purple")

# Isometric projection: rows are the screen-x and screen-y directions.
_ISO = np.array(
    [
        [1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0), 0.0],
        [-1.0 / math.sqrt(6.0), -1.0 / math.sqrt(6.0), 2.0 / math.sqrt(6.0)],
    ]
)


@dataclass(frozen=True)
class Overlay:
    label: str
    view: EllipseView2D | EllipsoidView
    color: str


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _view_radius(view) -> float:
    if isinstance(view, EllipseView2D):
        return view.a
    return view.axes[0] if view.axes else 0.0


def _ellipse_element(a: float, b: float, theta: float, color: str, k: float, width: float) -> str:
    deg = math.degrees(theta)
    if b * k < 0.5:  # thinner than half a pixel: draw the segment it degenerates to
        return (
            f'<line x1="{_fmt(-a * k)}" y1="0" x2="{_fmt(a * k)}" y2="0" '
            f'transform="rotate({_fmt(deg)})" stroke="{color}" stroke-width="{_fmt(width)}"/>'
        )
    return (
        f'<ellipse cx="0" cy="0" rx="{_fmt(a * k)}" ry="{_fmt(b * k)}" '
        f'transform="rotate({_fmt(deg)})" fill="none" stroke="{color}" '
        f'stroke-width="{_fmt(width)}"/>'
    )


def _polyline(points: list[tuple[float, float]], color: str, width: float) -> str:
    joined = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return f'<polyline points="{joined}" fill="none" stroke="{color}" stroke-width="{_fmt(width)}"/>'


def _ellipsoid_elements(view: EllipsoidView, color: str, k: float) -> list[str]:
    axes = np.asarray(view.axes)
    basis = view.orientation
    m = basis @ np.diag(axes) @ basis.T
    parts = []
    # Principal cross-sections, painter's order by plane index.
    ts = np.linspace(0.0, 2.0 * math.pi, 121)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        ui = _ISO @ (axes[i] * basis[:, i])
        uj = _ISO @ (axes[j] * basis[:, j])
        pts = [
            (k * (ui[0] * math.cos(t) + uj[0] * math.sin(t)),
             k * (ui[1] * math.cos(t) + uj[1] * math.sin(t)))
            for t in ts
        ]
        parts.append(_polyline(pts, color, 0.8))
    # Silhouette: the projected outline is the ellipse of sqrt-eigenvalues
    # of (P M)(P M)^T.
    w = _ISO @ m
    g = w @ w.T
    mean = 0.5 * (g[0, 0] + g[1, 1])
    half = 0.5 * (g[0, 0] - g[1, 1])
    radius = math.hypot(half, g[0, 1])
    sil_a = math.sqrt(max(0.0, mean + radius))
    sil_b = math.sqrt(max(0.0, mean - radius))
    sil_theta = 0.5 * math.atan2(2.0 * g[0, 1], g[0, 0] - g[1, 1]) if radius > 0 else 0.0
    parts.append(_ellipse_element(sil_a, sil_b, sil_theta, color, k, 1.6))
    return parts


def render_svg_frame(overlays: Sequence[Overlay], size: int = 420) -> str:
    """Render overlays into one standalone SVG document (a string)."""
    half = size / 2.0
    radius = max([_view_radius(o.view) for o in overlays], default=0.0)
    if radius <= 0.0:
        radius = 1.0
    k = 0.42 * size / radius

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        # Math orientation: origin centred, y up.
        f'<g transform="translate({_fmt(half)},{_fmt(half)}) scale(1,-1)">',
        f'<line x1="{_fmt(-half)}" y1="0" x2="{_fmt(half)}" y2="0" stroke="#bbbbbb" stroke-width="1"/>',
        f'<line x1="0" y1="{_fmt(-half)}" x2="0" y2="{_fmt(half)}" stroke="#bbbbbb" stroke-width="1"/>',
    ]
    for overlay in overlays:
        if isinstance(overlay.view, EllipseView2D):
            v = overlay.view
            lines.append(_ellipse_element(v.a, v.b, v.theta, overlay.color, k, 1.6))
        else:
            lines.extend(_ellipsoid_elements(overlay.view, overlay.color, k))
    lines.append("</g>")
    for idx, overlay in enumerate(overlays):
        y = 18 + 16 * idx
        lines.append(
            f'<rect x="10" y="{y - 9}" width="10" height="10" fill="{overlay.color}"/>'
        )
        lines.append(
            f'<text x="25" y="{y}" font-family="monospace" font-size="12">{overlay.label}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def overlays_for_matrix(matrix: np.ndarray, which: Sequence[str]) -> list[Overlay]:
    """Standard overlay set for a trace frame: the matrix itself plus
    single-step previews. ``which`` is a subset of {input, qr, lr}; an LR
    preview of a singular matrix is skipped."""
    from .ellipse import to_ellipse2d, to_ellipsoid
    from .engine import lr_step, qr_step
    from .errors import SingularMatrix

    n = matrix.shape[0] if matrix.size else 0
    view_of = to_ellipse2d if n == 2 else to_ellipsoid
    out: list[Overlay] = []
    for name in which:
        if name == "input":
            out.append(Overlay("input", view_of(matrix), "blue"))
        elif name == "qr":
            out.append(Overlay("qr step", view_of(qr_step(matrix)), "red"))
        elif name == "lr":
            try:
                out.append(Overlay("lr step", view_of(lr_step(matrix)), "green"))
            except SingularMatrix:
                continue
        else:
            raise ValueError(f"unknown overlay {name!r}; expected input, qr, or lr")
    return out
