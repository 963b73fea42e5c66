"""Poincare-disk SVG rendering of planar realizations.

Hyperbolic circles map to Euclidean circles. A grain circle is drawn through
the disk images of the two points where it meets the radial geodesic from the
base point through its center; those images are diametrically opposite on the
Euclidean circle, so its center and radius follow directly. Geodesic lines
map to circular arcs orthogonal to the unit circle (or to diameters); both
are drawn as full Euclidean circles clipped to the unit disk. Overlap count
shows through stacked fill opacity.
"""

from __future__ import annotations

import math

import numpy as np

from .hypgeom import base_point, direction_to, exp_map, minkowski_dot, normalize_point, normalize_tangent, to_poincare
from .procsim import BooleanModelSample, HyperplaneSample

GRAIN_OPACITY = 0.25


def _grain_disk_circle(center: np.ndarray, radius: float) -> tuple[float, float, float]:
    """(cx, cy, r) of the Euclidean circle representing a hyperbolic circle."""
    p = base_point(2)
    if center[0] < 1.0 + 1e-14:  # grain centered at the base point
        r = math.tanh(radius / 2.0)
        return 0.0, 0.0, r
    u = direction_to(center, p)
    z1 = to_poincare(exp_map(center, u, radius))
    z2 = to_poincare(exp_map(center, -u, radius))
    cx, cy = (z1 + z2) / 2.0
    return float(cx), float(cy), float(np.linalg.norm(z1 - z2) / 2.0)


def _geodesic_disk_circle(normal: np.ndarray, span: float = 9.0):
    """Euclidean circle (cx, cy, r) for a geodesic line, or a chord for diameters.

    Three points on the line are mapped to the disk; the circumcircle through
    them is orthogonal to the unit circle. Near-diameters (collinear images)
    fall back to a straight chord, returned as ('line', x1, y1, x2, y2).
    The span stays moderate: renormalizing exp_map output loses precision
    once cosh(span)^2 approaches 1/eps.
    """
    p = base_point(2)
    s = minkowski_dot(p, normal)
    foot = normalize_point(p - s * normal)
    tangent = np.cross(foot, normal)
    tangent[0] = -tangent[0]
    tangent = normalize_tangent(tangent)
    pts = [to_poincare(exp_map(foot, t_dir, t)) for t_dir, t in ((tangent, span), (tangent, 0.0), (-tangent, span))]
    (x1, y1), (x2, y2), (x3, y3) = pts
    det = 2.0 * ((x1 - x2) * (y2 - y3) - (x2 - x3) * (y1 - y2))
    if abs(det) < 1e-12:
        return ("line", x1, y1, x3, y3)
    q1, q2, q3 = x1 * x1 + y1 * y1, x2 * x2 + y2 * y2, x3 * x3 + y3 * y3
    cx = ((q1 - q2) * (y2 - y3) - (q2 - q3) * (y1 - y2)) / det
    cy = ((x1 - x2) * (q2 - q3) - (x2 - x3) * (q1 - q2)) / det
    r = math.hypot(x1 - cx, y1 - cy)
    return ("circle", cx, cy, r)


def render_svg(model: BooleanModelSample | HyperplaneSample, out_path, view_radius: float | None = None) -> str:
    """Write the realization as an SVG file and return the path.

    view_radius restricts drawing to obstacles within that hyperbolic
    distance of the base point (default: the sample's window radius).
    """
    if model.d != 2:
        raise ValueError("SVG rendering is implemented for d = 2 only")
    if view_radius is None:
        view_radius = model.window_radius
    cosh_view = math.cosh(view_radius)
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.05 -1.05 2.1 2.1">',
        '<defs><clipPath id="disk"><circle cx="0" cy="0" r="1"/></clipPath></defs>',
        '<g clip-path="url(#disk)">',
    ]
    if isinstance(model, BooleanModelSample):
        for center, radius in zip(model.centers, model.radii):
            if center[0] > math.cosh(view_radius + radius):
                continue
            cx, cy, r = _grain_disk_circle(center, float(radius))
            parts.append(
                f'<circle cx="{cx:.6f}" cy="{cy:.6f}" r="{r:.6f}" '
                f'fill="#1f5fa8" fill-opacity="{GRAIN_OPACITY}" stroke="none"/>'
            )
    else:
        for normal in model.normals:
            if abs(normal[0]) > math.sinh(view_radius):
                continue
            shape = _geodesic_disk_circle(normal)
            if shape[0] == "line":
                _, x1, y1, x2, y2 = shape
                parts.append(
                    f'<line x1="{x1:.6f}" y1="{y1:.6f}" x2="{x2:.6f}" y2="{y2:.6f}" '
                    'stroke="#333333" stroke-width="0.004" fill="none"/>'
                )
            else:
                _, cx, cy, r = shape
                parts.append(
                    f'<circle cx="{cx:.6f}" cy="{cy:.6f}" r="{r:.6f}" '
                    'stroke="#333333" stroke-width="0.004" fill="none"/>'
                )
    parts.append("</g>")
    parts.append('<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="0.006"/>')
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    with open(out_path, "w") as fh:
        fh.write(text)
    return str(out_path)
