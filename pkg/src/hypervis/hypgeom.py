"""Hyperboloid-model primitives for hyperbolic space of any dimension d >= 2.

A point is a length-(d+1) float array x = (x_0, ..., x_d) on the upper sheet
of the unit hyperboloid: <x,x> = -1 and x_0 >= 1, where <.,.> is the
Minkowski form -x_0 y_0 + sum_{i>=1} x_i y_i. Tangent vectors at x are
(d+1)-arrays u with <u,x> = 0; unit tangents additionally have <u,u> = 1.
Geodesics are exact: exp_x(t u) = cosh(t) x + sinh(t) u.

All functions accept batched arrays (leading axes broadcast); scalars come
back as floats. The Poincare ball enters only at the rendering boundary via
``to_poincare``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Invariant tolerance for hyperboloid membership and tangency checks.
GEOM_TOL = 1e-9


def minkowski_dot(a, b):
    """Minkowski form -a_0 b_0 + sum_{i>=1} a_i b_i, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    prod = a * b
    out = np.sum(prod[..., 1:], axis=-1) - prod[..., 0]
    return float(out) if out.ndim == 0 else out


def base_point(d: int) -> np.ndarray:
    """The reference point (1, 0, ..., 0) of d-dimensional hyperbolic space."""
    p = np.zeros(d + 1)
    p[0] = 1.0
    return p


def normalize_point(x) -> np.ndarray:
    """Re-project onto the hyperboloid: divide by sqrt(-<x,x>).

    Applied after geodesic arithmetic to suppress floating-point drift.
    """
    x = np.asarray(x, dtype=float)
    q = -minkowski_dot(x, x)
    return x / np.sqrt(np.asarray(q))[..., None] if x.ndim > 1 else x / np.sqrt(q)


def normalize_tangent(u) -> np.ndarray:
    """Scale a spacelike vector to Minkowski norm 1."""
    u = np.asarray(u, dtype=float)
    q = minkowski_dot(u, u)
    return u / np.sqrt(np.asarray(q))[..., None] if u.ndim > 1 else u / np.sqrt(q)


def dist(x, y):
    """Hyperbolic distance acosh(max(1, -<x,y>)); the max guards rounding below 1."""
    return np.arccosh(np.maximum(1.0, -minkowski_dot(x, y)))


def exp_map(p, u, t):
    """Point at arc length t >= 0 along the unit-speed geodesic from p in direction u."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("exp_map requires t >= 0")
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    x = np.cosh(t)[..., None] * p + np.sinh(t)[..., None] * u if t.ndim else np.cosh(t) * p + np.sinh(t) * u
    return normalize_point(x)


def transport_direction(p, u, t):
    """Tangent of the geodesic exp_p(t u) at its endpoint: cosh(t) u + sinh(t) p."""
    return np.cosh(t) * np.asarray(u, dtype=float) + np.sinh(t) * np.asarray(p, dtype=float)


def direction_to(p, q) -> np.ndarray:
    """Unit tangent u at p with exp_map(p, u, dist(p, q)) = q (logarithm map)."""
    s = dist(p, q)
    if s < 1e-12:
        raise ValueError("direction_to is degenerate for coincident points")
    u = (np.asarray(q, dtype=float) - np.cosh(s) * np.asarray(p, dtype=float)) / np.sinh(s)
    norm_sq = minkowski_dot(u, u)
    if not norm_sq > 0:
        raise ValueError("direction_to is degenerate for coincident points")
    return u / np.sqrt(norm_sq)


def angle(u, v):
    """Angle in [0, pi] between unit tangents based at the same point."""
    c = np.clip(minkowski_dot(u, v), -1.0, 1.0)
    return np.arccos(c)


def tangent_basis(p) -> np.ndarray:
    """Minkowski-orthonormal basis (d rows) of the tangent space at p.

    Gram-Schmidt of the coordinate axes against p; the Minkowski form is
    positive definite on the tangent space, so the usual recursion applies.
    """
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    basis = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        v = e + minkowski_dot(e, p) * p  # Minkowski projection onto p's complement
        for b in basis:
            v = v - minkowski_dot(v, b) * b
        q = minkowski_dot(v, v)
        if q > 1e-12:
            basis.append(v / np.sqrt(q))
        if len(basis) == n - 1:
            break
    return np.array(basis)


def random_direction(p, rng: np.random.Generator) -> np.ndarray:
    """Unit tangent at p, uniform on the unit sphere of the tangent space.

    A standard Gaussian in tangent coordinates is rotation invariant for the
    induced (Euclidean) metric, so normalizing gives the uniform sphere law.
    """
    p = np.asarray(p, dtype=float)
    d = p.shape[0] - 1
    if p[0] == 1.0 and not p[1:].any():
        u = np.zeros(d + 1)
        g = rng.standard_normal(d)
        u[1:] = g / np.linalg.norm(g)
        return u
    basis = tangent_basis(p)
    g = rng.standard_normal(d)
    return normalize_tangent(g @ basis)


def to_poincare(x) -> np.ndarray:
    """Poincare-ball image (x_1, ..., x_d)/(1 + x_0); Euclidean norm < 1."""
    x = np.asarray(x, dtype=float)
    return x[..., 1:] / (1.0 + x[..., 0:1])


def poincare_dist(z, w):
    """Hyperbolic distance between Poincare-ball points (cross-model oracle)."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    zz = np.sum(z * z, axis=-1)
    ww = np.sum(w * w, axis=-1)
    d2 = np.sum((z - w) ** 2, axis=-1)
    return np.arccosh(1.0 + 2.0 * d2 / ((1.0 - zz) * (1.0 - ww)))


def rotate_about_base(x, q: np.ndarray) -> np.ndarray:
    """Apply a spatial orthogonal matrix q (d x d) to the spatial coordinates.

    Rotations about the base point are exactly the isometries fixing it.
    """
    x = np.asarray(x, dtype=float)
    out = x.copy()
    out[..., 1:] = x[..., 1:] @ q.T
    return out


@dataclass(frozen=True)
class GeodesicRay:
    """Unit-speed geodesic ray: origin point and unit tangent there."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        if abs(minkowski_dot(self.origin, self.origin) + 1.0) > 1e-6:
            raise ValueError("ray origin is not on the hyperboloid")
        if abs(minkowski_dot(self.origin, self.direction)) > 1e-6:
            raise ValueError("ray direction is not tangent at its origin")

    def point_at(self, t):
        return exp_map(self.origin, self.direction, t)


def assert_point(x, tol: float = GEOM_TOL) -> None:
    """Raise unless x satisfies the hyperboloid invariants."""
    x = np.asarray(x, dtype=float)
    if abs(minkowski_dot(x, x) + 1.0) > tol:
        raise AssertionError(f"<x,x> = {minkowski_dot(x, x)} != -1")
    if x[0] < 1.0 - tol:
        raise AssertionError(f"x_0 = {x[0]} < 1")


def assert_unit_tangent(p, u, tol: float = GEOM_TOL) -> None:
    """Raise unless u is a unit tangent at p."""
    if abs(minkowski_dot(u, u) - 1.0) > tol:
        raise AssertionError(f"<u,u> = {minkowski_dot(u, u)} != 1")
    if abs(minkowski_dot(p, u)) > tol:
        raise AssertionError(f"<p,u> = {minkowski_dot(p, u)} != 0")
