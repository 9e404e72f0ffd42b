"""Blow-down rescaling, far-field limit classification, and the sphere identity.

The rescaling w_R(r) = R^m u(R r) probes a profile at spatial infinity; for
admissible steady profiles the quantity r^m u(r) has a limit in
{-L, 0, +L}.  The classification rests on an integral identity on the unit
sphere: any smooth axisymmetric f with |f| <= L satisfies

    integral over the sphere of |f'|^2 + f^2 (L^(p-1) - |f|^(p-1)) >= 0

with equality only for the three constants, since both integrand terms are
pointwise nonnegative on the admissible set.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .exponents import ProblemParams, SpectralConstants, spectral_constants
from .grids import RadialGrid, RadialProfile
from .linearize import BoundViolated

__all__ = [
    "DomainExceeded",
    "LimitClass",
    "SphereProfile",
    "rescale",
    "classify_limit",
    "sphere_identity",
    "cosine_sphere_profile",
    "random_sphere_profiles",
]


class DomainExceeded(ValueError):
    """The rescaling would sample the input profile beyond its domain."""


class LimitClass(str, Enum):
    MINUS_L = "minus_L"
    ZERO = "zero"
    PLUS_L = "plus_L"
    UNDETERMINED = "undetermined"


def rescale(
    u: RadialProfile,
    R: float,
    constants: SpectralConstants,
    target: RadialGrid | None = None,
) -> RadialProfile:
    """Blow-down w_R(r) = R^m u(R r), resampled onto the target grid.

    Monotone cubic interpolation evaluates u at the scaled radii; the
    scaled radii must stay inside u's domain.
    """
    if R <= 0.0:
        raise ValueError(f"scale must be positive, got {R!r}")
    if target is None:
        target = u.grid
    if R * target.rmax > u.grid.rmax * (1.0 + 1e-12):
        raise DomainExceeded(
            f"scale {R} needs the input out to {R * target.rmax:.4g} "
            f"but it ends at {u.grid.rmax:.4g}"
        )
    s = np.minimum(R * target.nodes, u.grid.rmax)  # clamp rounding at the edge
    values = np.empty_like(s)
    m = constants.m
    # Far samples interpolate r^m u, which is slowly varying across power-law
    # tails, and keep monotone shape preservation; r^m u is not smooth at the
    # origin, so core samples interpolate u directly.
    cut = 10.0 * u.grid.core_radius
    near = s < cut
    if near.any():
        interp = PchipInterpolator(u.grid.nodes, u.values, extrapolate=False)
        values[near] = R**m * interp(s[near])
    if (~near).any():
        r_in = u.grid.nodes
        far_nodes = r_in >= cut / 2.0
        y = r_in[far_nodes] ** m * u.values[far_nodes]
        interp = PchipInterpolator(r_in[far_nodes], y, extrapolate=False)
        values[~near] = R**m * interp(s[~near]) * s[~near] ** (-m)
    return RadialProfile(target, values, f"w[{R:g}]({u.label})")


def classify_limit(u: RadialProfile, constants: SpectralConstants) -> LimitClass:
    """Classify the far-field limit of r^m u(r) against {-L, 0, +L}.

    Examines the outer decade of the profile's domain; the profile matches
    a limit when r^m u stays within 5% of L of it there.  Requires the
    domain to reach at least r = 100.
    """
    rmax = u.grid.rmax
    if rmax < 100.0:
        raise ValueError(f"classification needs rmax >= 100, got {rmax}")
    r = u.grid.nodes
    mask = r >= rmax / 10.0
    y = r[mask] ** constants.m * u.values[mask]
    tol = 0.05 * constants.L
    for target, cls in (
        (constants.L, LimitClass.PLUS_L),
        (-constants.L, LimitClass.MINUS_L),
        (0.0, LimitClass.ZERO),
    ):
        if np.max(np.abs(y - target)) <= tol:
            return cls
    return LimitClass.UNDETERMINED


@dataclass(frozen=True, eq=False)
class SphereProfile:
    """An axisymmetric profile f(theta) on the sphere, theta in [0, pi]."""

    theta: np.ndarray
    values: np.ndarray
    params: ProblemParams

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if th.ndim != 1 or th.size < 4 or vals.shape != th.shape:
            raise ValueError("need matching 1-d theta and value arrays (>= 4 nodes)")
        if th[0] != 0.0 or abs(th[-1] - np.pi) > 1e-12 or not np.all(np.diff(th) > 0):
            raise ValueError("theta must increase strictly from 0 to pi")
        if not np.all(np.isfinite(vals)):
            raise ValueError("sphere profile has non-finite values")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "values", vals)


def sphere_identity(f: SphereProfile, panels: int = 256) -> float:
    """Integral of f'^2 + f^2 (L^(p-1) - |f|^(p-1)) with weight sin^(N-2).

    The overall surface-measure constant is omitted: the sign is the
    content.  The value is nonnegative on the admissible set |f| <= L and
    vanishes only for f identically 0, L or -L.  Composite Gauss panels
    keep the quadrature sharp even though |f|^(p-1) is only C^1 at zeros of
    f for non-integer p.

    Raises BoundViolated if the samples exceed L in absolute value.
    """
    params = f.params
    c = spectral_constants(params)
    if np.max(np.abs(f.values)) > c.L * (1.0 + 4.0 * np.finfo(float).eps):
        raise BoundViolated("sphere profile exceeds the singular amplitude L")
    spline = CubicSpline(f.theta, f.values)
    dspline = spline.derivative()
    # 4-point Gauss-Legendre on each panel of [0, pi]
    gauss_x, gauss_w = np.polynomial.legendre.leggauss(4)
    edges = np.linspace(0.0, np.pi, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    theta = (mid[:, None] + half[:, None] * gauss_x[None, :]).ravel()
    weights = (half[:, None] * gauss_w[None, :]).ravel()
    s = spline(theta)
    ds = dspline(theta)
    Lp = c.L ** (params.p - 1.0)
    integrand = (ds**2 + s**2 * (Lp - np.abs(s) ** (params.p - 1.0))) * np.sin(
        theta
    ) ** (params.dim - 2)
    return float(np.sum(weights * integrand))


def cosine_sphere_profile(
    params: ProblemParams, amplitude: float, n: int = 181
) -> SphereProfile:
    """The profile amplitude * L * cos(theta); admissible for |amplitude| <= 1."""
    c = spectral_constants(params)
    theta = np.linspace(0.0, np.pi, n)
    return SphereProfile(theta, amplitude * c.L * np.cos(theta), params)


def random_sphere_profiles(
    params: ProblemParams, count: int = 100, seed: int = 20240802, n: int = 181
) -> list[SphereProfile]:
    """Seeded family of smooth nonconstant admissible profiles, |f| <= 0.95 L.

    Low-order cosine combinations; cos(k theta) has vanishing derivative at
    both poles, so the profiles are smooth axisymmetric functions on the
    sphere.
    """
    c = spectral_constants(params)
    rng = np.random.default_rng(seed)
    theta = np.linspace(0.0, np.pi, n)
    out = []
    for _ in range(count):
        coeffs = rng.uniform(-1.0, 1.0, size=4)
        vals = sum(ck * np.cos((k + 1) * theta) for k, ck in enumerate(coeffs))
        peak = np.max(np.abs(vals))
        amp = rng.uniform(0.1, 0.95) * c.L
        out.append(SphereProfile(theta, amp * vals / peak, params))
    return out
