"""Kernel elements of the linearized operator and supersolution residuals.

The linearization of the steady equation at a profile u is
w -> laplace(w) + p |u|^(p-1) w.  At the ground profile its radial kernel
contains the positive element Z = Phi + (1/m) r Phi', generated by
differentiating the scaling family; at the singular state the kernel is
spanned by the closed forms r^(-m-lambda1) and r^(-m-lambda2) (with a
logarithmic second element in the critical case).  These elements drive the
sweeping comparison argument, so their positivity and residuals are checked
numerically here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .exponents import ProblemParams, spectral_constants
from .fd import radial_laplacian
from .grids import RadialGrid, RadialProfile
from .steady import SteadyStateSolution, _series_slope, _series_value

__all__ = [
    "NonPositiveKernel",
    "BoundViolated",
    "KernelElement",
    "kernel_from_steady",
    "kernel_by_ode",
    "singular_kernel",
    "supersolution_residual",
    "kernel_residual",
]


class NonPositiveKernel(RuntimeError):
    """A kernel element that must be positive has a non-positive sample."""


class BoundViolated(ValueError):
    """|u| exceeds the comparison bound somewhere, so the residual sign fails."""


@dataclass(frozen=True, eq=False)
class KernelElement:
    """A sampled kernel element of the linearized operator.

    kind is "regular" (Z at the ground profile, positive everywhere),
    "singular" (r^(-m-lambda1), positive on r > 0) or "singular_second"
    (r^(-m-lambda2), or ln r * r^(-m-lambda1) at p = p_c, which changes
    sign at r = 1).
    """

    profile: RadialProfile
    kind: str
    params: ProblemParams

    def __post_init__(self):
        if self.kind not in ("regular", "singular", "singular_second"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")


def kernel_from_steady(sol: SteadyStateSolution) -> KernelElement:
    """Z = Phi + (1/m) r Phi' from the solver-carried derivative.

    Z(0) equals the center value of the base profile and Z must be positive
    at every node; a non-positive sample signals an integration error,
    since Z is the alpha-derivative of a strictly increasing family.
    """
    m = sol.constants.m
    r = sol.grid.nodes
    values = sol.phi.values + (1.0 / m) * r * sol.dphi.values
    if np.any(values <= 0.0):
        bad = r[values <= 0.0][0]
        raise NonPositiveKernel(f"Z <= 0 at r = {bad:.6g}")
    return KernelElement(RadialProfile(sol.grid, values, "Z"), "regular", sol.params)


def kernel_by_ode(params: ProblemParams, sol: SteadyStateSolution) -> KernelElement:
    """Independent route to Z: solve the linearized ODE from the origin.

    Integrates the coupled system for (Phi, Phi', Z, Z') with
    Z'' + (dim-1)/r Z' + p Phi^(p-1) Z = 0, Z(0) = 1, Z'(0) = 0, matching
    series at the origin, and samples Z on the solution's grid.  Cross
    validates :func:`kernel_from_steady` through a different equation.
    """
    dim, p = params.dim, params.p
    grid = sol.grid
    alpha = sol.alpha
    r0 = sol.r_start

    def rhs(r, y):
        u, du, z, dz = y
        pot = p * np.abs(u) ** (p - 1.0)
        return (
            du,
            -(dim - 1.0) / r * du - np.abs(u) ** (p - 1.0) * u,
            dz,
            -(dim - 1.0) / r * dz - pot * z,
        )

    # Series for Z near the origin: Z = 1 + z2 r^2 + z4 r^4 + O(r^6).
    z2 = -p * alpha ** (p - 1.0) / (2.0 * dim)
    z4 = p * (2.0 * p - 1.0) * alpha ** (2.0 * (p - 1.0)) / (8.0 * dim * (dim + 2.0))

    def z_series(r):
        return 1.0 + z2 * r**2 + z4 * r**4

    def z_series_slope(r):
        return 2.0 * z2 * r + 4.0 * z4 * r**3

    y0 = (
        float(_series_value(alpha, np.asarray(r0), dim, p)),
        float(_series_slope(alpha, np.asarray(r0), dim, p)),
        float(z_series(r0)),
        float(z_series_slope(r0)),
    )
    nodes = grid.nodes
    outer = nodes[nodes >= r0]
    ivp = solve_ivp(
        rhs,
        (r0, grid.rmax),
        y0,
        method="DOP853",
        t_eval=outer,
        rtol=1e-12,
        atol=1e-16,
    )
    if not ivp.success:
        raise RuntimeError(f"kernel integration failed: {ivp.message}")
    values = np.empty_like(nodes)
    inner = nodes < r0
    values[inner] = z_series(nodes[inner])
    values[~inner] = ivp.y[2]
    if np.any(values <= 0.0):
        raise NonPositiveKernel("ODE route produced a non-positive Z sample")
    return KernelElement(RadialProfile(grid, values, "Z(ode)"), "regular", params)


def singular_kernel(
    params: ProblemParams, grid: RadialGrid, which: str = "first"
) -> KernelElement:
    """Closed-form kernel element at the singular steady state.

    which = "first" gives r^(-m-lambda1).  which = "second" gives
    r^(-m-lambda2) for p > p_c and ln(r) r^(-m-lambda1) at p = p_c, where
    the two exponents coincide and the second solution picks up the
    logarithm.
    """
    if which not in ("first", "second"):
        raise ValueError(f"which must be 'first' or 'second', got {which!r}")
    c = spectral_constants(params)
    r = grid.nodes
    values = np.empty_like(r)
    positive = r > 0.0
    rp = r[positive]
    if which == "first":
        values[positive] = rp ** (-(c.m + c.lambda1))
        kind = "singular"
    elif c.critical:
        values[positive] = np.log(rp) * rp ** (-(c.m + c.lambda1))
        kind = "singular_second"
    else:
        values[positive] = rp ** (-(c.m + c.lambda2))
        kind = "singular_second"
    if (~positive).any():
        values[~positive] = -np.inf if (which == "second" and c.critical) else np.inf
    label = "Z_inf" if which == "first" else "Z_inf2"
    profile = RadialProfile(grid, values, label, singular_origin=bool((~positive).any()))
    return KernelElement(profile, kind, params)


def supersolution_residual(
    Z: KernelElement, u: RadialProfile, bound: RadialProfile
) -> RadialProfile:
    """Exact parabolic residual of Z over the linearized flow at u.

    For |u| <= bound and Z in the kernel of the linearization at the bound,
    the residual of Z as a supersolution of w_t = laplace(w) + p|u|^(p-1) w
    is exactly p (bound^(p-1) - |u|^(p-1)) Z, which must be nonnegative.
    The bound is the ground profile for the regular Z and the singular
    state for Z_inf.
    """
    p = Z.params.p
    r = u.grid.nodes
    body = slice(1, None) if bound.singular_origin or Z.profile.singular_origin else slice(None)
    if np.any(np.abs(u.values[body]) > bound.values[body]):
        bad = r[body][np.abs(u.values[body]) > bound.values[body]][0]
        raise BoundViolated(f"|u| exceeds the bound at r = {bad:.6g}")
    gap = bound.values ** (p - 1.0) - np.abs(u.values) ** (p - 1.0)
    values = p * gap * Z.profile.values
    singular = bound.singular_origin or Z.profile.singular_origin
    if singular:
        values = values.copy()
        values[0] = np.inf
    return RadialProfile(u.grid, values, "supersolution residual",
                         singular_origin=singular)


def kernel_tail_amplitude(
    element: KernelElement,
    window: tuple[float, float],
    nterms: int = 3,
) -> float:
    """Extrapolated amplitude of the kernel element's r^(-m-lambda1) tail.

    Fits Z(r) r^(m+lambda1) over the window on the same subleading basis as
    the steady tail fit (powers of r^(lambda1-lambda2)), and returns the
    constant term.  For the regular Z this amplitude must match
    (lambda1/m) |a| with a the steady profile's tail coefficient, which is
    the cross-check the acceptance suite runs.
    """
    c = spectral_constants(element.params)
    r = element.profile.grid.nodes
    lo, hi = window
    mask = (r >= lo) & (r <= hi)
    if mask.sum() < 10:
        raise ValueError(f"window [{lo}, {hi}] holds fewer than 10 nodes")
    rw = r[mask]
    y = element.profile.values[mask] * rw ** (c.m + c.lambda1)
    if c.critical:
        basis = np.column_stack([np.log(rw), np.ones_like(rw)])
    else:
        delta = c.lambda2 - c.lambda1
        basis = np.column_stack([rw ** (-k * delta) for k in range(max(1, nterms))])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return float(coef[0])


def kernel_residual(element: KernelElement, background: RadialProfile) -> np.ndarray:
    """Discrete residual of laplace(w) + p |bg|^(p-1) w for a kernel element.

    Returns the raw nodewise residual array.  Rows whose stencil touches an
    unbounded origin value are garbage; evaluate on an annulus away from
    r = 0 for singular elements.
    """
    if element.profile.grid is not background.grid:
        raise ValueError("kernel and background live on different grids")
    p = element.params.p
    lap = radial_laplacian(element.profile.grid, element.params.dim)
    w = element.profile.values
    bg = background.values
    with np.errstate(invalid="ignore", over="ignore"):
        return lap @ w + p * np.abs(bg) ** (p - 1.0) * w
