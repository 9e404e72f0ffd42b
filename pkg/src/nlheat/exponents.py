"""Critical exponents and spectral constants of u_t = laplace(u) + |u|^(p-1) u.

Everything downstream (steady states, kernels, evolution diagnostics) is
parametrised by the pair (dim, p).  This module computes the Fujita,
Sobolev and Joseph-Lundgren thresholds, the far-field decay rate
m = 2/(p-1), the singular amplitude L, and the decay exponents
lambda1 <= lambda2 of the linearization at the singular steady state.
All formulas are evaluated here exactly once per parameter pair and cached;
no other module re-derives them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "UNBOUNDED",
    "Unbounded",
    "is_unbounded",
    "DiscriminantNegative",
    "ProblemParams",
    "CriticalExponents",
    "SpectralConstants",
    "critical_exponents",
    "joseph_lundgren_forms",
    "decay_rate",
    "singular_amplitude",
    "lambda_roots",
    "spectral_constants",
    "indicial_residual",
]

# Relative half-width of the band around p_c inside which the repeated-root
# (logarithmic kernel) branch is selected.
PC_EQUALITY_RTOL = 1e-9


class DiscriminantNegative(ValueError):
    """The decay-exponent quadratic has complex roots: the exponent is below p_c."""


class Unbounded:
    """Marker for exponent thresholds that take no finite value.

    Compares strictly greater than every real number and equal only to
    itself, so tests like ``p < pc`` read the same in both regimes.  A
    singleton; use the module-level ``UNBOUNDED``.
    """

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "unbounded"

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, Unbounded)

    def __gt__(self, other):
        return not isinstance(other, Unbounded)

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return isinstance(other, Unbounded)

    def __hash__(self):
        return hash("nlheat.unbounded")

    def __float__(self):
        # Bridge for formatting only; arithmetic on exponents goes through
        # the finite branch.
        return math.inf


UNBOUNDED = Unbounded()


def is_unbounded(x) -> bool:
    return isinstance(x, Unbounded)


@dataclass(frozen=True)
class ProblemParams:
    """The parameter pair of the problem: spatial dimension and exponent."""

    dim: int
    p: float

    def __post_init__(self):
        if not isinstance(self.dim, int) or isinstance(self.dim, bool):
            raise TypeError(f"dim must be an integer, got {self.dim!r}")
        if self.dim < 3:
            raise ValueError(f"dim must be >= 3, got {self.dim}")
        if not self.p > 1.0:
            raise ValueError(f"exponent p must be > 1, got {self.p!r}")

    @property
    def is_supercritical(self) -> bool:
        """True iff p >= p_c(dim); requires dim >= 11."""
        pc = critical_exponents(self.dim).pc
        if is_unbounded(pc):
            return False
        return self.p >= pc * (1.0 - PC_EQUALITY_RTOL)

    @property
    def is_critical(self) -> bool:
        """True iff p equals p_c(dim) within the equality band."""
        pc = critical_exponents(self.dim).pc
        if is_unbounded(pc):
            return False
        return abs(self.p - pc) <= PC_EQUALITY_RTOL * pc


@dataclass(frozen=True)
class CriticalExponents:
    pF: float
    pS: "float | Unbounded"
    pc: "float | Unbounded"


@dataclass(frozen=True)
class SpectralConstants:
    """All derived constants of a supercritical parameter pair.

    Built once by :func:`spectral_constants` and cached; downstream modules
    never recompute these formulas.
    """

    pF: float
    pS: "float | Unbounded"
    pc: "float | Unbounded"
    m: float
    L: float
    lambda1: float
    lambda2: float
    critical: bool  # p equals p_c within the equality band

    @property
    def tail_exponent(self) -> float:
        """Decay exponent m + lambda1 of the slow kernel element."""
        return self.m + self.lambda1


def joseph_lundgren_forms(dim: int) -> tuple[float, float]:
    """Both closed forms of the Joseph-Lundgren exponent for dim >= 11.

    Returns the rational form ((dim-2)^2 - 4 dim + 8 sqrt(dim-1)) /
    ((dim-2)(dim-10)) and the shifted form 1 + 4/(dim - 4 - 2 sqrt(dim-1)).
    They agree algebraically; evaluating both guards against transcription
    slips.
    """
    if dim <= 10:
        raise ValueError("the Joseph-Lundgren exponent is finite only for dim >= 11")
    root = math.sqrt(dim - 1.0)
    rational = ((dim - 2.0) ** 2 - 4.0 * dim + 8.0 * root) / ((dim - 2.0) * (dim - 10.0))
    shifted = 1.0 + 4.0 / (dim - 4.0 - 2.0 * root)
    return rational, shifted


def critical_exponents(dim: int) -> CriticalExponents:
    """Fujita, Sobolev and Joseph-Lundgren exponents for dimension dim >= 1."""
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValueError(f"dim must be a positive integer, got {dim!r}")
    pF = 1.0 + 2.0 / dim
    pS = (dim + 2.0) / (dim - 2.0) if dim >= 3 else UNBOUNDED
    if dim <= 10:
        pc: "float | Unbounded" = UNBOUNDED
    else:
        rational, shifted = joseph_lundgren_forms(dim)
        if abs(rational - shifted) > 1e-10 * max(1.0, abs(shifted)):
            raise ArithmeticError(
                f"Joseph-Lundgren closed forms disagree at dim={dim}: "
                f"{rational!r} vs {shifted!r}"
            )
        pc = shifted
    return CriticalExponents(pF=pF, pS=pS, pc=pc)


def decay_rate(p: float) -> float:
    """Far-field decay rate m = 2/(p-1)."""
    if not p > 1.0:
        raise ValueError(f"decay rate requires p > 1, got {p!r}")
    return 2.0 / (p - 1.0)


def singular_amplitude(params: ProblemParams) -> float:
    """Amplitude L of the singular steady state L r^(-m).

    L^(p-1) = m (dim - 2 - m); rejected when dim - 2 - m <= 0, where the
    closed form is undefined.
    """
    m = decay_rate(params.p)
    gap = params.dim - 2.0 - m
    if gap <= 0.0:
        raise ValueError(
            f"singular amplitude undefined: dim - 2 - m = {gap!r} <= 0 "
            f"for (dim, p) = ({params.dim}, {params.p})"
        )
    return (m * gap) ** (1.0 / (params.p - 1.0))


def lambda_roots(params: ProblemParams) -> tuple[float, float]:
    """Roots lambda1 <= lambda2 of lambda^2 - (dim-2-2m) lambda + 2(dim-2-m) = 0.

    These are the decay exponents of the radial kernel elements
    r^(-m-lambda) at the singular steady state.  Raises
    :class:`DiscriminantNegative` when p < p_c(dim), the regime where the
    roots are complex and the kernel structure does not apply.  Within the
    equality band around p_c the repeated root (dim-2-2m)/2 is returned for
    both.
    """
    m = decay_rate(params.p)
    s = params.dim - 2.0 - 2.0 * m
    prod = 2.0 * (params.dim - 2.0 - m)
    pc = critical_exponents(params.dim).pc
    if is_unbounded(pc) or params.p < pc * (1.0 - PC_EQUALITY_RTOL):
        raise DiscriminantNegative(
            f"p = {params.p!r} is below the Joseph-Lundgren exponent "
            f"p_c({params.dim}) = {pc!r}; no real decay exponents"
        )
    if abs(params.p - pc) <= PC_EQUALITY_RTOL * pc:
        half = s / 2.0
        return half, half
    disc = s * s - 4.0 * prod
    # Rounding can leave a slightly negative discriminant just outside the
    # equality band; genuinely subcritical pairs were rejected above.
    root = math.sqrt(max(disc, 0.0))
    return (s - root) / 2.0, (s + root) / 2.0


@lru_cache(maxsize=None)
def spectral_constants(params: ProblemParams) -> SpectralConstants:
    """All spectral constants of a supercritical pair, computed once."""
    exps = critical_exponents(params.dim)
    lam1, lam2 = lambda_roots(params)
    return SpectralConstants(
        pF=exps.pF,
        pS=exps.pS,
        pc=exps.pc,
        m=decay_rate(params.p),
        L=singular_amplitude(params),
        lambda1=lam1,
        lambda2=lam2,
        critical=params.is_critical,
    )


def indicial_residual(params: ProblemParams, gamma: float) -> float:
    """Residual of the indicial equation for r^(-gamma) at the singular state.

    The radial Laplacian of r^(-gamma) is gamma (gamma - dim + 2) r^(-gamma-2),
    so gamma is a kernel decay exponent iff
    gamma (gamma - dim + 2) + p L^(p-1) = 0.  L^(p-1) is expanded in closed
    form to avoid a pow round-trip.
    """
    m = decay_rate(params.p)
    return gamma * (gamma - params.dim + 2.0) + params.p * m * (params.dim - 2.0 - m)
