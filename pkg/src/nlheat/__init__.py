"""nlheat: a desk-scale numerical laboratory for the radial supercritical
nonlinear heat equation u_t = laplace(u) + |u|^(p-1) u.

The package computes the problem's critical exponents and spectral
constants, solves the radial steady states and their scaling family,
builds the kernel elements of the linearization, time-steps the radial
flow, and measures the comparison-principle diagnostics (weighted decay of
u_t, sweeping ratios, blow-down limits, the parabolic interpolation bound)
that govern the long-time behaviour.
"""

__version__ = "0.1.0"

from .exponents import (  # noqa: F401
    UNBOUNDED,
    DiscriminantNegative,
    ProblemParams,
    SpectralConstants,
    critical_exponents,
    decay_rate,
    indicial_residual,
    is_unbounded,
    lambda_roots,
    singular_amplitude,
    spectral_constants,
)
from .grids import RadialGrid, RadialProfile, resample  # noqa: F401
from .steady import (  # noqa: F401
    SteadyStateSolution,
    fit_asymptotic_coefficient,
    scale_family,
    singular_profile,
    solve_ground_profile,
)
from .linearize import (  # noqa: F401
    KernelElement,
    kernel_by_ode,
    kernel_from_steady,
    singular_kernel,
    supersolution_residual,
)
from .evolve import (  # noqa: F401
    EvolutionConfig,
    EvolutionState,
    Monitor,
    Trajectory,
    comparison_check,
    evolve_until,
    pin_to_asymptotic,
    pin_to_profile,
    quasiconvergence_experiment,
    step,
)
from .diagnostics import (  # noqa: F401
    interp_check,
    manufactured_cases,
    sweeping_ratio,
    uniform_interp_constant,
    weighted_decay,
)
from .blowdown import (  # noqa: F401
    LimitClass,
    SphereProfile,
    classify_limit,
    rescale,
    sphere_identity,
)
