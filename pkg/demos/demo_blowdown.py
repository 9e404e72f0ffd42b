"""Blow-down rescaling, far-field classification, and the sphere identity.

w_R(r) = R^m u(R r) zooms out on a profile; for steady states the annulus
error against the singular tail contracts by 2^(-lambda1) per doubling of
R, and the limit of r^m u is one of -L, 0, +L.  The trichotomy rests on a
sign-definite integral over the sphere which the demo evaluates directly.
"""

import numpy as np

from nlheat import (
    ProblemParams,
    RadialGrid,
    classify_limit,
    rescale,
    scale_family,
    solve_ground_profile,
    sphere_identity,
)
from nlheat.blowdown import cosine_sphere_profile, random_sphere_profiles
from nlheat.exponents import spectral_constants

params = ProblemParams(13, 3.0)
grid = RadialGrid.make()
sol = solve_ground_profile(params, grid)
c = spectral_constants(params)

target = RadialGrid.make(rmax=grid.rmax / 16.0, core_nodes=101, tail_nodes=700)
annulus = (target.nodes >= 32.0) & (target.nodes <= 128.0)
exact = c.L * target.nodes[annulus] ** (-c.m)
print("annulus error of w_R against L r^-m (rate 2^-lambda1 = 1/16):")
prev = None
for R in (2.0, 4.0, 8.0, 16.0):
    w = rescale(sol.phi, R, c, target)
    err = float(np.max(np.abs(w.values[annulus] - exact)))
    note = "" if prev is None else f"   ratio {err / prev:.4f}"
    print(f"  R = {R:>4.0f}: error {err:.3e}{note}")
    prev = err

print()
print("far-field classification of r^m u over the outer decade:")
for label, profile in (
    ("phi_1/2", scale_family(sol, 0.5)),
    ("Phi", sol.phi),
    ("-Phi", sol.phi.with_values(-sol.phi.values, "-Phi")),
    ("0", sol.phi.with_values(np.zeros(len(grid)), "0")),
):
    print(f"  {label:>8} -> {classify_limit(profile, c).value}")

print()
print("sphere identity (zero exactly on the three constant profiles):")
theta = np.linspace(0.0, np.pi, 181)
from nlheat.blowdown import SphereProfile

for label, values in (("+L", np.full_like(theta, c.L)), ("0", np.zeros_like(theta))):
    prof = SphereProfile(theta, values, params)
    print(f"  f = {label:>3}: {sphere_identity(prof):.2e}")
print(f"  f = (L/2) cos: {sphere_identity(cosine_sphere_profile(params, 0.5)):.4f}")
values = [sphere_identity(f) for f in random_sphere_profiles(params, count=25)]
print(f"  25 random admissible profiles: min {min(values):.4f} (all positive)")
