"""The parabolic interpolation bound on a manufactured family.

For psi_t - laplace(psi) = f on the cylinder {|x| < R, |t| < R^2} the
centered gradient obeys |grad psi|^2 <= C ||f|| ||psi|| + C ||psi||^2 / R^2
with C depending only on the dimension.  The demo fits the smallest C per
case per cylinder and reports the uniform constant across the family.
"""

from nlheat import interp_check, manufactured_cases, uniform_interp_constant

radii = (1.0, 2.0, 4.0, 8.0)
print(f"{'case':>18} " + " ".join(f"{f'C(R={R:g})':>12}" for R in radii))
for case in manufactured_cases(13):
    fitted = [interp_check(case, R).fitted_C for R in radii]
    print(f"{case.name:>18} " + " ".join(f"{v:>12.4g}" for v in fitted))

report = uniform_interp_constant(13, radii=radii)
print()
print(f"uniform constant C(13) = {report['constant']:.6f} covers every case;")
print("the linear case psi = x1 saturates the bound (fitted C exactly 1),")
print("decaying heat modes satisfy it with room to spare.")
