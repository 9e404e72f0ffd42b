"""Walk the exponent landscape of u_t = laplace(u) + |u|^(p-1) u.

Prints the Fujita, Sobolev and Joseph-Lundgren thresholds for a range of
dimensions, then the full spectral constants of the pair (13, 3), the
integer showcase where m = 1, L = sqrt(10) and the decay exponents are
exactly 4 and 5.
"""

from nlheat import ProblemParams, critical_exponents, spectral_constants

print(f"{'N':>4} {'pF':>8} {'pS':>8} {'pc':>10}")
for dim in (3, 6, 10, 11, 13, 20, 50, 100):
    e = critical_exponents(dim)
    print(f"{dim:>4} {e.pF:>8.4f} {str(e.pS):>8.8s} {str(e.pc):>10.10s}")

print()
print("The Joseph-Lundgren exponent turns finite at N = 11 and decreases")
print("toward 1; above it the ordered family of radial steady states exists.")
print()

params = ProblemParams(13, 3.0)
c = spectral_constants(params)
print(f"(N, p) = (13, 3):")
print(f"  decay rate           m = {c.m}")
print(f"  singular amplitude   L = {c.L}  (L^2 = {c.L**2:.12f})")
print(f"  kernel exponents     lambda1 = {c.lambda1}, lambda2 = {c.lambda2}")
print(f"  tail exponent        m + lambda1 = {c.tail_exponent}")

# the critical pair: equal roots and a logarithmic kernel element
pc11 = float(critical_exponents(11).pc)
cc = spectral_constants(ProblemParams(11, pc11))
print()
print(f"(N, p) = (11, p_c) with p_c = {pc11!r}:")
print(f"  lambda1 = lambda2 = {cc.lambda1}  (1 + sqrt(10))")
print(f"  critical branch: {cc.critical}")
