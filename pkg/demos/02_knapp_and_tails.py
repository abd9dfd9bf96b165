"""Two faces of the restriction threshold on the circle.

A Knapp cap of width delta and thickness delta^2 has a restriction whose
L1 mass is a fixed multiple of delta. Its extension's L_q tails converge
only for q > 4.
"""
from fvanish import restriction, surfaces

circle = surfaces.make_circle(1.0, 4096)
for delta in (1 / 8, 1 / 16, 1 / 32, 1 / 64):
    f = restriction.knapp_function(circle, 0, delta)
    r = restriction.restrict(f, circle, decay_tol=1e-3)
    print(f"delta = 1/{round(1 / delta):<3} ||R f||_1 / delta = {circle.integrate(abs(r.values)).real / delta:.4f}")

one = surfaces.density(surfaces.make_circle(1.0, 1024), lambda x: 1.0)
for q in (3, 4, 6):
    prof = restriction.lq_tail_profile(one, q)
    print(f"q = {q}: ring-density exponent {prof.exponent:+.3f} -> {prof.classification}")
