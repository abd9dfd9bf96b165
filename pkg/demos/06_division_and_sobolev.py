"""Dividing by a symbol that vanishes on a curve, and where that breaks.

If the transform of f vanishes on the unit circle, the Helmholtz equation
has a rapidly decaying solution, recovered here to round-off. The Sobolev
ratio experiment then probes which exponents make a derivative estimate fail.
"""
import numpy as np

from fvanish import fields, symbols

H = symbols.helmholtz_symbol(2)
grid = fields.make_grid(2, 6.0, 256)
g0 = fields.schwartz_generator(grid, "gaussian", center=(0.3, -0.2))
g = symbols.solve_diff_equation(symbols.apply_diff_poly(H, g0), H)
print(f"Helmholtz round trip error: {np.linalg.norm(g.values - g0.values) / np.linalg.norm(g0.values):.1e}")

for p, gap in ((1.25, 0.6), (1.3, 0.7)):
    P = symbols.homogeneous_params(1, 2, 1.0, p, 1 / (1 / p - gap))
    rep = symbols.sobolev_ratio_experiment(P, "knapp_cap", [1 / 8, 1 / 16, 1 / 32, 1 / 64])
    fit = rep.fits["ratio"]
    print(f"1/p - 1/q = {gap}: ratio exponent {fit['exponent']:+.3f} -> {fit['trend']}")
