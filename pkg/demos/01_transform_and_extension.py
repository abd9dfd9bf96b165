"""The Fourier conventions, and what a curved surface does to its extension.

We sample a Gaussian, check it is its own transform, then extend the
constant density from the unit circle and watch |E 1(R u)| fall like R^(-1/2).
"""
import mpmath
import numpy as np

from fvanish import fields, restriction, surfaces

grid = fields.make_grid(1, 16.0, 1024)
g = fields.schwartz_generator(grid, "gaussian")
G = fields.fourier_transform(g)
print(f"Gaussian fixed point: max |G - g| = {np.abs(G.values - g.values).max():.1e}")

circle = surfaces.make_circle(1.0, 2048)
one = surfaces.density(circle, lambda x: 1.0)
for R in (1, 5, 20):
    val = restriction.extend(one, [[R, 0.0]]).values[0].real
    ref = float(2 * mpmath.pi * mpmath.besselj(0, 2 * mpmath.pi * R))
    print(f"E1({R:>2}, 0) = {val:+.12f}   2 pi J0(2 pi R) = {ref:+.12f}")

fit = restriction.decay_exponent(one, [np.cos(0.7), np.sin(0.7)], np.geomspace(10, 200, 16))
print(f"envelope decay exponent on the circle: {fit.exponent:.3f} (curvature predicts -0.5)")
