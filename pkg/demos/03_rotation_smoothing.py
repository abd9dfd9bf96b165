"""Averaging a field over small rotations converges back to the field.

g_n is a weighted average of g over rotations by angles up to 1/n. The
L_q distance shrinks as n grows, and each polar ring stays below 2^q times
the ring mass of |g|^q.
"""
import numpy as np

from fvanish import fields, rotation

grid = fields.make_grid(2, 4.0, 128)
g = fields.schwartz_generator(grid, "gaussian", center=(0.5, 0.0))
norm = fields.lp_norm(g, 2)
for n in (2, 4, 8, 16, 32):
    gn = rotation.average_field(g, rotation.make_rotation_weight(2, n, 64))
    prof = rotation.polar_lq_distance(g, gn.field, 2.0)
    print(f"n = {n:>2}: ||g - g_n||_2 / ||g||_2 = {prof.distance / norm:.2e}  "
          f"dominated={prof.dominated}  interp err {gn.error:.1e}")

w = rotation.make_rotation_weight(2, 8, 64)
print("circle multipliers for k = 0..4:", np.round(rotation.mollifier_coefficients(w, np.arange(5)).real, 6))
