"""Convolving a curve measure with itself.

On the parabola the sum of two points is an area-filling set, and the
convolution has a density that blows up near the diagonal like 1 / gap.
The mass of |density|^2 over thin bands near the diagonal does not shrink,
so the cumulative sum grows without bound.
"""
import numpy as np

from fvanish import autoconv

chart = autoconv.parabola_chart(1.0)
pts = np.array([[0.1, 0.3], [-0.3, 0.2]])
closed = autoconv.autoconvolution_density(1.0, chart, pts[:, 0], pts[:, 1])
oracle, _ = autoconv.fft_autoconvolution(1.0, chart, pts)
for p, c, o in zip(pts, closed, oracle):
    print(f"density at {p}: closed form {c.real:.4f}, FFT oracle {o.real:.4f}")

rng = np.random.default_rng(1)
left, right = autoconv.change_of_variables_check(autoconv.random_bump(chart, rng), chart)
print(f"change of variables on a random bump: {left:.10f} vs {right:.10f}")

rep = autoconv.blowup_test(1.0, chart, (-0.5, 0.5))
for row, cum in zip(rep.rows(), rep.cumulative):
    print(f"N = {row['N']:>2}: band mass {row['l2_mass']:.3f}, cumulative {cum:.3f}")
