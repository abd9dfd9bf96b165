"""Local tensor-product Lagrange interpolation on uniform grids."""

import itertools

import numpy as np


def _weights(u, order):
    """Stencil start index and Lagrange weights for fractional positions ``u``."""
    start = np.floor(u).astype(int) - (order // 2 - 1)
    t = u - start  # position inside the stencil, nodes at 0..order-1
    w = np.ones(u.shape + (order,))
    for j in range(order):
        for m in range(order):
            if m != j:
                w[..., j] *= (t - m) / (j - m)
    return start, w


def lagrange_uniform(values, origin, step, points, order=4, periodic=False, fill=0.0):
    """Interpolate grid ``values`` at ``points`` (shape (m, d)).

    Node ``i`` along axis ``a`` sits at ``origin[a] + i * step[a]``. Points whose
    stencil leaves the grid get ``fill`` unless ``periodic`` is set.
    """
    values = np.asarray(values)
    d = values.ndim
    pts = np.atleast_2d(np.asarray(points, float))
    if pts.shape[1] != d:
        raise ValueError("points have the wrong dimension")
    starts, weights = [], []
    inside = np.ones(len(pts), dtype=bool)
    for a in range(d):
        u = (pts[:, a] - origin[a]) / step[a]
        s, w = _weights(u, order)
        n = values.shape[a]
        if not periodic:
            inside &= (s >= 0) & (s + order - 1 <= n - 1)
        starts.append(s)
        weights.append(w)
    out = np.zeros(len(pts), dtype=np.result_type(values.dtype, float))
    for offs in itertools.product(range(order), repeat=d):
        idx = []
        wprod = np.ones(len(pts))
        for a, o in enumerate(offs):
            i = starts[a] + o
            n = values.shape[a]
            idx.append(np.mod(i, n) if periodic else np.clip(i, 0, n - 1))
            wprod = wprod * weights[a][:, o]
        out += wprod * values[tuple(idx)]
    if not periodic:
        out[~inside] = fill
    return out


def interpolate_field(f, points, order=4, fill=0.0):
    """Interpolate a :class:`~fvanish.fields.SampledField` at points of its own domain."""
    from .fields import SPACE

    if f.domain == SPACE:
        axes = f.grid.axes()
        step = f.grid.spacing
        pts = np.asarray(points, float)
    else:
        axes = f.grid.frequency_axes()
        step = f.grid.dual_spacing
        pts = np.asarray(points, float) - f.carrier
    origin = [ax[0] for ax in axes]
    return lagrange_uniform(f.values, origin, step, pts, order=order, fill=fill)


class SplineField:
    """Prefiltered B-spline interpolant of a sampled field (scipy.ndimage).

    A cubic spline is fourth-order accurate; values outside the box are zero.
    Build once and evaluate many times, as rotation averaging does.
    """

    def __init__(self, f, order=3):
        from scipy.ndimage import spline_filter

        from .fields import SPACE

        self.order = order
        self.d = f.d
        if f.domain == SPACE:
            axes, self.step, self.shift = f.grid.axes(), f.grid.spacing, np.zeros(f.d)
        else:
            axes, self.step, self.shift = f.grid.frequency_axes(), f.grid.dual_spacing, f.carrier
        self.origin = np.array([ax[0] for ax in axes])
        kw = dict(order=order, mode="grid-constant")
        self.coef = [spline_filter(f.values.real, **kw), spline_filter(f.values.imag, **kw)]

    def __call__(self, points):
        from scipy.ndimage import map_coordinates

        pts = np.atleast_2d(np.asarray(points, float)) - self.shift
        u = ((pts - self.origin) / self.step).T
        kw = dict(order=self.order, prefilter=False, mode="grid-constant")
        return map_coordinates(self.coef[0], u, **kw) + 1j * map_coordinates(self.coef[1], u, **kw)
