"""Compact hypersurfaces with surface-measure quadrature, charts and extension.

Three kinds are supported: a centred circle, a centred sphere and a convex
graph curve ``{(t, h(t)) : |t| < eps}``. Each :class:`Surface` carries
quadrature nodes and weights for the surface measure, unit normals and
curvature. :class:`SurfaceDensity` holds the values of a density at the nodes
and so represents the measure ``zeta dsigma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json

import numpy as np
from numpy.polynomial import legendre as npleg

from .fields import FREQUENCY, SampledField
from .interp import interpolate_field, lagrange_uniform


# ---------------------------------------------------------------------------
# smooth one-dimensional profiles

def mollifier(t):
    """exp(1 - 1/(1 - t^2)) on (-1, 1), zero outside; equals 1 at t = 0."""
    t = np.asarray(t, float)
    out = np.zeros_like(t)
    m = np.abs(t) < 1
    out[m] = np.exp(1.0 - 1.0 / (1.0 - t[m] ** 2))
    return out


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, float)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def plateau(t, inner=0.5, outer=1.0):
    """Even bump equal to 1 for |t| <= inner and 0 for |t| >= outer."""
    t = np.abs(np.asarray(t, float))
    return smooth_step((outer - t) / (outer - inner))


@dataclass(frozen=True)
class BumpProfile:
    """Mollifier rescaled to support radius ``support``; psi(0) = 1."""

    support: float = 0.05

    def __post_init__(self):
        if not self.support > 0:
            raise ValueError("support radius must be positive")

    def __call__(self, t):
        return mollifier(np.asarray(t, float) / self.support)


# ---------------------------------------------------------------------------
# surfaces

@dataclass(frozen=True, eq=False)
class Surface:
    kind: str
    params: dict
    nodes: np.ndarray
    weights: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    # parameter of each node: angle (circle), (theta, phi) (sphere), t (graph)
    parameters: np.ndarray = None
    h: object = None
    dh: object = None
    d2h: object = None

    @property
    def d(self):
        return self.nodes.shape[1]

    @property
    def size(self):
        return len(self.weights)

    @property
    def total_measure(self):
        return float(self.weights.sum())

    def integrate(self, values):
        return np.sum(np.asarray(values) * self.weights)

    @property
    def rotation_invariant(self):
        return self.kind in ("circle", "sphere")

    def to_dict(self):
        return {
            "kind": self.kind,
            "parameters": {k: v for k, v in self.params.items() if _jsonable(v)},
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
        }


def _jsonable(v):
    try:
        json.dumps(v)
        return True
    except TypeError:
        return False


def make_circle(radius=1.0, node_count=256):
    """Equally spaced nodes; the trapezoid weights are exact for trigonometric
    polynomials of degree below ``node_count``."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    if node_count < 32:
        raise ValueError("node_count must be at least 32")
    theta = 2 * np.pi * np.arange(node_count) / node_count
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return Surface(
        kind="circle",
        params={"radius": float(radius), "node_count": int(node_count)},
        nodes=radius * u,
        weights=np.full(node_count, 2 * np.pi * radius / node_count),
        normals=u,
        curvature=np.full(node_count, 1.0 / radius),
        parameters=theta,
    )


def make_sphere(radius=1.0, resolution=(32, 64)):
    """Gauss-Legendre in cos(theta) times a uniform rule in phi."""
    nt, nphi = (resolution, 2 * resolution) if np.isscalar(resolution) else resolution
    if not radius > 0:
        raise ValueError("radius must be positive")
    if nt < 16 or nphi < 32:
        raise ValueError("sphere resolution must be at least 16 x 32")
    mu, wmu = npleg.leggauss(nt)
    phi = 2 * np.pi * np.arange(nphi) / nphi
    MU, PHI = np.meshgrid(mu, phi, indexing="ij")
    S = np.sqrt(1 - MU**2)
    u = np.stack([S * np.cos(PHI), S * np.sin(PHI), MU], axis=-1).reshape(-1, 3)
    w = (wmu[:, None] * np.full(nphi, 2 * np.pi / nphi)[None, :]).reshape(-1) * radius**2
    return Surface(
        kind="sphere",
        params={"radius": float(radius), "resolution": [int(nt), int(nphi)]},
        nodes=radius * u,
        weights=w,
        normals=u,
        curvature=np.full(len(w), 1.0 / radius),
        parameters=np.stack([np.arccos(MU).ravel(), PHI.ravel()], axis=1),
    )


def _num_d1(h, t, step=1e-4):
    return (h(t - 2 * step) - 8 * h(t - step) + 8 * h(t + step) - h(t + 2 * step)) / (12 * step)


def _num_d2(h, t, step=1e-3):
    return (-h(t - 2 * step) + 16 * h(t - step) - 30 * h(t) + 16 * h(t + step)
            - h(t + 2 * step)) / (12 * step**2)


def make_graph_curve(h, eps, node_count=64, dh=None, d2h=None):
    """Graph ``{(t, h(t)) : |t| < eps}`` of a convex function with h'(0) = 0.

    Derivatives are taken from ``dh``/``d2h`` when given, otherwise from
    fourth-order central differences.
    """
    if node_count < 64:
        raise ValueError("node_count must be at least 64")
    if not eps > 0:
        raise ValueError("eps must be positive")
    h = np.vectorize(h) if not _is_vectorized(h) else h
    dh = dh if dh is not None else (lambda t: _num_d1(h, np.asarray(t, float)))
    d2h = d2h if d2h is not None else (lambda t: _num_d2(h, np.asarray(t, float)))
    probe = np.linspace(-eps, eps, 513)
    if np.any(d2h(probe) <= 0):
        raise ValueError("h is not strictly convex on the interval (h'' <= 0 somewhere)")
    if abs(float(dh(np.array(0.0)))) > 1e-8:
        raise ValueError("graph must be normalized so that h'(0) = 0")
    x, w = npleg.leggauss(node_count)
    t = eps * x
    hp = dh(t)
    arc = np.sqrt(1 + hp**2)
    nodes = np.stack([t, h(t)], axis=1)
    normals = np.stack([-hp, np.ones_like(hp)], axis=1) / arc[:, None]
    return Surface(
        kind="graph_curve",
        params={"eps": float(eps), "node_count": int(node_count)},
        nodes=nodes,
        weights=eps * w * arc,
        normals=normals,
        curvature=d2h(t) / arc**3,
        parameters=t,
        h=h,
        dh=dh,
        d2h=d2h,
    )


def _is_vectorized(h):
    try:
        out = h(np.array([0.0, 0.1]))
        return np.shape(out) == (2,)
    except Exception:
        return False


def parabola(eps=1.0, node_count=64, a=1.0):
    """Graph of a t^2 / 2 with exact derivatives."""
    return make_graph_curve(
        lambda t: 0.5 * a * np.asarray(t, float) ** 2, eps, node_count,
        dh=lambda t: a * np.asarray(t, float),
        d2h=lambda t: np.full(np.shape(t), a, dtype=float),
    )


# ---------------------------------------------------------------------------
# densities

@dataclass(frozen=True, eq=False)
class SurfaceDensity:
    surface: Surface
    values: np.ndarray
    # interpolation error estimate when produced from sampled data
    error: float = field(default=0.0)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.surface.size,):
            raise ValueError("density must have one value per quadrature node")
        if not np.all(np.isfinite(v)):
            raise ValueError("density values must be finite")
        object.__setattr__(self, "values", v)

    def integral(self):
        return self.surface.integrate(self.values)

    def inner(self, other):
        """L2(sigma) pairing <self, other> = int self * conj(other) dsigma."""
        return self.surface.integrate(self.values * np.conj(other.values))

    def with_values(self, values):
        return SurfaceDensity(self.surface, values)

    def __call__(self, param):
        """Evaluate the interpolating density at arbitrary surface parameters."""
        return evaluate_density(self, param)

    def to_dict(self):
        out = self.surface.to_dict()
        out["values"] = {"real": self.values.real.tolist(), "imag": self.values.imag.tolist()}
        return out


def density(surface, func):
    """Density whose value at each node is ``func(nodes)``."""
    vals = func(surface.nodes)
    return SurfaceDensity(surface, np.broadcast_to(np.asarray(vals, complex), (surface.size,)))


def density_from_dict(data):
    kind = data["kind"]
    p = data.get("parameters", {})
    if kind == "circle":
        surf = make_circle(p["radius"], p["node_count"])
    elif kind == "sphere":
        surf = make_sphere(p["radius"], tuple(p["resolution"]))
    else:
        raise ValueError(f"cannot rebuild a {kind} surface from JSON")
    vals = np.asarray(data["values"]["real"]) + 1j * np.asarray(data["values"]["imag"])
    return SurfaceDensity(surf, vals)


def _trig_eval(values, theta):
    """Evaluate the trigonometric interpolant of equally spaced samples."""
    n = len(values)
    c = np.fft.fft(values) / n
    k = np.fft.fftfreq(n, 1.0 / n)
    if n % 2 == 0:
        # split the Nyquist mode symmetrically so real data interpolate to real values
        c = np.concatenate([c, [c[n // 2] / 2]])
        c[n // 2] /= 2
        k = np.concatenate([k, [n // 2]])
        k[n // 2] = -n // 2
    theta = np.asarray(theta, float)
    return np.exp(1j * np.multiply.outer(theta, k)) @ c


def _legendre_coeffs(surface, values):
    x = surface.parameters / surface.params["eps"]
    n = len(x)
    _, w = npleg.leggauss(n)
    V = npleg.legvander(x, n - 1)
    return (V * (w * values)[:, None]).sum(axis=0) * (2 * np.arange(n) + 1) / 2


def evaluate_density(zeta, param):
    """Interpolate a density at surface parameters.

    circle: angle (trigonometric interpolation); graph_curve: t (Legendre
    interpolation through the Gauss nodes, zero outside the chart).
    """
    s = zeta.surface
    if s.kind == "circle":
        return _trig_eval(zeta.values, param)
    if s.kind == "graph_curve":
        eps = s.params["eps"]
        t = np.asarray(param, float)
        c = _legendre_coeffs(s, zeta.values)
        out = npleg.legval(t / eps, c)
        return np.where(np.abs(t) < eps, out, 0.0)
    raise ValueError(f"off-node evaluation is not available on a {s.kind}")


# ---------------------------------------------------------------------------
# trace

def trace(F, surface, order=4):
    """Values of a frequency function at the quadrature nodes.

    ``F`` is either a callable on points of shape (m, d) or a frequency
    :class:`SampledField`, evaluated by order-4 local interpolation; in the
    sampled case the returned density carries an error estimate (the gap to
    the order-6 interpolant).
    """
    if callable(F) and not isinstance(F, SampledField):
        return SurfaceDensity(surface, np.asarray(F(surface.nodes), complex))
    if F.domain != FREQUENCY:
        raise ValueError("trace expects a frequency-domain field")
    lo = F.grid.frequency_axes()
    lo = np.array([a[0] for a in lo]) + F.carrier
    hi = -lo + 2 * F.carrier - F.grid.dual_spacing
    margin = 3 * F.grid.dual_spacing
    if np.any(surface.nodes < lo + margin) or np.any(surface.nodes > hi - margin):
        raise ValueError("surface nodes fall outside the frequency box")
    v4 = interpolate_field(F, surface.nodes, order=order)
    v6 = interpolate_field(F, surface.nodes, order=order + 2)
    err = float(np.max(np.abs(v4 - v6))) if len(v4) else 0.0
    return SurfaceDensity(surface, v4, error=err)


# ---------------------------------------------------------------------------
# partition of unity

def _circle_chart_halfwidth(chart_count):
    spacing = 2 * np.pi / chart_count
    if spacing / 2 >= np.pi / 2 - 1e-9:
        raise ValueError("need at least 3 charts to cover a circle with graph charts")
    return min(0.75 * spacing, 0.5 * (spacing / 2 + np.pi / 2))


def _sphere_chart_directions():
    e = np.eye(3)
    return np.concatenate([e, -e])


_SPHERE_CAP = np.deg2rad(70.0)


def _chart_bumps(surface, chart_count, points=None):
    """Unnormalized chart bumps at ``points`` (default: the nodes)."""
    if surface.kind == "circle":
        hw = _circle_chart_halfwidth(chart_count)
        theta = surface.parameters if points is None else points
        centers = 2 * np.pi * np.arange(chart_count) / chart_count
        delta = np.angle(np.exp(1j * (theta[None, :] - centers[:, None])))
        return mollifier(delta / hw)
    if surface.kind == "sphere":
        if chart_count != 6:
            raise ValueError("the sphere atlas uses the 6 coordinate caps")
        u = surface.normals if points is None else points
        ang = np.arccos(np.clip(_sphere_chart_directions() @ u.T, -1, 1))
        return mollifier(ang / _SPHERE_CAP)
    raise ValueError("partition of unity is built for circles and spheres")


def partition_of_unity(surface, chart_count=None):
    """Smooth nonnegative densities summing to one, each inside a graph chart.

    Circle charts are angular caps of half-width below pi/2 centred at
    angles 2 pi k / K; the sphere uses the six caps around +-e_i.
    """
    if chart_count is None:
        chart_count = 4 if surface.kind == "circle" else 6
    b = _chart_bumps(surface, chart_count)
    total = b.sum(axis=0)
    if np.any(total <= 0):
        raise ValueError("charts do not cover the surface")
    return [SurfaceDensity(surface, bi / total) for bi in b]


# ---------------------------------------------------------------------------
# extension operator

class ExtensionFunction:
    """Closed-form extension of a surface density to a frequency function.

    Calling it on points of shape (m, d) evaluates the extension; ``sample``
    discretizes it on a grid's frequency nodes.
    """

    def __init__(self, func, tube, description=""):
        self._func = func
        self.tube = tube  # bounding box (lo, hi) of the support
        self.description = description

    def __call__(self, points):
        return self._func(np.atleast_2d(np.asarray(points, float)))

    def sample(self, grid, carrier=None):
        c = np.zeros(grid.d) if carrier is None else np.asarray(carrier, float)
        lo = np.array([a[0] for a in grid.frequency_axes()]) + c
        hi = -lo + 2 * c
        if np.any(self.tube[0] < lo) or np.any(self.tube[1] > hi):
            raise ValueError("extension tube leaves the frequency box")
        pts = grid.frequency_coords() + c
        vals = self(pts.reshape(-1, grid.d)).reshape(grid.shape)
        return SampledField(grid, FREQUENCY, vals, c)


def ext_operator(phi, psi=None, chart_count=4):
    """Extension Ext[phi] with Pi_Sigma(Ext[phi]) = phi.

    On a graph chart, Ext[phi](x, y) = phi(x, h(x)) psi(y - h(x)). On the circle
    the density is split by :func:`partition_of_unity` and each piece is
    extended in its own chart, written as a graph over the chart's tangent
    line. ``psi`` defaults to a mollifier whose support is 0.1 of the chart
    thickness.
    """
    s = phi.surface
    if s.kind == "graph_curve":
        eps = s.params["eps"]
        if psi is None:
            psi = BumpProfile(0.1 * eps)
        coeffs = _legendre_coeffs(s, phi.values)
        h = s.h

        def func(pts):
            x, y = pts[:, 0], pts[:, 1]
            inside = np.abs(x) < eps
            xs = np.where(inside, x, 0.0)
            val = npleg.legval(xs / eps, coeffs) * psi(y - h(xs))
            return np.where(inside, val, 0.0)

        hv = h(np.linspace(-eps, eps, 257))
        tube = (np.array([-eps, hv.min() - psi.support]), np.array([eps, hv.max() + psi.support]))
        return ExtensionFunction(func, tube, "graph chart")

    if s.kind == "circle":
        r = s.params["radius"]
        hw = _circle_chart_halfwidth(chart_count)
        if psi is None:
            psi = BumpProfile(0.1 * r * (1 - np.sin(hw)))
        # keep the tube on the near branch of the circle inside every chart
        if psi.support >= r * np.cos(hw):
            raise ValueError("psi support too large for the chart atlas")
        centers = 2 * np.pi * np.arange(chart_count) / chart_count
        vals = phi.values

        def func(pts):
            out = np.zeros(len(pts), dtype=complex)
            for k, c in enumerate(centers):
                u = np.array([np.cos(c), np.sin(c)])
                v = np.array([-np.sin(c), np.cos(c)])
                x = pts @ v
                y = pts @ u
                near = np.abs(x) < r * np.sin(hw)
                if not np.any(near):
                    continue
                xn = x[near]
                theta = c + np.arcsin(xn / r)
                foot = np.sqrt(r**2 - xn**2)
                bumps = _chart_bumps(s, chart_count, points=theta)
                weight = bumps[k] / bumps.sum(axis=0)
                out[near] += weight * _trig_eval(vals, theta) * psi(y[near] - foot)
            return out

        R = r + psi.support
        return ExtensionFunction(func, (np.array([-R, -R]), np.array([R, R])), "circle atlas")
    raise ValueError(f"extension is implemented for graph curves and circles, not {s.kind}")


__all__ = [
    "BumpProfile", "Surface", "SurfaceDensity", "ExtensionFunction", "make_circle",
    "make_sphere", "make_graph_curve", "parabola", "trace", "ext_operator",
    "partition_of_unity", "density", "evaluate_density", "mollifier", "plateau",
    "smooth_step", "lagrange_uniform",
]
