"""Self-convolution of a density carried by a convex planar graph.

For the chart t -> (t, h(t)) the sum map (s, t) -> (s + t, h(s) + h(t)) is
injective on s < t with Jacobian |h'(s) - h'(t)|. Pushing zeta dsigma (x) zeta
dsigma through it gives the auto-convolution density in closed form; the
slabs S_N where 1/N <= t - s <= 1.1/N carry L2 mass bounded below uniformly
in N, which is what makes the square integrability of that density fail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .surfaces import SurfaceDensity, evaluate_density, mollifier

_GL = np.polynomial.legendre.leggauss


@dataclass(frozen=True, eq=False)
class CurveChart:
    """Convex graph chart h on (-eps, eps) with h'(0) = 0."""

    h: object
    dh: object
    d2h: object
    eps: float
    max_curvature_ratio: float = 1.25

    def __post_init__(self):
        t = np.linspace(-self.eps, self.eps, 401)
        k = self.d2h(t)
        if np.any(k <= 0):
            raise ValueError("h'' must be positive on the chart")
        if abs(float(self.dh(np.array([0.0]))[0])) > 1e-10:
            raise ValueError("the chart must satisfy h'(0) = 0")
        object.__setattr__(self, "curvature_ratio", float(k.max() / k.min()))

    @property
    def almost_constant(self):
        """Whether max h'' / min h'' stays within the configured ratio."""
        return self.curvature_ratio <= self.max_curvature_ratio

    def arclength_factor(self, t):
        return np.sqrt(1 + self.dh(t) ** 2)

    def jacobian(self, s, t):
        return np.abs(self.dh(s) - self.dh(t))


def parabola_chart(eps=1.0, a=1.0):
    """h(t) = a t^2 / 2."""
    return CurveChart(lambda t: 0.5 * a * np.asarray(t) ** 2, lambda t: a * np.asarray(t, float),
                      lambda t: np.full(np.shape(t), float(a)), float(eps))


def chart_from_surface(surface, **kw):
    if surface.kind != "graph_curve":
        raise ValueError("a curve chart needs a graph_curve surface")
    return CurveChart(surface.h, surface.dh, surface.d2h, surface.params["eps"], **kw)


def phi_tilde(Phi, chart):
    """(s, t) -> Phi(s + t, h(s) + h(t))."""
    def composed(s, t):
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        return Phi(s + t, chart.h(s) + chart.h(t))
    return composed


# ---------------------------------------------------------------------------
# inverting the sum map

@dataclass(frozen=True, eq=False)
class SumsetPoint:
    xi: np.ndarray
    eta: np.ndarray
    s: np.ndarray
    t: np.ndarray
    jacobian: np.ndarray
    residual: np.ndarray


def sumset_parameters(chart, xi, eta, iterations=200):
    """Vectorized inversion; returns (s, t, inside) without raising.

    Bisection runs on u = t - s, along which h(s) + h(t) is increasing.
    """
    xi, eta = np.broadcast_arrays(np.asarray(xi, float), np.asarray(eta, float))
    xi, eta = xi.ravel(), eta.ravel()
    u_max = 2 * chart.eps - np.abs(xi)
    g = lambda u: chart.h((xi - u) / 2) + chart.h((xi + u) / 2) - eta
    inside = (u_max > 0) & (g(np.zeros_like(xi)) <= 0)
    top = np.where(u_max > 0, u_max, 0.0)
    inside &= g(top) > 0
    lo, hi = np.zeros_like(xi), top.copy()
    for _ in range(iterations):
        mid = (lo + hi) / 2
        up = g(mid) > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
        if np.all(hi - lo <= 1e-16 * np.maximum(1, hi)):
            break
    u = (lo + hi) / 2
    return (xi - u) / 2, (xi + u) / 2, inside


def solve_sumset(chart, xi, eta, margin=1e-4):
    """Unique s < t with s + t = xi and h(s) + h(t) = eta.

    Raises for points outside the sumset and for points whose parameter gap
    t - s is below ``margin``, where the Jacobian degenerates.
    """
    xi_a, eta_a = np.broadcast_arrays(np.asarray(xi, float), np.asarray(eta, float))
    s, t, inside = sumset_parameters(chart, xi_a, eta_a)
    if not np.all(inside):
        raise ValueError("point outside the sumset of the chart")
    if np.any(t - s < margin):
        raise ValueError("degenerate point: on or near the diagonal boundary eta = 2 h(xi / 2)")
    res = np.maximum(np.abs(s + t - xi_a.ravel()),
                     np.abs(chart.h(s) + chart.h(t) - eta_a.ravel()))
    if np.any(res > 1e-10):
        raise ValueError(f"sumset solve did not converge (residual {res.max():.1e})")
    return SumsetPoint(xi_a.ravel(), eta_a.ravel(), s, t, chart.jacobian(s, t), res)


# ---------------------------------------------------------------------------
# change of variables

@dataclass(frozen=True)
class EllipticBump:
    """Smooth bump on an ellipse: amplitude * mollifier(radius) * (1 + slope * dxi)."""

    center: tuple
    radii: tuple
    amplitude: float = 1.0
    slope: float = 0.0
    odd: bool = False

    def __call__(self, xi, eta):
        a, b = self.radii
        dx = (np.asarray(xi) - self.center[0]) / a
        dy = (np.asarray(eta) - self.center[1]) / b
        v = self.amplitude * mollifier(np.sqrt(dx**2 + dy**2)) * (1 + self.slope * dx)
        return v * (np.asarray(xi) if self.odd else 1.0)

    def support_box(self):
        (x, y), (a, b) = self.center, self.radii
        return (x - a, x + a), (y - b, y + b)


def random_bump(chart, rng, margin=0.05):
    """A bump whose support lies inside the sumset interior."""
    for _ in range(1000):
        s, t = np.sort(rng.uniform(-0.7 * chart.eps, 0.7 * chart.eps, 2))
        if t - s < 0.3 * chart.eps:
            continue
        c = (s + t, float(chart.h(s) + chart.h(t)))
        radii = tuple(rng.uniform(0.05, 0.2, 2) * chart.eps * np.array([1, 0.5]))
        bump = EllipticBump(c, radii, rng.uniform(0.5, 2), rng.uniform(-0.5, 0.5))
        ang = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        bx = c[0] + (1 + margin) * radii[0] * np.cos(ang)
        by = c[1] + (1 + margin) * radii[1] * np.sin(ang)
        s_, t_, inside = sumset_parameters(chart, bx, by)
        if np.all(inside) and np.all(t_ - s_ > 1e-2):
            return bump
    raise RuntimeError("could not place a bump inside the sumset")


def _support_interval(f, lo, hi, samples=400, steps=32):
    """Hull [a, b] of {f != 0} in [lo, hi], with both ends refined by bisection."""
    x = np.linspace(lo, hi, samples)
    nz = np.abs(f(x)) > 0
    if not nz.any():
        return None
    i, j = np.argmax(nz), len(nz) - 1 - np.argmax(nz[::-1])
    a0, a1 = (x[i - 1], x[i]) if i > 0 else (x[0], x[0])
    b0, b1 = (x[j], x[j + 1]) if j < len(x) - 1 else (x[-1], x[-1])
    for _ in range(steps):
        m = (a0 + a1) / 2
        a0, a1 = (a0, m) if abs(f(np.array([m]))[0]) > 0 else (m, a1)
        m = (b0 + b1) / 2
        b0, b1 = (m, b1) if abs(f(np.array([m]))[0]) > 0 else (b0, m)
    return a0, b1


def change_of_variables_check(Phi, chart, node_count=128, box=None):
    """Both sides of  int int Phi~ |h'(s) - h'(t)| ds dt = 2 int int_sumset Phi.

    Left: by symmetry twice the integral over s < t, written in (s, u = t - s)
    so that the kink of |h'(s) - h'(t)| on the diagonal is a boundary, as an
    iterated Gauss-Legendre rule whose inner range is the support of Phi~
    on each line s = const (located by sampling and bisection). Right: tensor Gauss-Legendre over ``box`` (default
    ``Phi.support_box()``), after checking that no node with Phi != 0 lies
    outside the sumset.
    """
    if box is None:
        if not hasattr(Phi, "support_box"):
            raise ValueError("pass a box covering the support of Phi")
        box = Phi.support_box()
    x, w = _GL(node_count)
    (a, b), (c, d) = box
    X = (a + b) / 2 + (b - a) / 2 * x
    Y = (c + d) / 2 + (d - c) / 2 * x
    XI, ETA = np.meshgrid(X, Y, indexing="ij")
    vals = Phi(XI, ETA)
    live = np.abs(vals) > 1e-300
    _, _, inside = sumset_parameters(chart, XI[live], ETA[live])
    if not np.all(inside):
        raise ValueError("support of Phi escapes the sumset")
    right = 2 * np.sum(vals * np.outer((b - a) / 2 * w, (d - c) / 2 * w))

    # left side as an iterated integral over the exact support in (s, u)
    eps = chart.eps
    Pt = phi_tilde(Phi, chart)
    u_span = lambda s0: _support_interval(lambda u: Pt(s0, s0 + u), 0.0, eps - s0)
    # outer range: padded hull of the parameters of the sumset part of the box
    (a, b), (c, d) = box
    X, Y = np.meshgrid(np.linspace(a, b, 64), np.linspace(c, d, 64), indexing="ij")
    ss, _, inside = sumset_parameters(chart, X, Y)
    s_int = None
    if inside.any():
        pad = 0.05 * np.ptp(ss[inside]) + 1e-3
        s_int = (max(ss[inside].min() - pad, -eps), min(ss[inside].max() + pad, eps))
    left = 0.0
    if s_int is not None:
        s0, s1 = s_int
        for sv, wv in zip((s0 + s1) / 2 + (s1 - s0) / 2 * x, (s1 - s0) / 2 * w):
            span = u_span(sv)
            if span is None:
                continue
            u = (span[0] + span[1]) / 2 + (span[1] - span[0]) / 2 * x
            left += wv * np.sum((span[1] - span[0]) / 2 * w * Pt(sv, sv + u) * chart.jacobian(sv, sv + u))
    left *= 2
    return float(left), float(right)


# ---------------------------------------------------------------------------
# the density

def _zeta_at(zeta, t):
    if isinstance(zeta, SurfaceDensity):
        return evaluate_density(zeta, t)
    if callable(zeta):
        return np.asarray(zeta(t), complex)
    return np.full(np.shape(t), complex(zeta))


def density_from_parameters(zeta, chart, s, t, measure="arclength"):
    """2 zeta(s) zeta(t) a(s) a(t) / |h'(s) - h'(t)| at solved parameters.

    ``measure="arclength"`` treats zeta as a density against arclength
    (a = sqrt(1 + h'^2)); ``measure="parameter"`` against dt (a = 1). The
    factor 2 counts the two preimages (s, t) and (t, s).
    """
    if measure == "arclength":
        a = chart.arclength_factor(s) * chart.arclength_factor(t)
    elif measure == "parameter":
        a = 1.0
    else:
        raise ValueError(f"unknown measure {measure!r}")
    return 2 * _zeta_at(zeta, s) * _zeta_at(zeta, t) * a / chart.jacobian(s, t)


def autoconvolution_density(zeta, chart, xi, eta, margin=1e-4, measure="arclength"):
    """Density of (zeta dsigma) * (zeta dsigma) at points of the sumset interior."""
    p = solve_sumset(chart, xi, eta, margin)
    out = density_from_parameters(zeta, chart, p.s, p.t, measure)
    return out.reshape(np.shape(np.broadcast_arrays(np.asarray(xi), np.asarray(eta))[0]))


def fft_autoconvolution(zeta, chart, points, widths=(0.04, 0.03, 0.02), n=1024,
                        node_count=4000, measure="arclength"):
    """Brute-force reference: mollify zeta dsigma by Gaussians, convolve by FFT.

    Each Gaussian of width w (exp(-|x|^2 / (2 w^2)) normalized) smooths the
    self-convolution at width sqrt(2) w; values at ``points`` are extrapolated
    to w = 0 by a fit linear in w^2. Returns (extrapolated, per-width values).
    """
    from .interp import lagrange_uniform
    from scipy.signal import fftconvolve

    eps = chart.eps
    t = np.linspace(-eps, eps, node_count + 1)
    t = (t[:-1] + t[1:]) / 2
    dt = 2 * eps / node_count
    mass = _zeta_at(zeta, t) * dt
    if measure == "arclength":
        mass = mass * chart.arclength_factor(t)
    px, py = t, chart.h(t)
    hx = max(abs(px).max(), 1e-9) + 5 * max(widths)
    lo_y, hi_y = py.min() - 5 * max(widths), py.max() + 5 * max(widths)
    xs = np.linspace(-hx, hx, n)
    ys = np.linspace(lo_y, hi_y, n)
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]
    pts = np.atleast_2d(points)
    per = []
    for w in widths:
        gx = np.exp(-((xs[:, None] - px[None]) ** 2) / (2 * w * w)) / np.sqrt(2 * np.pi) / w
        gy = np.exp(-((ys[:, None] - py[None]) ** 2) / (2 * w * w)) / np.sqrt(2 * np.pi) / w
        field = (gx * mass) @ gy.T  # field[i, j] at (xs[i], ys[j])
        conv = fftconvolve(field, field, mode="full") * dx * dy
        # full-mode node (i, j) sits at (2 xs[0] + i dx, 2 ys[0] + j dy)
        origin = (2 * xs[0], 2 * ys[0])
        per.append(lagrange_uniform(conv, origin, (dx, dy), pts, order=6))
    per = np.array(per)
    A = np.stack([np.ones(len(widths)), np.asarray(widths) ** 2], 1)
    coef = np.linalg.lstsq(A, per, rcond=None)[0]
    return coef[0], per


# ---------------------------------------------------------------------------
# S_N slabs and the blow-up

@dataclass(frozen=True, eq=False)
class SNRegion:
    N: int
    interval: tuple
    s: np.ndarray
    t: np.ndarray
    weights: np.ndarray  # dxi deta = |h'(s) - h'(t)| ds du
    jacobian: np.ndarray

    @property
    def points(self):
        return np.stack([self.s + self.t, self._h_sum], 1)

    @property
    def measure(self):
        return float(self.weights.sum())

    @property
    def parameter_band(self):
        return (1.0 / self.N, 1.1 / self.N)


def sn_region(chart, interval, N, s_nodes=96, u_nodes=12):
    """Quadrature over S_N = image of {s, t in I, 1/N <= t - s <= 1.1/N}."""
    a, b = map(float, interval)
    if N < 4:
        raise ValueError("N must be at least 4")
    if not (-chart.eps < a < b < chart.eps):
        raise ValueError("interval must lie inside the chart")
    if 1.1 / N >= b - a:
        raise ValueError("1.1 / N must be smaller than the interval length")
    xu, wu = _GL(u_nodes)
    xs, ws = _GL(s_nodes)
    u = (1.05 + 0.05 * xu) / N
    wu = 0.05 / N * wu
    U = u[:, None]
    L = b - U - a  # s ranges over [a, b - u]
    S = a + L * (xs[None] + 1) / 2
    W = wu[:, None] * L / 2 * ws[None]
    T = S + U
    J = chart.jacobian(S, T)
    reg = SNRegion(N, (a, b), S.ravel(), T.ravel(), (W * J).ravel(), J.ravel())
    object.__setattr__(reg, "_h_sum", (chart.h(S) + chart.h(T)).ravel())
    return reg


@dataclass(frozen=True, eq=False)
class BlowupReport:
    N: np.ndarray
    measure: np.ndarray
    min_density: np.ndarray
    mass: np.ndarray
    large_fraction: np.ndarray  # share of |S_N| where |density| >= N (by measure)
    zeta_fraction: float

    @property
    def cumulative(self):
        return np.cumsum(self.mass)

    def rows(self):
        for i, N in enumerate(self.N):
            yield {"N": int(N), "measure": float(self.measure[i]),
                   "min_density": float(self.min_density[i]), "l2_mass": float(self.mass[i]),
                   "large_fraction": float(self.large_fraction[i])}


def lebesgue_fraction(zeta, interval, samples=2001):
    t = np.linspace(*interval, samples)
    return float(np.mean(np.abs(_zeta_at(zeta, t)) >= 1))


def blowup_test(zeta, chart, interval, N_list=(8, 16, 32, 64), fraction=0.9,
                measure="arclength"):
    """Per-N integral of |density|^2 over S_N.

    Requires |zeta| >= 1 on at least ``fraction`` of the interval.
    """
    frac = lebesgue_fraction(zeta, interval)
    if frac < fraction:
        raise ValueError(f"|zeta| >= 1 holds on a fraction {frac:.3f} < {fraction} of the interval")
    Ns, meas, mins, masses, large = [], [], [], [], []
    for N in N_list:
        reg = sn_region(chart, interval, N)
        dens = np.abs(density_from_parameters(zeta, chart, reg.s, reg.t, measure))
        Ns.append(N)
        meas.append(reg.measure)
        mins.append(dens.min())
        masses.append(np.sum(dens**2 * reg.weights))
        large.append(np.sum(reg.weights[dens >= N]) / reg.measure)
    return BlowupReport(np.array(Ns), np.array(meas), np.array(mins), np.array(masses),
                        np.array(large), frac)
