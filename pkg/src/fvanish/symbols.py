"""Polynomial Fourier multipliers, division by a symbol, and the Sobolev experiment.

A :class:`DiffPolynomial` S acts as S(D/2 pi i): on the frequency side it is
multiplication by S(xi). Dividing a spectrum that vanishes on the zero set
Sigma = {S = 0} by S is done in two regimes. Away from a tube around Sigma
the quotient is taken directly; inside the tube the value at the nearest
point of Sigma is subtracted first, which removes the numerically nonzero
trace and keeps the quotient smooth.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .fields import (FREQUENCY, SPACE, SampledField, fourier_transform,
                     inverse_fourier_transform, lp_norm, make_grid)
from .reports import ExperimentReport, Timer
from .restriction import evaluate_spectrum, fit_power_law
from .surfaces import plateau


# ---------------------------------------------------------------------------
# polynomials

class DiffPolynomial:
    """Real polynomial in d variables stored as {multi-index: coefficient}."""

    def __init__(self, coeffs, d=None):
        items = {tuple(int(e) for e in k): float(v) for k, v in dict(coeffs).items()}
        if d is None:
            if not items:
                raise ValueError("give d for the zero polynomial")
            d = len(next(iter(items)))
        for k in items:
            if len(k) != d or min(k) < 0:
                raise ValueError(f"bad multi-index {k} for d = {d}")
        self.d = d
        self.coeffs = {k: v for k, v in items.items() if v != 0.0}

    # algebra
    def __add__(self, other):
        other = _as_poly(other, self.d)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return DiffPolynomial(out, self.d)

    __radd__ = __add__

    def __neg__(self):
        return DiffPolynomial({k: -v for k, v in self.coeffs.items()}, self.d)

    def __sub__(self, other):
        return self + (-_as_poly(other, self.d))

    def __rsub__(self, other):
        return _as_poly(other, self.d) - self

    def __mul__(self, other):
        other = _as_poly(other, self.d)
        out = {}
        for (a, u), (b, v) in itertools.product(self.coeffs.items(), other.coeffs.items()):
            k = tuple(i + j for i, j in zip(a, b))
            out[k] = out.get(k, 0.0) + u * v
        return DiffPolynomial(out, self.d)

    __rmul__ = __mul__

    def __pow__(self, k):
        if int(k) != k or k < 0:
            raise ValueError("powers must be nonnegative integers")
        out = DiffPolynomial({(0,) * self.d: 1.0}, self.d)
        for _ in range(int(k)):
            out = out * self
        return out

    def __repr__(self):
        return f"DiffPolynomial({self.coeffs!r}, d={self.d})"

    @property
    def degree(self):
        return max((sum(k) for k in self.coeffs), default=0)

    def leading_form(self):
        m = self.degree
        return DiffPolynomial({k: v for k, v in self.coeffs.items() if sum(k) == m}, self.d)

    # evaluation
    def __call__(self, xi):
        xi = np.asarray(xi, float)
        out = np.zeros(xi.shape[:-1])
        for k, v in self.coeffs.items():
            term = np.full(xi.shape[:-1], v)
            for i, e in enumerate(k):
                if e:
                    term = term * xi[..., i] ** e
            out = out + term
        return out

    def partial(self, i):
        out = {}
        for k, v in self.coeffs.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                out[tuple(kk)] = out.get(tuple(kk), 0.0) + v * k[i]
        return DiffPolynomial(out, self.d)

    def gradient(self, xi):
        return np.stack([self.partial(i)(xi) for i in range(self.d)], axis=-1)

    # certificates
    def grows_at_infinity(self, margin=1e-6, samples=512):
        """Whether the leading form stays away from zero on a sphere sample.

        Then |S(xi)| >= c |xi|^m for large xi, which is what the division
        solver needs far from Sigma.
        """
        return self.growth_margin(samples) > margin

    def growth_margin(self, samples=512):
        lead = self.leading_form()
        if self.degree == 0:
            return 0.0
        if self.d == 1:
            pts = np.array([[-1.0], [1.0]])
        elif self.d == 2:
            a = 2 * np.pi * np.arange(samples) / samples
            pts = np.stack([np.cos(a), np.sin(a)], 1)
        else:
            rng = np.random.default_rng(0)
            pts = rng.normal(size=(samples, self.d))
            pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        return float(np.abs(lead(pts)).min())

    def check_gradient(self, nodes, g_min=1e-6):
        """Minimum |grad S| over ``nodes``; raises when it is below ``g_min``."""
        g = np.linalg.norm(self.gradient(np.atleast_2d(nodes)), axis=-1)
        if g.size and g.min() < g_min:
            raise ValueError(f"grad S vanishes on the zero set (min {g.min():.2e})")
        return float(g.min()) if g.size else float("inf")


def _as_poly(x, d):
    if isinstance(x, DiffPolynomial):
        if x.d != d:
            raise ValueError("polynomials in different numbers of variables")
        return x
    return DiffPolynomial({(0,) * d: float(x)}, d)


def diff_poly(coeffs, d=None):
    return DiffPolynomial(coeffs, d)


def helmholtz_symbol(d):
    """|xi|^2 - 1, so that S(D/2 pi i) = -(Laplacian / 4 pi^2 + 1)."""
    c = {tuple(2 * (j == i) for j in range(d)): 1.0 for i in range(d)}
    c[(0,) * d] = -1.0
    return DiffPolynomial(c, d)


def coordinate_symbol(d, i=0):
    return DiffPolynomial({tuple(int(j == i) for j in range(d)): 1.0}, d)


# ---------------------------------------------------------------------------
# multipliers

def multiplier(f, symbol_values):
    """F^{-1}[m * F f] for a space field and multiplier values on its frequency nodes."""
    if f.domain != SPACE:
        raise ValueError("multipliers act on space-domain fields")
    F = fourier_transform(f)
    return inverse_fourier_transform(F.with_values(F.values * symbol_values))


def apply_diff_poly(S, g):
    """S(D / 2 pi i) g, exactly on the grid."""
    if S.d != g.d:
        raise ValueError("symbol and field dimensions differ")
    return multiplier(g, S(g.grid.frequency_coords() + g.carrier))


def power_space_member(S, k, g):
    """S(D / 2 pi i)^k g by the multiplier S(xi)^k."""
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    return multiplier(g, S(g.grid.frequency_coords() + g.carrier) ** int(k))


# ---------------------------------------------------------------------------
# the zero set

def newton_project(S, points, tol=1e-13, max_iter=60):
    """Nearest-point projection onto {S = 0} by Newton steps along grad S."""
    p = np.array(np.atleast_2d(points), float)
    for _ in range(max_iter):
        v = S(p)
        g = S.gradient(p)
        gg = np.sum(g * g, axis=-1)
        if np.any(gg == 0):
            raise ValueError("Newton projection hit a critical point of S")
        p = p - (v / gg)[:, None] * g
        if np.all(np.abs(S(p)) <= tol * np.maximum(1, np.sqrt(gg))):
            return p
    raise ValueError("Newton projection did not converge")


def zero_set_nodes(S, half_width=3.0, n=256):
    """Sample points of {S = 0}: real roots for d = 1, projected grid points otherwise."""
    if S.d == 1:
        deg = S.degree
        c = [S.coeffs.get((k,), 0.0) for k in range(deg, -1, -1)]
        r = np.roots(c) if deg else np.array([])
        r = r[np.abs(r.imag) < 1e-9].real
        return np.sort(r[np.abs(r) <= half_width])[:, None]
    t = np.linspace(-half_width, half_width, n)
    X = np.stack(np.meshgrid(*([t] * S.d), indexing="ij"), -1).reshape(-1, S.d)
    step = t[1] - t[0]
    v = S(X)
    g = np.linalg.norm(S.gradient(X), axis=-1)
    near = np.abs(v) < 0.75 * g * step
    if not near.any():
        return np.zeros((0, S.d))
    return newton_project(S, X[near])


# ---------------------------------------------------------------------------
# division

@dataclass
class Quotient:
    """The divided spectrum as a callable, with the settings that produced it."""

    numerator: object
    symbol: DiffPolynomial
    cutoff: float
    trace_max: float
    stencil: float

    def __call__(self, xi):
        xi = np.atleast_2d(np.asarray(xi, float))
        S = self.symbol
        v = S(xi)
        out = np.empty(len(xi), complex)
        far = np.abs(v) >= self.cutoff
        if far.any():
            out[far] = self.numerator(xi[far]) / v[far]
        near = ~far
        if near.any():
            out[near] = self._tube(xi[near], v[near])
        return out

    def _tube(self, xi, v):
        p = newton_project(self.symbol, xi)
        phi_p = self.numerator(p)
        out = np.empty(len(xi), complex)
        safe = np.abs(v) >= 1e-3 * self.cutoff
        if safe.any():
            out[safe] = (self.numerator(xi[safe]) - phi_p[safe]) / v[safe]
        crit = ~safe
        if crit.any():
            out[crit] = self._normal_line(xi[crit], p[crit], phi_p[crit])
        return out

    def _normal_line(self, xi, p, phi_p):
        """Interpolate the quotient along the normal through p from points off Sigma."""
        S = self.symbol
        g = S.gradient(p)
        gn = np.linalg.norm(g, axis=-1)
        n = g / gn[:, None]
        tau0 = np.sum((xi - p) * n, axis=-1)
        h = self.stencil / gn
        nodes = np.array([-3, -2, -1, 1, 2, 3], float)
        vals = []
        for k in nodes:
            y = p + (k * h)[:, None] * n
            vals.append((self.numerator(y) - phi_p) / S(y))
        vals = np.array(vals)  # (6, m)
        out = np.zeros(len(xi), complex)
        x = tau0 / h
        for j, xj in enumerate(nodes):
            w = np.ones(len(xi))
            for m, xm in enumerate(nodes):
                if m != j:
                    w *= (x - xm) / (xj - xm)
            out += w * vals[j]
        return out


def smooth_divide(phi_hat, S, cutoff_width, nodes=None, eps_vanish=1e-8, peak=None):
    """Return a callable g^ with S g^ = phi^, smooth across Sigma.

    ``nodes`` are points of Sigma used to check that phi^ vanishes there
    (default: :func:`zero_set_nodes`). ``peak`` is the scale for that check;
    by default the largest |phi^| seen on a band of points around Sigma.
    """
    if not cutoff_width > 0:
        raise ValueError("cutoff width must be positive")
    nodes = zero_set_nodes(S) if nodes is None else np.atleast_2d(nodes)
    S.check_gradient(nodes)
    tr = np.abs(phi_hat(nodes)) if len(nodes) else np.zeros(0)
    if peak is None:
        g = S.gradient(nodes)
        nrm = g / np.linalg.norm(g, axis=-1, keepdims=True)
        band = np.concatenate([nodes + s * nrm for s in np.linspace(-1, 1, 9)]) if len(nodes) else nodes
        peak = float(np.abs(phi_hat(band)).max()) if len(band) else 0.0
    trace_max = float(tr.max()) if tr.size else 0.0
    if trace_max > eps_vanish * max(peak, 1e-300):
        raise ValueError(
            f"phi^ does not vanish on the zero set (max |trace| = {trace_max:.2e}, "
            f"peak {peak:.2e}); the input is not in the range of S(D/2 pi i)"
        )
    return Quotient(phi_hat, S, float(cutoff_width), trace_max, 1e-2 * float(cutoff_width))


def default_cutoff(S, grid, nodes=None):
    """Four frequency cells in the S-value metric: 4 dxi max_Sigma |grad S|."""
    if nodes is None:
        nodes = zero_set_nodes(S, float(np.min(grid.frequency_half_width)))
    if len(nodes) == 0:
        raise ValueError("the zero set does not meet the frequency box")
    g = np.linalg.norm(S.gradient(nodes), axis=-1)
    return 4 * float(np.max(grid.dual_spacing)) * float(g.max())


def solve_diff_equation(f, S, neighborhood_width=None, cutoff=None, nodes=None,
                        eps_vanish=1e-8):
    """Solve S(D / 2 pi i) g = f on the grid.

    The spectrum is split by chi = plateau(|S| / width): the near piece chi f^
    goes through :func:`smooth_divide`, the far piece (1 - chi) f^ is divided
    directly, where |S| >= width / 2. Off-grid spectrum values needed near
    Sigma are exact band-limited evaluations.
    """
    if f.domain != SPACE:
        raise ValueError("solve_diff_equation expects a space-domain field")
    if not S.grows_at_infinity():
        raise ValueError("the symbol must grow at infinity (leading form vanishes somewhere)")
    grid = f.grid
    if nodes is None:
        nodes = zero_set_nodes(S, float(np.min(grid.frequency_half_width)))
    cut = default_cutoff(S, grid, nodes) if cutoff is None else float(cutoff)
    width = 2 * cut if neighborhood_width is None else float(neighborhood_width)
    F = fourier_transform(f)
    xi = F.coords().reshape(-1, S.d)
    v = S(xi)
    chi = plateau(np.abs(v) / width)
    Fv = F.values.reshape(-1)
    out = np.zeros_like(Fv)
    far = chi < 1
    out[far] = (1 - chi[far]) * Fv[far] / v[far]
    near = chi > 0
    if near.any():
        # on-grid values come from the FFT, off-grid ones from direct summation
        lookup = {tuple(np.round(x, 12)): val for x, val in zip(xi[near], Fv[near])}

        def phi(points):
            points = np.atleast_2d(points)
            keys = [tuple(np.round(x, 12)) for x in points]
            known = np.array([k in lookup for k in keys])
            res = np.empty(len(points), complex)
            if known.any():
                res[known] = [lookup[k] for k, kn in zip(keys, known) if kn]
            if (~known).any():
                res[~known] = evaluate_spectrum(f, points[~known])
            return plateau(np.abs(S(points)) / width) * res

        scale = float(np.abs(Fv).max()) if Fv.size else 0.0
        q = smooth_divide(phi, S, cut, nodes=nodes, eps_vanish=eps_vanish,
                          peak=max(scale, 1e-300))
        out[near] += q(xi[near])
    G = F.with_values(out.reshape(F.values.shape))
    return inverse_fourier_transform(G)


def transversal_derivatives(F, S, nodes, orders, h=1e-2):
    """Finite-difference derivatives of F along the unit normal of Sigma at ``nodes``.

    Uses centred stencils of width 2 * max(orders) + 5 so each derivative is
    accurate to high order in h. Returns an array (len(orders), len(nodes)).
    """
    nodes = np.atleast_2d(nodes)
    g = S.gradient(nodes)
    n = g / np.linalg.norm(g, axis=-1, keepdims=True)
    half = max(orders) // 2 + 3
    offs = np.arange(-half, half + 1, dtype=float)
    vals = np.array([F(nodes + (o * h) * n) for o in offs])
    out = []
    for k in orders:
        V = np.vander(offs, increasing=True).T  # V[j, i] = offs_i^j
        rhs = np.zeros(len(offs))
        rhs[k] = float(np.prod(np.arange(1, k + 1)))
        w = np.linalg.solve(V, rhs) / h**k
        out.append(w @ vals)
    return np.array(out)


# ---------------------------------------------------------------------------
# Sobolev norms

def sobolev_norm(f, alpha, beta, q, axis_tol=1e-12):
    """|| F^{-1}[ |xi|^alpha |eta|^beta F f ] ||_q for a planar space field.

    Negative exponents make the multiplier singular on an axis; then the
    spectrum must be negligible on the nodes nearest that axis (relative
    ``axis_tol``), otherwise the norm is not resolved and an error is raised.
    """
    q = float(q)
    if not 1 < q < np.inf:
        raise ValueError("q must lie in (1, inf)")
    if f.d != 2:
        raise ValueError("the Sobolev norm is defined for planar fields")
    if alpha == 0 and beta == 0:
        return lp_norm(f, q)
    F = fourier_transform(f)
    xi = F.coords()
    m = np.ones(F.values.shape)
    peak = np.abs(F.values).max()
    for ax, e in ((0, alpha), (1, beta)):
        if e == 0:
            continue
        a = np.abs(xi[..., ax])
        if e < 0:
            close = a < F.grid.dual_spacing[ax]
            if np.abs(F.values[close]).max(initial=0.0) > axis_tol * peak:
                raise ValueError("spectrum reaches the axis where |xi|^alpha |eta|^beta is singular")
            a = np.where(close, 1.0, a)
        m = m * a**e
    return lp_norm(inverse_fourier_transform(F.with_values(F.values * m)), q)


@dataclass(frozen=True)
class SobolevParams:
    """Exponents for ||f||_{W_q^{alpha, beta}} <= C ||(D1^k - sigma D2^l) f||_p."""

    k: int
    l: int
    sigma: float
    alpha: float
    beta: float
    p: float
    q: float

    def __post_init__(self):
        if self.k < 1 or self.l < 1:
            raise ValueError("k and l must be positive integers")
        if self.sigma == 0:
            raise ValueError("sigma must be nonzero")
        if not (1 < self.p < np.inf and 1 < self.q < np.inf):
            raise ValueError("p and q must lie in (1, inf)")

    @property
    def homogeneity_residual(self):
        k, l = self.k, self.l
        return abs(self.alpha / k + self.beta / l - 1 + (1 / self.p - 1 / self.q) * (1 / k + 1 / l))

    @property
    def consistent(self):
        return self.homogeneity_residual <= 1e-12

    def symbol(self):
        """xi^k - sigma eta^l, acting as S(D / 2 pi i)."""
        return DiffPolynomial({(self.k, 0): 1.0, (0, self.l): -self.sigma}, 2)


def homogeneous_params(k, l, sigma, p, q, beta=0.0):
    """Parameters with alpha solved from the homogeneity condition."""
    alpha = k * (1 - (1 / p - 1 / q) * (1 / k + 1 / l) - beta / l)
    return SobolevParams(k, l, sigma, alpha, beta, p, q)


# ---------------------------------------------------------------------------
# the ratio experiment

def curve_point(params, eta0):
    """Point of {xi^k = sigma eta^l} with the given eta (k = 1 or odd k)."""
    v = params.sigma * eta0**params.l
    xi0 = np.sign(v) * abs(v) ** (1 / params.k)
    return np.array([xi0, eta0])


def _adapted_frame(S, p):
    """Columns T' and N' with S(p + a T' + b N') = b + O(a^2) near p."""
    g = S.gradient(p[None])[0]
    if abs(g[0]) < 1e-12:
        raise ValueError("the curve is vertical at the chosen point")
    N = np.array([1 / g[0], 0.0])
    T = np.array([-g[1] / g[0], 1.0])
    return T, N


def knapp_ratio(params, delta, eta0=0.8, n=256, box=2.0):
    """Numerator and denominator norms for the cap of scale delta at (curve point, eta0).

    In affine coordinates A(u, v) = p + delta u T' + delta^2 v N' the spectrum
    is plateau(u) plateau(v). Both norms are computed on a (u, v) grid and
    rescaled by |det M|^(1 - 1/r), M = [delta T', delta^2 N'].
    """
    S = params.symbol()
    p0 = curve_point(params, eta0)
    T, N = _adapted_frame(S, p0)
    M = np.stack([delta * T, delta**2 * N], 1)
    det = abs(np.linalg.det(M))
    grid = make_grid(2, n / (4 * box), n)  # frequency half width = box
    uv = grid.frequency_coords()
    bump = plateau(uv[..., 0]) * plateau(uv[..., 1])
    xi = p0 + uv @ M.T
    if np.any((np.abs(xi) < 1e-9) & (bump[..., None] > 0)):
        raise ValueError("cap touches an axis")
    a, b = np.abs(xi[..., 0]), np.abs(xi[..., 1])
    with np.errstate(divide="ignore"):
        weight = np.where(bump > 0, a**params.alpha * b**params.beta, 0.0)
    num = inverse_fourier_transform(SampledField(grid, FREQUENCY, bump * weight))
    den = inverse_fourier_transform(SampledField(grid, FREQUENCY, bump * S(xi)))
    top = lp_norm(num, params.q) * det ** (1 - 1 / params.q)
    bot = lp_norm(den, params.p) * det ** (1 - 1 / params.p)
    return top, bot


def surface_ratio(params, width, eta0=0.8, eta_halfwidth=0.3, n=1024):
    """Norms for the mollified curve measure zeta(eta) exp(-pi (S / w)^2) / w.

    The spectrum is sampled on a frequency grid centred (by a carrier) at the
    curve point, fine enough to resolve w and wide enough to hold the piece
    of curve with |eta - eta0| < eta_halfwidth.
    """
    S = params.symbol()
    p0 = curve_point(params, eta0)
    lo, hi = eta0 - eta_halfwidth, eta0 + eta_halfwidth
    ends = np.array([curve_point(params, e) for e in (lo, hi)])
    half = 1.1 * max(np.abs(ends - p0).max(), eta_halfwidth) + 4 * width
    grid = make_grid(2, n / (4 * half), n)
    if grid.dual_spacing[0] > width / 6:
        raise ValueError(f"grid cannot resolve width {width}: increase n")
    xi = grid.frequency_coords() + p0
    if np.any(np.abs(xi[..., 1]) < 1e-9) and params.beta < 0:
        raise ValueError("spectrum touches the axis")
    zeta = plateau((xi[..., 1] - eta0) / eta_halfwidth)
    s = S(xi)
    spec = zeta * np.exp(-np.pi * (s / width) ** 2) / width
    a, b = np.abs(xi[..., 0]), np.abs(xi[..., 1])
    with np.errstate(divide="ignore"):
        weight = np.where(zeta > 0, a**params.alpha * b**params.beta, 0.0)
    num = inverse_fourier_transform(SampledField(grid, FREQUENCY, spec * weight, p0))
    den = inverse_fourier_transform(SampledField(grid, FREQUENCY, spec * s, p0))
    return lp_norm(num, params.q), lp_norm(den, params.p)


def classify_trend(exponent, margin=0.1):
    """Ratio ~ t^e as the family parameter t -> 0: e <= -margin is unbounded."""
    if exponent <= -margin:
        return "unbounded"
    if exponent >= margin:
        return "bounded"
    return "inconclusive"


def sobolev_ratio_experiment(params, family, values, margin=0.1, **kw):
    """Ratio ||f||_{W_q^{alpha,beta}} / ||S(D/2 pi i) f||_p along a family.

    ``family`` is "knapp_cap" (values are cap scales delta) or
    "surface_measure_mollified" (values are widths w). The growth exponent
    is the log-log slope of the ratio against the parameter.
    """
    if not params.consistent:
        raise ValueError(
            f"homogeneity condition violated (residual {params.homogeneity_residual:.2e}); "
            "the ratio would depend on the scale"
        )
    fn = {"knapp_cap": knapp_ratio, "surface_measure_mollified": surface_ratio}.get(family)
    if fn is None:
        raise ValueError(f"unknown family {family!r}")
    report = ExperimentReport("sobolev", inputs={
        "family": family, "values": list(map(float, values)), "k": params.k, "l": params.l,
        "sigma": params.sigma, "alpha": params.alpha, "beta": params.beta,
        "p": params.p, "q": params.q})
    with Timer() as tm:
        tops, bots = [], []
        for v in values:
            t, b = fn(params, v, **kw)
            tops.append(t)
            bots.append(b)
        ratios = np.array(tops) / np.array(bots)
        e, _, res = fit_power_law(values, ratios)
    trend = classify_trend(e, margin)
    # slope between neighbouring parameters shows whether the trend is settling
    local = np.diff(np.log(ratios)) / np.diff(np.log(np.asarray(values, float)))
    for i, (v, t, b, r) in enumerate(zip(values, tops, bots, ratios)):
        report.rows.append({"family_param": float(v), "numerator_norm": float(t),
                            "denominator_norm": float(b), "ratio": float(r),
                            "fitted_exponent": e,
                            "local_slope": float(local[i - 1]) if i else ""})
    report.fits["ratio"] = {"exponent": e, "residual": res, "trend": trend}
    report.elapsed = tm.elapsed
    return report
