"""Lower dimension certificates for measures.

Two routes are implemented. The smoothed-ball statistic
|int phi(xi / r + eta) dmu(xi)| bounded by C r^alpha certifies dim mu >= alpha;
the energy-type potential int |F^{-1}[nu]|^2 (1 + |x|)^(alpha - d) dx being
finite implies that bound, with the Cauchy-Schwarz chain made explicit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy.spatial import cKDTree

from .restriction import fit_power_law
from .surfaces import plateau


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finite sum of weighted atoms, sum_k w_k delta_{x_k}."""

    points: np.ndarray
    weights: np.ndarray
    label: str = "measure"

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, float))
        w = np.asarray(self.weights, complex).reshape(-1)
        if len(p) != len(w):
            raise ValueError("one weight per atom is required")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(w))):
            raise ValueError("atoms and weights must be finite")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)

    @property
    def d(self):
        return self.points.shape[1]

    @property
    def total_variation(self):
        return float(np.abs(self.weights).sum())

    def atom_spacing(self):
        """Median nearest-neighbour distance, or None for a single atom."""
        if len(self.points) < 2:
            return None
        dist, _ = cKDTree(self.points).query(self.points, k=2)
        return float(np.median(dist[:, 1]))


def dirac(d=2, point=None, mass=1.0):
    p = np.zeros(d) if point is None else np.asarray(point, float)
    return DiscreteMeasure(p[None], [mass], "dirac")


def circle_arclength(radius=1.0, node_count=4096):
    a = 2 * np.pi * np.arange(node_count) / node_count
    pts = radius * np.stack([np.cos(a), np.sin(a)], 1)
    return DiscreteMeasure(pts, np.full(node_count, 2 * np.pi * radius / node_count), "circle")


def square_lebesgue(side=1.0, per_axis=256):
    """Midpoint atoms of the square [-side/2, side/2]^2."""
    t = side * ((np.arange(per_axis) + 0.5) / per_axis - 0.5)
    pts = np.stack(np.meshgrid(t, t, indexing="ij"), -1).reshape(-1, 2)
    return DiscreteMeasure(pts, np.full(len(pts), (side / per_axis) ** 2), "square")


def from_density(zeta):
    """The measure zeta dsigma, with the quadrature nodes as atoms."""
    s = zeta.surface
    return DiscreteMeasure(s.nodes, zeta.values * s.weights, f"{s.kind} density")


@dataclass(frozen=True)
class HatFunction:
    """Radial, nonincreasing bump: 1 for |xi| <= plateau_radius, 0 beyond support_radius."""

    d: int = 2
    plateau_radius: float = 0.5
    support_radius: float = 1.0

    def __post_init__(self):
        if not 0 < self.plateau_radius < self.support_radius:
            raise ValueError("need 0 < plateau radius < support radius")

    def profile(self, rho):
        return plateau(rho, self.plateau_radius, self.support_radius)

    def __call__(self, xi):
        return self.profile(np.linalg.norm(np.asarray(xi, float), axis=-1))

    def fourier_profile(self, rho):
        """Radial profile of the Fourier transform (real, since the hat is even)."""
        rho = np.atleast_1d(np.asarray(rho, float))
        a, b = 0.0, self.support_radius
        x, w = np.polynomial.legendre.leggauss(256)
        # the profile is flat on [0, plateau]; split there for accuracy
        out = np.zeros(len(rho))
        for lo, hi in ((a, self.plateau_radius), (self.plateau_radius, b)):
            s = (hi + lo) / 2 + (hi - lo) / 2 * x
            ws = (hi - lo) / 2 * w * self.profile(s)
            out += _radial_kernel(self.d, np.multiply.outer(rho, s)) @ (ws * s ** (self.d - 1))
        return out


def _radial_kernel(d, rs):
    """Kernel k with F[f](rho) = int_0^inf f(s) k(rho s) s^(d-1) ds for radial f."""
    if d == 1:
        return 2 * np.cos(2 * np.pi * rs)
    if d == 2:
        return 2 * np.pi * special.j0(2 * np.pi * rs)
    return 4 * np.pi * np.sinc(2 * rs)  # sin(2 pi rs) / (2 pi rs)


def _unit_sphere_area(d):
    return 2 * np.pi ** (d / 2) / special.gamma(d / 2)


# ---------------------------------------------------------------------------
# the statistic

def frostman_statistic(mu, phi, r, eta):
    """|sum_k w_k phi(x_k / r + eta)| for one shift or an array of shifts."""
    if not 0 < r < 1:
        raise ValueError(f"scale r must lie in (0, 1), got {r}")
    eta = np.asarray(eta, float)
    single = eta.ndim == 1
    return _statistic(mu, phi, r, np.atleast_2d(eta), cKDTree(mu.points))[0 if single else slice(None)]


def _statistic(mu, phi, r, etas, tree):
    centers = -r * etas  # phi(x / r + eta) is supported in |x + r eta| < r * support
    hits = tree.query_ball_point(centers, r * phi.support_radius)
    lens = np.fromiter((len(h) for h in hits), int, len(hits))
    rows = np.repeat(np.arange(len(centers)), lens)
    cols = np.fromiter((j for h in hits for j in h), int, int(lens.sum()))
    dist = np.linalg.norm(mu.points[cols] - centers[rows], axis=1)
    out = np.zeros(len(centers), complex)
    np.add.at(out, rows, phi.profile(dist / r) * mu.weights[cols])
    return np.abs(out)


def eta_lattice(mu, phi, r):
    """Shifts whose windows tile the atoms' bounding box at spacing r * plateau / sqrt(d)."""
    lo, hi = mu.points.min(0), mu.points.max(0)
    step = r * phi.plateau_radius / np.sqrt(mu.d)
    axes = [np.arange(a - step, b + 2 * step, step) for a, b in zip(lo, hi)]
    centers = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, mu.d)
    return -centers / r


def default_r_grid(mu, count=12):
    """Scales from 0.5 down to 20 atom spacings (1e-12 for a single atom)."""
    h = mu.atom_spacing()
    r_min = 1e-12 if h is None else min(0.25, 20 * h)
    return np.geomspace(0.5, r_min, count)


@dataclass(frozen=True, eq=False)
class DimensionCertificate:
    bound: float
    constant: float
    alphas: np.ndarray
    sup_ratio: np.ndarray
    r_grid: np.ndarray
    sup_statistic: np.ndarray = field(repr=False)

    def rows(self):
        for a, m in zip(self.alphas, self.sup_ratio):
            yield {"alpha": float(a), "sup_statistic_over_r_alpha": float(m),
                   "passed": bool(m <= self.constant), "C": self.constant}


def dimension_lower_bound(mu, phi, alpha_grid=None, r_grid=None, eta_sample=None,
                          constant=None, baseline_factor=10.0):
    """Largest alpha with sup_{r, eta} statistic / r^alpha <= C.

    ``eta_sample`` may be a fixed array of shifts; by default a lattice tied to
    each r is used. ``constant`` defaults to ``baseline_factor`` times the
    alpha = 0 value.
    """
    alphas = np.arange(0, 3.0001, 0.05) if alpha_grid is None else np.asarray(alpha_grid, float)
    rs = default_r_grid(mu) if r_grid is None else np.asarray(r_grid, float)
    if alphas.size == 0 or rs.size == 0:
        raise ValueError("alpha and r grids must be nonempty")
    tree = cKDTree(mu.points)
    sup = np.array([
        _statistic(mu, phi, r, eta_lattice(mu, phi, r) if eta_sample is None
                   else np.atleast_2d(eta_sample), tree).max()
        for r in rs
    ])
    table = np.array([np.max(sup / rs**a) for a in alphas])
    C = baseline_factor * sup.max() if constant is None else float(constant)
    ok = table <= C
    # the bound is the end of the initial run of passing alphas
    bound = float(alphas[np.argmin(ok)] - (alphas[1] - alphas[0])) if not ok.all() else float(alphas[-1])
    if not ok[0]:
        bound = float("nan")
    return DimensionCertificate(bound, C, alphas, table, rs, sup)


# ---------------------------------------------------------------------------
# potential

def inverse_transform_on_grid(nu, grid, chunk=4096):
    """F^{-1}[nu](x) = sum_k w_k exp(2 pi i <x, x_k>) at the grid nodes."""
    x = grid.coords().reshape(-1, grid.d)
    out = np.empty(len(x), complex)
    for lo in range(0, len(x), chunk):
        out[lo:lo + chunk] = np.exp(2j * np.pi * x[lo:lo + chunk] @ nu.points.T) @ nu.weights
    return out.reshape(grid.shape)


@dataclass(frozen=True, eq=False)
class PotentialReport:
    alpha: float
    value: float
    ring_edges: np.ndarray
    ring_masses: np.ndarray
    trend_exponent: float
    classification: str

    def rows(self):
        for a, b, m in zip(self.ring_edges[:-1], self.ring_edges[1:], self.ring_masses):
            yield {"ring_inner": float(a), "ring_outer": float(b), "mass": float(m),
                   "trend_exponent": self.trend_exponent, "classification": self.classification}


def potential(nu, alpha, grid, margin=0.05):
    """Box-truncated I(nu, alpha) with a dyadic-ring tail trend.

    Ring masses behaving like R^e with e < -margin are summable (convergent),
    e > margin diverge; in between the call is "marginal".
    """
    d = grid.d
    if not 0 < alpha < d:
        raise ValueError(f"alpha must lie in (0, {d})")
    if nu.d != d:
        raise ValueError("measure and grid dimensions differ")
    E = inverse_transform_on_grid(nu, grid)
    rad = np.linalg.norm(grid.coords(), axis=-1)
    dens = np.abs(E) ** 2 * (1 + rad) ** (alpha - d) * grid.cell_volume
    L = min(grid.half_width)
    edges = 2.0 ** np.arange(0, np.floor(np.log2(L)) + 1)
    masses = np.array([dens[(rad >= a) & (rad < b)].sum() for a, b in zip(edges[:-1], edges[1:])])
    centers = np.sqrt(edges[:-1] * edges[1:])
    use = slice(1, None) if len(masses) > 3 else slice(None)
    if np.all(masses[use] > 0):
        e, _, _ = fit_power_law(centers[use], masses[use])
    else:
        e = float("-inf")
    cls = "convergent" if e < -margin else "divergent" if e > margin else "marginal"
    return PotentialReport(float(alpha), float(dens.sum()), edges, masses, float(e), cls)


def hat_energy(phi, alpha, weight="quadratic", scale=1.0, cutoff=None):
    """int |F[phi_r](x)|^2 w(x) dx for phi_r = phi(. / r) by radial quadrature.

    weight="quadratic" uses (1 + |x|^2)^((d - alpha)/2), the constant K_phi at
    r = 1; weight="homogeneous" uses |x|^(d - alpha), which scales exactly
    like r^alpha.
    """
    d = phi.d
    r = float(scale)
    X = (60.0 / r if cutoff is None else cutoff)
    edges = np.linspace(0, X, 129)
    x, w = np.polynomial.legendre.leggauss(32)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        rho = (a + b) / 2 + (b - a) / 2 * x
        F = r**d * phi.fourier_profile(r * rho)
        wt = (1 + rho**2) ** ((d - alpha) / 2) if weight == "quadratic" else rho ** (d - alpha)
        total += np.sum((b - a) / 2 * w * F**2 * wt * rho ** (d - 1))
    return float(total * _unit_sphere_area(d))


@dataclass(frozen=True, eq=False)
class ChainReport:
    alpha: float
    potential: float
    K: float
    weight_constant: float
    rows_: list

    @property
    def worst_slack(self):
        return min((r["slack"] for r in self.rows_), default=0.0)

    def rows(self):
        return list(self.rows_)


def frostman_from_potential_check(nu, phi, alpha, r_grid, eta_sample, grid):
    """Check |<nu, phi_r(. + eta)>| <= (I(nu, alpha) * c * r^alpha * K_phi)^(1/2).

    c = 2^((d - alpha)/2) reconciles the potential's weight (1 + |x|)^(alpha - d)
    with the (1 + |x|^2)^((d - alpha)/2) used in K_phi, since
    (1 + |x|)^2 <= 2 (1 + |x|^2).
    """
    d = nu.d
    I = potential(nu, alpha, grid).value
    K = hat_energy(phi, alpha)
    c = 2 ** ((d - alpha) / 2)
    tree = cKDTree(nu.points)
    rows = []
    for r in np.asarray(r_grid, float):
        if not 0 < r <= 1:
            raise ValueError("the chain needs r <= 1")
        lhs = _statistic(nu, phi, min(r, 1 - 1e-15), np.atleast_2d(eta_sample), tree)
        rhs = np.sqrt(I * c * r**alpha * K)
        for eta, v in zip(np.atleast_2d(eta_sample), lhs):
            rows.append({"r": float(r), "eta": [float(e) for e in eta], "statistic": float(v),
                         "bound": float(rhs), "slack": float(rhs - v)})
    return ChainReport(float(alpha), I, K, c, rows)
