"""Restriction of the Fourier transform to a surface and its adjoint extension.

``restrict`` evaluates f^ at the quadrature nodes by direct oscillatory
summation over the space grid, so frequencies off the dual grid are exact
(no interpolation). ``extend`` evaluates

    E zeta(x) = int_Sigma zeta(xi) exp(2 pi i <x, xi>) dsigma(xi)

by the surface quadrature. Decay and L_q tail diagnostics of E zeta are
built on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import (FREQUENCY, SPACE, SampledField, check_decay, inverse_fourier_transform,
                     make_grid)
from .surfaces import SurfaceDensity, plateau

_CHUNK = 2048


def evaluate_spectrum(f, points):
    """f^(xi) = dx^d sum_x f(x) exp(-2 pi i <x, xi>) at arbitrary frequencies.

    A sampled field stands for a band-limited function, so frequencies outside
    its (carrier-centred) frequency box evaluate to zero instead of aliasing.
    """
    if f.domain != SPACE:
        raise ValueError("evaluate_spectrum expects a space-domain field")
    pts = np.atleast_2d(np.asarray(points, float)) - f.carrier
    fh = f.grid.frequency_half_width
    inside = np.all((pts >= -fh) & (pts < fh), axis=1)
    axes = f.grid.axes()
    v = f.values
    out = np.empty(len(pts), dtype=complex)
    for lo in range(0, len(pts), _CHUNK):
        p = pts[lo:lo + _CHUNK]
        mats = [np.exp(-2j * np.pi * np.outer(p[:, a], axes[a])) for a in range(f.d)]
        if f.d == 1:
            res = mats[0] @ v
        elif f.d == 2:
            res = np.einsum("mk,mk->m", mats[0] @ v, mats[1])
        else:
            b = np.einsum("mi,ijk->mjk", mats[0], v)
            b = np.einsum("mjk,mj->mk", b, mats[1])
            res = np.einsum("mk,mk->m", b, mats[2])
        out[lo:lo + _CHUNK] = res
    out[~inside] = 0.0
    return out * f.grid.cell_volume


def restrict(f, surface, decay_tol=1e-10):
    """R_Sigma f = f^ restricted to the surface, at the quadrature nodes."""
    check_decay(f, decay_tol)
    return SurfaceDensity(surface, evaluate_spectrum(f, surface.nodes))


@dataclass(frozen=True)
class ExtensionEvaluation:
    density: SurfaceDensity
    points: np.ndarray
    values: np.ndarray


def _extension_values(zeta, points):
    pts = np.atleast_2d(np.asarray(points, float))
    s = zeta.surface
    zw = zeta.values * s.weights
    out = np.empty(len(pts), dtype=complex)
    step = max(1, (1 << 22) // max(1, s.size))
    for lo in range(0, len(pts), step):
        phase = pts[lo:lo + step] @ s.nodes.T
        out[lo:lo + step] = np.exp(2j * np.pi * phase) @ zw
    return out


def extend(zeta, points):
    """Quadrature evaluation of int zeta(xi) e^{2 pi i <x, xi>} dsigma(xi)."""
    pts = np.atleast_2d(np.asarray(points, float))
    if pts.shape[1] != zeta.surface.d:
        raise ValueError("points have the wrong dimension")
    return ExtensionEvaluation(zeta, pts, _extension_values(zeta, pts))


def adjoint_check(f, zeta, decay_tol=1e-10):
    """Both sides of <R_Sigma f, zeta>_{L2(sigma)} = <f, E zeta>_{L2(R^d)}.

    The left side sums over surface nodes, the right side over the space grid.
    """
    left = zeta.surface.integrate(restrict(f, zeta.surface, decay_tol).values
                                  * np.conj(zeta.values))
    pts = f.grid.coords().reshape(-1, f.d)
    e = _extension_values(zeta, pts).reshape(f.grid.shape)
    right = np.sum(f.full_values() * np.conj(e)) * f.grid.cell_volume
    return complex(left), complex(right)


# ---------------------------------------------------------------------------
# Knapp examples

def knapp_function(surface, cap_index, delta, n=256):
    """Space function whose transform is a bump on a cap of the circle.

    The transform equals ``plateau(arc / delta) * plateau((|xi| - r) / delta^2)``
    in polar coordinates around the cap centre ``surface.nodes[cap_index]``:
    real, nonnegative, 1 on the half-size cap and 0 outside the cap of
    tangential width ``delta`` and normal thickness ``delta^2``.

    The field lives on an anisotropic grid aligned with the cap and carries
    the cap centre as its carrier frequency, so small caps need no huge grids.
    The cap normal must be a coordinate axis direction.
    """
    if surface.kind != "circle":
        raise ValueError("knapp_function is built on the circle")
    if not 1 / 64 <= delta <= 1 / 4:
        raise ValueError("delta must lie in [1/64, 1/4]")
    r = surface.params["radius"]
    c = surface.nodes[cap_index]
    nu = c / r
    axis = int(np.argmax(np.abs(nu)))
    if abs(abs(nu[axis]) - 1) > 1e-12:
        raise ValueError("cap normal must be aligned with a coordinate axis")
    # frequency half-extent per axis: tangential ~ 1.5 delta, normal ~ 2 delta^2 (+ bending)
    half = np.full(2, 1.5 * delta)
    half[axis] = 2.0 * delta**2 + delta**2 / r
    scale = np.full(2, delta)
    scale[axis] = delta**2
    if np.any(2 * half / n > scale / 8):
        raise ValueError("grid cannot resolve the normal scale delta^2")
    grid = make_grid(2, n / (4 * half), n)
    xi = grid.frequency_coords() + c
    rad = np.hypot(xi[..., 0], xi[..., 1])
    ang = np.arctan2(nu[0] * xi[..., 1] - nu[1] * xi[..., 0], xi @ nu)
    fhat = plateau(r * ang / delta) * plateau((rad - r) / delta**2)
    return inverse_fourier_transform(SampledField(grid, FREQUENCY, fhat, c))


def knapp_profile_integral(power=1):
    """int plateau(t)^power dt over the line, by adaptive quadrature."""
    from scipy.integrate import quad

    return quad(lambda t: float(plateau(t)) ** power, -1, 1, limit=200)[0]


# ---------------------------------------------------------------------------
# decay fits

@dataclass
class DecayFit:
    radii: np.ndarray
    magnitudes: np.ndarray
    exponent: float
    residual: float
    prefactor: float = 1.0

    def rows(self):
        return [
            {"radius_or_ring": float(r), "magnitude_or_mass": float(m),
             "fitted_exponent": self.exponent, "residual": self.residual,
             "classification": ""}
            for r, m in zip(self.radii, self.magnitudes)
        ]


def fit_power_law(x, y):
    """Least-squares slope of log y against log x; returns (slope, prefactor, rms residual)."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    slope, icpt = np.polyfit(lx, ly, 1)
    res = ly - (slope * lx + icpt)
    return float(slope), float(np.exp(icpt)), float(np.sqrt(np.mean(res**2)))


def decay_exponent(zeta, direction, radii, window=None, samples=32):
    """Power-law exponent of the upper envelope of |E zeta(R * direction)|.

    For each radius the magnitude is the maximum over ``[R, R + window]``;
    the default window is one beat period, 1 / (extent of the surface
    projected on the direction), which removes the oscillation zeros.
    """
    radii = np.asarray(radii, float)
    if len(radii) < 8 or np.any(np.diff(radii) <= 0) or radii[-1] < 10 * radii[0]:
        raise ValueError("need >= 8 increasing radii spanning at least one decade")
    u = np.asarray(direction, float)
    u = u / np.linalg.norm(u)
    if window is None:
        proj = zeta.surface.nodes @ u
        window = 1.0 / max(proj.max() - proj.min(), 1e-12)
    offs = np.linspace(0.0, window, samples)
    rho = (radii[:, None] + offs[None, :]).ravel()
    vals = np.abs(_extension_values(zeta, rho[:, None] * u[None, :]))
    mags = vals.reshape(len(radii), samples).max(axis=1)
    if np.all(mags < 1e-14):
        raise ValueError("extension vanishes along the ray: nothing to fit")
    mags = np.maximum(mags, 1e-300)
    slope, pref, res = fit_power_law(radii, mags)
    return DecayFit(radii, mags, slope, res, pref)


# ---------------------------------------------------------------------------
# L_q tails

@dataclass
class TailProfile:
    q: float
    ring_edges: np.ndarray
    masses: np.ndarray
    exponent: float
    residual: float
    classification: str
    tail_estimate: float
    margin: float = 0.1
    extra: dict = field(default_factory=dict)

    @property
    def ring_centers(self):
        return np.sqrt(self.ring_edges[:-1] * self.ring_edges[1:])

    @property
    def mass_density(self):
        return self.masses / np.diff(self.ring_edges)

    def rows(self):
        return [
            {"radius_or_ring": float(r), "magnitude_or_mass": float(m),
             "fitted_exponent": self.exponent, "residual": self.residual,
             "classification": self.classification}
            for r, m in zip(self.ring_centers, self.masses)
        ]


def classify_exponent(e, threshold=-1.0, margin=0.1):
    """Convergent if e < threshold - margin, divergent if e > threshold + margin."""
    if e < threshold - margin:
        return "convergent"
    if e > threshold + margin:
        return "divergent"
    return "marginal"


def _ring_values(zeta, rho, angle_count):
    """|E zeta|^.. samples on circles of radii rho: array (len(rho), n_angles) and angles."""
    s = zeta.surface
    if s.kind == "circle" and angle_count in (None, s.size):
        # E(rho, theta_k) is a circular convolution of zeta w with the kernel
        # exp(2 pi i rho r cos(theta_j)) over the node angles
        r = s.params["radius"]
        theta = s.parameters
        zf = np.fft.fft(zeta.values * s.weights)
        kern = np.exp(2j * np.pi * r * np.outer(rho, np.cos(theta)))
        return np.fft.ifft(np.fft.fft(kern, axis=1) * zf[None, :], axis=1), theta
    if s.d != 2:
        raise ValueError("lq_tail_profile runs in the plane")
    m = angle_count or 256
    theta = 2 * np.pi * np.arange(m) / m
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    pts = (rho[:, None, None] * u[None, :, :]).reshape(-1, 2)
    return _extension_values(zeta, pts).reshape(len(rho), m), theta


def lq_tail_profile(zeta, q, R_max=64.0, ring_count=12, R_min=None, angle_count=None,
                    margin=0.1):
    """Ring masses of |E zeta|^q and their power-law trend.

    Masses ``m_j = int_{R_j < |x| < R_{j+1}} |E zeta|^q dx`` over geometric rings
    are computed by Gauss-Legendre radial and trapezoid angular quadrature.
    The exponent fitted to the radial mass density ``m_j / (R_{j+1} - R_j)``
    is compared with -1: the tail integral converges when it is below
    ``-1 - margin`` and diverges when it is above ``-1 + margin``.
    """
    q = float(q)
    if not 2 < q < 8:
        raise ValueError("q must lie in (2, 8)")
    if R_max < 50 or ring_count < 10:
        raise ValueError("need R_max >= 50 and ring_count >= 10")
    R_min = R_max / 8 if R_min is None else R_min
    edges = np.geomspace(R_min, R_max, ring_count + 1)
    masses = np.empty(ring_count)
    for j in range(ring_count):
        a, b = edges[j], edges[j + 1]
        k = int(np.ceil(16 * (b - a))) + 16
        x, w = np.polynomial.legendre.leggauss(k)
        rho = 0.5 * (b - a) * x + 0.5 * (a + b)
        vals, theta = _ring_values(zeta, rho, angle_count)
        ang = np.sum(np.abs(vals) ** q, axis=1) * (2 * np.pi / len(theta))
        masses[j] = np.sum(ang * rho * w) * 0.5 * (b - a)
    dens = masses / np.diff(edges)
    centers = np.sqrt(edges[:-1] * edges[1:])
    e, pref, res = fit_power_law(centers, dens)
    cls = classify_exponent(e, -1.0, margin)
    tail = pref * R_max ** (e + 1) / -(e + 1) if e < -1 else float("inf")
    return TailProfile(q, edges, masses, e, res, cls, float(tail), margin)
