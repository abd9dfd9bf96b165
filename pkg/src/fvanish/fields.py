"""Uniform-grid sampled fields and the integral Fourier transform.

The transform convention is

    f^(xi) = int f(x) exp(-2 pi i <x, xi>) dx,

approximated on a box by an FFT with the phase and cell-volume corrections
that make the discrete sum a Riemann sum of the integral. Grids always carry
the node x = 0 (and the dual node xi = 0).

A field may carry a ``carrier`` frequency. A space field with carrier ``c``
represents ``values(x) * exp(2 pi i <x, c>)``; a frequency field with carrier
``c`` lives on the dual grid translated by ``c``. This lets narrow spectra
far from the origin be sampled without resolving the carrier oscillation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import os

import numpy as np
import scipy.fft as sfft

SPACE = "space"
FREQUENCY = "frequency"

_MAX_N = {1: 4096, 2: 1024, 3: 256}


def fft_workers():
    """Worker count for scipy.fft, taken from ``FV_THREADS`` if set."""
    try:
        return max(1, int(os.environ.get("FV_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Grid:
    """Uniform grid on the box prod_i [-L_i, L_i) with ``n`` samples per axis.

    ``half_width`` may be a scalar or one value per axis.
    """

    d: int
    half_width: tuple
    n: int

    def __post_init__(self):
        hw = np.broadcast_to(np.asarray(self.half_width, dtype=float), (self.d,))
        object.__setattr__(self, "half_width", tuple(float(h) for h in hw))

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def spacing(self):
        """Space step per axis, 2 L / n."""
        return np.array([2.0 * h / self.n for h in self.half_width])

    @property
    def dual_spacing(self):
        """Frequency step per axis, 1 / (2 L)."""
        return np.array([1.0 / (2.0 * h) for h in self.half_width])

    @property
    def frequency_half_width(self):
        return self.n * self.dual_spacing / 2.0

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def dual_cell_volume(self):
        return float(np.prod(self.dual_spacing))

    def axes(self):
        k = np.arange(self.n) - self.n // 2
        return [k * dx for dx in self.spacing]

    def frequency_axes(self):
        k = np.arange(self.n) - self.n // 2
        return [k * dk for dk in self.dual_spacing]

    def coords(self):
        """Space coordinates, array of shape grid.shape + (d,)."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def frequency_coords(self):
        return np.stack(np.meshgrid(*self.frequency_axes(), indexing="ij"), axis=-1)


def make_grid(d, half_width, n):
    """Build a :class:`Grid`, validating the size limits.

    Examples
    --------
    >>> g = make_grid(1, 8.0, 16)
    >>> float(g.spacing[0]), float(g.dual_spacing[0])
    (1.0, 0.0625)
    """
    if d not in _MAX_N:
        raise ValueError(f"dimension must be 1, 2 or 3, got {d}")
    n = int(n)
    if n < 8 or n & (n - 1):
        raise ValueError(f"samples per axis must be a power of two >= 8, got {n}")
    if n > _MAX_N[d]:
        raise ValueError(f"n={n} exceeds the limit {_MAX_N[d]} for d={d}")
    hw = np.broadcast_to(np.asarray(half_width, dtype=float), (d,))
    if np.any(~np.isfinite(hw)) or np.any(hw <= 0):
        raise ValueError("half_width must be positive")
    return Grid(d, tuple(hw), n)


@dataclass(frozen=True)
class SampledField:
    grid: Grid
    domain: str
    values: np.ndarray
    carrier: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.domain not in (SPACE, FREQUENCY):
            raise ValueError(f"unknown domain tag {self.domain!r}")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        c = np.zeros(self.grid.d) if self.carrier is None else np.asarray(self.carrier, float)
        if c.shape != (self.grid.d,):
            raise ValueError("carrier must have one entry per axis")
        c.setflags(write=False)
        object.__setattr__(self, "carrier", c)

    @property
    def d(self):
        return self.grid.d

    @property
    def cell_volume(self):
        if self.domain == SPACE:
            return self.grid.cell_volume
        return self.grid.dual_cell_volume

    def coords(self):
        """Node coordinates in the field's own domain (carrier included for frequency)."""
        if self.domain == SPACE:
            return self.grid.coords()
        return self.grid.frequency_coords() + self.carrier

    def full_values(self):
        """Values with the carrier modulation applied (space fields only)."""
        if self.domain != SPACE or not np.any(self.carrier):
            return self.values
        phase = np.exp(2j * np.pi * (self.grid.coords() @ self.carrier))
        return self.values * phase

    def with_values(self, values):
        return SampledField(self.grid, self.domain, values, self.carrier)

    def __add__(self, other):
        _check_compatible(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _check_compatible(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__


def _check_compatible(a, b):
    if a.grid != b.grid or a.domain != b.domain or not np.allclose(a.carrier, b.carrier):
        raise ValueError("fields live on different grids or domains")


def sample(grid, func, domain=SPACE, carrier=None):
    """Sample ``func(coords)`` (coords has a trailing axis of length d)."""
    c = np.zeros(grid.d) if carrier is None else np.asarray(carrier, float)
    pts = grid.coords() if domain == SPACE else grid.frequency_coords() + c
    return SampledField(grid, domain, func(pts), c)


def _axes(d):
    return tuple(range(d))


def fourier_transform(f):
    """Riemann-sum approximation of the integral transform on the dual grid.

    The node xi = 0 carries the sum of f times the cell volume.
    """
    if f.domain != SPACE:
        raise ValueError("fourier_transform expects a space-domain field")
    ax = _axes(f.d)
    out = sfft.fftshift(
        sfft.fftn(sfft.ifftshift(f.values, axes=ax), axes=ax, workers=fft_workers()),
        axes=ax,
    )
    return SampledField(f.grid, FREQUENCY, out * f.grid.cell_volume, f.carrier)


def inverse_fourier_transform(F):
    if F.domain != FREQUENCY:
        raise ValueError("inverse_fourier_transform expects a frequency-domain field")
    ax = _axes(F.d)
    out = sfft.fftshift(
        sfft.ifftn(sfft.ifftshift(F.values, axes=ax), axes=ax, workers=fft_workers()),
        axes=ax,
    )
    return SampledField(F.grid, SPACE, out / F.grid.cell_volume, F.carrier)


def lp_norm(f, p):
    """Riemann-sum L_p norm; ``p = inf`` gives the max over nodes."""
    p = float(p)
    if np.isnan(p) or p < 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    m = a.max()
    if m == 0:
        return 0.0
    # scale out the max so large p does not overflow
    return float(m * (np.sum((a / m) ** p) * f.cell_volume) ** (1.0 / p))


def boundary_ratio(f):
    """Largest boundary-face modulus relative to the peak modulus."""
    a = np.abs(f.values)
    peak = a.max()
    if peak == 0:
        return 0.0
    edge = 0.0
    for axis in range(f.d):
        edge = max(edge, np.take(a, 0, axis=axis).max(), np.take(a, -1, axis=axis).max())
    return float(edge / peak)


def check_decay(f, tol=1e-10):
    r = boundary_ratio(f)
    if r > tol:
        raise ValueError(
            f"field does not decay at the box boundary (edge/peak = {r:.3e} > {tol:.1e})"
        )


def _monomial(x, powers):
    out = np.ones(x.shape[:-1])
    for i, k in enumerate(powers):
        if k:
            out = out * x[..., i] ** k
    return out


def schwartz_generator(grid, kind="gaussian", center=None, width=1.0, frequency=None,
                       polynomial=None, decay_tol=1e-12):
    """Sample a smooth rapidly decaying test function.

    kind='gaussian'            exp(-pi |x - center|^2 / width^2)
    kind='modulated_gaussian'  the same times exp(2 pi i <x, frequency>)
    kind='hat_times_poly'      the Gaussian times a polynomial given as a
                               mapping {exponent tuple: coefficient} in the
                               shifted variable x - center, degree <= 6

    Raises ValueError when the sampled values at the box boundary exceed
    ``decay_tol`` times the peak.
    """
    d = grid.d
    c = np.zeros(d) if center is None else np.asarray(center, float)
    x = grid.coords() - c
    vals = np.exp(-np.pi * np.sum(x**2, axis=-1) / width**2).astype(complex)
    if kind == "gaussian":
        pass
    elif kind == "modulated_gaussian":
        if frequency is None:
            raise ValueError("modulated_gaussian needs a frequency")
        xi0 = np.asarray(frequency, float)
        vals = vals * np.exp(2j * np.pi * (grid.coords() @ xi0))
    elif kind == "hat_times_poly":
        if not polynomial:
            raise ValueError("hat_times_poly needs a polynomial")
        poly = np.zeros(x.shape[:-1], dtype=complex)
        for powers, coef in polynomial.items():
            powers = tuple(powers)
            if len(powers) != d or sum(powers) > 6 or min(powers) < 0:
                raise ValueError(f"bad monomial {powers}")
            poly += coef * _monomial(x, powers)
        vals = vals * poly
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    f = SampledField(grid, SPACE, vals)
    r = boundary_ratio(f)
    if r > decay_tol:
        raise ValueError(f"width {width} too large for the box: boundary/peak = {r:.2e}")
    return f
