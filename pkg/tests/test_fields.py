import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fvanish import fields


def gaussian_hat(xi, center=0.0, width=1.0):
    """Closed-form transform of exp(-pi |x - c|^2 / w^2)."""
    xi = np.asarray(xi)
    c = np.broadcast_to(center, xi.shape[-1:])
    d = xi.shape[-1]
    return (width**d * np.exp(-np.pi * width**2 * np.sum(xi**2, -1))
            * np.exp(-2j * np.pi * (xi @ c)))


@pytest.mark.parametrize("bad", [(4, 1.0, 16), (1, 1.0, 12), (1, 1.0, 4), (2, 1.0, 2048), (1, -1.0, 16)])
def test_grid_validation(bad):
    with pytest.raises(ValueError):
        fields.make_grid(*bad)


def test_grid_has_origin_nodes():
    g = fields.make_grid(2, 4.0, 64)
    assert np.any(np.all(g.coords() == 0, axis=-1))
    assert np.any(np.all(g.frequency_coords() == 0, axis=-1))


def test_shifted_gaussian_matches_closed_form(grid2):
    f = fields.schwartz_generator(grid2, "gaussian", center=(0.7, -0.4), width=0.8)
    F = fields.fourier_transform(f)
    ref = gaussian_hat(grid2.frequency_coords(), (0.7, -0.4), 0.8)
    assert np.abs(F.values - ref).max() < 1e-10


def test_sign_convention_of_modulation(grid1):
    # e^{+2 pi i x xi0} must put the transform peak at +xi0
    F = fields.fourier_transform(fields.schwartz_generator(grid1, "modulated_gaussian", frequency=[2.0]))
    peak = grid1.frequency_coords()[np.argmax(np.abs(F.values))]
    assert peak[0] == pytest.approx(2.0)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                min_size=3, max_size=3),
       st.floats(-1, 1), st.floats(0.6, 1.4))
def test_plancherel_and_round_trip(coefs, c, w):
    g = fields.make_grid(1, 16.0, 512)
    poly = {(k,): z for k, z in enumerate(coefs)}
    f = fields.schwartz_generator(g, "hat_times_poly", center=[c], width=w, polynomial=poly)
    F = fields.fourier_transform(f)
    n = fields.lp_norm(f, 2)
    if n > 1e-8:
        assert abs(fields.lp_norm(F, 2) - n) <= 1e-8 * n
    back = fields.inverse_fourier_transform(F)
    assert np.abs(back.values - f.values).max() <= 1e-10 * max(np.abs(f.values).max(), 1e-300)


def test_boundary_check_rejects_wide_generator():
    g = fields.make_grid(1, 2.0, 64)
    with pytest.raises(ValueError, match="too large"):
        fields.schwartz_generator(g, "gaussian", width=2.0)


def test_lp_norm_of_gaussian(grid1):
    f = fields.schwartz_generator(grid1, "gaussian")
    # int exp(-p pi x^2) = p^{-1/2}
    for p in (1.0, 2.0, 4.0):
        assert fields.lp_norm(f, p) == pytest.approx(p ** (-1 / (2 * p)), rel=1e-12)


def test_fft_workers_env(monkeypatch):
    monkeypatch.setenv("FV_THREADS", "3")
    assert fields.fft_workers() == 3
    monkeypatch.setenv("FV_THREADS", "junk")
    assert fields.fft_workers() == 1
