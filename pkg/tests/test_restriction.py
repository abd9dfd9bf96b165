import mpmath
import numpy as np
import pytest

from fvanish import fields, restriction, surfaces


def test_circle_extension_matches_bessel_series():
    c = surfaces.make_circle(1.0, 512)
    one = surfaces.density(c, lambda x: 1.0)
    u = np.array([0.6, 0.8])
    for R in (0.3, 2.5, 11.0):
        val = restriction.extend(one, [R * u]).values[0]
        ref = float(2 * mpmath.pi * mpmath.besselj(0, 2 * mpmath.pi * R))
        assert val == pytest.approx(ref, rel=1e-10, abs=1e-13)


def test_cos_density_gives_first_bessel():
    # int_0^{2pi} cos(t) e^{2 pi i R cos(t - a)} dt = 2 pi i J1(2 pi R) cos(a)
    c = surfaces.make_circle(1.0, 512)
    z = surfaces.density(c, lambda x: x[:, 0])
    a, R = 0.4, 3.0
    val = restriction.extend(z, [[R * np.cos(a), R * np.sin(a)]]).values[0]
    ref = complex(2j * mpmath.pi * mpmath.besselj(1, 2 * mpmath.pi * R) * mpmath.cos(a))
    assert abs(val - ref) < 1e-10


def test_sphere_extension_closed_form():
    s = surfaces.make_sphere(1.0, (48, 96))
    one = surfaces.density(s, lambda x: 1.0)
    for R in (0.7, 2.3):
        val = restriction.extend(one, [[0, R, 0]]).values[0]
        assert val.real == pytest.approx(2 * np.sin(2 * np.pi * R) / R, rel=1e-10)


def test_restriction_of_gaussian(grid2):
    f = fields.schwartz_generator(grid2, "gaussian")
    c = surfaces.make_circle(0.5, 64)
    r = restriction.restrict(f, c)
    assert np.allclose(r.values, np.exp(-np.pi * 0.25), atol=1e-12)


def test_spectrum_is_zero_outside_the_band(grid2):
    f = fields.schwartz_generator(grid2, "gaussian")
    fh = grid2.frequency_half_width[0]
    v = restriction.evaluate_spectrum(f, [[fh + 1.0, 0.0], [0.0, 0.0]])
    assert v[0] == 0 and abs(v[1] - 1) < 1e-12


def test_adjointness(grid2, rng):
    c = surfaces.make_circle(1.0, 256)
    f = fields.schwartz_generator(grid2, "modulated_gaussian", center=(0.3, 0.1), frequency=(0.5, -0.8))
    k = np.arange(-3, 4)
    coef = rng.normal(size=7) + 1j * rng.normal(size=7)
    z = surfaces.SurfaceDensity(c, np.exp(1j * np.outer(c.parameters, k)) @ coef)
    left, right = restriction.adjoint_check(f, z)
    assert abs(left - right) <= 1e-8 * abs(right)


def test_knapp_scaling():
    c = surfaces.make_circle(1.0, 4096)
    ratios = []
    for d in (1 / 8, 1 / 16, 1 / 32):
        f = restriction.knapp_function(c, 0, d)
        ratios.append(c.integrate(np.abs(restriction.restrict(f, c, decay_tol=1e-3).values)).real / d)
    assert max(ratios) / min(ratios) < 1.01
    with pytest.raises(ValueError):
        restriction.knapp_function(c, 0, 0.5)
    with pytest.raises(ValueError):
        restriction.knapp_function(c, 7, 1 / 8)  # cap normal off the axes


def test_decay_fit_validation():
    c = surfaces.make_circle(1.0, 256)
    one = surfaces.density(c, lambda x: 1.0)
    with pytest.raises(ValueError):
        restriction.decay_exponent(one, [1, 0], np.linspace(10, 20, 8))


def test_power_law_fit_is_exact_on_power_laws():
    x = np.geomspace(1, 100, 10)
    e, pref, res = restriction.fit_power_law(x, 3 * x**-1.7)
    assert e == pytest.approx(-1.7) and pref == pytest.approx(3) and res < 1e-12


@pytest.mark.parametrize("e,cls", [(-1.5, "convergent"), (-1.05, "marginal"), (-0.5, "divergent")])
def test_classification(e, cls):
    assert restriction.classify_exponent(e) == cls


def test_tail_profile_rejects_out_of_range_q():
    c = surfaces.make_circle(1.0, 256)
    with pytest.raises(ValueError):
        restriction.lq_tail_profile(surfaces.density(c, lambda x: 1.0), 1.5)
