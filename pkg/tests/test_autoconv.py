import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fvanish import autoconv, surfaces


@pytest.fixture(scope="module")
def chart():
    return autoconv.parabola_chart(1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.8, 0.8), st.floats(0.01, 0.8))
def test_sumset_solve_inverts_the_sum_map(s, gap):
    chart = autoconv.parabola_chart(1.0)
    t = min(s + gap, 0.95)
    if t - s < 1e-3:
        return
    xi, eta = s + t, chart.h(s) + chart.h(t)
    sol = autoconv.solve_sumset(chart, xi, eta)
    assert sol.s[0] == pytest.approx(s, abs=1e-9) and sol.t[0] == pytest.approx(t, abs=1e-9)


def test_sumset_rejects_outside_and_diagonal(chart):
    with pytest.raises(ValueError, match="outside"):
        autoconv.solve_sumset(chart, 0.0, -0.1)
    with pytest.raises(ValueError, match="degenerate"):
        autoconv.solve_sumset(chart, 0.2, 2 * chart.h(0.1) + 1e-12)


def test_chart_validation():
    with pytest.raises(ValueError):
        autoconv.CurveChart(lambda t: -t**2, lambda t: -2 * t, lambda t: -2 + 0 * t, 1.0)
    c = autoconv.CurveChart(lambda t: t**2 / 2 + t**4, lambda t: t + 4 * t**3,
                            lambda t: 1 + 12 * t**2, 0.5)
    assert c.curvature_ratio == pytest.approx(4.0) and not c.almost_constant


def test_parabola_density_closed_form(chart):
    # for h = t^2/2 the preimage gap is sqrt(4 eta - xi^2)
    xi, eta = np.array([0.1, -0.3]), np.array([0.3, 0.2])
    got = autoconv.autoconvolution_density(1.0, chart, xi, eta, measure="parameter")
    assert np.allclose(got, 2 / np.sqrt(4 * eta - xi**2), rtol=1e-10)


def test_arclength_measure_adds_line_elements(chart):
    s, t = np.array([-0.2]), np.array([0.5])
    a = autoconv.density_from_parameters(1.0, chart, s, t, "arclength")
    p = autoconv.density_from_parameters(1.0, chart, s, t, "parameter")
    assert a[0] / p[0] == pytest.approx(np.sqrt(1 + s[0]**2) * np.sqrt(1 + t[0]**2))


def test_change_of_variables_on_random_bumps(chart):
    rng = np.random.default_rng(5)
    for _ in range(3):
        left, right = autoconv.change_of_variables_check(autoconv.random_bump(chart, rng), chart)
        assert left == pytest.approx(right, rel=1e-6)


def test_change_of_variables_refuses_escaping_support(chart):
    bump = autoconv.EllipticBump((0.0, 0.0), (0.2, 0.2))
    with pytest.raises(ValueError, match="escapes"):
        autoconv.change_of_variables_check(bump, chart)


def test_density_accepts_surface_density(chart):
    p = surfaces.parabola(1.0, 64)
    z = surfaces.density(p, lambda x: 1 + 0 * x[:, 0])
    got = autoconv.autoconvolution_density(z, chart, [0.1], [0.3])
    ref = autoconv.autoconvolution_density(1.0, chart, [0.1], [0.3])
    assert np.allclose(got, ref, rtol=1e-8)


def test_blowup_masses(chart):
    rep = autoconv.blowup_test(1.0, chart, (-0.5, 0.5), (8, 16, 32))
    assert np.all(rep.mass > 0) and np.all(np.diff(rep.cumulative) > 0)
    assert rep.mass.max() / rep.mass.min() < 4
    with pytest.raises(ValueError):
        autoconv.blowup_test(lambda t: 0.5 + 0 * t, chart, (-0.5, 0.5))


def test_sn_region_measure_matches_area(chart):
    # area of {(s, t) in I^2, 1/N <= t - s <= 1.1/N} mapped by the sum map
    reg = autoconv.sn_region(chart, (-0.5, 0.5), 16)
    u0, u1 = 1 / 16, 1.1 / 16
    # |h'(s) - h'(t)| = t - s = u for the unit parabola; the s-range has length 1 - u
    exact = (u1**2 / 2 - u1**3 / 3) - (u0**2 / 2 - u0**3 / 3)
    assert reg.measure == pytest.approx(exact, rel=1e-10)
