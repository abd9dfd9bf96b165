import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fvanish import fields, restriction, symbols

coef = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=3, max_size=3), st.lists(coef, min_size=3, max_size=3),
       st.floats(-2, 2), st.floats(-2, 2))
def test_polynomial_algebra_matches_pointwise(a, b, x, y):
    P = symbols.diff_poly({(1, 0): a[0], (0, 2): a[1], (0, 0): a[2]})
    Q = symbols.diff_poly({(2, 1): b[0], (0, 1): b[1], (0, 0): b[2]})
    pt = np.array([[x, y]])
    assert (P * Q)(pt)[0] == pytest.approx(P(pt)[0] * Q(pt)[0], abs=1e-9)
    assert (P - Q)(pt)[0] == pytest.approx(P(pt)[0] - Q(pt)[0], abs=1e-12)
    assert (P ** 2)(pt)[0] == pytest.approx(P(pt)[0] ** 2, abs=1e-9)


def test_partial_derivative_and_leading_form():
    S = symbols.diff_poly({(3, 0): 2.0, (1, 1): 1.0, (0, 0): -1.0})
    assert S.partial(0).coeffs == {(2, 0): 6.0, (0, 1): 1.0}
    assert S.leading_form().coeffs == {(3, 0): 2.0}
    assert S.degree == 3


def test_growth_certificate():
    assert symbols.helmholtz_symbol(2).grows_at_infinity()
    assert not symbols.diff_poly({(1, 0): 1.0, (0, 2): -1.0}).grows_at_infinity()


def test_zero_set_nodes_lie_on_the_circle():
    nodes = symbols.zero_set_nodes(symbols.helmholtz_symbol(2))
    assert len(nodes) > 100
    assert np.allclose(np.linalg.norm(nodes, axis=1), 1.0, atol=1e-12)


def test_apply_diff_poly_is_the_derivative():
    g = fields.make_grid(1, 8.0, 512)
    f = fields.schwartz_generator(g, "gaussian")
    x = g.coords()[..., 0]
    # xi acts as D / (2 pi i): d/dx e^{-pi x^2} = -2 pi x e^{-pi x^2}
    out = symbols.apply_diff_poly(symbols.coordinate_symbol(1), f)
    assert np.allclose(out.values, -2 * np.pi * x * np.exp(-np.pi * x**2) / (2j * np.pi), atol=1e-10)


def test_division_is_exact_for_explicit_factors():
    H = symbols.helmholtz_symbol(2)
    q = symbols.smooth_divide(lambda x: H(x) * np.cos(x[:, 0]), H, 0.1)
    pts = np.random.default_rng(0).uniform(-2, 2, (500, 2))
    assert np.abs(q(pts) - np.cos(pts[:, 0])).max() < 1e-8


def test_division_refuses_non_vanishing_input():
    H = symbols.helmholtz_symbol(2)
    with pytest.raises(ValueError, match="does not vanish"):
        symbols.smooth_divide(lambda x: np.exp(-np.sum(x**2, -1)), H, 0.1)


@pytest.mark.parametrize("d", [1, 2])
def test_helmholtz_round_trip(d):
    grid = fields.make_grid(d, 6.0, 256)
    g0 = fields.schwartz_generator(grid, "gaussian", center=[0.2] * d)
    H = symbols.helmholtz_symbol(d)
    g = symbols.solve_diff_equation(symbols.apply_diff_poly(H, g0), H)
    assert np.linalg.norm(g.values - g0.values) <= 1e-8 * np.linalg.norm(g0.values)


def test_solver_rejects_non_growing_symbol():
    grid = fields.make_grid(2, 6.0, 64)
    f = fields.schwartz_generator(grid, "gaussian")
    with pytest.raises(ValueError, match="grow"):
        symbols.solve_diff_equation(f, symbols.diff_poly({(1, 0): 1.0, (0, 2): -1.0}))


def test_power_space_member_vanishes_to_order_k():
    H = symbols.helmholtz_symbol(2)
    g = fields.schwartz_generator(fields.make_grid(2, 6.0, 128), "gaussian", center=(0.3, 0.0))
    p3 = symbols.power_space_member(H, 3, g)
    nodes = symbols.zero_set_nodes(H)[::40]
    D = symbols.transversal_derivatives(lambda y: restriction.evaluate_spectrum(p3, y), H, nodes, [0, 1, 2, 3])
    scale = np.abs(fields.fourier_transform(p3).values).max()
    assert np.abs(D[:3]).max() < 1e-6 * scale
    assert np.abs(D[3]).max() > 1e-3 * scale


def test_homogeneous_params_satisfy_condition():
    P = symbols.homogeneous_params(1, 2, 1.0, 1.3, 5.0, beta=0.2)
    assert P.consistent
    bad = symbols.SobolevParams(1, 2, 1.0, P.alpha + 0.1, 0.2, 1.3, 5.0)
    with pytest.raises(ValueError, match="homogeneity"):
        symbols.sobolev_ratio_experiment(bad, "knapp_cap", [1 / 8, 1 / 16])


@pytest.mark.parametrize("e,trend", [(-0.3, "unbounded"), (0.05, "inconclusive"), (0.2, "bounded")])
def test_trend_classification(e, trend):
    assert symbols.classify_trend(e) == trend


def test_sobolev_norm_reduces_to_lp():
    g = fields.schwartz_generator(fields.make_grid(2, 6.0, 128), "gaussian")
    assert symbols.sobolev_norm(g, 0, 0, 3.0) == pytest.approx(fields.lp_norm(g, 3.0))


def test_sobolev_report_columns():
    P = symbols.homogeneous_params(1, 2, 1.0, 1.25, 5.0)
    rep = symbols.sobolev_ratio_experiment(P, "knapp_cap", [1 / 8, 1 / 16, 1 / 32])
    assert {"family_param", "numerator_norm", "denominator_norm", "ratio", "fitted_exponent"} <= set(rep.rows[0])
    assert rep.fits["ratio"]["trend"] == "unbounded"
