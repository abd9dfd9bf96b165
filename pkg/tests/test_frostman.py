import numpy as np
import pytest
from scipy import integrate, special

from fvanish import fields, frostman


def quad_profile(phi, rho):
    """Independent reference for the 2-d hat transform via adaptive quadrature."""
    f = lambda s: phi.profile(s) * 2 * np.pi * special.j0(2 * np.pi * rho * s) * s
    return integrate.quad(f, 0, phi.support_radius, points=[phi.plateau_radius], limit=200)[0]


def test_hat_fourier_profile_against_quadrature():
    phi = frostman.HatFunction(2)
    rho = np.array([0.0, 0.3, 1.7, 6.2])
    ref = [quad_profile(phi, r) for r in rho]
    assert np.allclose(phi.fourier_profile(rho), ref, rtol=1e-10, atol=1e-13)


def test_hat_profile_at_zero_is_its_integral():
    phi = frostman.HatFunction(2)
    area = integrate.quad(lambda s: phi.profile(s) * 2 * np.pi * s, 0, 1, points=[0.5])[0]
    assert phi.fourier_profile(0.0)[0] == pytest.approx(area, rel=1e-12)


def test_statistic_of_a_dirac():
    mu = frostman.dirac(2)
    phi = frostman.HatFunction(2)
    assert frostman.frostman_statistic(mu, phi, 0.1, [0.0, 0.0]) == pytest.approx(1.0)
    assert frostman.frostman_statistic(mu, phi, 0.1, [2.0, 0.0]) == 0.0
    with pytest.raises(ValueError):
        frostman.frostman_statistic(mu, phi, 1.5, [0.0, 0.0])


def test_circle_statistic_scales_like_r():
    mu = frostman.circle_arclength(1.0, 4096)
    phi = frostman.HatFunction(2)
    # a window centred on the circle sees about r times a fixed arc integral
    s1 = frostman.frostman_statistic(mu, phi, 0.1, [-10.0, 0.0])
    s2 = frostman.frostman_statistic(mu, phi, 0.05, [-20.0, 0.0])
    assert s1 / s2 == pytest.approx(2.0, rel=0.02)


@pytest.mark.parametrize("mu,lo,hi", [
    (frostman.dirac(2), -0.01, 0.1),
    (frostman.circle_arclength(1.0, 4096), 0.9, 1.6),
])
def test_dimension_bounds(mu, lo, hi):
    cert = frostman.dimension_lower_bound(mu, frostman.HatFunction(2))
    assert lo <= cert.bound <= hi
    assert all(r["passed"] == (r["sup_statistic_over_r_alpha"] <= cert.constant) for r in cert.rows())


def test_potential_trend_separates_alphas():
    nu = frostman.circle_arclength(1.0, 1024)
    grid = fields.make_grid(2, 32.0, 256)
    assert frostman.potential(nu, 0.5, grid).classification == "convergent"
    assert frostman.potential(nu, 1.5, grid).classification == "divergent"
    with pytest.raises(ValueError):
        frostman.potential(nu, 2.5, grid)


@pytest.mark.parametrize("alpha", [0.3, 1.7])
def test_hat_energy_scaling_identity(alpha):
    phi = frostman.HatFunction(2)
    ratio = frostman.hat_energy(phi, alpha, "homogeneous", 0.5) / frostman.hat_energy(phi, alpha, "homogeneous", 1.0)
    assert ratio == pytest.approx(0.5**alpha, rel=1e-8)


def test_cauchy_schwarz_chain_holds():
    nu = frostman.circle_arclength(1.0, 1024)
    grid = fields.make_grid(2, 32.0, 256)
    rep = frostman.frostman_from_potential_check(
        nu, frostman.HatFunction(2), 0.5, [0.5, 0.2], np.array([[-2.0, 0.0], [0.0, 0.0]]), grid)
    assert rep.worst_slack >= 0
