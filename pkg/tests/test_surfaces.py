import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fvanish import fields, surfaces


def test_circle_quadrature_measure_and_moments():
    c = surfaces.make_circle(2.0, 64)
    assert c.total_measure == pytest.approx(4 * np.pi, rel=1e-14)
    # trapezoid rule is exact for cos^2 on the circle
    assert c.integrate(c.nodes[:, 0] ** 2) == pytest.approx(np.pi * 8, rel=1e-13)


def test_sphere_quadrature_polynomials():
    s = surfaces.make_sphere(1.0, (16, 32))
    assert s.total_measure == pytest.approx(4 * np.pi, rel=1e-13)
    assert s.integrate(s.nodes[:, 2] ** 4) == pytest.approx(4 * np.pi / 5, rel=1e-12)


def test_graph_curve_rejects_nonconvex_and_unnormalized():
    with pytest.raises(ValueError):
        surfaces.make_graph_curve(lambda t: -t**2, 0.5)
    with pytest.raises(ValueError):
        surfaces.make_graph_curve(lambda t: (t - 0.1) ** 2, 0.5)


def test_partition_of_unity_sums_to_one():
    c = surfaces.make_circle(1.0, 128)
    for K in (3, 4, 7):
        parts = surfaces.partition_of_unity(c, K)
        assert np.allclose(sum(p.values for p in parts), 1.0, atol=1e-14)
        assert all(np.all(p.values.real >= 0) for p in parts)
    with pytest.raises(ValueError):
        surfaces.partition_of_unity(c, 2)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=5, max_size=5))
def test_trace_of_extension_is_identity_on_circle(coefs):
    c = surfaces.make_circle(1.0, 128)
    t = c.parameters
    vals = sum(a * np.cos(k * t) for k, a in enumerate(coefs)) + 0.5j * np.sin(2 * t)
    zeta = surfaces.SurfaceDensity(c, vals)
    back = surfaces.trace(surfaces.ext_operator(zeta), c)
    assert np.abs(back.values - vals).max() < 1e-8


def test_extension_support_lies_in_tube():
    p = surfaces.parabola(0.5, 64)
    zeta = surfaces.density(p, lambda x: 1 + x[:, 0])
    E = surfaces.ext_operator(zeta)
    far = np.array([[0.1, 0.6], [0.7, 0.0], [-0.2, -0.3]])
    assert np.all(E(far) == 0)


def test_sampled_trace_reports_interpolation_error():
    c = surfaces.make_circle(1.0, 64)
    g = fields.make_grid(2, 16.0, 256)
    zeta = surfaces.density(c, lambda x: 1.0 + 0 * x[:, 0])
    F = surfaces.ext_operator(zeta).sample(g)
    tr = surfaces.trace(F, c)
    assert tr.error is not None and tr.error >= 0


def test_density_json_round_trip():
    c = surfaces.make_circle(1.5, 40)
    z = surfaces.density(c, lambda x: x[:, 0] + 1j * x[:, 1])
    back = surfaces.density_from_dict(json.loads(json.dumps(z.to_dict())))
    assert np.allclose(back.values, z.values) and back.surface.params == c.params
