import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from fvanish import fields, rotation, surfaces


def test_weights_are_a_probability_on_small_angles():
    for d in (2, 3):
        w = rotation.make_rotation_weight(d, 8, 16)
        assert w.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(w.weights >= 0)
        assert w.max_angle() <= 1 / 8 + 1e-12
        for T in w.rotations:
            assert np.allclose(T @ T.T, np.eye(d), atol=1e-12)


def test_rotating_circle_density_shifts_angle():
    c = surfaces.make_circle(1.0, 128)
    z = surfaces.density(c, lambda x: x[:, 0] + 2 * x[:, 1] ** 3)
    a = 0.3
    T = np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
    out = rotation.rotate_density(z, T)
    ref = surfaces.density(c, lambda x: (x @ T)[:, 0] + 2 * (x @ T)[:, 1] ** 3)
    assert np.abs(out.values - ref.values).max() < 1e-10


def test_rotating_sphere_density():
    s = surfaces.make_sphere(1.0, (32, 64))
    f = lambda x: x[:, 0] * x[:, 2] + x[:, 1] ** 2
    T = Rotation.from_rotvec([0.1, -0.2, 0.15]).as_matrix()
    out = rotation.rotate_density(surfaces.density(s, f), T)
    assert np.abs(out.values - f(s.nodes @ T)).max() < 1e-3


def test_multiplier_law(rng):
    c = surfaces.make_circle(1.0, 128)
    z = surfaces.SurfaceDensity(c, rng.normal(size=128))
    w = rotation.make_rotation_weight(2, 4, 32)
    out = rotation.average_density(z, w)
    k = np.arange(-10, 11)
    coef = lambda v: np.exp(-1j * np.outer(k, c.parameters)) @ v / len(v)
    assert np.abs(coef(out.values) - rotation.mollifier_coefficients(w, k) * coef(z.values)).max() < 1e-12


def test_radial_field_is_invariant():
    g = fields.schwartz_generator(fields.make_grid(2, 4.0, 128), "gaussian")
    out = rotation.average_field(g, rotation.make_rotation_weight(2, 4, 16), order=5)
    assert np.abs(out.field.values - g.values).max() < 1e-7


def test_averaging_commutes_with_fourier_transform():
    g = fields.schwartz_generator(fields.make_grid(2, 8.0, 256), "gaussian", center=(0.6, 0.2))
    w = rotation.make_rotation_weight(2, 4, 16)
    a = fields.fourier_transform(rotation.average_field(g, w, order=5).field)
    b = rotation.average_field(fields.fourier_transform(g), w, order=5).field
    assert np.abs(a.values - b.values).max() < 1e-6


def test_average_field_refuses_boundary_mass():
    g = fields.make_grid(2, 2.0, 64)
    f = fields.SampledField(g, fields.SPACE, np.ones(g.shape, complex))
    with pytest.raises(ValueError, match="boundary"):
        rotation.average_field(f, rotation.make_rotation_weight(2, 4, 16))


def test_polar_distance_is_dominated_and_decreasing():
    g = fields.schwartz_generator(fields.make_grid(2, 4.0, 128), "gaussian", center=(0.5, 0.0))
    d = []
    for n in (2, 8):
        gn = rotation.average_field(g, rotation.make_rotation_weight(2, n, 32)).field
        prof = rotation.polar_lq_distance(g, gn, 2.0)
        assert prof.dominated
        d.append(prof.distance)
    assert d[1] < d[0]
