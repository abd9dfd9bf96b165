"""Reading off dimension from how much mass small windows catch.

The statistic sums the measure under a hat of radius r. Its largest value
behaves like r^dim, so the certified exponent tells a point from a curve
and a curve from an area.
"""
from fvanish import fields, frostman

phi = frostman.HatFunction(2)
for name, mu in (("Dirac", frostman.dirac(2)),
                 ("circle arclength", frostman.circle_arclength()),
                 ("square Lebesgue", frostman.square_lebesgue(per_axis=128))):
    cert = frostman.dimension_lower_bound(mu, phi)
    print(f"{name:<17} certified dimension >= {cert.bound:.2f}")

nu = frostman.circle_arclength(1.0, 1024)
grid = fields.make_grid(2, 32.0, 256)
for a in (0.5, 1.5):
    p = frostman.potential(nu, a, grid)
    print(f"circle energy at alpha = {a}: ring trend {p.trend_exponent:+.2f} ({p.classification})")
