import math

import numpy as np
import pytest

from pathkernel.manifold import (
    CEMETERY,
    Circle,
    Compactified,
    DirichletInterval,
    Euclidean,
    FlatTorus,
    Hyperbolic3,
    Point,
    covering_of,
    distance,
    exp_point,
    exp_point_arrays,
    lift_point_near,
    point,
    project_point,
    validate_point,
)

H3 = Hyperbolic3()
ORIGIN4 = point(1.0, 0.0, 0.0, 0.0)


def random_h3_point(gen, rmax=2.0):
    d = gen.normal(size=3)
    d /= np.linalg.norm(d)
    r = gen.uniform(0.0, rmax)
    return Point(tuple(exp_point_arrays(np.array([1.0, 0, 0, 0]), d, r)))


def random_point(model, gen):
    if isinstance(model, Euclidean):
        return Point(tuple(gen.normal(0, 2, model.dim)))
    if isinstance(model, Circle):
        return Point((gen.uniform(0, model.circumference),))
    if isinstance(model, FlatTorus):
        return Point(tuple(gen.uniform(0, p) for p in model.periods))
    if isinstance(model, DirichletInterval):
        return Point((gen.uniform(0, 1) * model.length,))
    return random_h3_point(gen)


class TestDistance:
    def test_pythagorean(self):
        assert distance(Euclidean(2), point(0.0, 0.0), point(3.0, 4.0)) == 5.0

    def test_circle_wraparound(self):
        assert distance(Circle(1.0), point(0.1), point(0.9)) == pytest.approx(0.2, abs=1e-15)

    def test_hyperbolic_axis(self):
        q = point(math.cosh(1.0), math.sinh(1.0), 0.0, 0.0)
        assert distance(H3, ORIGIN4, q) == pytest.approx(1.0, abs=1e-12)

    def test_interval(self):
        assert distance(DirichletInterval(2.0), point(0.25), point(1.5)) == 1.25

    def test_torus_minimum_over_translates(self):
        m = FlatTorus((1.0, 2.0))
        assert distance(m, point(0.05, 0.1), point(0.95, 1.9)) == pytest.approx(
            math.hypot(0.1, 0.2), abs=1e-14
        )

    @pytest.mark.parametrize(
        "model",
        [Euclidean(1), Euclidean(3), Circle(1.0), FlatTorus((1.0, 2.0)), H3, DirichletInterval(3.0)],
        ids=str,
    )
    def test_symmetry_and_triangle(self, model):
        gen = np.random.default_rng(0)
        for _ in range(1000):
            x, y, z = (random_point(model, gen) for _ in range(3))
            dxy = distance(model, x, y)
            assert dxy == distance(model, y, x)
            assert dxy <= distance(model, x, z) + distance(model, z, y) + 1e-12

    def test_cemetery_rejected(self):
        comp = Compactified(DirichletInterval(1.0))
        with pytest.raises(ValueError):
            distance(comp, CEMETERY, point(0.5))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            distance(Euclidean(2), point(0.0), point(1.0, 1.0))

    def test_near_coincidence_stability(self):
        # the difference form keeps tiny hyperbolic distances accurate
        q = Point(tuple(exp_point_arrays(np.array([1.0, 0, 0, 0]), np.array([1.0, 0, 0]), 1e-9)))
        assert distance(H3, ORIGIN4, q) == pytest.approx(1e-9, rel=1e-5)


class TestExpPoint:
    def test_zero_radius(self):
        assert exp_point(H3, ORIGIN4, (1.0, 0.0, 0.0), 0.0) == ORIGIN4

    def test_axis_geodesic(self):
        p = exp_point(H3, ORIGIN4, (1.0, 0.0, 0.0), 1.0)
        assert p.coords == pytest.approx((math.cosh(1.0), math.sinh(1.0), 0.0, 0.0), abs=1e-14)

    def test_distance_round_trip(self):
        gen = np.random.default_rng(3)
        for _ in range(200):
            base = random_h3_point(gen)
            d = gen.normal(size=3)
            d /= np.linalg.norm(d)
            out = exp_point(H3, base, tuple(d), 2.0)
            assert distance(H3, base, out) == pytest.approx(2.0, abs=1e-10)

    def test_constraint_preserved(self):
        gen = np.random.default_rng(4)
        for _ in range(200):
            base = random_h3_point(gen, rmax=5.0)
            d = gen.normal(size=3)
            d /= np.linalg.norm(d)
            out = exp_point(H3, base, tuple(d), gen.uniform(0, 4))
            c = out.array()
            q = c[0] ** 2 - c[1] ** 2 - c[2] ** 2 - c[3] ** 2
            assert abs(q - 1.0) <= 1e-10 * (1.0 + float(np.dot(c, c)))

    def test_non_unit_direction_rejected(self):
        with pytest.raises(ValueError):
            exp_point(H3, ORIGIN4, (2.0, 0.0, 0.0), 1.0)


class TestCovering:
    def test_project_mod_one(self):
        cov = covering_of(Circle(1.0))
        assert project_point(cov, point(2.5)).coords == (0.5,)

    def test_project_componentwise(self):
        cov = covering_of(FlatTorus((1.0, 2.0)))
        got = project_point(cov, point(-0.25, 3.1)).coords
        assert got == pytest.approx((0.75, 1.1), abs=1e-12)

    def test_project_identity_on_domain(self):
        cov = covering_of(Circle(1.0))
        gen = np.random.default_rng(5)
        for _ in range(100):
            x = float(gen.uniform(0, 1))
            assert project_point(cov, point(x)).coords == (x,)

    def test_lift_nearest(self):
        cov = covering_of(Circle(1.0))
        assert lift_point_near(cov, point(0.5), point(2.4)).coords == (2.5,)

    def test_lift_tie_break_smaller_coefficient(self):
        cov = covering_of(Circle(1.0))
        assert lift_point_near(cov, point(0.0), point(0.5)).coords == (0.0,)

    def test_project_after_lift_round_trip(self):
        cov = covering_of(Circle(1.0))
        gen = np.random.default_rng(6)
        for _ in range(500):
            x = point(float(gen.uniform(0, 1)))
            anchor = point(float(gen.uniform(-6, 6)))
            lifted = lift_point_near(cov, x, anchor)
            back = project_point(cov, lifted)
            # the lattice shift is recovered exactly; re-adding it can cost
            # the representative a few final mantissa bits
            assert back.coords[0] == pytest.approx(x.coords[0], abs=1e-15)
            assert abs(lifted.coords[0] - anchor.coords[0]) <= 0.5 + 1e-12

    def test_lift_after_project_exact_for_unit_period(self):
        cov = covering_of(Circle(1.0))
        gen = np.random.default_rng(7)
        for _ in range(500):
            xt = point(float(gen.uniform(-8, 8)))
            back = lift_point_near(cov, project_point(cov, xt), xt)
            assert back.coords == xt.coords

    def test_covering_validation(self):
        with pytest.raises(ValueError):
            covering_of(Euclidean(1))


class TestValidation:
    def test_hyperboloid_constraint_enforced(self):
        with pytest.raises(ValueError):
            validate_point(H3, point(1.0, 0.5, 0.0, 0.0))

    def test_torus_box(self):
        with pytest.raises(ValueError):
            validate_point(Circle(1.0), point(1.0))

    def test_open_interval(self):
        with pytest.raises(ValueError):
            validate_point(DirichletInterval(1.0), point(0.0))

    def test_cemetery_only_on_compactified(self):
        with pytest.raises(ValueError):
            validate_point(Euclidean(1), CEMETERY)
        assert validate_point(Compactified(DirichletInterval(1.0)), CEMETERY) is None

    def test_compactified_wraps_substochastic_base_only(self):
        with pytest.raises(ValueError):
            Compactified(Euclidean(1))
