import math

import numpy as np
import pytest

from pathkernel.errors import PathkernelError
from pathkernel.heat_kernel import (
    MomentCheckConfig,
    TransitionKernel,
    TruncationPolicy,
    chapman_kolmogorov_residual,
    delta_family_residuals,
    dirichlet_images_arrays,
    dirichlet_mass_series,
    dirichlet_series_arrays,
    eval_compactified,
    evaluate,
    moment_check,
    total_mass,
)
from pathkernel.manifold import (
    CEMETERY,
    Circle,
    Compactified,
    DirichletInterval,
    Euclidean,
    FlatTorus,
    Hyperbolic3,
    point,
)

from test_manifold import random_point

GAUSS1 = TransitionKernel(Euclidean(1))
CAUCHY = TransitionKernel(Euclidean(1), kind="cauchy")
H3K = TransitionKernel(Hyperbolic3())
CIRC1 = TransitionKernel(Circle(1.0))
DIRPI = TransitionKernel(DirichletInterval(math.pi))
ORIGIN4 = point(1.0, 0.0, 0.0, 0.0)

# sine-series survival mass on (0, pi) at t=1 from x = pi/2:
# (4/pi) * sum over odd k of (-1)^((k-1)/2) e^(-k^2 t)/k, summed to machine tail
DIRICHLET_MASS_ORACLE = (4.0 / math.pi) * sum(
    (-1.0) ** ((k - 1) // 2) * math.exp(-k * k) / k for k in range(1, 16, 2)
)


def circle_spectral_oracle(t, dx, length):
    """Dual representation of the circle kernel; independent of the image sum."""
    total = 1.0
    m = 1
    while True:
        term = 2.0 * math.exp(-((2.0 * math.pi * m / length) ** 2) * t) * math.cos(
            2.0 * math.pi * m * dx / length
        )
        total += term
        if abs(term) < 1e-18 and m > 3:
            return total / length
        m += 1


class TestEvaluate:
    def test_gaussian_coincidence_is_one(self):
        t = 1.0 / (4.0 * math.pi)
        assert evaluate(GAUSS1, t, point(0.0), point(0.0)) == pytest.approx(1.0, abs=1e-14)

    def test_cauchy_coincidence(self):
        assert evaluate(CAUCHY, 1.0, point(0.0), point(0.0)) == pytest.approx(
            1.0 / math.pi, abs=1e-16
        )

    def test_hyperbolic_coincidence(self):
        want = math.exp(-1.0) * (4.0 * math.pi) ** -1.5
        got = evaluate(H3K, 1.0, ORIGIN4, ORIGIN4)
        assert got == pytest.approx(want, rel=1e-14)
        assert got == pytest.approx(8.25830126612423e-3, rel=1e-12)

    def test_circle_long_time_equidistribution(self):
        gen = np.random.default_rng(0)
        for _ in range(20):
            x, y = gen.uniform(0, 1, 2)
            got = evaluate(CIRC1, 10.0, point(x), point(y))
            assert abs(got - 1.0) < 1e-12
            assert got == pytest.approx(circle_spectral_oracle(10.0, x - y, 1.0), abs=1e-13)

    def test_circle_against_dual_series_short_time(self):
        gen = np.random.default_rng(1)
        for t in (0.02, 0.1, 0.5, 2.0):
            x, y = gen.uniform(0, 1, 2)
            got = evaluate(CIRC1, t, point(x), point(y))
            assert got == pytest.approx(circle_spectral_oracle(t, x - y, 1.0), rel=1e-12)

    def test_torus_factorizes(self):
        torus = TransitionKernel(FlatTorus((1.0, 2.0)))
        got = evaluate(torus, 0.3, point(0.1, 0.5), point(0.8, 1.9))
        want = circle_spectral_oracle(0.3, 0.1 - 0.8, 1.0) * circle_spectral_oracle(
            0.3, 0.5 - 1.9, 2.0
        )
        assert got == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("kernel", [GAUSS1, CAUCHY, H3K, CIRC1, DIRPI], ids=lambda k: k.kind + str(k.model))
    def test_symmetry_and_positivity(self, kernel):
        gen = np.random.default_rng(2)
        for _ in range(2000):
            x = random_point(kernel.model, gen)
            y = random_point(kernel.model, gen)
            t = gen.uniform(0.05, 2.0)
            pxy = evaluate(kernel, t, x, y)
            pyx = evaluate(kernel, t, y, x)
            assert abs(pxy - pyx) <= 1e-12 * max(1.0, pxy)
            if isinstance(kernel.model, DirichletInterval):
                assert pxy >= 0.0
            else:
                assert pxy > 0.0

    def test_dirichlet_boundary_decay(self):
        near = evaluate(DIRPI, 0.5, point(1e-8), point(1.5))
        assert 0.0 <= near < 1e-7

    def test_dirichlet_representations_agree_at_switch(self):
        L = math.pi
        t_switch = L * L / math.pi ** 2  # = 1
        pol = TruncationPolicy()
        gen = np.random.default_rng(3)
        x = gen.uniform(0.05, 0.95, 50) * L
        y = gen.uniform(0.05, 0.95, 50) * L
        a = dirichlet_images_arrays(t_switch, x, y, L, pol)
        b = dirichlet_series_arrays(t_switch, x, y, L, pol)
        assert np.max(np.abs(a - b)) < 1e-12

    def test_time_validation(self):
        with pytest.raises(ValueError):
            evaluate(GAUSS1, 0.0, point(0.0), point(1.0))
        with pytest.raises(ValueError):
            evaluate(GAUSS1, -1.0, point(0.0), point(1.0))

    def test_cauchy_only_on_line(self):
        with pytest.raises(ValueError):
            TransitionKernel(Euclidean(2), kind="cauchy")

    def test_truncation_budget_error(self):
        tiny = TransitionKernel(Circle(1.0), truncation=TruncationPolicy(max_terms=3))
        with pytest.raises(PathkernelError):
            evaluate(tiny, 5.0, point(0.0), point(0.5))


class TestMass:
    def test_flat_models_conserve(self):
        assert total_mass(GAUSS1, 0.7, point(0.3)) == 1.0
        assert total_mass(TransitionKernel(Euclidean(3)), 2.0, point(0, 1, 2)) == 1.0
        assert total_mass(CIRC1, 0.2, point(0.9)) == 1.0
        assert total_mass(CAUCHY, 5.0, point(0.0)) == 1.0

    def test_hyperbolic_mass_by_quadrature(self):
        for t in (0.1, 1.0, 5.0):
            assert abs(total_mass(H3K, t, ORIGIN4) - 1.0) < 1e-8

    def test_dirichlet_mass_against_series_oracle(self):
        got = total_mass(DIRPI, 1.0, point(math.pi / 2))
        assert got == pytest.approx(DIRICHLET_MASS_ORACLE, abs=1e-12)
        assert got == pytest.approx(dirichlet_mass_series(math.pi, 1.0, math.pi / 2), abs=1e-12)
        assert got == pytest.approx(0.4683, abs=5e-4)

    def test_dirichlet_mass_monotone_in_time(self):
        masses = [total_mass(DIRPI, t, point(1.0)) for t in (0.1, 0.5, 1.0, 2.0, 4.0)]
        assert all(b <= a + 1e-12 for a, b in zip(masses, masses[1:]))

    def test_compactified_conserves(self):
        comp = TransitionKernel(Compactified(DirichletInterval(math.pi)))
        assert total_mass(comp, 1.0, point(math.pi / 2)) == 1.0
        assert total_mass(comp, 1.0, CEMETERY) == 1.0


class TestCompactifiedTable:
    COMP = TransitionKernel(Compactified(DirichletInterval(math.pi)))

    def test_cemetery_absorbs(self):
        assert eval_compactified(self.COMP, 1.0, CEMETERY, CEMETERY) == 1.0

    def test_no_return_from_cemetery(self):
        assert eval_compactified(self.COMP, 1.0, point(1.0), CEMETERY) == 0.0

    def test_lost_mass_row(self):
        got = eval_compactified(self.COMP, 1.0, CEMETERY, point(math.pi / 2))
        assert got == pytest.approx(1.0 - DIRICHLET_MASS_ORACLE, abs=1e-12)
        assert got == pytest.approx(0.5317, abs=5e-4)

    def test_interior_matches_base(self):
        x, y = point(1.0), point(2.0)
        assert eval_compactified(self.COMP, 0.5, x, y) == evaluate(DIRPI, 0.5, x, y)

    def test_interior_plus_deficit_is_one(self):
        x = point(0.8)
        interior = total_mass(DIRPI, 1.3, x)
        deficit = eval_compactified(self.COMP, 1.3, CEMETERY, x)
        assert interior + deficit == pytest.approx(1.0, abs=1e-10)


class TestChapmanKolmogorov:
    def test_gaussian_convolution(self):
        r = chapman_kolmogorov_residual(GAUSS1, 0.5, 0.5, point(0.0), point(1.0))
        assert r < 1e-10

    def test_cauchy_closure(self):
        r = chapman_kolmogorov_residual(CAUCHY, 0.3, 0.7, point(0.0), point(2.0))
        assert r < 1e-8

    def test_circle_theta(self):
        r = chapman_kolmogorov_residual(CIRC1, 0.1, 0.2, point(0.0), point(0.3))
        assert r < 1e-9

    def test_hyperbolic(self):
        z = point(math.cosh(1.2), math.sinh(1.2), 0.0, 0.0)
        r = chapman_kolmogorov_residual(H3K, 0.4, 0.6, ORIGIN4, z)
        assert r < 1e-10

    def test_dirichlet(self):
        r = chapman_kolmogorov_residual(DIRPI, 0.3, 0.5, point(1.0), point(2.0))
        assert r < 1e-9

    def test_euclidean_3d_factorized(self):
        k3 = TransitionKernel(Euclidean(3))
        r = chapman_kolmogorov_residual(k3, 0.4, 0.3, point(0.0, 0.5, -1.0), point(1.0, 0.0, 0.2))
        assert r < 1e-9

    def test_compactified_cemetery_row(self):
        comp = TransitionKernel(Compactified(DirichletInterval(math.pi)))
        r = chapman_kolmogorov_residual(comp, 0.4, 0.6, point(1.2), CEMETERY)
        assert r < 1e-7
        assert chapman_kolmogorov_residual(comp, 0.4, 0.6, CEMETERY, point(1.2)) == 0.0


class TestMoments:
    def test_gaussian_fourth_moment_ratio(self):
        cfg = MomentCheckConfig(a=4.0, b=1.0, tau_grid=(1e-3, 1e-2, 1e-1))
        rep = moment_check(GAUSS1, cfg)
        assert not rep.any_divergent
        for ratio in rep.ratios:
            assert ratio == pytest.approx(12.0, abs=1e-6)

    def test_pointwise_scaling_is_tau_free(self):
        # n = 1, b = 1/2 so a = 2b + n + 2 = 4; the maximized ratio is
        # (2a tau)^(a/2) e^(-a/2) (4 pi tau)^(-1/2) / tau^(3/2), tau-free
        cfg = MomentCheckConfig(a=4.0, b=0.5, tau_grid=(1e-3, 1e-2, 1e-1), mode="pointwise")
        rep = moment_check(GAUSS1, cfg)
        want = 8.0 ** 2 * math.exp(-2.0) / math.sqrt(4.0 * math.pi)
        for ratio in rep.ratios:
            assert ratio == pytest.approx(want, rel=1e-8)
        spread = (max(rep.ratios) - min(rep.ratios)) / rep.worst_constant
        assert spread < 1e-8

    def test_cauchy_fourth_moment_diverges(self):
        cfg = MomentCheckConfig(a=4.0, b=1.0, tau_grid=(1e-2, 1e-1))
        rep = moment_check(CAUCHY, cfg)
        assert rep.any_divergent
        assert all(rep.divergent)

    def test_hyperbolic_ratios_reported_bounded(self):
        # on the tested grid the ratio sits near the flat 3-d constant 60
        # (E|Z|^4 = 15 (2 tau)^2) with a curvature correction growing in tau
        cfg = MomentCheckConfig(a=4.0, b=1.0, tau_grid=(1e-3, 1e-2, 1e-1))
        rep = moment_check(H3K, cfg)
        assert not rep.any_divergent
        assert rep.ratios[0] == pytest.approx(60.0, rel=0.01)
        assert rep.worst_constant < 100.0


class TestDeltaFamilyAndBounds:
    @pytest.mark.parametrize("kernel", [GAUSS1, CIRC1, H3K, DIRPI, CAUCHY], ids=lambda k: k.kind + str(k.model))
    def test_delta_family(self, kernel):
        # the residual scales like t / width^2, so the narrow circle bump
        # needs a deeper time sequence to reach the same absolute level
        if isinstance(kernel.model, DirichletInterval):
            y = point(kernel.model.length / 2)
        elif isinstance(kernel.model, Hyperbolic3):
            y = ORIGIN4
        else:
            y = point(0.4)
        depth = 7 if isinstance(kernel.model, Circle) else 5
        t_seq = [0.02 * 4.0 ** -j for j in range(depth)]
        res = delta_family_residuals(kernel, y, t_seq)
        assert res[-1] < 1e-3
        assert res[-1] < res[0] / 20.0

    def test_maximum_principle_interval_below_doubled_circle(self):
        # the double of [0, L] is a circle of circumference 2L
        L = math.pi
        circ2 = TransitionKernel(Circle(2 * L))
        xs = np.linspace(0.1, L - 0.1, 9)
        for t in (0.05, 0.3, 1.0, 3.0):
            for x in xs:
                for y in xs:
                    p = evaluate(DIRPI, t, point(x), point(y))
                    q = evaluate(circ2, t, point(x), point(y))
                    assert p <= q + 1e-12

    def test_short_time_gaussian_limit_on_circle(self):
        vals = []
        for t in (1e-2, 1e-3, 1e-4):
            v = (4.0 * math.pi * t) ** 0.5 * evaluate(CIRC1, t, point(0.3), point(0.3))
            vals.append(abs(v - 1.0))
        assert vals[-1] < 1e-12
        assert vals == sorted(vals, reverse=True)

    def test_short_time_gaussian_limit_on_torus(self):
        torus = TransitionKernel(FlatTorus((1.0, 1.5)))
        x = point(0.2, 0.7)
        v = (4.0 * math.pi * 1e-3) ** 1.0 * evaluate(torus, 1e-3, x, x)
        assert v == pytest.approx(1.0, abs=1e-12)
