"""End-to-end acceptance criteria, one test per criterion (criterion 6 is
split: its Monte-Carlo-band sub-clause is asserted separately because the
default time-slice rule cannot meet it; see that test's docstring).

Each criterion registers a PASS/FAIL line printed in the terminal
summary.
"""

import json
import math
import pathlib
import subprocess
import sys
import time

import numpy as np

import pathkernel.path_sampler as ps
from pathkernel.diagnostics import (
    brownian_dyadic_ensemble,
    expected_distance_mc,
    holder_exponent,
    linear_dyadic_levels,
    strided_dyadic_ensemble,
)
from pathkernel.feynman_kac import (
    FKProblem,
    Potential,
    const_potential,
    constant_one,
    cos_potential,
    fk_covering_sum_check,
    fk_expectation,
    fk_monotonicity_check,
    spectral_oracle,
    zero_potential,
)
from pathkernel.heat_kernel import (
    MomentCheckConfig,
    TransitionKernel,
    chapman_kolmogorov_residual,
    eval_compactified,
    evaluate,
    evaluate_arrays,
    moment_check,
    total_mass,
)
from pathkernel.manifold import (
    CEMETERY,
    Circle,
    Compactified,
    DirichletInterval,
    Euclidean,
    Hyperbolic3,
    covering_of,
    point,
)
from pathkernel.path_sampler import TimeGrid, lift_path, project_path, sample_bridges, sample_paths
from pathkernel.rng import RngContract

from conftest import record_acceptance
from stat_helpers import bin_counts, chi2_statistic, chi2_threshold, circle_bin_probs
from test_manifold import random_point

TWO_PI = 2.0 * math.pi
ORIGIN4 = point(1.0, 0.0, 0.0, 0.0)
R3_COEFFICIENT = 2.256758334191025  # 2 Gamma(2) / Gamma(3/2)
H3_EXPECTED = 2.9432098762697394    # e^-1 2/sqrt(pi) + 3 erf(1)
DIR_MASS = (4.0 / math.pi) * sum(
    (-1.0) ** ((k - 1) // 2) * math.exp(-k * k) / k for k in range(1, 16, 2)
)
CAL = json.loads(
    (pathlib.Path(__file__).parent / "data" / "holder_calibration.json").read_text()
)


def test_criterion_1_euclidean_expectation():
    t0 = time.perf_counter()
    est = expected_distance_mc(Euclidean(3), point(0.0, 0.0, 0.0), 1.0, 10 ** 6, RngContract(20240))
    elapsed = time.perf_counter() - t0
    rel = abs(est.value - R3_COEFFICIENT) / R3_COEFFICIENT
    ok = rel < 0.005 and abs(est.value - R3_COEFFICIENT) < 3.0 * est.std_error and elapsed < 10.0
    record_acceptance(
        1, ok,
        f"R^3 mean distance {est.value:.6f} vs {R3_COEFFICIENT:.6f} "
        f"(rel {rel:.2e}, {abs(est.value - R3_COEFFICIENT) / est.std_error:.2f} se, {elapsed:.1f}s)",
    )
    assert rel < 0.005
    assert abs(est.value - R3_COEFFICIENT) < 3.0 * est.std_error
    assert elapsed < 10.0


def test_criterion_2_hyperbolic_expectation_and_curve():
    est = expected_distance_mc(Hyperbolic3(), ORIGIN4, 1.0, 10 ** 6, RngContract(20241))
    rel = abs(est.value - H3_EXPECTED) / H3_EXPECTED
    ok_main = rel < 0.005 and abs(est.value - H3_EXPECTED) < 3.0 * est.std_error

    ts = [0.25 * j for j in range(1, 29)]
    dominated = True
    for j, t in enumerate(ts):
        if t < 0.5:
            continue
        h3 = expected_distance_mc(Hyperbolic3(), ORIGIN4, t, 10 ** 5, RngContract(20242, j * 10 ** 5))
        r3 = expected_distance_mc(Euclidean(3), point(0, 0, 0), t, 10 ** 5, RngContract(20243, j * 10 ** 5))
        if h3.value <= r3.value:
            dominated = False
            break
    ok = ok_main and dominated
    record_acceptance(
        2, ok,
        f"H^3 mean distance {est.value:.6f} vs {H3_EXPECTED:.6f} (rel {rel:.2e}); "
        f"curve dominates R^3 for t >= 0.5: {dominated}",
    )
    assert ok_main
    assert dominated


def test_criterion_3_transition_function_axioms():
    kernels = {
        "gauss": TransitionKernel(Euclidean(1)),
        "circle": TransitionKernel(Circle(1.0)),
        "h3": TransitionKernel(Hyperbolic3()),
        "cauchy": TransitionKernel(Euclidean(1), kind="cauchy"),
    }
    worst_ck = 0.0
    gen = np.random.default_rng(333)
    for name, k in kernels.items():
        for _ in range(20):
            s = float(gen.uniform(0.2, 0.9))
            t = float(gen.uniform(0.2, 0.9))
            x = random_point(k.model, gen)
            z = random_point(k.model, gen)
            worst_ck = max(worst_ck, chapman_kolmogorov_residual(k, s, t, x, z))
    sym_ok = True
    pos_ok = True
    for name, k in kernels.items():
        xs = np.stack([random_point(k.model, gen).array() for _ in range(100)])
        ys = np.stack([random_point(k.model, gen).array() for _ in range(100)])
        for t in np.linspace(0.05, 2.0, 100):
            pxy = evaluate_arrays(k, float(t), xs, ys)
            pyx = evaluate_arrays(k, float(t), ys, xs)
            sym_ok &= bool(np.max(np.abs(pxy - pyx)) <= 1e-12 * max(1.0, float(np.max(pxy))))
            pos_ok &= bool(np.all(pxy > 0.0))
    ok = worst_ck < 1e-9 and sym_ok and pos_ok
    record_acceptance(
        3, ok,
        f"worst Chapman-Kolmogorov residual {worst_ck:.2e} over 20 tuples x 4 kernels; "
        f"symmetry {sym_ok}, positivity {pos_ok} on 1e4 evaluations per kernel",
    )
    assert worst_ck < 1e-9
    assert sym_ok and pos_ok


def test_criterion_4_moment_conditions():
    gauss = TransitionKernel(Euclidean(1))
    taus = tuple(10.0 ** e for e in np.linspace(-3, -1, 5))
    integ = moment_check(gauss, MomentCheckConfig(a=4.0, b=1.0, tau_grid=taus))
    integ_err = max(abs(r - 12.0) for r in integ.ratios)

    pw = moment_check(gauss, MomentCheckConfig(a=4.0, b=0.5, tau_grid=taus, mode="pointwise"))
    spread = (max(pw.ratios) - min(pw.ratios)) / max(pw.ratios)

    cauchy = TransitionKernel(Euclidean(1), kind="cauchy")
    div = moment_check(cauchy, MomentCheckConfig(a=4.0, b=1.0, tau_grid=(1e-2, 1e-1)))

    ok = integ_err <= 1e-6 and spread <= 1e-8 and div.any_divergent
    record_acceptance(
        4, ok,
        f"integrated ratio error {integ_err:.2e} (tol 1e-6); pointwise spread {spread:.2e} "
        f"(tol 1e-8); Cauchy divergence flagged: {div.any_divergent}",
    )
    assert integ_err <= 1e-6
    assert spread <= 1e-8
    assert div.any_divergent


def test_criterion_5_covering_identity():
    cov = covering_of(Circle(1.0))
    n = 10 ** 5
    horizon = 0.25
    line = TransitionKernel(Euclidean(1))
    circ = TransitionKernel(Circle(1.0))

    ens = sample_paths(line, point(0.5), TimeGrid.uniform(horizon, 8), 20245, n)
    projected = ps.project_positions(cov, ens.positions)
    edges, probs = circle_bin_probs(horizon, 0.5, 1.0, circ.truncation)
    stat = chi2_statistic(bin_counts(projected[:, -1, 0], edges), probs, n)
    chi_ok = stat < chi2_threshold(len(probs))

    # round trips on 1e3 sampled paths; the lattice arithmetic is exact up
    # to one ulp of the shifted magnitude
    grid = TimeGrid.uniform(horizon, 64)
    line_ens = sample_paths(line, point(0.5), grid, 20246, 500)
    circ_ens = sample_paths(circ, point(0.5), grid, 20247, 500)
    round_ok = True
    for i in range(500):
        tilde = line_ens.path(i)
        back = lift_path(cov, project_path(cov, tilde), tilde.points[0])
        for a, b in zip(back.points, tilde.points):
            round_ok &= abs(a.coords[0] - b.coords[0]) <= 2.0 ** -52 * max(1.0, abs(b.coords[0]))
    for i in range(500):
        base = circ_ens.path(i)
        back = project_path(cov, lift_path(cov, base, base.points[0]))
        for a, b in zip(back.points, base.points):
            round_ok &= abs(a.coords[0] - b.coords[0]) <= 2.0 ** -52

    n_b = 10 ** 5
    t_b = 0.5
    br = sample_bridges(circ, point(0.0), point(0.0), TimeGrid.uniform(t_b, 4), 20248, n_b)
    ks = np.arange(-8, 9)
    w = np.exp(-((ks * 1.0) ** 2) / (4.0 * t_b))
    w /= w.sum()
    wind_ok = True
    for k, pk in zip(ks, w):
        if n_b * pk < 5:
            continue
        obs = int(np.sum(br.windings[:, 0] == k))
        wind_ok &= abs(obs - n_b * pk) <= 3.0 * math.sqrt(n_b * pk * (1.0 - pk))

    ok = chi_ok and round_ok and wind_ok
    record_acceptance(
        5, ok,
        f"projected-marginal chi2 {stat:.1f} < {chi2_threshold(len(probs)):.1f}; "
        f"round trips exact to representation: {round_ok}; winding bands: {wind_ok}",
    )
    assert chi_ok and round_ok and wind_ok


def _fk_circle_problem(n_steps, seed, n_samples=200000):
    return FKProblem(
        TransitionKernel(Circle(TWO_PI)), cos_potential(), constant_one,
        point(0.0), 1.0, n_steps, n_samples, RngContract(seed),
    )


def test_criterion_6_fk_vs_oracle_relative_band_and_bias_decay():
    orc = spectral_oracle(Circle(TWO_PI), 512, cos_potential(), 1.0)
    want = orc.value_at(constant_one, 0.0)

    t0 = time.perf_counter()
    est64 = fk_expectation(_fk_circle_problem(64, 20249), workers=4)
    elapsed = time.perf_counter() - t0
    rel = abs(est64.value - want) / want
    rel_ok = rel < 0.02
    runtime_ok = elapsed < 60.0

    diffs = []
    for n_steps, seed in ((4, 20250), (16, 20251), (64, 20249), (256, 20252)):
        e = fk_expectation(_fk_circle_problem(n_steps, seed), workers=4)
        diffs.append((abs(e.value - want), e.std_error))
    mono_ok = all(
        b[0] <= a[0] + 3.0 * math.hypot(a[1], b[1]) for a, b in zip(diffs, diffs[1:])
    )
    ok = rel_ok and runtime_ok and mono_ok
    record_acceptance(
        "6 (2% band, bias decay, runtime)", ok,
        f"FK {est64.value:.6f} vs oracle {want:.6f} (rel {rel:.2%}, tol 2%); "
        f"bias over n=4,16,64,256: {[f'{d:.2e}' for d, _ in diffs]} monotone: {mono_ok}; "
        f"{elapsed:.1f}s with 4 workers",
    )
    assert rel_ok and runtime_ok and mono_ok


def test_criterion_6_fk_within_three_std_errors():
    """The 3-std_error sub-clause cannot hold for the default estimator.

    The right-endpoint time-slice rule makes the estimator's mean exactly
    the 64-step Trotter product, 0.56531 on this problem, while the true
    semigroup value is 0.56179: an inherent bias of +3.5e-3.  At 2e5
    samples the Monte Carlo standard error is about 5e-4, so the bias sits
    near 7 standard errors no matter the seed.  (The trapezoid rule drops
    the bias to 4e-6, well inside the band, but the right-endpoint rule is
    the operation's defining convention.)  The assertion is kept as stated
    and is expected to fail; see the decisions ledger.
    """
    orc = spectral_oracle(Circle(TWO_PI), 512, cos_potential(), 1.0)
    want = orc.value_at(constant_one, 0.0)
    est64 = fk_expectation(_fk_circle_problem(64, 20249), workers=4)
    gap_se = abs(est64.value - want) / est64.std_error
    ok = gap_se <= 3.0
    record_acceptance(
        "6 (3-std_error sub-clause)", ok,
        f"|FK - oracle| = {gap_se:.1f} std errors (needs <= 3): inherent slicing bias "
        f"of the right-endpoint rule at n_steps=64, N=2e5",
    )
    assert ok, (
        f"|estimate - oracle| = {gap_se:.1f} standard errors; the right-endpoint "
        f"slicing bias exceeds the Monte Carlo band by construction"
    )


def test_criterion_7_fk_structure_theorems():
    circ = TransitionKernel(Circle(TWO_PI))
    shifted = Potential(lambda c: np.cos(c[..., 0]) + 0.5, 1.5, name="cos+0.5")
    rep = fk_monotonicity_check(circ, cos_potential(), shifted, point(0.0), 1.0, 64,
                                20000, RngContract(20253))
    crn_ok = rep.passed and rep.estimate_low.value >= rep.estimate_high.value

    cover = fk_covering_sum_check(
        covering_of(Circle(TWO_PI)), cos_potential(), point(0.0), point(math.pi),
        0.5, windings=3, n_steps=32, n_samples=20000, rng=RngContract(20254),
    )
    cover_ok = cover.within_tolerance

    # constant-potential factorization, sample by sample
    c, t = 0.7, 1.0
    factor_ok = True
    for i in range(200):
        w0 = fk_expectation(FKProblem(circ, zero_potential(), constant_one, point(0.0),
                                      t, 64, 1, RngContract(20255, i))).value
        wc = fk_expectation(FKProblem(circ, const_potential(c), constant_one, point(0.0),
                                      t, 64, 1, RngContract(20255, i))).value
        factor_ok &= abs(wc - math.exp(-c * t) * w0) <= 1e-15 * abs(wc)
    ok = crn_ok and cover_ok and factor_ok
    record_acceptance(
        7, ok,
        f"CRN monotonicity pathwise ({rep.n_violations} violations); covering-sum residual "
        f"{cover.residual:.2e} vs 3 sigma {3 * cover.combined_std_error:.2e} + tail "
        f"{cover.tail_bound:.2e}; e^(-ct) factorization to 1e-15/sample: {factor_ok}",
    )
    assert crn_ok and cover_ok and factor_ok


def test_criterion_8_killing_and_compactification():
    comp = TransitionKernel(Compactified(DirichletInterval(math.pi)))
    n = 10 ** 5
    ens = sample_paths(comp, point(math.pi / 2), TimeGrid.uniform(1.0, 32), 20256, n)
    got = ens.survival_fraction()
    band = 3.0 * math.sqrt(DIR_MASS * (1.0 - DIR_MASS) / n)
    surv_ok = abs(got - DIR_MASS) < band

    inner = TransitionKernel(DirichletInterval(math.pi))
    x = point(math.pi / 2)
    table_ok = (
        eval_compactified(comp, 1.0, CEMETERY, CEMETERY) == 1.0
        and eval_compactified(comp, 1.0, x, CEMETERY) == 0.0
        and eval_compactified(comp, 1.0, x, x) == evaluate(inner, 1.0, x, x)
    )
    mass_ok = total_mass(comp, 1.0, x) == 1.0
    split_ok = abs(
        total_mass(inner, 1.0, x) + eval_compactified(comp, 1.0, CEMETERY, x) - 1.0
    ) < 1e-10
    ok = surv_ok and table_ok and mass_ok and split_ok
    record_acceptance(
        8, ok,
        f"survival {got:.5f} vs series mass {DIR_MASS:.5f} (3 sigma {band:.5f}); "
        f"compactified table consistent and conservative: {table_ok and mass_ok and split_ok}",
    )
    assert surv_ok and table_ok and mass_ok and split_ok


def test_criterion_9_regularity():
    """The Brownian band is the one frozen by this artifact's 50-seed
    pre-registration (tests/data/holder_calibration.json): the median
    max-increment statistic with a least-squares fit over levels 4..12
    lands at 0.38-0.40, slightly below one half by the sqrt(log) factor.
    """
    lo, hi = CAL["frozen_exponent_band"]
    rep = holder_exponent(brownian_dyadic_ensemble(200, range(4, 13), master_seed=20257))
    brown_ok = lo <= rep.fitted_exponent <= hi and rep.r_squared > CAL["frozen_r2_floor"]

    lin = holder_exponent(linear_dyadic_levels(range(4, 13)))
    lin_ok = abs(lin.fitted_exponent - 1.0) <= 0.01

    cauchy = TransitionKernel(Euclidean(1), kind="cauchy")
    jump = holder_exponent(strided_dyadic_ensemble(cauchy, point(0.0), range(4, 13), 200, 20258))
    jump_ok = jump.fitted_exponent < 0.1

    sharp_ok = rep.fitted_exponent < 0.55
    ok = brown_ok and lin_ok and jump_ok and sharp_ok
    record_acceptance(
        9, ok,
        f"Brownian exponent {rep.fitted_exponent:.4f} in calibrated band [{lo}, {hi}] "
        f"(r^2 {rep.r_squared:.4f}); linear {lin.fitted_exponent:.3f}; "
        f"jump-process {jump.fitted_exponent:.4f} < 0.1",
    )
    assert brown_ok and lin_ok and jump_ok and sharp_ok


def test_criterion_10_determinism_across_workers(tmp_path):
    import os

    env = dict(os.environ)
    env.pop("PATHKERNEL_WORKERS", None)

    def run(args, extra_env=None):
        e = dict(env)
        if extra_env:
            e.update(extra_env)
        return subprocess.run([sys.executable, "-m", "pathkernel.cli", *args],
                              capture_output=True, text=True, env=e)

    fk_args = ["fk", "expectation", "--model", f"circle:{TWO_PI!r}", "--potential", "cos",
               "--t", "1", "--steps", "32", "--samples", "50000", "--seed", "42"]
    files = [tmp_path / name for name in ("a.json", "b.json", "c.json")]
    assert run(fk_args + ["--workers", "1", "--out", str(files[0])]).returncode == 0
    assert run(fk_args + ["--workers", "4", "--out", str(files[1])]).returncode == 0
    assert run(fk_args + ["--workers", "2", "--out", str(files[2])],
               {"PATHKERNEL_WORKERS": "5"}).returncode == 0
    fk_ok = files[0].read_bytes() == files[1].read_bytes() == files[2].read_bytes()

    curve_args = ["curve", "--model", "euclidean:3", "--t-grid", "0.5:1.5:0.5",
                  "--samples", "30000", "--seed", "7"]
    c1, c2 = tmp_path / "c1.csv", tmp_path / "c2.csv"
    assert run(curve_args + ["--workers", "1", "--out", str(c1)]).returncode == 0
    assert run(curve_args + ["--workers", "3", "--out", str(c2)]).returncode == 0
    curve_ok = c1.read_bytes() == c2.read_bytes()

    ok = fk_ok and curve_ok
    record_acceptance(
        10, ok,
        f"byte-identical outputs across worker counts and env override: fk {fk_ok}, curve {curve_ok}",
    )
    assert fk_ok and curve_ok
