"""Schrodinger semigroup estimation along sampled paths.

The estimator averages  g(w(t)) * exp(-(t/n) * sum_j V(w(j t/n)))  over
free paths (semigroup applied to terminal data) or over normalized
bridges scaled by the bridge mass (the semigroup's integral kernel).
The default time-slice rule is the right-endpoint Riemann sum, which
makes the estimator's mean exactly the n-step Trotter product; a
trapezoid option (symmetrized product, one order better in n) is
available behind a flag.

A finite-difference spectral oracle on the circle and the absorbing
interval provides the independent check: second-order central
differences, exact symmetric eigendecomposition, kernel entries scaled
by the mesh weight.

Killed paths contribute zero (the terminal data vanishes at the
cemetery), so estimates over compactified models are sub-Markov
expectations automatically.  Values are expectations at the chosen
start point; a null set of bad start points cannot be distinguished by
pointwise evaluation, which we accept as a scope note.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PathkernelError, PotentialBoundError
from .heat_kernel import TransitionKernel
from .manifold import (
    Circle,
    DirichletInterval,
    Point,
    project_arrays,
    validate_point,
)
from .parallel import run_blocks
from .path_sampler import (
    NEVER_KILLED,
    TimeGrid,
    bridge_total_mass,
    sample_bridges,
    sample_paths,
)
from .quadrature import gaussian_tail_radius
from .rng import RngContract

BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class Potential:
    """A bounded potential with its declared sup bound.

    The evaluator maps coordinate arrays of shape (..., dim) to values
    of shape (...); wrap a Point-wise callable with from_point_fn.
    Evaluations are spot-checked against sup_bound.
    """

    evaluator: object
    sup_bound: float
    name: str = "custom"

    def __post_init__(self):
        if self.sup_bound < 0:
            raise ValueError("sup_bound must be nonnegative")

    def __call__(self, coords):
        return np.asarray(self.evaluator(np.asarray(coords, dtype=np.float64)), dtype=np.float64)

    @staticmethod
    def from_point_fn(fn, sup_bound, name="custom"):
        def ev(coords):
            coords = np.asarray(coords, dtype=np.float64)
            flat = coords.reshape(-1, coords.shape[-1])
            vals = np.array([fn(Point(coords=tuple(row))) for row in flat])
            return vals.reshape(coords.shape[:-1])

        return Potential(evaluator=ev, sup_bound=sup_bound, name=name)


def zero_potential():
    return Potential(lambda c: np.zeros(c.shape[:-1]), 0.0, name="zero")


def const_potential(value):
    v = float(value)
    return Potential(lambda c: np.full(c.shape[:-1], v), abs(v), name=f"const:{v:g}")


def cos_potential():
    return Potential(lambda c: np.cos(c[..., 0]), 1.0, name="cos")


def step_potential(a, b, value):
    a, b, v = float(a), float(b), float(value)

    def ev(c):
        x = c[..., 0]
        return np.where((x >= a) & (x < b), v, 0.0)

    return Potential(ev, abs(v), name=f"step:{a:g},{b:g},{v:g}")


def lifted_potential(cov, potential):
    """The pullback V(pi(x)) of a base potential to the covering space."""

    def ev(coords):
        return potential(project_arrays(cov, coords))

    return Potential(ev, potential.sup_bound, name=f"{potential.name}-lifted")


def constant_one(coords):
    return np.ones(np.asarray(coords).shape[:-1])


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    std_error: float
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be nonnegative")


@dataclass(frozen=True)
class FKProblem:
    kernel: TransitionKernel
    potential: Potential
    terminal: object  # g, mapping coordinate arrays (..., d) -> (...)
    x0: Point
    t: float
    n_steps: int
    n_samples: int
    rng: RngContract

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("t must be positive")
        if self.n_steps < 1 or self.n_samples < 1:
            raise ValueError("n_steps and n_samples must be positive")


def _riemann_exponent(vvals, t, n_steps, rule):
    """(t/n) times the chosen Riemann sum of V over the grid values.

    vvals has one column per grid time including time 0; the right rule
    uses columns 1..n, the trapezoid halves the two ends.
    """
    tau = t / n_steps
    if rule == "right":
        return tau * np.sum(vvals[:, 1:], axis=1)
    if rule == "trapezoid":
        inner = np.sum(vvals[:, 1:-1], axis=1)
        return tau * (0.5 * vvals[:, 0] + inner + 0.5 * vvals[:, -1])
    raise ValueError(f"unknown slice rule {rule!r}")


def _bound_check(potential, vvals, finite_mask):
    vals = vvals[finite_mask]
    if vals.size == 0:
        return
    worst = float(np.max(np.abs(vals)))
    if worst > potential.sup_bound + BOUND_SLACK * (1.0 + potential.sup_bound):
        raise PotentialBoundError(
            f"potential reached |V| = {worst:.6g}, above its declared bound {potential.sup_bound:.6g}"
        )


def _path_weights(kernel, potential, x0, t, n_steps, seed, first, count, rule):
    grid = TimeGrid.uniform(t, n_steps)
    ens = sample_paths(kernel, x0, grid, seed, count, first_index=first)
    pos = ens.positions
    finite = np.isfinite(pos[..., 0])
    safe = np.where(finite[..., None], pos, 0.0)
    vvals = potential(safe)
    _bound_check(potential, vvals, finite)
    vvals = np.where(finite, vvals, 0.0)
    expo = _riemann_exponent(vvals, t, n_steps, rule)
    weights = np.exp(-expo)
    killed = ens.kill_step != NEVER_KILLED
    weights[killed] = 0.0
    end = np.where(killed[:, None], 0.0, pos[:, -1, :])
    return weights, end, killed


def fk_expectation(problem, rule="right", workers=1):
    """Monte Carlo value of the Schrodinger semigroup applied to terminal data.

    Averages g(w(t)) exp(-Riemann sum of V) over free paths; killed
    paths contribute zero.  Returns the estimate with its standard
    error (sample standard deviation over sqrt(N)).
    """
    p = problem
    g = p.terminal if p.terminal is not None else constant_one

    def task(first, count):
        w, end, killed = _path_weights(
            p.kernel, p.potential, p.x0, p.t, p.n_steps, p.rng.master_seed, first, count, rule
        )
        gv = np.asarray(g(end), dtype=np.float64)
        gv[killed] = 0.0
        return w * gv, gv

    parts = run_blocks(task, p.n_samples, first_index=p.rng.sample_index, workers=workers)
    vals = np.concatenate([a for a, _ in parts])
    gv = np.concatenate([b for _, b in parts])
    value = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    gmax = float(np.max(np.abs(gv))) if gv.size else 0.0
    cap = math.exp(p.t * p.potential.sup_bound) * gmax
    if abs(value) > cap * (1.0 + 1e-12) + 1e-300:
        raise PathkernelError(f"estimate {value:.6g} exceeds its a-priori bound {cap:.6g}")
    return EstimateWithError(value, se, p.n_samples, p.rng.master_seed)


def fk_kernel(kernel, potential, x0, y0, t, n_steps, n_samples, rng, rule="right", workers=1):
    """Monte Carlo value of the semigroup's integral kernel at (x0, y0).

    Normalized-bridge average of the potential weight, scaled by the
    bridge mass p_t(y0, x0).
    """
    mass = bridge_total_mass(kernel, x0, y0, t)

    def task(first, count):
        grid = TimeGrid.uniform(t, n_steps)
        ens = sample_bridges(kernel, x0, y0, grid, rng.master_seed, count, first_index=first)
        vvals = potential(ens.positions)
        _bound_check(potential, vvals, np.ones(vvals.shape, dtype=bool))
        expo = _riemann_exponent(vvals, t, n_steps, rule)
        return (np.exp(-expo),)

    parts = run_blocks(task, n_samples, first_index=rng.sample_index, workers=workers)
    w = np.concatenate([a[0] for a in parts])
    value = float(np.mean(w)) * mass
    se = float(np.std(w, ddof=1) / math.sqrt(len(w))) * mass if len(w) > 1 else 0.0
    return EstimateWithError(value, se, n_samples, rng.master_seed)


# ---------------------------------------------------------------------------
# structure checks


@dataclass
class MonotonicityReport:
    passed: bool
    n_samples: int
    n_violations: int
    estimate_low: EstimateWithError
    estimate_high: EstimateWithError


def fk_monotonicity_check(kernel, v_low, v_high, x0, t, n_steps, n_samples, rng, y0=None, terminal=None):
    """Pathwise ordering of two potential weights under common random numbers.

    The same sampled paths are reused for both potentials, so V_low <=
    V_high forces exp(-R_low) >= exp(-R_high) sample by sample, and the
    two estimates are ordered deterministically, not just statistically.
    """
    grid = TimeGrid.uniform(t, n_steps)
    if y0 is None:
        ens = sample_paths(kernel, x0, grid, rng.master_seed, n_samples, first_index=rng.sample_index)
        killed = ens.kill_step != NEVER_KILLED
        mass = 1.0
    else:
        ens = sample_bridges(kernel, x0, y0, grid, rng.master_seed, n_samples, first_index=rng.sample_index)
        killed = np.zeros(n_samples, dtype=bool)
        mass = bridge_total_mass(kernel, x0, y0, t)
    pos = ens.positions
    finite = np.isfinite(pos[..., 0])
    safe = np.where(finite[..., None], pos, 0.0)
    lo_vals = np.where(finite, v_low(safe), 0.0)
    hi_vals = np.where(finite, v_high(safe), 0.0)
    if float(np.max((lo_vals - hi_vals)[finite], initial=0.0)) > 0.0:
        raise ValueError("v_low exceeds v_high at a visited point")
    w_low = np.exp(-_riemann_exponent(lo_vals, t, n_steps, "right"))
    w_high = np.exp(-_riemann_exponent(hi_vals, t, n_steps, "right"))
    w_low[killed] = 0.0
    w_high[killed] = 0.0
    if terminal is not None and y0 is None:
        gv = np.asarray(terminal(np.where(killed[:, None], 0.0, pos[:, -1, :])), dtype=np.float64)
        gv[killed] = 0.0
        if np.any(gv < 0):
            raise ValueError("the pathwise comparison needs nonnegative terminal data")
        w_low = w_low * gv
        w_high = w_high * gv
    violations = int(np.sum(w_low < w_high))
    n = len(w_low)

    def wrap(w):
        return EstimateWithError(
            float(np.mean(w)) * mass,
            float(np.std(w, ddof=1) / math.sqrt(n)) * mass if n > 1 else 0.0,
            n,
            rng.master_seed,
        )

    return MonotonicityReport(violations == 0, n, violations, wrap(w_low), wrap(w_high))


@dataclass
class CoveringSumReport:
    base_estimate: EstimateWithError
    winding_estimates: list
    winding_shifts: list
    line_sum: float
    combined_std_error: float
    tail_bound: float
    residual: float

    @property
    def within_tolerance(self):
        return self.residual <= 3.0 * self.combined_std_error + self.tail_bound


def _winding_tail_bound(t, gap, length, w_max, sup_v, extra=400):
    """Mass of the omitted image terms, amplified by the potential bound."""
    total = 0.0
    for k in range(w_max + 1, w_max + extra + 1):
        for sgn in (1.0, -1.0):
            z = gap + sgn * k * length
            total += float((4.0 * math.pi * t) ** -0.5 * math.exp(-z * z / (4.0 * t)))
        if (k * length - abs(gap)) > gaussian_tail_radius(t, 1e-18):
            break
    return total * math.exp(t * sup_v)


def fk_covering_sum_check(
    cov, v_base, x0, y0, t, windings, n_steps, n_samples, rng, rule="right", workers=1
):
    """Base-space Schrodinger kernel against its covering-space image sum.

    Estimates q_t(x0, y0) on the circle and the sum over deck shifts
    |k| <= windings of the line-space kernel with the lifted potential;
    every term runs on a disjoint substream range.  The report carries
    the residual, the combined Monte Carlo error and the analytic bound
    on the omitted winding tail.
    """
    base = cov.base
    if not isinstance(base, Circle):
        raise ValueError("the covering-sum check runs on circle coverings")
    length = base.circumference
    x0a = validate_point(base, x0, "x0")
    y0a = validate_point(base, y0, "y0")
    kernel_base = TransitionKernel(base)
    kernel_line = TransitionKernel(cov.total)
    v_line = lifted_potential(cov, v_base)

    est_base = fk_kernel(
        kernel_base, v_base, x0, y0, t, n_steps, n_samples, rng, rule=rule, workers=workers
    )
    w_max = int(windings)
    gap = float(y0a[0] - x0a[0])
    winding_estimates = []
    shifts = list(range(-w_max, w_max + 1))
    for pos_in_list, k in enumerate(shifts):
        sub = RngContract(rng.master_seed, rng.sample_index + (pos_in_list + 1) * n_samples)
        yk = Point((float(x0a[0] + gap + k * length),))
        winding_estimates.append(
            fk_kernel(
                kernel_line,
                v_line,
                Point((float(x0a[0]),)),
                yk,
                t,
                n_steps,
                n_samples,
                sub,
                rule=rule,
                workers=workers,
            )
        )
    line_sum = float(sum(e.value for e in winding_estimates))
    combined = math.sqrt(
        est_base.std_error ** 2 + sum(e.std_error ** 2 for e in winding_estimates)
    )
    tail = _winding_tail_bound(t, gap, length, w_max, v_base.sup_bound)
    return CoveringSumReport(
        base_estimate=est_base,
        winding_estimates=winding_estimates,
        winding_shifts=shifts,
        line_sum=line_sum,
        combined_std_error=combined,
        tail_bound=tail,
        residual=abs(est_base.value - line_sum),
    )


# ---------------------------------------------------------------------------
# spectral oracle


@dataclass
class SpectralOracle:
    """Dense semigroup matrix of the discretized operator.

    ``semigroup`` maps function samples on ``grid`` to function samples;
    dividing a row by the mesh weight approximates the kernel row
    q_t(x_i, .).
    """

    model: object
    t: float
    grid: np.ndarray
    mesh: float
    semigroup: np.ndarray

    def kernel_matrix(self):
        return self.semigroup / self.mesh

    def index_of(self, x):
        i = int(np.argmin(np.abs(self.grid - x)))
        if abs(self.grid[i] - x) > 1e-9 * max(1.0, abs(x)):
            raise ValueError(f"{x} is not a grid point of the oracle")
        return i

    def apply(self, g):
        samples = np.asarray(g(self.grid[:, None]), dtype=np.float64)
        return self.semigroup @ samples

    def value_at(self, g, x0):
        return float(self.apply(g)[self.index_of(x0)])

    def kernel_entry(self, x0, y0):
        return float(self.semigroup[self.index_of(x0), self.index_of(y0)] / self.mesh)


def spectral_oracle(model, m_points, potential, t):
    """e^(t(Laplacian - V)) by symmetric eigendecomposition of the
    second-order finite-difference operator (periodic wrap on the
    circle, zero boundary rows on the interval)."""
    m = int(m_points)
    if m < 16:
        raise ValueError("need at least 16 grid points")
    if t <= 0:
        raise ValueError("t must be positive")
    if isinstance(model, Circle):
        length = model.circumference
        h = length / m
        x = np.arange(m) * h
        a = np.zeros((m, m))
        idx = np.arange(m)
        a[idx, idx] = -2.0
        a[idx, (idx + 1) % m] = 1.0
        a[idx, (idx - 1) % m] = 1.0
    elif isinstance(model, DirichletInterval):
        length = model.length
        h = length / (m + 1)
        x = (np.arange(m) + 1) * h
        a = np.zeros((m, m))
        idx = np.arange(m)
        a[idx, idx] = -2.0
        a[idx[:-1], idx[:-1] + 1] = 1.0
        a[idx[1:], idx[1:] - 1] = 1.0
    else:
        raise ValueError("the spectral oracle runs on Circle or DirichletInterval")
    a /= h * h
    a[np.arange(m), np.arange(m)] -= potential(x[:, None])
    try:
        w, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh on symmetric input
        raise PathkernelError(f"oracle eigendecomposition failed: {exc}") from exc
    semigroup = (u * np.exp(t * w)) @ u.T
    return SpectralOracle(model=model, t=t, grid=x, mesh=h, semigroup=semigroup)
