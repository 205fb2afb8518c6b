"""Adaptive Simpson quadrature over tail-truncated domains.

The integrands in this package are smooth with Gaussian-type envelopes,
so interval-bisecting Simpson with Richardson correction converges
quickly.  The implementation keeps a flat worklist of intervals and
evaluates the integrand on arrays, which matters because kernel
evaluations are themselves vectorized lattice sums.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DivergentIntegralError, QuadratureError


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=48, min_depth=2):
    """Integrate f over [a, b] to absolute tolerance tol.

    f must accept and return numpy arrays.  Raises QuadratureError if
    the worklist still holds unconverged intervals at max_depth.
    """
    a = float(a)
    b = float(b)
    if not b > a:
        raise ValueError("need b > a")
    xs = np.array([a, 0.5 * (a + b), b])
    fs = np.asarray(f(xs), dtype=np.float64)
    lo = np.array([a])
    hi = np.array([b])
    fa, fm, fb = fs[0:1], fs[1:2], fs[2:3]
    coarse = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)
    tols = np.array([float(tol)])
    total = 0.0
    for depth in range(max_depth):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = np.asarray(f(lm), dtype=np.float64)
        frm = np.asarray(f(rm), dtype=np.float64)
        left = (mid - lo) / 6.0 * (fa + 4.0 * flm + fm)
        right = (hi - mid) / 6.0 * (fm + 4.0 * frm + fb)
        fine = left + right
        err = fine - coarse
        done = (np.abs(err) <= 15.0 * tols) & (depth >= min_depth)
        total += float(np.sum(fine[done] + err[done] / 15.0))
        keep = ~done
        if not np.any(keep):
            return total
        # split the surviving intervals
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        fa = np.concatenate([fa[keep], fm[keep]])
        fb = np.concatenate([fm[keep], fb[keep]])
        fm = np.concatenate([flm[keep], frm[keep]])
        coarse = np.concatenate([left[keep], right[keep]])
        tols = np.concatenate([0.5 * tols[keep], 0.5 * tols[keep]])
    raise QuadratureError(
        f"adaptive Simpson did not converge at depth {max_depth} "
        f"({lo.shape[0]} intervals open, worst error {float(np.max(np.abs(err))):.3e})"
    )


def gaussian_tail_radius(t, tail_tolerance):
    """Radius beyond which exp(-r^2/4t) falls below tail_tolerance."""
    return math.sqrt(max(4.0 * t * math.log(1.0 / tail_tolerance), 0.0))


def integrate_with_expansion(f, r0, tol=1e-10, max_doublings=24):
    """Integrate f over (0, inf) by doubling the domain until stable.

    Intended for integrands without a usable analytic tail bound; the
    per-window tolerance scales with the accumulated magnitude, and
    DivergentIntegralError is raised when successive doublings keep
    growing the value instead of settling.
    """
    r = float(r0)
    value = adaptive_simpson(f, 0.0, r, tol=tol)
    for _ in range(max_doublings):
        window_tol = max(tol, 1e-12 * abs(value))
        extra = adaptive_simpson(f, r, 2.0 * r, tol=window_tol)
        if abs(extra) <= max(tol, 1e-10 * abs(value)):
            return value + extra
        value += extra
        r *= 2.0
    raise DivergentIntegralError(
        f"integral still growing after {max_doublings} domain doublings "
        f"(value {value:.6e} at radius {r:.3e})"
    )


def maximize_scalar(f, lo, hi, grid=512, iters=200):
    """Maximum of a smooth unimodal-ish function on [lo, hi].

    Coarse grid scan, then golden-section refinement around the best
    bracket.  Returns (argmax, max).
    """
    xs = np.linspace(lo, hi, grid)
    vals = np.asarray(f(xs), dtype=np.float64)
    i = int(np.argmax(vals))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, grid - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = float(f(np.array([c]))[0])
    fd = float(f(np.array([d]))[0])
    for _ in range(iters):
        if b - a < 1e-14 * max(1.0, abs(a) + abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = float(f(np.array([c]))[0])
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = float(f(np.array([d]))[0])
    x = 0.5 * (a + b)
    return x, float(f(np.array([x]))[0])
