"""Model spaces: points, distances, exponential map, covering projections.

Supported spaces are flat Euclidean space, hyperbolic 3-space in the
hyperboloid model, rectangular flat tori and circles (half-open
fundamental box), the open interval with absorbing endpoints, and a
one-point compactification wrapper that adds a cemetery state for the
mass lost by an absorbing space.

Everything here is pure and operates on immutable values, so models and
points can be shared freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HYPERBOLOID_TOL = 1e-12


@dataclass(frozen=True)
class Euclidean:
    dim: int

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("Euclidean dimension must be >= 1")


@dataclass(frozen=True)
class Hyperbolic3:
    pass


@dataclass(frozen=True)
class FlatTorus:
    periods: tuple

    def __post_init__(self):
        object.__setattr__(self, "periods", tuple(float(p) for p in self.periods))
        if len(self.periods) < 1 or any(p <= 0 for p in self.periods):
            raise ValueError("torus periods must be a nonempty tuple of positive reals")

    @property
    def dim(self):
        return len(self.periods)


@dataclass(frozen=True)
class Circle:
    circumference: float

    def __post_init__(self):
        if float(self.circumference) <= 0:
            raise ValueError("circumference must be positive")


@dataclass(frozen=True)
class DirichletInterval:
    length: float

    def __post_init__(self):
        if float(self.length) <= 0:
            raise ValueError("interval length must be positive")


@dataclass(frozen=True)
class Compactified:
    """One-point compactification of a mass-losing base space."""

    base: "ManifoldModel"

    def __post_init__(self):
        if not isinstance(self.base, DirichletInterval):
            raise ValueError("Compactified wraps a substochastic base (DirichletInterval)")


ManifoldModel = (Euclidean, Hyperbolic3, FlatTorus, Circle, DirichletInterval, Compactified)


@dataclass(frozen=True)
class Point:
    """Chart coordinates plus a cemetery flag.

    The cemetery point carries no coordinates; it only exists on
    Compactified models.
    """

    coords: tuple = field(default=())
    cemetery: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        if self.cemetery and self.coords:
            raise ValueError("cemetery point carries no coordinates")

    def array(self):
        return np.asarray(self.coords, dtype=np.float64)


CEMETERY = Point(coords=(), cemetery=True)


def point(*coords):
    return Point(coords=tuple(coords))


def model_dim(model):
    """Chart dimension (coordinates per point)."""
    if isinstance(model, Euclidean):
        return model.dim
    if isinstance(model, Hyperbolic3):
        return 4
    if isinstance(model, FlatTorus):
        return model.dim
    if isinstance(model, Circle):
        return 1
    if isinstance(model, DirichletInterval):
        return 1
    if isinstance(model, Compactified):
        return model_dim(model.base)
    raise TypeError(f"not a manifold model: {model!r}")


def periods_of(model):
    if isinstance(model, Circle):
        return (float(model.circumference),)
    if isinstance(model, FlatTorus):
        return model.periods
    raise TypeError("periods are defined for Circle and FlatTorus only")


def validate_point(model, p, name="point"):
    """Check a point against its model's invariants; returns its coords array."""
    if not isinstance(p, Point):
        raise TypeError(f"{name} must be a Point")
    if p.cemetery:
        if not isinstance(model, Compactified):
            raise ValueError(f"{name} is the cemetery but the model is not compactified")
        return None
    if isinstance(model, Compactified):
        return validate_point(model.base, p, name)
    x = p.array()
    d = model_dim(model)
    if x.shape != (d,):
        raise ValueError(f"{name} has {x.shape[0] if x.ndim == 1 else '?'} coordinates, expected {d}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} has non-finite coordinates")
    if isinstance(model, Hyperbolic3):
        q = x[0] * x[0] - x[1] * x[1] - x[2] * x[2] - x[3] * x[3]
        # constraint checked in scaled form; the absolute residual of the
        # quadratic grows like eps * x0^2 for far points
        scale = 1.0 + float(np.dot(x, x))
        if abs(q - 1.0) > HYPERBOLOID_TOL * scale or x[0] < 1.0 - HYPERBOLOID_TOL:
            raise ValueError(f"{name} is off the hyperboloid (residual {q - 1.0:.3e})")
    elif isinstance(model, (Circle, FlatTorus)):
        per = np.asarray(periods_of(model))
        if np.any(x < 0.0) or np.any(x >= per):
            raise ValueError(f"{name} must lie in the fundamental box [0, L_i)")
    elif isinstance(model, DirichletInterval):
        if not (0.0 < x[0] < model.length):
            raise ValueError(f"{name} must lie in the open interval (0, {model.length})")
    return x


# ---------------------------------------------------------------------------
# distances


def _wrap_abs(diff, per):
    """Componentwise distance to the nearest lattice translate."""
    r = np.abs(np.mod(diff, per))
    return np.minimum(r, per - r)


def hyperbolic_distance_arrays(x, y):
    """Geodesic distance on the hyperboloid, stable near coincidence.

    Uses cosh(rho) - 1 computed from coordinate differences, which avoids
    the catastrophic cancellation of the direct Minkowski pairing when
    the points are close.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    d = x - y
    delta = 0.5 * (np.sum(d[..., 1:] ** 2, axis=-1) - d[..., 0] ** 2)
    delta = np.maximum(delta, 0.0)
    return np.log1p(delta + np.sqrt(delta * (2.0 + delta)))


def distance_arrays(model, x, y):
    """Distance on coordinate arrays of shape (..., dim); broadcasts."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if isinstance(model, Compactified):
        return distance_arrays(model.base, x, y)
    if isinstance(model, Euclidean):
        return np.sqrt(np.sum((x - y) ** 2, axis=-1))
    if isinstance(model, (Circle, FlatTorus)):
        per = np.asarray(periods_of(model))
        return np.sqrt(np.sum(_wrap_abs(x - y, per) ** 2, axis=-1))
    if isinstance(model, DirichletInterval):
        return np.abs(x[..., 0] - y[..., 0])
    if isinstance(model, Hyperbolic3):
        return hyperbolic_distance_arrays(x, y)
    raise TypeError(f"not a manifold model: {model!r}")


def distance(model, x, y):
    """Geodesic distance between two points of the model."""
    xa = validate_point(model, x, "x")
    ya = validate_point(model, y, "y")
    if xa is None or ya is None:
        raise ValueError("distance is undefined for the cemetery state")
    return float(distance_arrays(model, xa, ya))


# ---------------------------------------------------------------------------
# hyperboloid exponential map


def _h3_tangent(base, direction):
    """Tangent 4-vector at base matching a unit 3-vector in the origin frame.

    The chart is the orthonormal frame at (1,0,0,0) parallel-transported
    along the geodesic to base.
    """
    p0 = base[..., 0]
    pv = base[..., 1:]
    pd = np.sum(pv * direction, axis=-1)
    u0 = pd
    uv = direction + (pd / (1.0 + p0))[..., None] * pv
    return np.concatenate([u0[..., None], uv], axis=-1)


def exp_point_arrays(base, direction, r):
    base = np.asarray(base, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    u = _h3_tangent(base, direction)
    out = np.cosh(r)[..., None] * base + np.sinh(r)[..., None] * u
    # re-project onto the hyperboloid to stop constraint drift
    out[..., 0] = np.sqrt(1.0 + np.sum(out[..., 1:] ** 2, axis=-1))
    return out


def exp_point(model, base, direction, r):
    """Geodesic from base with given unit direction and length r (H^3 only)."""
    if not isinstance(model, Hyperbolic3):
        raise ValueError("exp_point is implemented for Hyperbolic3")
    b = validate_point(model, base, "base")
    d = np.asarray(direction, dtype=np.float64)
    if d.shape != (3,):
        raise ValueError("direction must be a 3-vector")
    if abs(float(np.dot(d, d)) - 1.0) > 1e-12:
        raise ValueError("direction must have unit norm")
    if r < 0:
        raise ValueError("r must be nonnegative")
    return Point(coords=tuple(exp_point_arrays(b, d, float(r))))


# ---------------------------------------------------------------------------
# coverings


@dataclass(frozen=True)
class CoveringDescriptor:
    """Euclidean space covering a circle or rectangular torus.

    The deck group is the lattice of integer combinations of the
    periods, acting by translation.
    """

    base: "ManifoldModel"
    total: Euclidean

    def __post_init__(self):
        if not isinstance(self.base, (Circle, FlatTorus)):
            raise ValueError("covering base must be a Circle or FlatTorus")
        if not isinstance(self.total, Euclidean) or self.total.dim != model_dim(self.base):
            raise ValueError("total space must be Euclidean of equal dimension")

    @property
    def periods(self):
        return periods_of(self.base)


def covering_of(base):
    """The standard covering of a circle or torus by Euclidean space."""
    return CoveringDescriptor(base=base, total=Euclidean(model_dim(base)))


def project_arrays(cov, x):
    """Reduce total-space coordinates into the fundamental box [0, L_i)."""
    x = np.asarray(x, dtype=np.float64)
    per = np.asarray(cov.periods)
    out = x - np.floor(x / per) * per
    # floor rounding can land exactly on the period for tiny negatives
    return np.where(out >= per, out - per, out)


def project_point(cov, x_tilde):
    x = validate_point(cov.total, x_tilde, "x_tilde")
    return Point(coords=tuple(project_arrays(cov, x)))


def lift_arrays(cov, x, anchor):
    """Nearest preimage of base coords x to anchor; ties to the smaller coefficient."""
    x = np.asarray(x, dtype=np.float64)
    anchor = np.asarray(anchor, dtype=np.float64)
    per = np.asarray(cov.periods)
    k = np.round((anchor - x) / per)
    best = x + k * per
    for cand_k in (k - 1.0, k + 1.0):
        cand = x + cand_k * per
        closer = np.abs(cand - anchor) < np.abs(best - anchor)
        tie = (np.abs(cand - anchor) == np.abs(best - anchor)) & (cand_k < k)
        take = closer | tie
        best = np.where(take, cand, best)
        k = np.where(take, cand_k, k)
    return best, k.astype(np.int64)


def lift_point_near(cov, x, anchor):
    """The preimage of x on the total space nearest to anchor."""
    xa = validate_point(cov.base, x, "x")
    aa = validate_point(cov.total, anchor, "anchor")
    lifted, _ = lift_arrays(cov, xa, aa)
    return Point(coords=tuple(lifted))
