"""Finite-dimensional real normed spaces and elementary vector operations.

Vectors are plain ``numpy`` float arrays. Norm evaluators are vectorised over
the trailing axis, so ``space.norm(points)`` works on an ``(N, dim)`` batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, DomainError, NonFiniteError

NormFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Tolerances:
    """Absolute/relative slack used when comparing defects against zero."""

    abs: float = 1e-9
    rel: float = 1e-9

    def __post_init__(self):
        if not (self.abs > 0 and self.rel > 0):
            raise ValueError("tolerances must be positive")

    def allows(self, defect: float, scale: float = 0.0) -> bool:
        return defect <= self.abs + self.rel * abs(scale)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True, eq=False)
class NormedSpace:
    """``R^dim`` equipped with a norm.

    ``dual`` evaluates the dual norm when it has a closed form; it is used for
    exact distances to half-spaces. ``coord_bound[i]`` bounds ``|x_i|`` over
    the closed unit ball and is used to build sampling boxes.
    """

    dim: int
    norm: NormFn
    label: str
    dual: Optional[NormFn] = None
    coord_bound: np.ndarray = field(default=None)
    spec: dict = field(default_factory=dict)

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("dimension must be positive")
        if self.coord_bound is None:
            object.__setattr__(self, "coord_bound", np.ones(self.dim))

    def __repr__(self):
        return f"NormedSpace({self.label}, dim={self.dim})"

    def vector(self, x) -> np.ndarray:
        return as_vector(x, self.dim)

    def unit(self, x: np.ndarray) -> np.ndarray:
        """Rescale nonzero rows of ``x`` to norm one."""
        x = np.asarray(x, dtype=float)
        n = self.norm(x)
        return x / np.expand_dims(n, -1)


def as_vector(x, dim: Optional[int] = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-d float array, optionally checking length."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"vector has length {v.shape[0]}, space has dimension {dim}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteError(f"vector has non-finite entries: {v}")
    return v


def as_points(x, dim: int) -> np.ndarray:
    """Coerce a single vector or a batch to a finite ``(N, dim)`` array."""
    p = np.asarray(x, dtype=float)
    if p.ndim == 1:
        p = p[None, :]
    if p.ndim != 2 or p.shape[1] != dim:
        raise DimensionError(f"expected points of dimension {dim}, got shape {np.shape(x)}")
    if not np.all(np.isfinite(p)):
        raise NonFiniteError("points have non-finite entries")
    return p


# -- shipped norms -----------------------------------------------------------

def _l1(x):
    return np.abs(x).sum(axis=-1)


def _scaled_lp(x, p):
    # Divide by the largest entry first so tiny or huge vectors neither underflow nor overflow.
    a = np.abs(x)
    m = a.max(axis=-1, keepdims=True)
    m_safe = np.where(m > 0, m, 1.0)
    return m[..., 0] * ((a / m_safe) ** p).sum(axis=-1) ** (1.0 / p)


def _l2(x):
    return _scaled_lp(x, 2)


def _linf(x):
    return np.abs(x).max(axis=-1)


def l1_space(dim: int) -> NormedSpace:
    return NormedSpace(dim, _l1, "l1", dual=_linf, spec={"norm": "l1", "dim": dim})


def l2_space(dim: int) -> NormedSpace:
    return NormedSpace(dim, _l2, "l2", dual=_l2, spec={"norm": "l2", "dim": dim})


def linf_space(dim: int) -> NormedSpace:
    return NormedSpace(dim, _linf, "linf", dual=_l1, spec={"norm": "linf", "dim": dim})


def lp_space(dim: int, p: float) -> NormedSpace:
    p = float(p)
    if p < 1:
        raise ValueError("l^p is a norm only for p >= 1")
    if p == 1:
        return l1_space(dim)
    if p == 2:
        return l2_space(dim)
    if np.isinf(p):
        return linf_space(dim)
    q = p / (p - 1.0)

    def norm(x, p=p):
        return _scaled_lp(x, p)

    def dual(x, q=q):
        return _scaled_lp(x, q)

    return NormedSpace(dim, norm, f"l{p:g}", dual=dual, spec={"norm": "lp", "dim": dim, "p": p})


def weighted_linf_space(weights) -> NormedSpace:
    """``max_i w_i |x_i|`` with strictly positive weights."""
    w = as_vector(weights)
    if np.any(w <= 0):
        raise ValueError("weights must be positive")

    def norm(x, w=w):
        return np.abs(x * w).max(axis=-1)

    def dual(x, w=w):
        return np.abs(x / w).sum(axis=-1)

    return NormedSpace(len(w), norm, "weighted-linf", dual=dual, coord_bound=1.0 / w,
                       spec={"norm": "weighted_linf", "dim": len(w), "weights": w.tolist()})


def polyhedral_space(functionals) -> NormedSpace:
    """``max_i |<a_i, x>|`` for the rows ``a_i`` of ``functionals``.

    The rows must span the space, otherwise the gauge vanishes on a
    nonzero vector and is not a norm.
    """
    F = np.asarray(functionals, dtype=float)
    if F.ndim != 2 or not np.all(np.isfinite(F)):
        raise ValueError("functionals must be a finite 2-d array")
    dim = F.shape[1]
    if np.linalg.matrix_rank(F) < dim:
        raise ValueError("functionals do not span the space; gauge is not a norm")

    def norm(x, F=F):
        return np.abs(x @ F.T).max(axis=-1)

    # x = F^+ (F x) gives |x_i| <= ||row_i(F^+)||_1 on the unit ball.
    bound = np.abs(np.linalg.pinv(F)).sum(axis=1)
    return NormedSpace(dim, norm, "polyhedral", coord_bound=bound,
                       spec={"norm": "polyhedral", "dim": dim, "functionals": F.tolist()})


def space_from_spec(spec: dict) -> NormedSpace:
    kind = spec["norm"]
    if kind == "l1":
        return l1_space(int(spec["dim"]))
    if kind == "l2":
        return l2_space(int(spec["dim"]))
    if kind == "linf":
        return linf_space(int(spec["dim"]))
    if kind == "lp":
        return lp_space(int(spec["dim"]), spec["p"])
    if kind == "weighted_linf":
        return weighted_linf_space(spec["weights"])
    if kind == "polyhedral":
        return polyhedral_space(spec["functionals"])
    raise ValueError(f"unknown norm kind {kind!r}")


def shipped_spaces(dim: int, rng: Optional[np.random.Generator] = None) -> list[NormedSpace]:
    """One instance of every shipped norm family in dimension ``dim``."""
    rng = np.random.default_rng(0) if rng is None else rng
    weights = rng.uniform(0.5, 2.0, size=dim)
    F = np.vstack([np.eye(dim), rng.normal(size=(dim + 2, dim))])
    return [
        l1_space(dim),
        l2_space(dim),
        linf_space(dim),
        lp_space(dim, 3.5),
        weighted_linf_space(weights),
        polyhedral_space(F),
    ]


@dataclass(frozen=True)
class Defect:
    """A measured violation of an identity plus the sample that realised it."""

    value: float
    witness: Optional[dict] = None
    count: int = 0

    def __float__(self):
        return float(self.value)


# -- metrics -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Metric:
    """A metric on a target vector space.

    ``translation_invariant`` records ``d(a+u, b+u) = d(a, b)``; norm-induced
    metrics always carry it.
    """

    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    translation_invariant: bool = True
    label: str = "metric"

    def __call__(self, a, b):
        return self.eval(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def norm_metric(space: NormedSpace) -> Metric:
    return Metric(lambda a, b: space.norm(a - b), True, f"d_{space.label}")


# -- elementary operations ---------------------------------------------------

def norm_eval(space: NormedSpace, x) -> float:
    return float(space.norm(as_vector(x, space.dim)))


def distance(space: NormedSpace, x, y) -> float:
    return norm_eval(space, as_vector(x, space.dim) - as_vector(y, space.dim))


def reflect(c, z) -> np.ndarray:
    """Point reflection through ``c``: ``z -> 2c - z``."""
    c = np.asarray(c, dtype=float)
    z = np.asarray(z, dtype=float)
    if c.shape[-1] != z.shape[-1]:
        raise DimensionError("reflection centre and point differ in dimension")
    return 2.0 * c - z


@dataclass(frozen=True, eq=False)
class Segment:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_vector(self.a)
        b = as_vector(self.b, len(a))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def point(self, t: float) -> np.ndarray:
        return segment_point(self.a, self.b, t)

    def points(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)[:, None]
        return ts * self.a + (1.0 - ts) * self.b


def segment_point(a, b, t: float) -> np.ndarray:
    """``t a + (1 - t) b`` for ``0 <= t <= 1``."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"segment parameter {t} outside [0, 1]")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionError("segment endpoints differ in dimension")
    return t * a + (1.0 - t) * b


def unit_directions(space: NormedSpace, n: int, rng: np.random.Generator) -> np.ndarray:
    """Probe directions of unit norm.

    Always includes the signed coordinate axes and, when they fit, the sign
    corners ``(+-1, ..., +-1)`` (the extreme points of the max-norm ball); the
    rest is seeded Gaussian noise.
    """
    d = space.dim
    fixed = [np.eye(d), -np.eye(d)]
    if 2 ** d <= n // 2:
        corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * d, indexing="ij")).reshape(d, -1).T
        fixed.append(corners)
    base = np.vstack(fixed)
    extra = max(n - len(base), 0)
    g = rng.normal(size=(extra, d))
    dirs = np.vstack([base, g]) if extra else base
    return space.unit(dirs)
