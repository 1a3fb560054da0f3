"""Evaluable maps between normed spaces and the two counterexample fixtures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .domains import Domain, polytope, open_ball, ball_union, segment_set, union
from .errors import DimensionError, DomainError, PreconditionError, RankDeficientError
from .spaces import Defect, Metric, NormedSpace, as_points, linf_space, norm_metric


class MapModel:
    """A map ``source -> target``, vectorised over ``(N, dim)`` batches.

    ``domain`` restricts where the map may be evaluated; ``None`` means the
    whole source space.
    """

    source: NormedSpace
    target: NormedSpace
    domain: Optional[Domain] = None

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = as_points(x, self.source.dim)
        if self.domain is not None:
            inside = self.domain.contains_fn(pts)
            if not inside.all():
                bad = pts[np.argmin(inside)]
                raise DomainError(f"{bad.tolist()} is outside the domain {self.domain.label}")
        out = self._eval(pts)
        return out[0] if single else out

    def _eval(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def defined(self, pts) -> np.ndarray:
        """Mask of points where the map may be evaluated."""
        pts = as_points(pts, self.source.dim)
        if self.domain is None:
            return np.ones(len(pts), dtype=bool)
        return self.domain.contains_fn(pts)

    def to_spec(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} is not serialisable")


def evaluate(M: MapModel, x) -> np.ndarray:
    return M(x)


class Affine(MapModel):
    """``x -> A x + u``."""

    def __init__(self, A, u, source: NormedSpace, target: Optional[NormedSpace] = None,
                 domain: Optional[Domain] = None):
        self.A = np.array(A, dtype=float, ndmin=2)
        self.u = np.asarray(u, dtype=float).reshape(-1)
        self.source = source
        self.target = source if target is None else target
        self.domain = domain
        if self.A.shape != (self.target.dim, self.source.dim) or self.u.shape != (self.target.dim,):
            raise DimensionError(f"affine map shapes {self.A.shape}, {self.u.shape} do not fit "
                                 f"{self.source.dim} -> {self.target.dim}")

    def _eval(self, pts):
        return pts @ self.A.T + self.u

    def inverse(self) -> "Affine":
        return invert(self)

    def to_spec(self):
        spec = {"type": "affine", "A": self.A.tolist(), "u": self.u.tolist()}
        if self.domain is not None and self.domain.spec is not None:
            spec["domain"] = self.domain.spec
        return spec

    def __repr__(self):
        return f"Affine(A={self.A.tolist()}, u={self.u.tolist()})"


def identity(space: NormedSpace) -> Affine:
    return Affine(np.eye(space.dim), np.zeros(space.dim), space)


def shift(space: NormedSpace, v) -> Affine:
    return Affine(np.eye(space.dim), v, space)


class Piecewise(MapModel):
    """Branches selected by pairwise disjoint guard sets."""

    def __init__(self, pieces: Sequence[tuple], probes: int = 1000, seed: int = 0):
        self.pieces = [(g, m) for g, m in pieces]
        if not self.pieces:
            raise ValueError("piecewise map needs at least one piece")
        self.source = self.pieces[0][1].source
        self.target = self.pieces[0][1].target
        self.domain = None
        self._check_disjoint(probes, seed)

    def _check_disjoint(self, probes, seed):
        rng = np.random.default_rng(seed)
        per = max(probes // len(self.pieces), 1)
        for i, (g, _) in enumerate(self.pieces):
            pts = g.sample(rng, per)
            for j, (h, _) in enumerate(self.pieces):
                if i == j:
                    continue
                hit = h.contains_fn(pts)
                if hit.any():
                    raise PreconditionError(
                        f"guards {g.label} and {h.label} overlap", witness=pts[hit.argmax()].tolist())

    def _eval(self, pts):
        masks = np.array([g.contains_fn(pts) for g, _ in self.pieces])
        hits = masks.sum(axis=0)
        if (hits == 0).any():
            bad = pts[np.argmax(hits == 0)]
            raise DomainError(f"{bad.tolist()} lies in no guard of the piecewise map")
        if (hits > 1).any():
            bad = pts[np.argmax(hits > 1)]
            raise DomainError(f"{bad.tolist()} lies in more than one guard")
        out = np.empty((len(pts), self.target.dim))
        for mask, (_, m) in zip(masks, self.pieces):
            if mask.any():
                out[mask] = m._eval(pts[mask])
        return out

    def defined(self, pts) -> np.ndarray:
        pts = as_points(pts, self.source.dim)
        hits = np.zeros(len(pts), dtype=int)
        for g, _ in self.pieces:
            hits += g.contains_fn(pts)
        return hits == 1

    def to_spec(self):
        return {"type": "piecewise",
                "pieces": [{"guard": _domain_spec(g), "map": m.to_spec()} for g, m in self.pieces]}


def _domain_spec(D):
    if D.spec is None:
        raise ValueError(f"domain {D.label} is not serialisable")
    return D.spec


def _sin_graph(p):
    return np.column_stack([p[:, 0], np.sin(p[:, 0])])


def _coordinate_swap(p):
    return p[:, ::-1].copy()


ANALYTIC: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sin_graph": _sin_graph,
    "identity": lambda p: p.copy(),
    "reverse_coordinates": _coordinate_swap,
}


class Analytic(MapModel):
    """A closed-form rule looked up by name in :data:`ANALYTIC`."""

    def __init__(self, name: str, source: NormedSpace, target: Optional[NormedSpace] = None,
                 domain: Optional[Domain] = None):
        if name not in ANALYTIC:
            raise KeyError(f"no analytic map named {name!r}; known: {sorted(ANALYTIC)}")
        self.name = name
        self.source = source
        self.target = source if target is None else target
        self.domain = domain

    def _eval(self, pts):
        return ANALYTIC[self.name](pts)

    def to_spec(self):
        return {"type": "analytic", "name": self.name}


class Composite(MapModel):
    """``maps`` applied left to right: ``Composite([f, g])(x) == g(f(x))``."""

    def __init__(self, maps: Sequence[MapModel]):
        self.maps = list(maps)
        if not self.maps:
            raise ValueError("empty composite")
        for f, g in zip(self.maps, self.maps[1:]):
            if f.target.dim != g.source.dim:
                raise DimensionError(f"cannot chain {f.target.dim}-d output into {g.source.dim}-d input")
        self.source = self.maps[0].source
        self.target = self.maps[-1].target
        self.domain = None

    def _eval(self, pts):
        for m in self.maps:
            pts = m(pts)
        return pts

    def defined(self, pts) -> np.ndarray:
        pts = as_points(pts, self.source.dim)
        ok = np.ones(len(pts), dtype=bool)
        cur = pts
        for m in self.maps:
            here = m.defined(cur)
            idx = np.flatnonzero(ok)
            ok[idx[~here]] = False
            cur = m(cur[here])
        return ok

    def to_spec(self):
        return {"type": "composite", "maps": [m.to_spec() for m in self.maps]}


def compose(*maps: MapModel) -> MapModel:
    """Mathematical composition ``maps[0] o maps[1] o ... o maps[-1]``."""
    return Composite(list(reversed(maps)))


def invert(M: MapModel) -> Affine:
    if not isinstance(M, Affine):
        raise TypeError("only affine maps can be inverted")
    if M.A.shape[0] != M.A.shape[1] or np.linalg.cond(M.A) > 1e12:
        raise np.linalg.LinAlgError("affine map is not invertible")
    Ainv = np.linalg.inv(M.A)
    return Affine(Ainv, -Ainv @ M.u, M.target, M.source)


def map_from_spec(source: NormedSpace, spec: dict, target: Optional[NormedSpace] = None) -> MapModel:
    from .domains import domain_from_spec

    target = source if target is None else target
    kind = spec["type"]
    if kind == "affine":
        dom = domain_from_spec(source, spec["domain"]) if "domain" in spec else None
        return Affine(spec["A"], spec["u"], source, target, domain=dom)
    if kind == "analytic":
        return Analytic(spec["name"], source, target)
    if kind == "piecewise":
        return Piecewise([(domain_from_spec(source, p["guard"]), map_from_spec(source, p["map"], target))
                          for p in spec["pieces"]])
    if kind == "composite":
        return Composite([map_from_spec(source, m, target) for m in spec["maps"]])
    raise ValueError(f"unknown map type {kind!r}")


# -- measurements --------------------------------------------------------------

def isometry_defect(M: MapModel, D: Optional[Domain] = None, metric: Optional[Metric] = None,
                    n_pairs: int = 1000, seed: int = 0, points=None) -> Defect:
    """``max |d(M a, M b) - ||a - b|||`` over sampled pairs.

    With ``points`` every ordered pair of the given points is used instead of
    random pairs from ``D``.
    """
    metric = norm_metric(M.target) if metric is None else metric
    a, b, gap = isometry_gaps(M, D, metric, n_pairs, seed, points)
    if not len(gap):
        return Defect(0.0, None, 0)
    k = int(np.argmax(gap))
    return Defect(float(gap[k]), {"a": a[k].tolist(), "b": b[k].tolist()}, len(gap))


def isometry_gaps(M: MapModel, D: Optional[Domain] = None, metric: Optional[Metric] = None,
                  n_pairs: int = 1000, seed: int = 0, points=None):
    """The sampled pairs ``a``, ``b`` and the per-pair gaps behind :func:`isometry_defect`."""
    metric = norm_metric(M.target) if metric is None else metric
    if points is not None:
        P = as_points(points, M.source.dim)
        img = M(P)
        i, j = np.triu_indices(len(P), k=1)
        a, b, fa, fb = P[i], P[j], img[i], img[j]
    else:
        if D is None:
            raise ValueError("need a domain or explicit points")
        rng = np.random.default_rng(seed)
        pts = D.sample(rng, 2 * n_pairs)
        a, b = pts[:n_pairs], pts[n_pairs:]
        fa, fb = M(a), M(b)
    gap = np.abs(metric(fa, fb) - M.source.norm(a - b))
    return a, b, gap


@dataclass(frozen=True)
class AffineFit:
    A: np.ndarray
    u: np.ndarray
    residual: float
    worst: Optional[list] = None

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.A.T + self.u


def affine_fit(xs, ys, target: Optional[NormedSpace] = None) -> AffineFit:
    """Least-squares affine model ``y ~ A x + u``.

    The objective is Euclidean; the reported residual is the largest pointwise
    miss measured in ``target``'s norm (Euclidean when omitted).
    """
    X = np.asarray(xs, dtype=float)
    Y = np.asarray(ys, dtype=float)
    if X.ndim != 2 or Y.ndim != 2 or len(X) != len(Y):
        raise DimensionError("samples must be paired (N, n) and (N, m) arrays")
    n = X.shape[1]
    if len(X) < n + 1:
        raise RankDeficientError(f"need at least {n + 1} samples, got {len(X)}")
    centred = X - X.mean(axis=0)
    _, sv, Vt = np.linalg.svd(centred, full_matrices=True)
    tol = max(X.shape) * np.finfo(float).eps * (sv[0] if len(sv) else 0.0)
    rank = int((sv > tol).sum())
    if rank < n:
        missing = Vt[rank:]
        raise RankDeficientError(
            f"sample sources span an affine subspace of dimension {rank} < {n}; "
            f"missing directions {np.round(missing, 12).tolist()}", directions=missing)
    design = np.hstack([X, np.ones((len(X), 1))])
    coef, *_ = np.linalg.lstsq(design, Y, rcond=None)
    A = coef[:n].T
    u = coef[n]
    miss = X @ A.T + u - Y
    norms = target.norm(miss) if target is not None else np.sqrt((miss * miss).sum(axis=1))
    k = int(np.argmax(norms))
    return AffineFit(A, u, float(norms[k]), X[k].tolist())


def image_domain(M: MapModel, D: Domain) -> Domain:
    """``M(D)`` for an invertible affine map, or a piecewise map with such branches.

    Inradii transfer through the inverse, which is exact when the branches
    are isometries.
    """
    from .domains import custom, union

    if isinstance(M, Affine):
        inv = invert(M)
        inr = None if D.inradius_fn is None else (lambda y: D.inradius_fn(inv._eval(y)))
        samp = None if D.sampler is None else (lambda rng, n: M._eval(D.sample(rng, n)))
        from .spaces import unit_directions
        dirs = unit_directions(M.source, 64 * M.source.dim, np.random.default_rng(0))
        lip = float(M.target.norm(dirs @ M.A.T).max())
        radius = float(M.target.norm(M.u)) + 1.01 * lip * D.bounding_radius
        return custom(M.target, lambda y: D.contains_fn(inv._eval(y)), radius, is_open=D.is_open,
                      convex=D.convex, inradius_fn=inr, sampler=samp, label=f"image({D.label})")
    if isinstance(M, Piecewise):
        return union([image_domain(m, g) for g, m in M.pieces], is_open=D.is_open,
                     label=f"image({D.label})")
    raise TypeError(f"no image domain for {type(M).__name__}")


# -- generators ----------------------------------------------------------------

def random_signed_permutation(dim: int, rng: np.random.Generator) -> np.ndarray:
    P = np.zeros((dim, dim))
    P[np.arange(dim), rng.permutation(dim)] = rng.choice([-1.0, 1.0], size=dim)
    return P


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.normal(size=(dim, dim)))
    return Q * np.sign(np.diag(R))


def rotation2(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


# -- counterexample fixtures ---------------------------------------------------

def build_example_two_balls():
    """Two far-apart max-norm unit balls; identity on one, first-coordinate flip on the other.

    Functions on a two-point space are stored as their value pair
    ``(f(x), f(y))``, realified, so the sup norm is the max norm on R^2.
    Returns ``(U, T)``.
    """
    S = linf_space(2)
    near = open_ball(S, [0.0, 0.0], 1.0, label="B1(0)")
    far = open_ball(S, [0.0, 10.0], 1.0, label="B1(f0)")
    U = ball_union([near, far], label="U")
    T = Piecewise([
        (near, identity(S)),
        (far, Affine(np.diag([-1.0, 1.0]), np.zeros(2), S)),
    ])
    return U, T


def build_example_star_closed():
    """The closed star-shaped set ``X1 u X2`` in the max-norm plane and the map
    that bends the tail ``X2`` onto the graph of ``sin``.

    ``X1`` is the triangle ``-1 <= x <= 0, |y| <= -x``; ``X2`` is ``[0, 1] x {0}``.
    Returns ``(X, T)``; ``X`` is star-shaped about the origin.
    """
    S = linf_space(2)
    X1 = polytope(S, [[1.0, 0.0], [-1.0, 0.0], [1.0, 1.0], [1.0, -1.0]],
                  [0.0, 1.0, 0.0, 0.0], closed=True, label="X1")
    X2 = segment_set(S, [0.0, 0.0], [1.0, 0.0], label="X2")
    X = union([X1, X2], "closed_set", is_open=False, label="X")
    X.meta["center"] = np.zeros(2)
    # X2 without the origin keeps the guards disjoint; both rules agree there.
    tail = segment_set(S, [0.0, 0.0], [1.0, 0.0], include_a=False, label="X2*")
    T = Piecewise([
        (X1, identity(S)),
        (tail, Analytic("sin_graph", S)),
    ])
    return X, T
