"""Subsets of a normed space given by membership oracles.

A :class:`Domain` is a vectorised membership test plus enough metadata to
sample it and to probe how far its points sit from the complement. Whether a
domain is open or closed is declared by its constructor; no oracle can decide
that.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, PreconditionError, SamplingError
from .spaces import Defect, NormedSpace, as_points, as_vector, unit_directions

KINDS = (
    "open_ball",
    "closed_ball",
    "ball_union",
    "star_shaped",
    "convex_polytope",
    "cone_without_apex",
    "closed_set",
    "custom",
)

ContainsFn = Callable[[np.ndarray], np.ndarray]
Sampler = Callable[[np.random.Generator, int], np.ndarray]

N_DIR_PER_DIM = 64
CONE_S_SAMPLES = 256
CONE_S_MAX_FACTOR = 4.0


@dataclass(frozen=True, eq=False)
class Domain:
    """A bounded subset of ``space``.

    ``contains_fn`` and ``inradius_fn`` take ``(N, dim)`` arrays. The
    ``inradius_fn``, when present, returns a lower bound on the distance to
    the complement (exact for balls and polytopes). ``spec`` is the JSON
    description used for serialisation; ``None`` marks a domain that cannot be
    written out.
    """

    space: NormedSpace
    contains_fn: ContainsFn
    kind: str
    bounding_radius: float
    is_open: bool
    convex: bool = False
    inradius_fn: Optional[ContainsFn] = None
    sampler: Optional[Sampler] = None
    box: Optional[tuple] = None
    spec: Optional[dict] = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not self.bounding_radius > 0:
            raise ValueError("bounding radius must be positive")

    @property
    def dim(self) -> int:
        return self.space.dim

    def __contains__(self, x) -> bool:
        return contains(self, x)

    def mask(self, points) -> np.ndarray:
        pts = as_points(points, self.dim)
        return np.asarray(self.contains_fn(pts), dtype=bool)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if n <= 0:
            return np.empty((0, self.dim))
        if self.sampler is not None:
            return self.sampler(rng, n)
        return _rejection_sample(self, rng, n)

    def with_flags(self, **changes) -> "Domain":
        return dataclasses.replace(self, **changes)


def _rejection_sample(D: Domain, rng, n, max_rounds=200):
    if D.box is None:
        R = D.bounding_radius * D.space.coord_bound
        lo, hi = -R, R
    else:
        lo, hi = D.box
    got = []
    have = 0
    batch = max(4 * n, 256)
    for _ in range(max_rounds):
        pts = rng.uniform(lo, hi, size=(batch, D.dim))
        keep = pts[D.contains_fn(pts)]
        got.append(keep)
        have += len(keep)
        if have >= n:
            return np.vstack(got)[:n]
    raise SamplingError(
        f"rejection sampling of {D.label or D.kind} accepted {have} of "
        f"{max_rounds * batch} proposals in box [{lo}, {hi}]; need {n}"
    )


def _ball_sampler(space, center, radius, closed):
    def sample(rng, n):
        g = rng.normal(size=(n, space.dim))
        u = space.unit(g)
        s = rng.uniform(size=(n, 1)) ** (1.0 / space.dim)
        if not closed:
            s = s * (1.0 - 1e-12)
        return center + radius * s * u
    return sample


def _box_of_ball(space, center, radius):
    b = radius * space.coord_bound
    return (center - b, center + b)


# -- constructors ------------------------------------------------------------

def open_ball(space: NormedSpace, center, radius: float, label: str = "") -> Domain:
    c = as_vector(center, space.dim)
    r = float(radius)
    if r <= 0:
        raise ValueError("ball radius must be positive")
    return Domain(
        space=space,
        contains_fn=lambda x: space.norm(x - c) < r,
        kind="open_ball",
        bounding_radius=float(space.norm(c)) + r,
        is_open=True,
        convex=True,
        inradius_fn=lambda x: np.maximum(r - space.norm(x - c), 0.0),
        sampler=_ball_sampler(space, c, r, closed=False),
        box=_box_of_ball(space, c, r),
        spec={"kind": "open_ball", "center": c.tolist(), "radius": r},
        label=label or f"B_{r:g}({_fmt(c)})",
        meta={"center": c, "radius": r},
    )


def closed_ball(space: NormedSpace, center, radius: float, label: str = "") -> Domain:
    c = as_vector(center, space.dim)
    r = float(radius)
    if r <= 0:
        raise ValueError("ball radius must be positive")
    return Domain(
        space=space,
        contains_fn=lambda x: space.norm(x - c) <= r,
        kind="closed_ball",
        bounding_radius=float(space.norm(c)) + r,
        is_open=False,
        convex=True,
        inradius_fn=lambda x: np.maximum(r - space.norm(x - c), 0.0),
        sampler=_ball_sampler(space, c, r, closed=True),
        box=_box_of_ball(space, c, r),
        spec={"kind": "closed_ball", "center": c.tolist(), "radius": r},
        label=label or f"closed B_{r:g}({_fmt(c)})",
        meta={"center": c, "radius": r},
    )


def union(parts: Sequence[Domain], kind: str = "custom", *, is_open: Optional[bool] = None,
          convex: bool = False, label: str = "") -> Domain:
    """Union of domains in one space.

    The inradius bound is the largest part inradius, which never exceeds the
    distance to the complement of the union.
    """
    parts = list(parts)
    if not parts:
        raise ValueError("union of no parts")
    space = parts[0].space
    if any(p.space is not space and p.space.spec != space.spec for p in parts):
        raise ValueError("union parts live in different spaces")
    if is_open is None:
        is_open = all(p.is_open for p in parts)

    def contains_fn(x):
        m = np.zeros(len(x), dtype=bool)
        for p in parts:
            m |= p.contains_fn(x)
        return m

    inradius_fn = None
    if all(p.inradius_fn is not None for p in parts):
        def inradius_fn(x):
            return np.max([np.where(p.contains_fn(x), p.inradius_fn(x), 0.0) for p in parts], axis=0)

    def sampler(rng, n):
        which = rng.integers(len(parts), size=n)
        out = np.empty((n, space.dim))
        for i, p in enumerate(parts):
            sel = which == i
            if sel.any():
                out[sel] = p.sample(rng, int(sel.sum()))
        return out

    specs = [p.spec for p in parts]
    spec = None if any(s is None for s in specs) else {
        "kind": "union", "as": kind, "open": is_open, "convex": convex, "parts": specs}
    return Domain(
        space=space,
        contains_fn=contains_fn,
        kind=kind,
        bounding_radius=max(p.bounding_radius for p in parts),
        is_open=is_open,
        convex=convex,
        inradius_fn=inradius_fn,
        sampler=sampler,
        spec=spec,
        label=label or " u ".join(p.label for p in parts),
        meta={"parts": parts},
    )


def ball_union(balls: Sequence[Domain], label: str = "") -> Domain:
    return union(balls, "ball_union", label=label)


def star_union(center, parts: Sequence[Domain], label: str = "") -> Domain:
    """Union of convex parts that all contain ``center``; star-shaped about it."""
    c = np.asarray(center, dtype=float)
    for p in parts:
        if not p.convex or not contains(p, c):
            raise PreconditionError(f"part {p.label} is not a convex set containing the centre", witness=c.tolist())
    D = union(parts, "star_shaped", label=label)
    D.meta["center"] = c
    if D.spec is not None:
        D.spec["center"] = c.tolist()
    return D


def polytope(space: NormedSpace, A, b, closed: bool = True, label: str = "") -> Domain:
    """``{x : A x <= b}`` (or ``<`` when open); must be bounded."""
    from scipy.optimize import linprog

    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[1] != space.dim or b.shape != (A.shape[0],):
        raise ValueError("polytope data has inconsistent shape")
    lo = np.empty(space.dim)
    hi = np.empty(space.dim)
    for i in range(space.dim):
        for sign, store in ((1.0, lo), (-1.0, hi)):
            cost = np.zeros(space.dim)
            cost[i] = sign
            res = linprog(cost, A_ub=A, b_ub=b, bounds=[(None, None)] * space.dim)
            if res.status == 3:
                raise ValueError("polytope is unbounded")
            if res.status != 0:
                raise ValueError(f"polytope is empty or degenerate: {res.message}")
            store[i] = res.x[i]
    corners = np.array(np.meshgrid(*zip(lo, hi), indexing="ij")).reshape(space.dim, -1).T
    R = float(space.norm(corners).max())

    inradius_fn = None
    if space.dual is not None:
        scale = space.dual(A)

        def inradius_fn(x):
            slack = (b - x @ A.T) / scale
            return np.maximum(slack.min(axis=1), 0.0)

    if closed:
        contains_fn = lambda x: np.all(x @ A.T <= b, axis=1)
    else:
        contains_fn = lambda x: np.all(x @ A.T < b, axis=1)
    return Domain(
        space=space,
        contains_fn=contains_fn,
        kind="convex_polytope",
        bounding_radius=max(R, 1e-300),
        is_open=not closed,
        convex=True,
        inradius_fn=inradius_fn,
        box=(lo, hi),
        spec={"kind": "polytope", "A": A.tolist(), "b": b.tolist(), "closed": closed},
        label=label or "polytope",
    )


def segment_set(space: NormedSpace, a, b, *, include_a: bool = True, label: str = "") -> Domain:
    """The closed segment ``[a, b]`` as a (lower-dimensional) set.

    ``include_a=False`` drops the endpoint ``a``.
    """
    a = as_vector(a, space.dim)
    b = as_vector(b, space.dim)
    d = b - a
    dd = float(d @ d)
    if dd == 0:
        raise ValueError("degenerate segment")

    def contains_fn(x):
        t = (x - a) @ d / dd
        resid = x - (a + t[:, None] * d)
        scale = 1.0 + np.abs(x).max(axis=1)
        on_line = np.abs(resid).max(axis=1) <= 1e-14 * scale
        lo_ok = t >= 0 if include_a else t > 0
        return on_line & lo_ok & (t <= 1)

    def sampler(rng, n):
        t = rng.uniform(size=(n, 1))
        if not include_a:
            t = np.where(t == 0, 0.5, t)
        return a + t * d

    return Domain(
        space=space,
        contains_fn=contains_fn,
        kind="closed_set",
        bounding_radius=float(max(space.norm(a), space.norm(b))) or 1.0,
        is_open=False,
        convex=include_a,
        inradius_fn=lambda x: np.zeros(len(x)),
        sampler=sampler,
        spec={"kind": "segment", "a": a.tolist(), "b": b.tolist(), "include_a": include_a},
        label=label or f"[{_fmt(a)}, {_fmt(b)}]",
    )


def translate(D: Domain, v) -> Domain:
    """``D + v``."""
    v = as_vector(v, D.dim)
    inradius_fn = None if D.inradius_fn is None else (lambda x: D.inradius_fn(x - v))
    sampler = None if D.sampler is None else (lambda rng, n: D.sampler(rng, n) + v)
    box = None if D.box is None else (D.box[0] + v, D.box[1] + v)
    spec = None if D.spec is None else {"kind": "translate", "shift": v.tolist(), "base": D.spec}
    meta = dict(D.meta)
    if "center" in meta:
        meta["center"] = meta["center"] + v
    return Domain(
        space=D.space,
        contains_fn=lambda x: D.contains_fn(x - v),
        kind=D.kind,
        bounding_radius=D.bounding_radius + float(D.space.norm(v)),
        is_open=D.is_open,
        convex=D.convex,
        inradius_fn=inradius_fn,
        sampler=sampler,
        box=box,
        spec=spec,
        label=f"{D.label} + {_fmt(v)}",
        meta=meta,
    )


def custom(space: NormedSpace, contains_fn: ContainsFn, bounding_radius: float, *,
           is_open: bool, convex: bool = False, kind: str = "custom", **kw) -> Domain:
    return Domain(space=space, contains_fn=contains_fn, kind=kind,
                  bounding_radius=bounding_radius, is_open=is_open, convex=convex, **kw)


# -- membership and probes ---------------------------------------------------

def contains(D: Domain, x) -> bool:
    v = as_vector(x, D.dim)
    return bool(D.contains_fn(v[None, :])[0])


def _require_member(D, x, what="point"):
    v = as_vector(x, D.dim)
    if not D.contains_fn(v[None, :])[0]:
        raise DomainError(f"{what} {_fmt(v)} is not in {D.label or D.kind}")
    return v


def _first_exit(D: Domain, x: np.ndarray, dirs: np.ndarray, n_grid=64, n_bisect=60) -> np.ndarray:
    """Per direction, a radius up to which the ray from ``x`` stays in ``D``."""
    hi = 2.0 * D.bounding_radius + float(D.space.norm(x))
    grid = hi * np.arange(1, n_grid + 1) / n_grid
    pts = x + grid[None, :, None] * dirs[:, None, :]
    inside = D.contains_fn(pts.reshape(-1, D.dim)).reshape(len(dirs), n_grid)
    out = ~inside
    first = np.where(out.any(axis=1), out.argmax(axis=1), n_grid - 1)
    lo = np.where(first > 0, grid[np.maximum(first - 1, 0)], 0.0)
    up = grid[first]
    for _ in range(n_bisect):
        mid = 0.5 * (lo + up)
        ok = D.contains_fn(x + mid[:, None] * dirs)
        lo = np.where(ok, mid, lo)
        up = np.where(ok, up, mid)
    return lo


def inradius_at(D: Domain, x, n_dir: Optional[int] = None, seed: int = 0) -> float:
    """Distance from ``x`` to the complement of ``D``, or a probed lower estimate.

    Without an analytic formula the estimate is the smallest first-exit radius
    over ``n_dir`` unit directions (``64 * dim`` by default).
    """
    v = _require_member(D, x)
    if D.inradius_fn is not None:
        return float(D.inradius_fn(v[None, :])[0])
    n_dir = n_dir or N_DIR_PER_DIM * D.dim
    dirs = unit_directions(D.space, n_dir, np.random.default_rng(seed))
    return float(_first_exit(D, v, dirs).min())


def inradii(D: Domain, points, n_dir: Optional[int] = None, seed: int = 0) -> np.ndarray:
    """Vectorised :func:`inradius_at`; points outside ``D`` get 0."""
    pts = as_points(points, D.dim)
    inside = D.contains_fn(pts)
    if D.inradius_fn is not None:
        return np.where(inside, D.inradius_fn(pts), 0.0)
    out = np.zeros(len(pts))
    for i in np.flatnonzero(inside):
        out[i] = inradius_at(D, pts[i], n_dir=n_dir, seed=seed)
    return out


def ball_inside(D: Domain, x, rho: float, n_dir: Optional[int] = None, seed: int = 0,
                fractions=(0.25, 0.5, 0.75, 0.9, 0.999)) -> bool:
    """Sampled test of ``B_rho(x) subset D``."""
    v = as_vector(x, D.dim)
    n_dir = n_dir or N_DIR_PER_DIM * D.dim
    dirs = unit_directions(D.space, n_dir, np.random.default_rng(seed))
    f = np.asarray(fractions, dtype=float)
    pts = v + rho * f[None, :, None] * dirs[:, None, :]
    return bool(D.contains_fn(np.vstack([v[None, :], pts.reshape(-1, D.dim)])).all())


def openness_witness(D: Domain, x, predicted_radius: Optional[float] = None,
                     n_dir: Optional[int] = None, seed: int = 0,
                     n_halvings: int = 30) -> Optional[float]:
    """Largest radius on a halving schedule whose sampled ball stays in ``D``.

    With ``predicted_radius`` only that radius is tested; it is returned on
    success and ``None`` on failure. Without it, ``None`` means every radius
    of the schedule failed.
    """
    v = _require_member(D, x)
    if predicted_radius is not None:
        ok = predicted_radius > 0 and ball_inside(D, v, predicted_radius, n_dir, seed)
        return float(predicted_radius) if ok else None
    rho = 2.0 * D.bounding_radius
    for _ in range(n_halvings):
        if ball_inside(D, v, rho, n_dir, seed):
            return rho
        rho *= 0.5
    return None


def star_defect(D: Domain, c, n_samples: int = 1000, seed: int = 0, n_t: int = 33) -> Defect:
    """Sampled check that ``D`` is star-shaped about ``c``.

    Returns 1 with the first escaping segment point as witness, 0 otherwise.
    """
    c = _require_member(D, c, "star centre")
    rng = np.random.default_rng(seed)
    xs = D.sample(rng, n_samples)
    ts = np.linspace(0.0, 1.0, n_t)
    pts = ts[None, :, None] * c + (1.0 - ts)[None, :, None] * xs[:, None, :]
    ok = D.contains_fn(pts.reshape(-1, D.dim)).reshape(len(xs), n_t)
    bad = np.argwhere(~ok)
    count = len(xs) * n_t
    if len(bad) == 0:
        return Defect(0.0, None, count)
    i, j = bad[0]
    witness = {"x": xs[i].tolist(), "t": float(ts[j]), "point": pts[i, j].tolist()}
    return Defect(1.0, witness, count)


# -- cone over an open set -----------------------------------------------------

def _ball_ray_hit(space, p, xs, c, rho):
    """For each x: is there s >= 1 with ||p + s (x - p) - c|| < rho?"""
    w = p - c
    d = xs - p
    if space.label == "l2":
        dd = (d * d).sum(axis=1)
        s = np.maximum(1.0, -(d @ w) / dd)
        val = space.norm(w + s[:, None] * d)
        return val < rho, s
    # The distance along the ray is convex in s; golden-section on a range
    # that provably contains every hit.
    nd = space.norm(d)
    hi = np.maximum(1.0, (rho + float(space.norm(w))) / nd) * (1 + 1e-9)
    lo = np.ones(len(xs))
    g = (np.sqrt(5.0) - 1) / 2
    a, b = lo, hi
    for _ in range(90):
        m1 = b - g * (b - a)
        m2 = a + g * (b - a)
        f1 = space.norm(w + m1[:, None] * d)
        f2 = space.norm(w + m2[:, None] * d)
        left = f1 <= f2
        b = np.where(left, m2, b)
        a = np.where(left, a, m1)
    s = 0.5 * (a + b)
    f_lo = space.norm(w + d)
    s = np.where(f_lo <= space.norm(w + s[:, None] * d), 1.0, s)
    return space.norm(w + s[:, None] * d) < rho, s


def _cone_search(p, U, xs, s_samples, s_max_factor):
    space = U.space
    d = xs - p
    nd = space.norm(d)
    if U.kind == "open_ball":
        hit, s = _ball_ray_hit(space, p, xs, U.meta["center"], U.meta["radius"])
        return hit, s, np.zeros(len(xs), dtype=bool)
    s_max = np.maximum(s_max_factor * U.bounding_radius / nd, 1.0)
    frac = np.linspace(0.0, 1.0, s_samples)
    S = s_max[:, None] ** frac[None, :]
    pts = p + S[:, :, None] * d[:, None, :]
    inside = U.contains_fn(pts.reshape(-1, space.dim)).reshape(len(xs), s_samples)
    hit = inside.any(axis=1)
    s = np.where(hit, S[np.arange(len(xs)), inside.argmax(axis=1)], np.nan)
    # cutoff binds when the ray end is still inside U's bounding ball
    end = p + s_max[:, None] * d
    binds = space.norm(end) <= U.bounding_radius
    return hit, s, binds


def cone_without_apex(p, U: Domain, s_samples: int = CONE_S_SAMPLES,
                      s_max_factor: float = CONE_S_MAX_FACTOR) -> Domain:
    """Union of the segments ``[p, y]`` over ``y`` in the open set ``U``, minus ``p``.

    ``x`` is a member iff ``x != p`` and ``p + s (x - p)`` lies in ``U`` for
    some ``s >= 1``. Balls are searched exactly; other sets on a geometric
    ``s`` grid up to ``s_max_factor * R / ||x - p||``.
    """
    p = as_vector(p, U.dim)
    if not U.is_open:
        raise PreconditionError(f"{U.label} is not declared open")
    if contains(U, p):
        raise PreconditionError(f"apex {_fmt(p)} lies in {U.label}", witness=p.tolist())
    space = U.space

    def contains_fn(x):
        out = np.zeros(len(x), dtype=bool)
        keep = np.any(x != p, axis=1)
        if keep.any():
            hit, _, _ = _cone_search(p, U, x[keep], s_samples, s_max_factor)
            out[keep] = hit
        return out

    def sampler(rng, n):
        ys = U.sample(rng, n)
        t = rng.uniform(size=(n, 1))
        return t * p + (1.0 - t) * ys

    spec = None if U.spec is None else {"kind": "cone", "apex": p.tolist(), "base": U.spec}
    return Domain(
        space=space,
        contains_fn=contains_fn,
        kind="cone_without_apex",
        bounding_radius=max(float(space.norm(p)), U.bounding_radius),
        is_open=True,
        sampler=sampler,
        spec=spec,
        label=f"V({_fmt(p)}, {U.label})",
        meta={"apex": p, "base": U, "s_samples": s_samples, "s_max_factor": s_max_factor},
    )


def cone_witness(cone: Domain, x) -> tuple[Optional[float], bool]:
    """Return ``(s, binds)`` for a cone member: ``apex + s (x - apex)`` is in the base.

    ``s`` is ``None`` when no witness was found; ``binds`` reports that the
    ``s_max`` cutoff may have hidden one.
    """
    if cone.kind != "cone_without_apex":
        raise ValueError("not a cone domain")
    v = as_vector(x, cone.dim)
    p, U = cone.meta["apex"], cone.meta["base"]
    if np.all(v == p):
        return None, False
    hit, s, binds = _cone_search(p, U, v[None, :], cone.meta["s_samples"], cone.meta["s_max_factor"])
    return (float(s[0]) if hit[0] else None), bool(binds[0])


# -- convex sets and their interiors -------------------------------------------

@dataclass(frozen=True)
class InteriorApproach:
    """Terms ``x_n = (1 - 1/n) p + (1/n) a`` with interiority and distance to ``p``."""

    points: np.ndarray
    interior: np.ndarray
    distances: np.ndarray

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        for x, i, d in zip(self.points, self.interior, self.distances):
            yield x, bool(i), float(d)


def interior_approach(X: Domain, p, a, n_max: int, check_interior: bool = True) -> InteriorApproach:
    p = _require_member(X, p)
    a = _require_member(X, a, "interior point")
    if inradii(X, a)[0] <= 0:
        raise PreconditionError(f"{_fmt(a)} is not an interior point of {X.label}", witness=a.tolist())
    n = np.arange(1, n_max + 1, dtype=float)[:, None]
    xs = (1.0 - 1.0 / n) * p + (1.0 / n) * a
    if check_interior:
        interior = inradii(X, xs) > 0
    else:
        interior = np.ones(n_max, dtype=bool)
    dist = X.space.norm(xs - p)
    return InteriorApproach(xs, interior, dist)


def interior(X: Domain) -> Domain:
    """The open interior of ``X``, via positive inradius."""
    if X.inradius_fn is not None:
        fn = lambda x: X.contains_fn(x) & (X.inradius_fn(x) > 0)
    else:
        fn = lambda x: inradii(X, x) > 0
    meta = dict(X.meta)
    meta["closure"] = X
    spec = None if X.spec is None else {"kind": "interior", "base": X.spec}
    return dataclasses.replace(
        X,
        contains_fn=fn,
        is_open=True,
        sampler=None if X.sampler is None else _filtered_sampler(X, fn),
        spec=spec,
        label=f"Int({X.label})",
        meta=meta,
        kind="custom" if X.kind == "closed_ball" else X.kind,
    )


def _filtered_sampler(X, fn):
    def sample(rng, n):
        got, have = [], 0
        for _ in range(200):
            pts = X.sampler(rng, 2 * n + 16)
            keep = pts[fn(pts)]
            got.append(keep)
            have += len(keep)
            if have >= n:
                return np.vstack(got)[:n]
        raise SamplingError(f"interior of {X.label} is too thin to sample")
    return sample


def interior_convexity_defect(X: Domain, n_pairs: int = 500, seed: int = 0, n_t: int = 17) -> Defect:
    """Sampled convexity check of ``X`` and of its interior.

    Pairs of points of ``X`` must span segments inside ``X`` (the declared
    convexity), and pairs of interior points must span interior segments.
    Returns 1 with a witness on the first violation.
    """
    if not X.convex:
        raise PreconditionError(f"{X.label} is not declared convex")
    rng = np.random.default_rng(seed)
    pts = X.sample(rng, 2 * n_pairs)
    rad = inradii(X, pts)
    inner = pts[rad > 0]
    if len(inner) < 2:
        raise PreconditionError(f"no sampled interior points in {X.label}; interior looks empty")
    ts = np.linspace(0.0, 1.0, n_t)

    def scan(A, B, member, label):
        seg = ts[None, :, None] * A[:, None, :] + (1 - ts)[None, :, None] * B[:, None, :]
        ok = member(seg.reshape(-1, X.dim)).reshape(len(A), n_t)
        bad = np.argwhere(~ok)
        if len(bad):
            i, j = bad[0]
            return {"check": label, "a": A[i].tolist(), "b": B[i].tolist(), "t": float(ts[j]),
                    "point": seg[i, j].tolist()}
        return None

    half = len(pts) // 2
    w = scan(pts[:half], pts[half:2 * half], X.contains_fn, "convexity")
    count = half * n_t
    if w is None:
        k = len(inner) // 2
        w = scan(inner[:k], inner[k:2 * k], lambda y: inradii(X, y) > 0, "interior")
        count += k * n_t
    return Defect(0.0 if w is None else 1.0, w, count)


def boundary_points(X: Domain, center, n: int, seed: int = 0) -> np.ndarray:
    """Points of ``X`` within bisection accuracy of its boundary, along rays from ``center``."""
    c = _require_member(X, center, "ray origin")
    dirs = unit_directions(X.space, n, np.random.default_rng(seed))
    rad = _first_exit(X, c, dirs, n_bisect=80)
    pts = c + rad[:, None] * dirs
    return pts[X.contains_fn(pts)]


def domain_from_spec(space: NormedSpace, spec: dict) -> Domain:
    kind = spec["kind"]
    if kind == "open_ball":
        return open_ball(space, spec["center"], spec["radius"])
    if kind == "closed_ball":
        return closed_ball(space, spec["center"], spec["radius"])
    if kind == "polytope":
        return polytope(space, spec["A"], spec["b"], closed=spec.get("closed", True))
    if kind == "segment":
        return segment_set(space, spec["a"], spec["b"], include_a=spec.get("include_a", True))
    if kind == "translate":
        return translate(domain_from_spec(space, spec["base"]), spec["shift"])
    if kind == "cone":
        return cone_without_apex(spec["apex"], domain_from_spec(space, spec["base"]))
    if kind == "interior":
        return interior(domain_from_spec(space, spec["base"]))
    if kind == "union":
        parts = [domain_from_spec(space, s) for s in spec["parts"]]
        if spec.get("as") == "star_shaped":
            return star_union(spec["center"], parts)
        return union(parts, spec.get("as", "custom"), is_open=spec.get("open"),
                     convex=spec.get("convex", False))
    raise ValueError(f"unknown domain kind {kind!r}")


def _fmt(v) -> str:
    return "(" + ", ".join(f"{x:g}" for x in np.asarray(v).ravel()) + ")"
