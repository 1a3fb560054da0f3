"""Midpoint preservation for isometries between open sets.

Two pieces of machinery live here. The fixed-centre check verifies that a
self-isometry of a set symmetric about ``c`` fixes ``c``. The dyadic chain
splits a segment into ``2**n`` steps short enough that every triple of
neighbours sits in a safe ball; midpoint relations on neighbouring triples
then telescope to the whole segment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .domains import Domain, inradii
from .errors import DomainError, PreconditionError, SamplingError
from .maps import MapModel
from .spaces import DEFAULT_TOL, Defect, Metric, NormedSpace, Tolerances, as_vector, reflect


def choose_subdivision(f, g, eps: float, space: NormedSpace) -> int:
    """Smallest ``n >= 0`` with ``||f - g|| / 2**n < eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    length = float(space.norm(as_vector(f, space.dim) - as_vector(g, space.dim)))
    n = 0
    while length / 2.0 ** n >= eps:
        n += 1
    return n


@dataclass(frozen=True, eq=False)
class DyadicChain:
    f: np.ndarray
    g: np.ndarray
    n: int
    points: np.ndarray

    def __len__(self):
        return len(self.points)


def dyadic_chain(f, g, n: int) -> DyadicChain:
    """Points ``h_k = (k / 2**n)(g - f) + f`` for ``k = 0 .. 2**n``."""
    f = as_vector(f)
    g = as_vector(g, len(f))
    if n < 1:
        raise ValueError("subdivision depth must be at least 1")
    k = np.arange(2 ** n + 1, dtype=float)[:, None]
    pts = (k / 2.0 ** n) * (g - f) + f
    pts[0] = f
    pts[-1] = g
    return DyadicChain(f, g, n, pts)


def _images(T: MapModel, chain: DyadicChain) -> np.ndarray:
    ok = T.defined(chain.points)
    if not ok.all():
        k = int(np.argmin(ok))
        raise DomainError(f"chain point h_{k} = {chain.points[k].tolist()} is outside the map's domain")
    return T(chain.points)


def _dist(metric: Optional[Metric], target: NormedSpace, a, b):
    if metric is not None:
        return metric(a, b)
    return target.norm(a - b)


def chain_midpoint_defect(T: MapModel, chain: DyadicChain, target: Optional[NormedSpace] = None,
                          metric: Optional[Metric] = None) -> tuple[np.ndarray, float]:
    """``delta_k = ||T(h_k) + T(h_{k+2}) - 2 T(h_{k+1})||`` for every ``k``, and their max.

    With a metric the defect is ``d(T(h_k) + T(h_{k+2}) - T(h_{k+1}), T(h_{k+1}))``,
    which equals the norm form for norm-induced metrics.
    """
    target = T.target if target is None else target
    Y = _images(T, chain)
    lhs = Y[:-2] + Y[2:] - Y[1:-1]
    deltas = np.asarray(_dist(metric, target, lhs, Y[1:-1]), dtype=float)
    return deltas, float(deltas.max()) if len(deltas) else 0.0


def spacing_collapse_check(T: MapModel, chain: DyadicChain,
                           target: Optional[NormedSpace] = None) -> list[dict]:
    """Midpoint defects at every dyadic spacing level.

    Level ``j`` compares ``h_k``, ``h_{k + 2**(j-1)}``, ``h_{k + 2**j}``. Since
    the level-``j+1`` relation is the level-``j`` relations at ``k``, ``k+s``
    (twice) and ``k+2s`` summed, its defect is at most ``4**(j-1)`` times the
    level-1 defect; that bound is reported alongside.
    """
    target = T.target if target is None else target
    if chain.n < 2:
        raise ValueError("need subdivision depth at least 2")
    Y = _images(T, chain)
    N = len(Y) - 1
    rows = []
    base = None
    for j in range(1, chain.n + 1):
        s = 2 ** (j - 1)
        k = np.arange(0, N - 2 * s + 1)
        d = target.norm(Y[k] + Y[k + 2 * s] - 2.0 * Y[k + s])
        m = float(d.max())
        if base is None:
            base = m
        rows.append({"level": j, "spacing": 2 * s, "defect": m, "bound": 4.0 ** (j - 1) * base})
    return rows


def segment_escape(domain, f, g, n_r: int = 257) -> Optional[float]:
    """First ``r`` on a grid with ``(1 - r) f + r g`` outside ``domain`` (a Domain or a map)."""
    r = np.linspace(0.0, 1.0, n_r)[:, None]
    pts = (1.0 - r) * f + r * g
    ok = domain.defined(pts) if isinstance(domain, MapModel) else domain.contains_fn(pts)
    if ok.all():
        return None
    return float(r[np.argmin(ok), 0])


def midpoint_defect(T: MapModel, f, g, metric: Optional[Metric] = None,
                    domain: Optional[Domain] = None) -> float:
    """``d(T((f+g)/2), (T f + T g)/2)`` after checking ``[f, g]`` stays in the domain."""
    f = as_vector(f, T.source.dim)
    g = as_vector(g, T.source.dim)
    r = segment_escape(domain if domain is not None else T, f, g)
    if r is not None:
        raise DomainError(f"segment leaves the domain at r = {r}")
    Y = T(np.vstack([f, g, 0.5 * (f + g)]))
    return float(_dist(metric, T.target, Y[2], 0.5 * (Y[0] + Y[1])))


@dataclass(frozen=True)
class MidpointCertificate:
    certified: bool
    reason: str
    eps: float = 0.0
    n: int = 0
    chain_max: float = float("nan")
    midpoint: float = float("nan")
    witness_k: Optional[int] = None


def certify_midpoint(T: MapModel, U1: Domain, f, g, U2: Optional[Domain] = None,
                     tol: Tolerances = DEFAULT_TOL, n_r: int = 257,
                     max_depth: int = 18) -> MidpointCertificate:
    """Run the chain argument for one segment and report whether it certifies.

    Refuses when ``[f, g]`` leaves ``U1`` or when the margin between the
    segment (or its image, if ``U2`` is given) and the complement is not
    positive.
    """
    f = as_vector(f, U1.dim)
    g = as_vector(g, U1.dim)
    r = segment_escape(U1, f, g, n_r)
    if r is not None:
        return MidpointCertificate(False, f"segment leaves U1 at r = {r}")
    rs = np.linspace(0.0, 1.0, n_r)[:, None]
    K = (1.0 - rs) * f + rs * g
    margin = float(inradii(U1, K).min())
    if U2 is not None:
        img = T(K)
        if not U2.contains_fn(img).all():
            return MidpointCertificate(False, "image of the segment leaves U2")
        margin = min(margin, float(inradii(U2, img).min()))
    if margin <= tol.abs:
        return MidpointCertificate(False, f"segment margin {margin:.3g} is not positive", eps=margin)
    eps = 0.5 * margin
    n = max(choose_subdivision(f, g, eps, U1.space), 1)
    if n > max_depth:
        return MidpointCertificate(False, f"margin {margin:.3g} needs depth {n} > {max_depth}",
                                   eps=eps, n=n)
    chain = dyadic_chain(f, g, n)
    deltas, worst = chain_midpoint_defect(T, chain)
    mid = midpoint_defect(T, f, g, domain=U1)
    ok = worst <= tol.abs and mid <= 10 * tol.abs
    k = int(np.argmax(deltas))
    return MidpointCertificate(ok, "certified" if ok else "chain relation fails", eps, n, worst, mid,
                               None if ok else k)


# -- fixed centres -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SphereSet:
    """``{a : ||a - h|| = r = ||a - h'||}``, thickened by ``thickness``."""

    space: NormedSpace
    h: np.ndarray
    h_prime: np.ndarray
    r: float
    thickness: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "h", as_vector(self.h, self.space.dim))
        object.__setattr__(self, "h_prime", as_vector(self.h_prime, self.space.dim))
        if not self.r > 0:
            raise ValueError("radius must be positive")

    @property
    def dim(self):
        return self.space.dim

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.h + self.h_prime)

    def contains_fn(self, pts, slack: float = 1.0) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        tol = slack * self.thickness
        return ((np.abs(self.space.norm(pts - self.h) - self.r) <= tol)
                & (np.abs(self.space.norm(pts - self.h_prime) - self.r) <= tol))

    def sample(self, rng: np.random.Generator, n: int, max_rounds: int = 50) -> np.ndarray:
        """Points of the set.

        Candidates on the sphere about ``h`` that already meet the second
        equation are kept; sign changes of ``||a - h'|| - r`` between pairs of
        candidates are refined by bisection along the sphere.
        """
        S, h, r = self.space, self.h, self.r
        got, have = [], 0
        for _ in range(max_rounds):
            v = S.unit(rng.normal(size=(4 * n + 8, S.dim)))
            phi = S.norm(h + r * v - self.h_prime) - r
            direct = v[np.abs(phi) <= self.thickness]
            got.append(h + r * direct)
            have += len(direct)
            neg, pos = v[phi < 0], v[phi > 0]
            m = min(len(neg), len(pos))
            if m:
                lo, hi = neg[:m], pos[:m]
                for _ in range(80):
                    mid = S.unit(0.5 * (lo + hi))
                    p = S.norm(h + r * mid - self.h_prime) - r
                    neg_side = p < 0
                    lo = np.where(neg_side[:, None], mid, lo)
                    hi = np.where(neg_side[:, None], hi, mid)
                pts = h + r * S.unit(0.5 * (lo + hi))
                pts = pts[self.contains_fn(pts)]
                got.append(pts)
                have += len(pts)
            if have >= n:
                return np.vstack(got)[:n]
        if self.contains_fn(self.center[None, :])[0]:
            return np.repeat(self.center[None, :], n, axis=0)
        raise SamplingError(f"could not sample the sphere set (found {have} of {n} points)")


def fixed_center_check(L: Union[Domain, SphereSet], c, T: MapModel, n_samples: int = 200,
                       seed: int = 0, slack: float = 100.0) -> Defect:
    """``||T(c) - c||`` for a self-map of a set that is symmetric about ``c``.

    Sampled invariance of ``L`` under ``T`` and under the reflection through
    ``c`` is checked first; a failure raises :class:`PreconditionError`.
    Membership of images is tested with the thickening widened by ``slack``.
    """
    c = as_vector(c, L.dim)
    member = (lambda p: L.contains_fn(p, slack)) if isinstance(L, SphereSet) else L.contains_fn
    if not member(c[None, :])[0]:
        raise PreconditionError(f"centre {c.tolist()} is not in the set", witness=c.tolist())
    pts = L.sample(np.random.default_rng(seed), n_samples)
    for name, img in (("map", T(pts)), ("reflection", reflect(c, pts))):
        ok = member(img)
        if not ok.all():
            i = int(np.argmin(ok))
            raise PreconditionError(f"{name} moves {pts[i].tolist()} out of the set",
                                    witness=pts[i].tolist())
    space = L.space
    return Defect(float(space.norm(T(c) - c)), {"c": c.tolist(), "Tc": T(c).tolist()}, len(pts))
