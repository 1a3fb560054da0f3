"""Extending an isometry on a star-shaped open set to an affine isometry.

Pipeline: translate so the star centre and its image sit at the origin, pick
a radius ``r`` with ``B_{3r}(0)`` inside the translated domain, extend the
centred map radially by ``x -> (||x||/r) T0(r x / ||x||)``, read off the matrix
on the standard basis, then measure every identity the argument relies on.
Linearity is never assumed; the defect report is the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .domains import (Domain, ball_inside, boundary_points, inradii, inradius_at, interior,
                      interior_convexity_defect, star_defect, translate)
from .errors import DomainError, PreconditionError
from .maps import Affine, Composite, MapModel, isometry_defect, shift
from .spaces import DEFAULT_TOL, NormedSpace, Tolerances, as_points, as_vector

SAFE_RADIUS_FACTOR = 0.9 / 3.0
HOMOGENEITY_SCALES = (-7.5, -2.0, -1.0, -0.3, 0.0, 0.4, 1.0, 1.7, 4.0, 10.0)
RADIAL_TS = np.linspace(0.0, 1.0, 9)
CONDITION_LIMIT = 1e12


def recentre(T: MapModel, U1: Domain, a0, n_samples: int = 1000, seed: int = 0,
             check_star: bool = True):
    """Return ``(V1, T0)`` with ``V1 = U1 - a0`` and ``T0(x) = T(x + a0) - T(a0)``."""
    a0 = as_vector(a0, U1.dim)
    if not U1.contains_fn(a0[None, :])[0]:
        raise PreconditionError(f"centre {a0.tolist()} is not in {U1.label}", witness=a0.tolist())
    if check_star:
        sd = star_defect(U1, a0, n_samples, seed)
        if sd.value > 0:
            raise PreconditionError(f"{U1.label} is not star-shaped about {a0.tolist()}",
                                    witness=sd.witness)
    Ta0 = T(a0)
    V1 = translate(U1, -a0)
    T0 = Composite([shift(T.source, a0), T, shift(T.target, -Ta0)])
    return V1, T0


def safe_radius(V1: Domain, factor: float = SAFE_RADIUS_FACTOR, tol: Tolerances = DEFAULT_TOL,
                seed: int = 0) -> float:
    """``r`` with ``B_{3r}(0)`` inside ``V1``: ``factor`` times the inradius at 0."""
    origin = np.zeros(V1.dim)
    if not V1.contains_fn(origin[None, :])[0]:
        raise PreconditionError("origin is not in the recentred domain", witness=origin.tolist())
    rho = inradius_at(V1, origin, seed=seed)
    if rho <= tol.abs:
        raise PreconditionError(f"origin has inradius {rho:.3g}; it is not an interior point",
                                witness=origin.tolist())
    r = factor * rho
    if not ball_inside(V1, origin, 3.0 * r, seed=seed):
        raise PreconditionError(f"sampled ball of radius {3 * r:.6g} about 0 leaves the domain")
    return r


class RadialExtension(MapModel):
    """``x -> (||x|| / r) T0(r x / ||x||)``, with ``0 -> 0``."""

    def __init__(self, T0: MapModel, r: float):
        self.T0 = T0
        self.r = float(r)
        self.source = T0.source
        self.target = T0.target
        self.domain = None

    def _eval(self, pts):
        n = self.source.norm(pts)
        out = np.zeros((len(pts), self.target.dim))
        nz = n > 0
        if nz.any():
            scale = (self.r / n[nz])[:, None]
            out[nz] = (n[nz] / self.r)[:, None] * self.T0(scale * pts[nz])
        return out


def extend(T0: MapModel, r: float) -> RadialExtension:
    if not r > 0:
        raise ValueError("radius must be positive")
    probe = r * np.vstack([np.eye(T0.source.dim), -np.eye(T0.source.dim)])
    probe = T0.source.unit(probe) * r
    ok = T0.defined(probe)
    if not ok.all():
        raise DomainError(f"centred map is undefined at {probe[np.argmin(ok)].tolist()} on the radius-{r:g} sphere")
    return RadialExtension(T0, r)


def materialize(Tt: MapModel, dim: Optional[int] = None) -> np.ndarray:
    """Matrix whose columns are the images of the standard basis."""
    dim = Tt.source.dim if dim is None else dim
    return np.asarray(Tt(np.eye(dim)), dtype=float).T


@dataclass
class DefectReport:
    radial_scaling: float = 0.0
    small_ball_additivity: float = 0.0
    radial_agreement: float = 0.0
    homogeneity: float = 0.0
    additivity: float = 0.0
    negation: float = 0.0
    agreement: float = 0.0
    isometry: float = 0.0
    boundary_agreement: Optional[float] = None
    invertibility_ok: bool = True
    condition: float = 1.0
    probes: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    seed: int = 0

    NAMES = ("radial_scaling", "small_ball_additivity", "radial_agreement", "homogeneity",
             "additivity", "negation", "agreement", "isometry", "boundary_agreement")

    def values(self) -> dict:
        return {k: getattr(self, k) for k in self.NAMES if getattr(self, k) is not None}

    def worst(self) -> float:
        return max(self.values().values())

    def passes(self, tol: Union[Tolerances, float] = DEFAULT_TOL) -> bool:
        bound = tol.abs if isinstance(tol, Tolerances) else float(tol)
        return self.invertibility_ok and all(v <= bound for v in self.values().values())

    def to_dict(self) -> dict:
        return {
            "defects": self.values(),
            "invertibility_ok": bool(self.invertibility_ok),
            "condition": float(self.condition),
            "probes": self.probes,
            "witnesses": self.witnesses,
            "sample_counts": self.counts,
            "seed": self.seed,
        }


def _ball_points(space: NormedSpace, radius: float, rng, n: int, closed: bool = True):
    u = space.unit(rng.normal(size=(n, space.dim)))
    s = rng.uniform(size=(n, 1)) ** (1.0 / space.dim)
    pts = radius * s * u
    if closed:
        pts[: min(n, 2 * space.dim)] = radius * space.unit(
            np.vstack([np.eye(space.dim), -np.eye(space.dim)]))[: min(n, 2 * space.dim)]
    return pts


def _max_with_witness(report, name, values, where):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        setattr(report, name, 0.0)
        report.counts[name] = 0
        return
    k = int(np.argmax(values))
    setattr(report, name, float(values[k]))
    report.witnesses[name] = np.asarray(where[k]).tolist()
    report.counts[name] = int(values.size)


def verify_extension(T: MapModel, U1: Domain, a0, A, u, r: float, n_samples: int = 2000,
                     seed: int = 0, T0: Optional[MapModel] = None, Tt: Optional[MapModel] = None,
                     probe_points=None) -> DefectReport:
    """Measure each identity of the extension argument on seeded samples.

    Points where the (possibly non-star-shaped) domain does not allow
    evaluation are skipped and the skip is visible in ``counts``.
    """
    a0 = as_vector(a0, U1.dim)
    A = np.asarray(A, dtype=float)
    u = np.asarray(u, dtype=float)
    src, tgt = T.source, T.target
    if T0 is None:
        _, T0 = recentre(T, U1, a0, check_star=False)
    if Tt is None:
        Tt = RadialExtension(T0, r)
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(8)]
    rep = DefectReport(seed=seed)
    R = max(1.0, U1.bounding_radius)

    # t T0(a) = T0(t a) on the recentred domain
    V = U1.sample(rngs[0], n_samples) - a0
    ts = RADIAL_TS
    ta = (ts[None, :, None] * V[:, None, :]).reshape(-1, src.dim)
    ok = T0.defined(ta).reshape(len(V), len(ts)).all(axis=1)
    Vok = V[ok]
    if len(Vok):
        T0V = T0(Vok)
        T0ta = T0((ts[None, :, None] * Vok[:, None, :]).reshape(-1, src.dim)).reshape(len(Vok), len(ts), -1)
        gap = tgt.norm(T0ta - ts[None, :, None] * T0V[:, None, :]).max(axis=1)
        _max_with_witness(rep, "radial_scaling", gap, Vok + a0)
        _max_with_witness(rep, "radial_agreement", tgt.norm(Tt(Vok) - T0V), Vok + a0)
    rep.counts["radial_skipped"] = int((~ok).sum())

    # additivity and odd symmetry of T0 on the closed small ball
    a = _ball_points(src, r, rngs[1], n_samples)
    b = _ball_points(src, r, rngs[2], n_samples)
    gap = tgt.norm(T0(a + b) - T0(a) - T0(b))
    _max_with_witness(rep, "small_ball_additivity", gap, np.hstack([a, b]))
    _max_with_witness(rep, "negation", tgt.norm(T0(-a) + T0(a)), a)

    # homogeneity for all real scales, additivity everywhere (including y = -x)
    x = _ball_points(src, 4 * R, rngs[3], n_samples)
    s = np.asarray(HOMOGENEITY_SCALES)
    sx = (s[None, :, None] * x[:, None, :]).reshape(-1, src.dim)
    Ttx = Tt(x)
    gap = tgt.norm(Tt(sx).reshape(len(x), len(s), -1) - s[None, :, None] * Ttx[:, None, :]).max(axis=1)
    _max_with_witness(rep, "homogeneity", gap, x)
    y = _ball_points(src, 4 * R, rngs[4], n_samples)
    y[: n_samples // 10] = -x[: n_samples // 10]
    gap = tgt.norm(Tt(x + y) - Ttx - Tt(y))
    _max_with_witness(rep, "additivity", gap, np.hstack([x, y]))

    # T(x) = A x + u on the original domain
    pts = U1.sample(rngs[5], n_samples)
    if probe_points is not None and len(probe_points):
        extra = as_points(probe_points, src.dim)
        extra = extra[U1.contains_fn(extra) & T.defined(extra)]
        miss = tgt.norm(extra @ A.T + u - T(extra)) if len(extra) else []
        rep.probes = [{"point": p.tolist(), "agreement": float(m)} for p, m in zip(extra, miss)]
        pts = np.vstack([pts, extra])
    good = T.defined(pts)
    pts = pts[good]
    _max_with_witness(rep, "agreement", tgt.norm(pts @ A.T + u - T(pts)), pts)

    z = _ball_points(src, 4 * R, rngs[6], n_samples)
    _max_with_witness(rep, "isometry", np.abs(tgt.norm(z @ A.T) - src.norm(z)), z)

    square = A.shape[0] == A.shape[1]
    cond = float(np.linalg.cond(A)) if square else float("inf")
    rep.condition = cond
    rep.invertibility_ok = bool(square and np.isfinite(cond) and cond < CONDITION_LIMIT)
    return rep


@dataclass
class ExtensionResult:
    A: np.ndarray
    u: np.ndarray
    r: float
    a0: np.ndarray
    defects: DefectReport
    notes: list = field(default_factory=list)

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.A.T + self.u

    def as_affine(self, source: NormedSpace, target: Optional[NormedSpace] = None) -> Affine:
        return Affine(self.A, self.u, source, target)

    def to_dict(self) -> dict:
        d = {"A": self.A.tolist(), "u": self.u.tolist(), "r": float(self.r), "a0": self.a0.tolist()}
        d.update(self.defects.to_dict())
        d["notes"] = list(self.notes)
        return d


def run_extension(T: MapModel, U1: Domain, a0, n_samples: int = 2000, seed: int = 0,
                  tol: Tolerances = DEFAULT_TOL, force: bool = False, fallback_center=None,
                  probe_points=None) -> ExtensionResult:
    """The full pipeline from ``(T, U1, a0)`` to a verified ``(A, u)``.

    With ``force`` a failed star-shape check is recorded instead of raised,
    and a failed safe-radius search retries at ``fallback_center``.
    """
    notes = []
    a0 = as_vector(a0, U1.dim)
    sd = star_defect(U1, a0, min(n_samples, 1000), seed)
    if sd.value > 0:
        if not force:
            raise PreconditionError(f"{U1.label} is not star-shaped about {a0.tolist()}",
                                    witness=sd.witness)
        notes.append({"forced": "star_shape", "witness": sd.witness})
    V1, T0 = recentre(T, U1, a0, check_star=False)
    try:
        r = safe_radius(V1, tol=tol, seed=seed)
    except PreconditionError as exc:
        if not force or fallback_center is None:
            raise
        notes.append({"forced": "safe_radius", "reason": str(exc), "a0": a0.tolist(),
                      "fallback": np.asarray(fallback_center, dtype=float).tolist()})
        a0 = as_vector(fallback_center, U1.dim)
        V1, T0 = recentre(T, U1, a0, check_star=False)
        r = safe_radius(V1, tol=tol, seed=seed)
    Tt = extend(T0, r)
    A = materialize(Tt)
    u = T(a0) - A @ a0
    rep = verify_extension(T, U1, a0, A, u, r, n_samples, seed, T0=T0, Tt=Tt, probe_points=probe_points)
    return ExtensionResult(A, u, r, a0, rep, notes)


def extend_convex(T: MapModel, X: Domain, n_samples: int = 2000, seed: int = 0,
                  tol: Tolerances = DEFAULT_TOL, n_boundary: int = 256, probe_points=None) -> ExtensionResult:
    """Extension from the interior of a convex set, then agreement on all of ``X``.

    ``boundary_agreement`` covers points found by bisection toward the
    boundary plus any ``probe_points`` in ``X``, which is where the closure
    step (``X`` inside the closure of its interior) is exercised.
    """
    cd = interior_convexity_defect(X, seed=seed)
    if cd.value > 0:
        raise PreconditionError(f"{X.label} fails the convexity scan", witness=cd.witness)
    iso = isometry_defect(T, X, n_pairs=min(n_samples, 2000), seed=seed)
    if iso.value > tol.abs:
        raise PreconditionError(f"map is not isometric on {X.label} (defect {iso.value:.3g})",
                                witness=iso.witness)
    rng = np.random.default_rng(seed)
    cand = X.sample(rng, 512)
    if "center" in X.meta:
        cand = np.vstack([np.asarray(X.meta["center"])[None, :], cand])
    rad = inradii(X, cand)
    a0 = cand[int(np.argmax(rad))]
    res = run_extension(T, interior(X), a0, n_samples, seed, tol)
    pts = boundary_points(X, a0, n_boundary, seed)
    n_extra = 0
    if probe_points is not None and len(probe_points):
        extra = as_points(probe_points, X.dim)
        extra = extra[X.contains_fn(extra)]
        n_extra = len(extra)
        pts = np.vstack([pts, extra])
    miss = T.target.norm(pts @ res.A.T + res.u - T(pts))
    _max_with_witness(res.defects, "boundary_agreement", miss, pts)
    k = len(pts) - n_extra
    res.defects.probes += [{"point": p.tolist(), "agreement": float(m)}
                           for p, m in zip(pts[k:], miss[k:])]
    return res
