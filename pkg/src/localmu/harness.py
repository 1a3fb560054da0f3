"""Verification suites over fixtures, producing JSON-ready run reports."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .domains import Domain, inradii, interior, star_defect
from .errors import PreconditionError
from .extension import extend_convex, recentre, run_extension, safe_radius
from .fixtures import Fixture, load_fixture
from .maps import affine_fit, image_domain, isometry_gaps
from .midpoint import certify_midpoint, midpoint_defect, segment_escape
from .spaces import Tolerances

SUITES = ("isometry", "midpoint", "extension", "counterexamples", "all")
MAX_CERTIFIED_SEGMENTS = 20


@dataclass
class RunConfig:
    fixture: str
    suite: str = "all"
    tol_abs: float = 1e-9
    tol_rel: float = 1e-9
    samples: int = 2000
    seed: int = 0
    force: bool = False
    out: Optional[str] = None
    csv: Optional[str] = None

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.seed is None:
            raise ValueError("a seed is required")
        if not (self.tol_abs > 0 and self.tol_rel > 0):
            raise ValueError("tolerances must be positive")
        if self.samples < 1:
            raise ValueError("sample count must be positive")

    @property
    def tol(self) -> Tolerances:
        return Tolerances(self.tol_abs, self.tol_rel)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("csv")
        return d


@dataclass
class Check:
    name: str
    value: float
    tolerance: object
    relation: str  # "<=", ">=", ">", "in", "is"
    witness: object = None
    series: Optional[list] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        if self.relation == "<=":
            return self.value <= self.tolerance
        if self.relation == ">=":
            return self.value >= self.tolerance
        if self.relation == ">":
            return self.value > self.tolerance
        if self.relation == "in":
            lo, hi = self.tolerance
            return lo <= self.value <= hi
        if self.relation == "is":
            return self.value == self.tolerance
        raise ValueError(self.relation)

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _jsonable(self.value), "relation": self.relation,
                "tolerance": _jsonable(self.tolerance), "passed": bool(self.passed),
                "witness": _jsonable(self.witness)}


@dataclass
class RunReport:
    config: dict
    checks: list
    results: dict = field(default_factory=dict)
    wall_time: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        d = {"config": self.config,
             "checks": [c.to_dict() for c in self.checks],
             "verdict": "pass" if self.passed else "fail",
             "results": _jsonable(self.results)}
        if self.wall_time is not None:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["check", "sample", "defect"])
            for c in self.checks:
                for i, v in enumerate(c.series or []):
                    w.writerow([c.name, i, repr(float(v))])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    return x


def star_closed_grid() -> np.ndarray:
    """200 points of the closed star-shaped fixture: a 169-point lattice on the
    triangle and 31 points on the tail."""
    m = 12
    tri = [(-i / m, j / m) for i in range(m + 1) for j in range(-i, i + 1)]
    tail = [(k / 31, 0.0) for k in range(1, 32)]
    return np.array(tri + tail)


def two_balls_grid(k: int = 71) -> np.ndarray:
    g = -1.0 + (2.0 * np.arange(k) + 1.0) / k
    X, Y = np.meshgrid(g, g, indexing="ij")
    B = np.column_stack([X.ravel(), Y.ravel()])
    return np.vstack([B, B + np.array([0.0, 10.0])])


# -- suites --------------------------------------------------------------------

def suite_isometry(fx: Fixture, cfg: RunConfig) -> tuple[list, dict]:
    a, b, gap = isometry_gaps(fx.map, fx.domain, n_pairs=cfg.samples, seed=cfg.seed)
    k = int(np.argmax(gap))
    checks = [Check("isometry_defect", float(gap[k]), cfg.tol_abs, "<=",
                    {"a": a[k], "b": b[k]}, series=gap.tolist())]
    if fx.name == "ex-star-closed":
        P = star_closed_grid()
        a, b, gap = isometry_gaps(fx.map, points=P)
        k = int(np.argmax(gap))
        checks.append(Check("isometry_defect_grid", float(gap[k]), cfg.tol_abs, "<=",
                            {"a": a[k], "b": b[k], "pairs": len(gap)}))
    return checks, {}


def _segment_pairs(D: Domain, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(50):
        P = D.sample(rng, 2 * n)
        for f, g in zip(P[:n], P[n:]):
            if segment_escape(D, f, g) is None:
                out.append((f, g))
        if len(out) >= n:
            break
    return np.array(out[:n])


def suite_midpoint(fx: Fixture, cfg: RunConfig) -> tuple[list, dict]:
    D = interior(fx.domain) if fx.kind == "convex" else fx.domain
    T = fx.map
    checks = []
    results = {}
    if fx.name == "ex-star-closed":
        f, g = np.zeros(2), np.array([1.0, 0.0])
        cert = certify_midpoint(T, D, f, g, tol=cfg.tol)
        checks.append(Check("certified", cert.certified, True, "is", {"reason": cert.reason}))
        checks.append(Check("midpoint_defect", midpoint_defect(T, f, g, domain=D), cfg.tol_abs, "<=",
                            {"f": f, "g": g}))
        return checks, {"certificate": asdict(cert)}
    pairs = _segment_pairs(D, min(cfg.samples, 1000), cfg.seed)
    defects = np.array([midpoint_defect(T, f, g) for f, g in pairs])
    k = int(np.argmax(defects))
    checks.append(Check("midpoint_defect", float(defects[k]), cfg.tol_abs, "<=",
                        {"f": pairs[k][0], "g": pairs[k][1], "pairs": len(pairs)},
                        series=defects.tolist()))
    try:
        U2 = image_domain(T, D)
    except TypeError:
        U2 = None
    # chains for segments hugging the boundary get long; certify the roomy ones
    margins = np.array([inradii(D, np.linspace(f, g, 33)).min() for f, g in pairs])
    roomy = pairs[margins >= 0.01 * D.bounding_radius][:MAX_CERTIFIED_SEGMENTS]
    worst, refused = 0.0, []
    for f, g in roomy:
        cert = certify_midpoint(T, D, f, g, U2=U2, tol=cfg.tol)
        if cert.certified:
            worst = max(worst, cert.chain_max)
        else:
            refused.append({"f": f, "g": g, "reason": cert.reason})
    checks.append(Check("chain_defect", worst, cfg.tol_abs, "<=", {"segments": len(roomy)}))
    checks.append(Check("certification_refusals", len(refused), 0, "<=", refused[:3]))
    return checks, results


def _recovery_checks(fx, res, cfg):
    checks = []
    if fx.generator is not None:
        A, u = fx.generator
        checks.append(Check("matrix_recovery", float(np.abs(res.A - A).max()), cfg.tol_abs, "<="))
        checks.append(Check("translation_recovery", float(np.abs(res.u - u).max()), cfg.tol_abs, "<="))
    return checks


def suite_extension(fx: Fixture, cfg: RunConfig) -> tuple[list, dict]:
    if fx.kind == "convex":
        res = extend_convex(fx.map, fx.domain, cfg.samples, cfg.seed, cfg.tol,
                            probe_points=fx.probe_points)
    else:
        center = fx.center if fx.center is not None else fx.domain.meta.get("center")
        res = run_extension(fx.map, fx.domain, center, cfg.samples, cfg.seed, cfg.tol,
                            force=cfg.force, fallback_center=fx.fallback_center,
                            probe_points=fx.probe_points)
    rep = res.defects
    checks = [Check(name, value, cfg.tol_abs, "<=", rep.witnesses.get(name))
              for name, value in rep.values().items()]
    checks.append(Check("invertibility_ok", rep.invertibility_ok, True, "is", {"condition": rep.condition}))
    checks += _recovery_checks(fx, res, cfg)
    return checks, res.to_dict()


def _counter_two_balls(fx, cfg):
    U, T = fx.domain, fx.map
    checks = []
    a, b, gap = isometry_gaps(T, U, n_pairs=max(cfg.samples, 10_000), seed=cfg.seed)
    k = int(np.argmax(gap))
    checks.append(Check("isometry_defect", float(gap[k]), cfg.tol_abs, "<=", {"a": a[k], "b": b[k]},
                        series=gap.tolist()))
    sd = star_defect(U, fx.center, seed=cfg.seed)
    checks.append(Check("star_defect", sd.value, 0.0, ">", sd.witness))
    P = two_balls_grid()
    fit = affine_fit(P, T(P), fx.space)
    checks.append(Check("affine_fit_residual", fit.residual, fx.extra["rho_star"], ">=", fit.worst))
    res = run_extension(T, U, fx.center, cfg.samples, cfg.seed, cfg.tol, force=True,
                        probe_points=fx.probe_points)
    probe = res.defects.probes[0]
    checks.append(Check("forced_agreement", probe["agreement"], 0.9, ">=", probe["point"]))
    return checks, {"forced_extension": res.to_dict()}


def _counter_star_closed(fx, cfg):
    X, T = fx.domain, fx.map
    checks = []
    a, b, gap = isometry_gaps(T, points=star_closed_grid())
    k = int(np.argmax(gap))
    checks.append(Check("isometry_defect_grid", float(gap[k]), cfg.tol_abs, "<=", {"a": a[k], "b": b[k]},
                        series=gap.tolist()))
    sd = star_defect(X, fx.center, seed=cfg.seed)
    checks.append(Check("star_defect", sd.value, 0.0, "<=", sd.witness))
    V1, _ = recentre(T, X, fx.center, seed=cfg.seed)
    try:
        safe_radius(V1, tol=cfg.tol, seed=cfg.seed)
        refused, reason = False, None
    except PreconditionError as exc:
        refused, reason = True, str(exc)
    checks.append(Check("safe_radius_refused", refused, True, "is", reason))
    e1 = np.array([1.0, 0.0])
    w = float(fx.space.norm(T(-e1) + T(e1) - 2 * T(np.zeros(2))))
    checks.append(Check("non_extendability_witness", w, (0.8414, 0.8415), "in", {"x": e1}))
    P = star_closed_grid()
    fit = affine_fit(P, T(P), fx.space)
    checks.append(Check("affine_fit_residual", fit.residual, 100 * cfg.tol_abs, ">=", fit.worst))
    cert = certify_midpoint(T, X, np.zeros(2), e1, tol=cfg.tol)
    checks.append(Check("midpoint_certification_refused", not cert.certified, True, "is", cert.reason))
    res = run_extension(T, X, fx.center, cfg.samples, cfg.seed, cfg.tol, force=True,
                        fallback_center=fx.fallback_center, probe_points=fx.probe_points)
    probe = next(p for p in res.defects.probes if p["point"] == [1.0, 0.0])
    checks.append(Check("forced_agreement", probe["agreement"], 0.8, ">=", probe["point"]))
    return checks, {"forced_extension": res.to_dict()}


COUNTEREXAMPLES = {"ex-two-balls": _counter_two_balls, "ex-star-closed": _counter_star_closed}


def suite_counterexamples(fx: Fixture, cfg: RunConfig) -> tuple[list, dict]:
    if fx.name not in COUNTEREXAMPLES:
        raise PreconditionError(f"{fx.name} is not a counterexample fixture; "
                                f"choose from {', '.join(COUNTEREXAMPLES)}")
    return COUNTEREXAMPLES[fx.name](fx, cfg)


SUITE_FUNCS = {
    "isometry": suite_isometry,
    "midpoint": suite_midpoint,
    "extension": suite_extension,
    "counterexamples": suite_counterexamples,
}


def default_suites(fx: Fixture) -> list[str]:
    if fx.kind == "counterexample":
        return ["isometry", "counterexamples"]
    return ["isometry", "midpoint", "extension"]


def run(cfg: RunConfig, fixture: Optional[Fixture] = None) -> RunReport:
    fx = load_fixture(cfg.fixture) if fixture is None else fixture
    suites = default_suites(fx) if cfg.suite == "all" else [cfg.suite]
    checks, results = [], {}
    for name in suites:
        c, r = SUITE_FUNCS[name](fx, cfg)
        for chk in c:
            chk.name = f"{name}.{chk.name}"
        checks += c
        if r:
            results[name] = r
    return RunReport({"fixture": fx.name, **cfg.echo()}, checks, results)
