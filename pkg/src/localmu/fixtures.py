"""Named fixtures (domain + map + metadata) and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .domains import Domain, closed_ball, domain_from_spec, open_ball, star_union
from .maps import (Affine, MapModel, build_example_star_closed, build_example_two_balls,
                   map_from_spec, random_orthogonal, random_signed_permutation, rotation2)
from .spaces import NormedSpace, l2_space, linf_space, space_from_spec

# Largest least-squares affine miss (max norm) for the two-balls map on the
# 2 x 71 x 71 cell-centre grid; equals 70/71. Truncated, used as a floor.
TWO_BALLS_RHO_STAR = 0.9859154929


@dataclass
class Fixture:
    name: str
    kind: str  # "open", "convex" or "counterexample"
    space: NormedSpace
    domain: Domain
    map: MapModel
    center: Optional[np.ndarray] = None
    fallback_center: Optional[np.ndarray] = None
    probe_points: Optional[np.ndarray] = None
    generator: Optional[tuple] = None
    description: str = ""
    image_open: bool = True
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = {
            "name": self.name,
            "kind": self.kind,
            "description": self.description,
            "space": self.space.spec,
            "domain": self.domain.spec,
            "map": self.map.to_spec(),
            "image_open": self.image_open,
        }
        for key in ("center", "fallback_center", "probe_points"):
            val = getattr(self, key)
            if val is not None:
                d[key] = np.asarray(val).tolist()
        if self.generator is not None:
            d["generator"] = {"A": np.asarray(self.generator[0]).tolist(),
                              "u": np.asarray(self.generator[1]).tolist()}
        return d


def star_arms(space: NormedSpace, center, arm: float = 0.8, radius: float = 1.0) -> Domain:
    """Open balls of ``radius`` centred at ``center +- arm * e_i``; star-shaped, not convex."""
    c = np.asarray(center, dtype=float)
    dirs = np.vstack([np.eye(space.dim), -np.eye(space.dim)])
    dirs = dirs / space.norm(dirs)[:, None]
    parts = [open_ball(space, c + arm * d, radius) for d in dirs]
    return star_union(c, parts, label=f"arms({space.label})")


def random_isometry_fixture(norm: str, dim: int, rng: np.random.Generator) -> Fixture:
    """Star-shaped open domain with an affine isometry generator.

    ``norm`` is ``"linf"`` (signed permutations) or ``"l2"`` (orthogonal
    matrices).
    """
    if norm == "linf":
        S = linf_space(dim)
        A = random_signed_permutation(dim, rng)
    elif norm == "l2":
        S = l2_space(dim)
        A = random_orthogonal(dim, rng)
    else:
        raise ValueError(f"no isometry generator for norm {norm!r}")
    u = rng.uniform(-3, 3, size=dim)
    center = rng.uniform(-1, 1, size=dim)
    U = star_arms(S, center, arm=float(rng.uniform(0.5, 0.9)), radius=1.0)
    T = Affine(A, u, S, domain=U)
    return Fixture(f"random-{norm}-{dim}", "open", S, U, T, center=center, generator=(A, u))


def random_convex_fixture(norm: str, dim: int, rng: np.random.Generator) -> Fixture:
    if norm == "linf":
        S = linf_space(dim)
        A = random_signed_permutation(dim, rng)
    else:
        S = l2_space(dim)
        A = random_orthogonal(dim, rng)
    u = rng.uniform(-3, 3, size=dim)
    c = rng.uniform(-1, 1, size=dim)
    X = closed_ball(S, c, float(rng.uniform(0.5, 2.0)))
    probes = None
    if norm == "linf":
        corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * dim, indexing="ij")).reshape(dim, -1).T
        probes = c + X.meta["radius"] * corners
    return Fixture(f"random-convex-{norm}-{dim}", "convex", S, X, Affine(A, u, S, domain=X), center=c,
                   probe_points=probes, generator=(A, u))


def _signed_perm_star() -> Fixture:
    S = linf_space(3)
    a0 = np.array([0.5, -0.25, 1.0])
    A = np.array([[0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [0.0, -1.0, 0.0]])
    u = np.array([1.0, -2.0, 0.5])
    U = star_arms(S, a0)
    return Fixture("signed-perm-star", "open", S, U, Affine(A, u, S, domain=U), center=a0,
                   generator=(A, u),
                   description="signed permutation plus translation on a star-shaped union of max-norm balls")


def _rotation_disc() -> Fixture:
    S = l2_space(2)
    A = rotation2(0.7)
    u = np.array([1.0, 2.0])
    c = np.array([0.3, -0.2])
    U = open_ball(S, c, 1.5)
    return Fixture("rotation-disc", "open", S, U, Affine(A, u, S, domain=U), center=c,
                   generator=(A, u), description="rotation by 0.7 rad plus translation on a Euclidean disc")


def _convex_maxball() -> Fixture:
    S = linf_space(2)
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    u = np.array([0.5, -1.0])
    X = closed_ball(S, [0.0, 0.0], 1.0)
    corners = np.array([[1.0, 1.0], [-1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]])
    return Fixture("convex-maxball", "convex", S, X, Affine(A, u, S, domain=X), center=np.zeros(2),
                   probe_points=corners, generator=(A, u),
                   description="closed max-norm unit ball, (x, y) -> (y, -x) + (0.5, -1)")


def _two_balls() -> Fixture:
    U, T = build_example_two_balls()
    return Fixture("ex-two-balls", "counterexample", U.space, U, T, center=np.zeros(2),
                   probe_points=np.array([[0.5, 10.0]]), image_open=True,
                   description="two max-norm unit balls; first-coordinate flip on the far ball",
                   extra={"rho_star": TWO_BALLS_RHO_STAR})


def _star_closed() -> Fixture:
    X, T = build_example_star_closed()
    return Fixture("ex-star-closed", "counterexample", X.space, X, T, center=np.zeros(2),
                   fallback_center=np.array([-0.5, 0.0]),
                   probe_points=np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 0.0]]),
                   description="closed star-shaped triangle-plus-tail; tail bent onto the graph of sin")


BUILTINS = {
    "ex-two-balls": _two_balls,
    "ex-star-closed": _star_closed,
    "signed-perm-star": _signed_perm_star,
    "rotation-disc": _rotation_disc,
    "convex-maxball": _convex_maxball,
}


# -- JSON ----------------------------------------------------------------------

_VECTOR = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_MATRIX = {"type": "array", "items": _VECTOR, "minItems": 1}

FIXTURE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "fixture",
    "type": "object",
    "required": ["name", "kind", "space", "domain", "map"],
    "properties": {
        "name": {"type": "string"},
        "kind": {"enum": ["open", "convex", "counterexample"]},
        "description": {"type": "string"},
        "space": {
            "type": "object",
            "required": ["norm", "dim"],
            "properties": {
                "norm": {"enum": ["l1", "l2", "linf", "lp", "weighted_linf", "polyhedral"]},
                "dim": {"type": "integer", "minimum": 1},
                "p": {"type": "number", "minimum": 1},
                "weights": _VECTOR,
                "functionals": _MATRIX,
            },
        },
        "domain": {"$ref": "#/definitions/domain"},
        "map": {"$ref": "#/definitions/map"},
        "center": _VECTOR,
        "fallback_center": _VECTOR,
        "probe_points": _MATRIX,
        "image_open": {"type": "boolean"},
        "generator": {
            "type": "object",
            "required": ["A", "u"],
            "properties": {"A": _MATRIX, "u": _VECTOR},
        },
    },
    "definitions": {
        "domain": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["open_ball", "closed_ball", "polytope", "segment", "translate",
                                  "cone", "interior", "union"]},
                "center": _VECTOR,
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "A": _MATRIX,
                "b": _VECTOR,
                "closed": {"type": "boolean"},
                "a": _VECTOR,
                "include_a": {"type": "boolean"},
                "shift": _VECTOR,
                "apex": _VECTOR,
                "base": {"$ref": "#/definitions/domain"},
                "parts": {"type": "array", "items": {"$ref": "#/definitions/domain"}, "minItems": 1},
                "as": {"type": "string"},
                "open": {"type": "boolean"},
                "convex": {"type": "boolean"},
            },
            "allOf": [
                {"if": {"properties": {"kind": {"enum": ["open_ball", "closed_ball"]}}},
                 "then": {"required": ["center", "radius"]}},
                {"if": {"properties": {"kind": {"const": "polytope"}}}, "then": {"required": ["A", "b"]}},
                {"if": {"properties": {"kind": {"const": "segment"}}}, "then": {"required": ["a", "b"]}},
                {"if": {"properties": {"kind": {"const": "translate"}}},
                 "then": {"required": ["shift", "base"]}},
                {"if": {"properties": {"kind": {"const": "cone"}}}, "then": {"required": ["apex", "base"]}},
                {"if": {"properties": {"kind": {"const": "interior"}}}, "then": {"required": ["base"]}},
                {"if": {"properties": {"kind": {"const": "union"}}}, "then": {"required": ["parts"]}},
            ],
        },
        "map": {
            "type": "object",
            "required": ["type"],
            "properties": {
                "type": {"enum": ["affine", "analytic", "piecewise", "composite"]},
                "A": _MATRIX,
                "u": _VECTOR,
                "name": {"type": "string"},
                "domain": {"$ref": "#/definitions/domain"},
                "pieces": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["guard", "map"],
                        "properties": {"guard": {"$ref": "#/definitions/domain"},
                                       "map": {"$ref": "#/definitions/map"}},
                    },
                },
                "maps": {"type": "array", "items": {"$ref": "#/definitions/map"}, "minItems": 1},
            },
            "allOf": [
                {"if": {"properties": {"type": {"const": "affine"}}}, "then": {"required": ["A", "u"]}},
                {"if": {"properties": {"type": {"const": "analytic"}}}, "then": {"required": ["name"]}},
                {"if": {"properties": {"type": {"const": "piecewise"}}}, "then": {"required": ["pieces"]}},
                {"if": {"properties": {"type": {"const": "composite"}}}, "then": {"required": ["maps"]}},
            ],
        },
    },
}


class FixtureError(ValueError):
    """Unknown fixture name or a fixture description that fails validation."""


def validate_fixture_json(data: dict) -> None:
    validator = jsonschema.Draft7Validator(FIXTURE_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise FixtureError(f"fixture schema violation at {path}: {e.message}")


def fixture_from_json(data: dict) -> Fixture:
    validate_fixture_json(data)
    try:
        S = space_from_spec(data["space"])
        D = domain_from_spec(S, data["domain"])
        T = map_from_spec(S, data["map"])
    except (KeyError, ValueError) as exc:
        raise FixtureError(f"fixture {data.get('name')!r} could not be built: {exc}") from exc

    def vec(key):
        return None if key not in data else np.asarray(data[key], dtype=float)

    gen = data.get("generator")
    return Fixture(
        name=data["name"],
        kind=data["kind"],
        space=S,
        domain=D,
        map=T,
        center=vec("center"),
        fallback_center=vec("fallback_center"),
        probe_points=vec("probe_points"),
        generator=None if gen is None else (np.asarray(gen["A"], float), np.asarray(gen["u"], float)),
        description=data.get("description", ""),
        image_open=data.get("image_open", True),
        extra={"rho_star": TWO_BALLS_RHO_STAR} if data["name"] == "ex-two-balls" else {},
    )


def load_fixture(name_or_path: str) -> Fixture:
    """A built-in fixture by name, or a fixture JSON file by path."""
    if name_or_path in BUILTINS:
        return BUILTINS[name_or_path]()
    p = Path(name_or_path)
    if p.suffix == ".json" or p.exists():
        try:
            data = json.loads(p.read_text())
        except FileNotFoundError as exc:
            raise FixtureError(f"fixture file {p} does not exist") from exc
        except json.JSONDecodeError as exc:
            raise FixtureError(f"fixture file {p} is not valid JSON: {exc}") from exc
        return fixture_from_json(data)
    raise FixtureError(f"unknown fixture {name_or_path!r}; available: {', '.join(sorted(BUILTINS))}")
