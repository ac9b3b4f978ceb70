"""Base points of objects, morphisms of points, and fixed base-point assignment.

A point of ``X`` is an arrow ``P -> X`` from a base object ``P`` in the
working category.  In the contravariant orientation the working category is
the opposite of the concrete instance, so a point is a concrete arrow
``X -> P`` (for rings: a homomorphism to a field).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .core import Category, Morphism, OpMorphism, Opposite, underlying
from .errors import AxiomViolation, EmptyPointSet

COVARIANT = "covariant"
CONTRAVARIANT = "contravariant"


@dataclass
class BasePointConfig:
    category: Category
    base_objects: tuple
    orientation: str = COVARIANT

    def __post_init__(self):
        self.base_objects = tuple(self.base_objects)
        if not self.base_objects:
            raise AxiomViolation("base_objects must be nonempty")
        if len(set(self.base_objects)) != len(self.base_objects):
            raise AxiomViolation("base_objects must be distinct", self.base_objects)
        if self.orientation not in (COVARIANT, CONTRAVARIANT):
            raise AxiomViolation("orientation must be covariant or contravariant", self.orientation)
        self._working = (self.category if self.orientation == COVARIANT
                         else Opposite(self.category))
        self._iso_cache = {}

    @property
    def working(self) -> Category:
        """The category in which points are arrows ``P -> X``."""
        return self._working

    @property
    def contravariant(self) -> bool:
        return self.orientation == CONTRAVARIANT

    def to_working(self, f: Morphism) -> Morphism:
        return OpMorphism.of(f) if self.contravariant else f

    def base_index(self, P) -> int:
        return self.base_objects.index(P)

    def base_isos(self, P1, P2) -> list:
        """Isomorphisms ``P1 -> P2`` in the working category.

        These are the admissible bottom arrows of the localization squares.
        """
        key = (P1, P2)
        if key not in self._iso_cache:
            W = self.working
            self._iso_cache[key] = [b for b in W.hom(P1, P2) if W.is_iso(b)]
        return self._iso_cache[key]


@dataclass(frozen=True)
class Point:
    base: Any
    arrow: Morphism
    orientation: str = COVARIANT

    @property
    def working(self) -> Morphism:
        """The arrow ``base -> X`` of the working category."""
        return OpMorphism.of(self.arrow) if self.orientation == CONTRAVARIANT else self.arrow

    @property
    def target(self):
        return self.arrow.dom if self.orientation == CONTRAVARIANT else self.arrow.cod

    @classmethod
    def from_working(cls, base, w: Morphism, orientation: str) -> "Point":
        return cls(base, underlying(w) if orientation == CONTRAVARIANT else w, orientation)


@dataclass
class PointSet:
    target: Any
    points: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def index(self, p: Point) -> int:
        return self.points.index(p)


def pts(X, cfg: BasePointConfig) -> PointSet:
    """All base points of ``X``: the disjoint union over ``P`` in B of hom(P, X)."""
    C = cfg.category
    out = []
    for P in cfg.base_objects:
        arrows = C.hom(X, P) if cfg.contravariant else C.hom(P, X)
        out.extend(Point(P, a, cfg.orientation) for a in arrows)
    return PointSet(X, out)


def point_morphisms(x: Point, y: Point, X, cfg: BasePointConfig) -> list:
    """Pairs ``(phi, b)`` with ``phi: X -> X`` and ``phi x = y b`` in the working category.

    ``b`` ranges over every morphism between the base objects.
    """
    W = cfg.working
    out = []
    for b in W.hom(x.base, y.base):
        rhs = W.compose(y.working, b)
        for phi in W.hom(X, X):
            if W.compose(phi, x.working) == rhs:
                out.append((phi, b))
    return out


def fix_basepoints(objects, cfg: BasePointConfig, rule=None, overrides=None) -> dict:
    """Assign each object a base point.

    ``rule`` is an optional predicate on points; the first point of the
    deterministic enumeration satisfying it is chosen.  ``overrides`` maps an
    object to a point (or to an index into its point set) and wins over the
    rule.
    """
    overrides = overrides or {}
    out = {}
    for X in objects:
        P = pts(X, cfg)
        if not P.points:
            raise EmptyPointSet(f"{cfg.category.describe(X)} has no base points")
        if X in overrides:
            choice = overrides[X]
            if isinstance(choice, int):
                choice = P.points[choice]
            if choice not in P.points:
                raise AxiomViolation("override is not a point of the object",
                                     cfg.category.describe(X))
            out[X] = choice
            continue
        chosen = next((p for p in P.points if rule is None or rule(p)), None)
        if chosen is None:
            raise EmptyPointSet(f"{cfg.category.describe(X)} has no point satisfying the rule")
        out[X] = chosen
    return out


def point_image(u: Morphism, p: Point, cfg: BasePointConfig) -> Point:
    """Transport a point of ``U`` along a working-category arrow ``u: U -> X``."""
    W = cfg.working
    return Point.from_working(p.base, W.compose(u, p.working), cfg.orientation)


def point_id(p: Point, cfg: BasePointConfig) -> dict:
    """Stable identifier: base object canonical form plus arrow table."""
    C = cfg.category
    return {"base": C.object_data(p.base), "arrow": C.morphism_data(p.arrow)}
