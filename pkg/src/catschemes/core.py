"""Finite-category kernel.

Objects are immutable, hashable values whose equality is equality of their
canonical form.  Morphisms carry extensional data (element tables, generator
images or matrices); two morphisms are equal iff domain, codomain and data
agree.  Every universal-property verdict produced here is a verdict *up to a
bound*: test objects are drawn from ``Category.objects(bound)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Iterable, Sequence

from .errors import NoColimit, NotRepresentable, SizeBoundExceeded


@dataclass(frozen=True)
class Morphism:
    dom: Any
    cod: Any
    data: Any

    def __call__(self, x):
        raise NotImplementedError(type(self).__name__)


class TableMorphism(Morphism):
    """Morphism given by its value table, aligned with ``dom.elements``."""

    @cached_property
    def _lookup(self):
        return dict(zip(self.dom.elements, self.data))

    def __call__(self, x):
        return self._lookup[x]


def sort_key(e):
    """Total order on mixed labels (ints, strings, nested tuples)."""
    if isinstance(e, bool):
        return (0, int(e))
    if isinstance(e, int):
        return (0, e)
    if isinstance(e, str):
        return (1, e)
    if isinstance(e, tuple):
        return (2, tuple(sort_key(x) for x in e))
    return (3, repr(e))


@dataclass(frozen=True)
class Factorization:
    epi_part: Morphism
    middle: Any
    mono_part: Morphism


@dataclass(frozen=True)
class Universal:
    """A (co)cone: apex object with its legs (injections or projections)."""

    obj: Any
    legs: tuple


@dataclass
class DiagramOverPoset:
    """Diagram indexed by a finite poset.

    ``edges`` maps every strictly comparable pair ``(i, j)`` with ``i < j`` to
    a morphism ``node_objects[i] -> node_objects[j]``.
    """

    index: list
    node_objects: dict
    edges: dict

    def check_functorial(self, cat: "Category") -> bool:
        for (i, j), f in self.edges.items():
            if f.dom != self.node_objects[i] or f.cod != self.node_objects[j]:
                return False
        for (i, j), f in self.edges.items():
            for (j2, k), g in self.edges.items():
                if j2 != j:
                    continue
                h = self.edges.get((i, k))
                if h is None or cat.compose(g, f) != h:
                    return False
        return True


# ---------------------------------------------------------------------------
# transcripts


@dataclass
class MediatorEntry:
    test: str
    source: Any
    target: Any
    mediators: list
    context: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.mediators)


@dataclass
class VerificationTranscript:
    bound: int
    candidate: str
    entries: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values()) and all(e.count == 1 for e in self.entries)

    @property
    def verdict(self) -> str:
        return f"{'pass' if self.passed else 'fail'} up to bound {self.bound}"

    def failures(self) -> list:
        return [e for e in self.entries if e.count != 1]


@dataclass
class MediatorProblem:
    test: str
    source: Any
    target: Any
    accept: Callable[[Morphism], bool]
    context: dict = field(default_factory=dict)


def verify_unique_mediator(cat, candidate, problems: Iterable[MediatorProblem], bound,
                           checks=None, stop_on_failure=False, hom=None) -> VerificationTranscript:
    """Count mediators for every problem; pass iff each has exactly one.

    ``hom`` optionally replaces ``cat.hom`` (e.g. a memoized hom-set lookup).
    """
    hom = hom or cat.hom
    transcript = VerificationTranscript(bound=bound, candidate=str(candidate),
                                        checks=dict(checks or {}))
    for prob in problems:
        found = [m for m in hom(prob.source, prob.target) if prob.accept(m)]
        transcript.entries.append(MediatorEntry(prob.test, prob.source, prob.target,
                                                found, dict(prob.context)))
        if stop_on_failure and len(found) != 1:
            break
    return transcript


# ---------------------------------------------------------------------------
# category interface


class Category:
    """Interface of a finite concrete category.

    Subclasses implement ``hom``, ``compose``, ``identity``, ``size`` and the
    closed-form constructions they support.
    """

    name = "abstract"
    has_coproducts = True
    has_products = True
    has_colimits = True

    def __init__(self, bound: int = 64):
        self.bound = bound

    def __repr__(self):
        return f"{type(self).__name__}(bound={self.bound})"

    # -- required ---------------------------------------------------------
    def size(self, A) -> int:
        raise NotImplementedError

    def hom(self, A, B) -> list:
        raise NotImplementedError

    def compose(self, g, f):
        raise NotImplementedError

    def identity(self, A):
        raise NotImplementedError

    def objects(self, bound: int | None = None) -> list:
        """Deterministic test family of objects with size <= bound."""
        raise NotImplementedError

    def describe(self, A) -> str:
        return repr(A)

    def check_bound(self, *objs):
        for A in objs:
            if self.size(A) > self.bound:
                raise SizeBoundExceeded(
                    f"{self.describe(A)} has size {self.size(A)} > bound {self.bound}")

    # -- mono / epi -------------------------------------------------------
    def is_mono(self, f) -> bool:
        return self.is_mono_by_enumeration(f)

    def is_epi(self, f) -> bool:
        return self.is_epi_by_enumeration(f)

    def is_iso(self, f) -> bool:
        return self.inverse(f) is not None

    def inverse(self, f):
        for g in self.hom(f.cod, f.dom):
            if self.compose(g, f) == self.identity(f.dom) and \
                    self.compose(f, g) == self.identity(f.cod):
                return g
        return None

    def is_mono_by_enumeration(self, f, bound=None) -> bool:
        for T in self.objects(bound):
            maps = self.hom(T, f.dom)
            seen = {}
            for g in maps:
                key = self.compose(f, g)
                if key in seen and seen[key] != g:
                    return False
                seen[key] = g
        return True

    def is_epi_by_enumeration(self, f, bound=None) -> bool:
        for T in self.objects(bound):
            seen = {}
            for g in self.hom(f.cod, T):
                key = self.compose(g, f)
                if key in seen and seen[key] != g:
                    return False
                seen[key] = g
        return True

    # -- constructions ----------------------------------------------------
    def coproduct(self, objs: Sequence) -> Universal:
        raise NotImplementedError

    def copair(self, cocone: Universal, maps: Sequence, target=None):
        """The mediator out of a coproduct; found by search when not overridden."""
        found = [u for u in self.hom(cocone.obj, maps[0].cod if maps else target)
                 if all(self.compose(u, i) == f for i, f in zip(cocone.legs, maps))]
        if len(found) != 1:
            raise NotRepresentable(f"{len(found)} mediators out of coproduct")
        return found[0]

    def product(self, objs: Sequence) -> Universal:
        raise NotImplementedError

    def pair(self, cone: Universal, maps: Sequence, source=None):
        found = [u for u in self.hom(maps[0].dom if maps else source, cone.obj)
                 if all(self.compose(p, u) == f for p, f in zip(cone.legs, maps))]
        if len(found) != 1:
            raise NotRepresentable(f"{len(found)} mediators into product")
        return found[0]

    def image(self, f) -> Factorization:
        return search_image(self, f)

    def coimage(self, f) -> Factorization:
        return search_coimage(self, f)

    def colimit_directed(self, d: DiagramOverPoset) -> Universal:
        raise NoColimit(f"{self.name} does not compute directed colimits")

    def find_isomorphism(self, A, B):
        if A == B:
            return self.identity(A)
        if self.size(A) != self.size(B):
            return None
        for f in self.hom(A, B):
            if self.is_iso(f):
                return f
        return None

    # -- serialization hooks ----------------------------------------------
    def object_data(self, A):
        return repr(A)

    def morphism_data(self, f):
        return repr(f.data)


# ---------------------------------------------------------------------------
# opposite category


@dataclass(frozen=True)
class OpMorphism(Morphism):
    """``f^op``: a morphism of the opposite category wrapping ``f``."""

    @classmethod
    def of(cls, f):
        return cls(f.cod, f.dom, f)


class Opposite(Category):
    """Opposite of a category; constructions are dualized onto the base."""

    def __init__(self, base: Category):
        super().__init__(base.bound)
        self.base = base
        self.name = f"{base.name}^op"
        self.has_coproducts = base.has_products
        self.has_products = base.has_coproducts
        self.has_colimits = False

    def __repr__(self):
        return f"Opposite({self.base!r})"

    def size(self, A):
        return self.base.size(A)

    def describe(self, A):
        return self.base.describe(A)

    def check_bound(self, *objs):
        self.base.check_bound(*objs)

    def objects(self, bound=None):
        return self.base.objects(bound)

    def hom(self, A, B):
        return [OpMorphism.of(f) for f in self.base.hom(B, A)]

    def compose(self, g, f):
        return OpMorphism.of(self.base.compose(f.data, g.data))

    def identity(self, A):
        return OpMorphism.of(self.base.identity(A))

    def is_mono(self, f):
        return self.base.is_epi(f.data)

    def is_epi(self, f):
        return self.base.is_mono(f.data)

    def is_iso(self, f):
        return self.base.is_iso(f.data)

    def inverse(self, f):
        g = self.base.inverse(f.data)
        return None if g is None else OpMorphism.of(g)

    def coproduct(self, objs):
        cone = self.base.product(objs)
        return Universal(cone.obj, tuple(OpMorphism.of(p) for p in cone.legs))

    def copair(self, cocone, maps, target=None):
        cone = Universal(cocone.obj, tuple(i.data for i in cocone.legs))
        return OpMorphism.of(self.base.pair(cone, [m.data for m in maps], source=target))

    def product(self, objs):
        cocone = self.base.coproduct(objs)
        return Universal(cocone.obj, tuple(OpMorphism.of(i) for i in cocone.legs))

    def pair(self, cone, maps, source=None):
        cocone = Universal(cone.obj, tuple(p.data for p in cone.legs))
        return OpMorphism.of(self.base.copair(cocone, [m.data for m in maps], target=source))

    def image(self, f):
        fac = self.base.coimage(f.data)
        return Factorization(OpMorphism.of(fac.mono_part), fac.middle,
                             OpMorphism.of(fac.epi_part))

    def coimage(self, f):
        fac = self.base.image(f.data)
        return Factorization(OpMorphism.of(fac.mono_part), fac.middle,
                             OpMorphism.of(fac.epi_part))

    def find_isomorphism(self, A, B):
        f = self.base.find_isomorphism(B, A)
        return None if f is None else OpMorphism.of(f)

    def object_data(self, A):
        return self.base.object_data(A)

    def morphism_data(self, f):
        return {"opposite_of": self.base.morphism_data(f.data)}


def underlying(f):
    """Strip opposite wrappers: the morphism of the concrete base category."""
    while isinstance(f, OpMorphism):
        f = f.data
    return f


def concrete_base(cat: Category) -> Category:
    while isinstance(cat, Opposite):
        cat = cat.base
    return cat


# ---------------------------------------------------------------------------
# universal-property verifiers


def _legs_ok(cat, legs, objs):
    return all(leg is not None for leg in legs) and len(legs) == len(objs)


def verify_coproduct(cat, objs, cocone: Universal, bound=None) -> VerificationTranscript:
    bound = cat.bound if bound is None else bound
    checks = {"legs_typed": all(i.dom == A and i.cod == cocone.obj
                                for i, A in zip(cocone.legs, objs)) and _legs_ok(cat, cocone.legs, objs)}

    def problems():
        for T in cat.objects(bound):
            homs = [cat.hom(A, T) for A in objs]
            for fam in itertools.product(*homs):
                yield MediatorProblem(
                    f"cocone into {cat.describe(T)}", cocone.obj, T,
                    lambda u, fam=fam: all(cat.compose(u, i) == f
                                           for i, f in zip(cocone.legs, fam)),
                    {"family": fam})
    return verify_unique_mediator(cat, cat.describe(cocone.obj), problems(), bound, checks)


def verify_product(cat, objs, cone: Universal, bound=None) -> VerificationTranscript:
    bound = cat.bound if bound is None else bound
    checks = {"legs_typed": all(p.cod == A and p.dom == cone.obj
                                for p, A in zip(cone.legs, objs)) and _legs_ok(cat, cone.legs, objs)}

    def problems():
        for T in cat.objects(bound):
            homs = [cat.hom(T, A) for A in objs]
            for fam in itertools.product(*homs):
                yield MediatorProblem(
                    f"cone from {cat.describe(T)}", T, cone.obj,
                    lambda u, fam=fam: all(cat.compose(p, u) == f
                                           for p, f in zip(cone.legs, fam)),
                    {"family": fam})
    return verify_unique_mediator(cat, cat.describe(cone.obj), problems(), bound, checks)


def verify_image(cat, f, fac: Factorization, bound=None) -> VerificationTranscript:
    """Image: ``m`` mono, ``f = m e``, and initial among mono factorizations."""
    bound = cat.bound if bound is None else bound
    e, m = fac.epi_part, fac.mono_part
    checks = {"factors": cat.compose(m, e) == f, "mono_part_is_mono": cat.is_mono(m)}

    def problems():
        for I2 in cat.objects(bound):
            for m2 in cat.hom(I2, f.cod):
                if not cat.is_mono(m2):
                    continue
                if not any(cat.compose(m2, e2) == f for e2 in cat.hom(f.dom, I2)):
                    continue
                yield MediatorProblem(
                    f"mono factorization through {cat.describe(I2)}", fac.middle, I2,
                    lambda v, m2=m2: cat.compose(m2, v) == m, {"mono": m2})
    return verify_unique_mediator(cat, cat.describe(fac.middle), problems(), bound, checks)


def verify_coimage(cat, f, fac: Factorization, bound=None) -> VerificationTranscript:
    """Coimage: ``e`` epi, ``f = m e``, and terminal among epi factorizations.

    For every epi ``e2: X -> C2`` through which ``f`` factors there must be a
    unique ``v: C2 -> C`` with ``e = v e2``.
    """
    bound = cat.bound if bound is None else bound
    e, m = fac.epi_part, fac.mono_part
    checks = {"factors": cat.compose(m, e) == f, "epi_part_is_epi": cat.is_epi(e)}

    def problems():
        for C2 in cat.objects(bound):
            for e2 in cat.hom(f.dom, C2):
                if not cat.is_epi(e2):
                    continue
                if not any(cat.compose(m2, e2) == f for m2 in cat.hom(C2, f.cod)):
                    continue
                yield MediatorProblem(
                    f"epi factorization through {cat.describe(C2)}", C2, fac.middle,
                    lambda v, e2=e2: cat.compose(v, e2) == e, {"epi": e2})
    return verify_unique_mediator(cat, cat.describe(fac.middle), problems(), bound, checks)


def verify_colimit(cat, d: DiagramOverPoset, cocone: Universal, bound=None) -> VerificationTranscript:
    bound = cat.bound if bound is None else bound
    legs = dict(zip(d.index, cocone.legs))
    checks = {"cocone_commutes": all(cat.compose(legs[j], f) == legs[i]
                                     for (i, j), f in d.edges.items())}

    def problems():
        for T in cat.objects(bound):
            homs = [cat.hom(d.node_objects[i], T) for i in d.index]
            for fam in itertools.product(*homs):
                famd = dict(zip(d.index, fam))
                if not all(cat.compose(famd[j], f) == famd[i] for (i, j), f in d.edges.items()):
                    continue
                yield MediatorProblem(
                    f"compatible cocone into {cat.describe(T)}", cocone.obj, T,
                    lambda u, famd=famd: all(cat.compose(u, legs[i]) == famd[i] for i in d.index),
                    {"family": fam})
    return verify_unique_mediator(cat, cat.describe(cocone.obj), problems(), bound, checks)


# ---------------------------------------------------------------------------
# search fallbacks (used when a category has no closed form)


def search_image(cat, f, bound=None) -> Factorization:
    bound = cat.bound if bound is None else bound
    for I in cat.objects(bound):
        for m in cat.hom(I, f.cod):
            if not cat.is_mono(m):
                continue
            for e in cat.hom(f.dom, I):
                if cat.compose(m, e) != f:
                    continue
                fac = Factorization(e, I, m)
                if verify_image(cat, f, fac, bound).passed:
                    return fac
    raise NotRepresentable(f"no image of {f!r} within bound {bound}")


def search_coimage(cat, f, bound=None) -> Factorization:
    bound = cat.bound if bound is None else bound
    for C in cat.objects(bound):
        for e in cat.hom(f.dom, C):
            if not cat.is_epi(e):
                continue
            for m in cat.hom(C, f.cod):
                if cat.compose(m, e) != f:
                    continue
                fac = Factorization(e, C, m)
                if verify_coimage(cat, f, fac, bound).passed:
                    return fac
    raise NotRepresentable(f"no coimage of {f!r} within bound {bound}")


class HomCache:
    """Memoized hom-sets of a category (per instance, per session)."""

    def __init__(self, cat):
        self.cat = cat
        self._data = {}

    def __call__(self, A, B):
        key = (A, B)
        if key not in self._data:
            self._data[key] = self.cat.hom(A, B)
        return self._data[key]


def poset_of_subsets(items: Sequence) -> list:
    """Nonempty subsets of ``items`` as sorted index tuples, ordered by (size, lex)."""
    n = len(items)
    out = []
    for r in range(1, n + 1):
        out.extend(itertools.combinations(range(n), r))
    return out
