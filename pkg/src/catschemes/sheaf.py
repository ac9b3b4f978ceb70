"""Finite-scale structure-sheaf oracle for finite commutative rings.

Sections over a set ``U`` of primes are the subring of ``prod_{p in U} A_p``
generated by ``rho(A)`` and the inverses of those ``rho(a)`` that are units.
These are compared with classical localizations ``A_f`` on distinguished
opens and with the contravariant global object.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import TableMorphism
from .errors import AxiomViolation
from .global_scheme import _close, global_object
from .instances.fincring import (FinCRing, ProductRing, classical_localization, closure,
                                 fraction_ring, local_factors, prime_ideals, subring_from_set)
from .localize import BasePointedSubcat
from .points import BasePointConfig, pts


@dataclass
class SpecSpace:
    ring: object
    fields: list
    primes: list
    opens: list
    points: list
    missed: list = field(default_factory=list)
    _sections: dict = field(default_factory=dict, repr=False)
    _isos: dict = field(default_factory=dict, repr=False)

    def section(self, U) -> "PresheafSection":
        U = frozenset(U)
        if U not in self._sections:
            self._sections[U] = intro_presheaf(self, U)
        return self._sections[U]

    def isomorphism(self, R, S):
        key = (R.key, S.key)
        if key not in self._isos:
            self._isos[key] = FinCRing(max(64, R.size, S.size)).find_isomorphism(R, S)
        return self._isos[key]


@dataclass
class PresheafSection:
    open_set: frozenset
    ambient: object
    section_ring: object
    rho: TableMorphism
    localizations: list

    @property
    def inclusion(self) -> TableMorphism:
        return TableMorphism(self.section_ring, self.ambient, self.section_ring.elements)


def _kernel(x):
    return frozenset(a for a, v in zip(x.dom.elements, x.data) if v == x.cod.zero)


def build_spec(A, fields) -> SpecSpace:
    """Primes as kernels of maps to the listed fields, plus the Zariski opens."""
    C = FinCRing(max(64, A.size))
    points = []
    for F in fields:
        points.extend(C.hom(A, F))
    primes = []
    for x in points:
        k = _kernel(x)
        if k not in primes:
            primes.append(k)
    order = {p: i for i, p in enumerate(prime_ideals(A))}
    primes.sort(key=lambda p: order[p])
    missed = [p for p in order if p not in primes]
    basic = [frozenset(i for i, p in enumerate(primes) if f not in p) for f in A.elements]
    return SpecSpace(A, list(fields), primes, _close(basic, len(primes)), points, missed)


def distinguished(spec: SpecSpace, f) -> frozenset:
    return frozenset(i for i, p in enumerate(spec.primes) if f not in p)


def unit_inverse(R, a):
    """Two-sided inverse of ``a`` by exhaustive search (componentwise in products)."""
    if isinstance(R, ProductRing):
        parts = []
        for F, x in zip(R.factors, a):
            y = unit_inverse(F, x)
            if y is None:
                return None
            parts.append(y)
        return tuple(parts)
    return R.inverse_of(a)


def intro_presheaf(spec: SpecSpace, U) -> PresheafSection:
    A = spec.ring
    U = frozenset(U)
    if any(not (0 <= i < len(spec.primes)) for i in U):
        raise AxiomViolation("open set names a non-existent prime", sorted(U))
    locs = [classical_localization(A, spec.primes[i], name=f"({A.name})_p{i}")
            for i in sorted(U)]
    amb = ProductRing([L for L, _ in locs])
    rho = TableMorphism(A, amb, tuple(tuple(r(a) for _, r in locs) for a in A.elements))
    gens = set(rho.data)
    for v in rho.data:
        inv = unit_inverse(amb, v)
        if inv is not None:
            gens.add(inv)
    S = closure(amb, sorted(gens, key=repr))
    sec = subring_from_set(amb, S, name=f"O({sorted(U)})")
    return PresheafSection(U, amb, sec, rho, locs)


def restriction(spec: SpecSpace, big: PresheafSection, small: PresheafSection):
    """Restriction ``section(V) -> section(U)`` for ``U`` inside ``V``.

    Returns the morphism and whether it commutes with both ``rho`` maps.
    """
    if not small.open_set <= big.open_set:
        raise AxiomViolation("restriction needs U contained in V")
    Vs = sorted(big.open_set)
    pos = [Vs.index(i) for i in sorted(small.open_set)]
    table = tuple(tuple(x[j] for j in pos) for x in big.section_ring.elements)
    members = set(small.section_ring.elements)
    if any(t not in members for t in table):
        raise AxiomViolation("restriction does not land in the smaller section ring")
    res = TableMorphism(big.section_ring, small.section_ring, table)
    commutes = all(res(b) == s for b, s in zip(big.rho.data, small.rho.data))
    return res, commutes


def compare_distinguished(spec: SpecSpace, f) -> dict:
    """Sections over ``D(f)`` against the classical ``A_f``."""
    A = spec.ring
    U = distinguished(spec, f)
    sec = spec.section(U)
    powers, x = [], A.one
    while x not in powers:
        powers.append(x)
        x = A.mul(x, f)
    Af, rho_f = fraction_ring(A, powers, name=f"{A.name}[1/{f}]")
    witness = spec.isomorphism(sec.section_ring, Af)
    return {"f": f, "D_f": sorted(U), "section": sec, "A_f": Af, "rho_f": rho_f,
            "isomorphic": witness is not None, "witness": witness,
            "sizes": (sec.section_ring.size, Af.size)}


def crosscheck_global(spec: SpecSpace, cfg: BasePointConfig | None = None,
                      subcat: BasePointedSubcat | None = None, report=None, **gopts) -> dict:
    """Global object versus sections over the full spectrum versus image of gamma.

    ``report`` may carry an already computed global object for ``spec.ring``.
    """
    A = spec.ring
    C = FinCRing(max(64, A.size))
    cfg = cfg or BasePointConfig(C, spec.fields, "contravariant")
    subcat = subcat or BasePointedSubcat("local_rings", cfg, max(64, A.size))
    g = report if report is not None else global_object(A, cfg, subcat, **gopts)
    sec = spec.section(range(len(spec.primes)))
    image = g.factorization.middle
    Rc = cfg.category
    w1 = Rc.find_isomorphism(A, g.script_O)
    w2 = Rc.find_isomorphism(sec.section_ring, g.script_O)
    w3 = Rc.find_isomorphism(image, A)
    return {"global": g, "section": sec, "script_O_iso_A": w1, "section_iso_script_O": w2,
            "image_iso_A": w3, "passed": all(w is not None for w in (w1, w2, w3)),
            "missed_primes": [sorted(p, key=repr) for p in spec.missed]}


def point_count(spec: SpecSpace) -> int:
    return len(pts(spec.ring, BasePointConfig(FinCRing(max(64, spec.ring.size)), spec.fields,
                                              "contravariant")))


def local_factor_primes(A) -> list:
    """Primes read off the local factors (cross-check of ``build_spec``)."""
    factors, _ = local_factors(A)
    out = []
    for e, R in factors:
        m = R.maximal_ideal
        out.append(frozenset(a for a in A.elements if A.mul(e, a) in m))
    return out
