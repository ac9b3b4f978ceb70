"""Global objects, affinity, sub objects, topologies, schemes, and the
coproduct/colimit comparison over finite point sets.

In the working category the canonical morphism is always
``gamma: O(X) -> X`` out of the coproduct of the localizations and the
global object is the middle of its coimage.  For the contravariant
orientation this is, concretely, the product of the localizations with
``gamma: X -> O(X)`` and the image of ``gamma``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import DiagramOverPoset, Universal, poset_of_subsets
from .errors import (AllPointsSkipped, AxiomViolation, CategoryError,
                     MissingConnectingMorphism, NoColimit, NoLocalization)
from .localize import (BasePointedSubcat, LocalizationCertificate, closed_form_localize,
                       closed_form_localize_multi, localization_or_error, localize_multi, FOUND)
from .points import BasePointConfig, Point, point_image, pts

SINGLE, ASSOCIATIVE = "single", "associative"
STRICT, PERMISSIVE = "strict", "permissive"


@dataclass
class GlobalObjectReport:
    X: object
    mode: str
    components: list
    O_of_X: object
    legs: tuple
    gamma: object
    factorization: object
    script_O: object
    affine: bool
    iso_witness: object
    skipped_points: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    index: list = field(default_factory=list)


def _component(X, M, subcat, mode, method, hom):
    if mode == SINGLE:
        return localization_or_error(X, M[0], subcat, method, hom)
    if method == "closed_form":
        return closed_form_localize_multi(X, M, subcat, hom)
    res = localize_multi(X, M, subcat, hom)
    if res.status != FOUND:
        raise NoLocalization(f"exhaustive localization {res.status}")
    return res.certificate


def global_object(X, cfg: BasePointConfig, subcat: BasePointedSubcat, mode: str = SINGLE,
                  strictness: str = PERMISSIVE, method: str = "closed_form",
                  hom=None) -> GlobalObjectReport:
    """Build ``O(X)``, ``gamma``, its coimage (resp. image) and the affinity verdict."""
    if mode not in (SINGLE, ASSOCIATIVE):
        raise AxiomViolation("mode must be single or associative", mode)
    if strictness not in (STRICT, PERMISSIVE):
        raise AxiomViolation("strictness must be strict or permissive", strictness)
    W = cfg.working
    P = pts(X, cfg).points
    if mode == SINGLE:
        index = [(i,) for i in range(len(P))]
    else:
        index = poset_of_subsets(P)
    comps, skipped, used, failed = [], [], [], []
    for M in index:
        marks = tuple(P[i] for i in M)
        try:
            cert = _component(X, marks, subcat, mode, method, hom)
        except NoLocalization as exc:
            skipped.append((M, str(exc)))
            failed.append((M, marks, exc))
            continue
        comps.append(cert)
        used.append(M)
    if strictness == STRICT and failed:
        # name every failing point, not only the first one met
        names = [cfg.category.morphism_data(marks[0].arrow) if len(M) == 1 else list(M)
                 for M, marks, _ in failed]
        err = NoLocalization(f"no localization at point(s) {names}: {failed[0][2]}",
                             point=failed[0][1][0], transcript=failed[0][2].transcript)
        err.points = [marks[0] if len(M) == 1 else marks for M, marks, _ in failed]
        raise err
    if not comps:
        raise AllPointsSkipped(f"no point of {cfg.category.describe(X)} localizes")
    cocone = W.coproduct([c.localized for c in comps])
    gamma = W.copair(cocone, [c.rho for c in comps])
    fac = W.coimage(gamma)
    witness = W.find_isomorphism(fac.middle, X)
    checks = {
        "gamma_restricts_to_rho": all(W.compose(gamma, leg) == c.rho
                                      for leg, c in zip(cocone.legs, comps)),
        "factorization_composes": W.compose(fac.mono_part, fac.epi_part) == gamma,
        "epi_part_is_epi": W.is_epi(fac.epi_part),
    }
    if witness is not None:
        checks["witness_is_iso"] = W.is_iso(witness)
    return GlobalObjectReport(X, mode, comps, cocone.obj, cocone.legs, gamma, fac, fac.middle,
                              witness is not None, witness, skipped, checks, used)


# ---------------------------------------------------------------------------
# topologies


@dataclass
class TopologySpec:
    kind: str
    n_points: int
    opens: list | None
    cover_only: bool = False

    def is_open(self, S) -> bool:
        if self.kind == "discrete":
            return True
        return frozenset(S) in set(self.opens)

    def materialized(self) -> list:
        if self.opens is not None:
            return self.opens
        return [frozenset(c) for r in range(self.n_points + 1)
                for c in itertools.combinations(range(self.n_points), r)]


DISCRETE_MATERIALIZE_LIMIT = 10


def _close(opens, n):
    full = frozenset(range(n))
    S = set(opens) | {frozenset(), full}
    changed = True
    while changed:
        changed = False
        cur = list(S)
        for a in cur:
            for b in cur:
                for c in (a | b, a & b):
                    if c not in S:
                        S.add(c)
                        changed = True
    return _sorted_opens(S)


def _sorted_opens(S):
    return sorted(S, key=lambda o: (len(o), sorted(o)))


def distinguished_open(A, points, f) -> frozenset:
    """``D(f)``: indices of points ``x`` (ring maps to fields) with ``x(f) != 0``."""
    return frozenset(i for i, p in enumerate(points) if p.arrow(f) != p.base.zero)


def make_topology(X, cfg: BasePointConfig, kind: str = "discrete", opens=None,
                  cover_only: bool = False) -> TopologySpec:
    P = pts(X, cfg).points
    n = len(P)
    if kind == "discrete":
        mat = None if n > DISCRETE_MATERIALIZE_LIMIT else _close(
            [frozenset([i]) for i in range(n)], n)
        return TopologySpec("discrete", n, mat)
    if kind == "zariski":
        from .instances.fincring import FinCRing
        if not (isinstance(cfg.category, FinCRing) and cfg.contravariant):
            raise AxiomViolation("zariski topology needs FinCRing in the contravariant orientation")
        basic = [distinguished_open(X, P, f) for f in X.elements]
        return TopologySpec("zariski", n, _close(basic, n))
    if kind == "explicit":
        given = [frozenset(o) for o in (opens or [])]
        for o in given:
            if any(not (0 <= i < n) for i in o):
                raise AxiomViolation("open set names a non-existent point", sorted(o))
        if cover_only:
            union = frozenset().union(*given) if given else frozenset()
            if union != frozenset(range(n)):
                raise AxiomViolation("family does not cover the point set")
            return TopologySpec("explicit", n, _sorted_opens(set(given)), True)
        S = set(given)
        full = frozenset(range(n))
        for need in (frozenset(), full):
            if need not in S:
                raise AxiomViolation("topology is missing a required open", sorted(need))
        for a in given:
            for b in given:
                for c, op in ((a | b, "union"), (a & b, "intersection")):
                    if c not in S:
                        raise AxiomViolation(f"opens not closed under {op}", (sorted(a), sorted(b)))
        return TopologySpec("explicit", n, _sorted_opens(S))
    raise AxiomViolation("unknown topology kind", kind)


# ---------------------------------------------------------------------------
# sub objects and schemes


@dataclass
class SubObjectWitness:
    u_arrow: object
    U: object
    point_map: list
    injective: bool
    open: bool | None

    @property
    def range(self) -> frozenset:
        return frozenset(self.point_map)


def sub_object(u_arrow, X, cfg: BasePointConfig, topo: TopologySpec | None = None) -> SubObjectWitness:
    """Point map induced by ``u_arrow`` (concrete ``U -> X``, or ``X -> U`` contravariantly)."""
    U = u_arrow.cod if cfg.contravariant else u_arrow.dom
    tgt = u_arrow.dom if cfg.contravariant else u_arrow.cod
    if tgt != X:
        raise AxiomViolation("arrow does not end at X", cfg.category.describe(tgt))
    uw = cfg.to_working(u_arrow)
    PX = pts(X, cfg).points
    index = {p: i for i, p in enumerate(PX)}
    pm = [index[point_image(uw, p, cfg)] for p in pts(U, cfg).points]
    inj = len(set(pm)) == len(pm)
    is_open = None if topo is None else topo.is_open(pm)
    return SubObjectWitness(u_arrow, U, pm, inj, is_open)


@dataclass
class SchemeVerdict:
    scheme: bool
    covers: bool
    elements: list


def scheme_check(X, cfg: BasePointConfig, subcat: BasePointedSubcat, topo: TopologySpec,
                 cover, **gopts) -> SchemeVerdict:
    """Each cover element must be an open sub object with affine global object."""
    rows = []
    covered = set()
    for k, u in enumerate(cover):
        row = {"index": k}
        try:
            w = sub_object(u, X, cfg, topo)
            row.update(sub_object=w.injective, open=bool(w.open), point_range=sorted(w.range),
                       witness=w)
            covered |= w.range
            g = global_object(w.U, cfg, subcat, **gopts)
            row.update(affine=g.affine, report=g)
            row["ok"] = w.injective and bool(w.open) and g.affine
        except CategoryError as exc:
            row.update(error=f"cover element {k}: {type(exc).__name__}: {exc}", ok=False)
        rows.append(row)
    n = len(pts(X, cfg).points)
    covers = covered == set(range(n))
    return SchemeVerdict(covers and all(r["ok"] for r in rows), covers, rows)


# ---------------------------------------------------------------------------
# coproduct versus directed colimit


@dataclass
class LemmaReport:
    X: object
    subsets: list
    components: dict
    skipped: list
    coproduct: Universal
    discrete_colimit: Universal
    discrete_matches_coproduct: bool
    connecting: dict
    missing: list
    inclusion_colimit: Universal | None
    comparison: object | None
    comparison_is_iso: bool | None
    abstractly_isomorphic: bool | None
    checks: dict = field(default_factory=dict)


def connecting_morphisms(W, cfg, cM: LocalizationCertificate, cN: LocalizationCertificate,
                         positions, hom=None):
    """All ``phi: X_M -> X_N`` with ``rho_N phi = rho_M`` sending mark i to mark positions[i]."""
    hom = hom or W.hom
    out = []
    for phi in hom(cM.localized, cN.localized):
        if W.compose(cN.rho, phi) != cM.rho:
            continue
        ok = True
        for i, j in enumerate(positions):
            lhs = W.compose(phi, cM.marks[i].working)
            m = cN.marks[j]
            if not any(W.compose(m.working, b) == lhs
                       for b in cfg.base_isos(cM.marks[i].base, m.base)):
                ok = False
                break
        if ok:
            out.append(phi)
    return out


def lemma_compare(X, cfg: BasePointConfig, subcat: BasePointedSubcat, method: str = "closed_form",
                  strictness: str = PERMISSIVE, raise_missing: bool = False, hom=None) -> LemmaReport:
    """Compare ``coprod_M X_M`` with the colimit of ``M -> X_M`` over inclusions."""
    W = cfg.working
    if cfg.contravariant or not W.has_colimits:
        raise NoColimit("the comparison needs a covariant instance with directed colimits")
    P = pts(X, cfg).points
    comps, skipped = {}, []
    for M in poset_of_subsets(P):
        marks = tuple(P[i] for i in M)
        try:
            comps[M] = _component(X, marks, subcat, ASSOCIATIVE, method, hom)
        except NoLocalization as exc:
            if strictness == STRICT:
                raise
            skipped.append((M, str(exc)))
    # a point-free object gives the empty family, whose two sides are both initial
    if skipped and not comps:
        raise AllPointsSkipped(f"no finite point set of {cfg.category.describe(X)} localizes")
    index = list(comps)
    objs = {M: comps[M].localized for M in index}
    cop = W.coproduct([objs[M] for M in index])
    disc = W.colimit_directed(DiagramOverPoset(index, objs, {}))
    connecting, missing = {}, []
    for M in index:
        for N in index:
            if M != N and set(M) < set(N):
                found = connecting_morphisms(W, cfg, comps[M], comps[N],
                                             [N.index(i) for i in M], hom)
                if not found:
                    missing.append((M, N))
                    if raise_missing:
                        raise MissingConnectingMorphism(f"no connecting morphism X_{M} -> X_{N}")
                else:
                    connecting[M, N] = found
    checks = {"connecting_unique": all(len(v) == 1 for v in connecting.values())}
    incl = comparison = None
    comp_iso = abstract = None
    if not missing:
        d = DiagramOverPoset(index, objs, {k: v[0] for k, v in connecting.items()})
        checks["diagram_functorial"] = d.check_functorial(W)
        incl = W.colimit_directed(d)
        legs = dict(zip(index, incl.legs))
        checks["cocone_commutes"] = all(W.compose(legs[N], f) == legs[M]
                                        for (M, N), f in d.edges.items())
        comparison = W.copair(cop, [legs[M] for M in index], incl.obj)
        comp_iso = W.is_iso(comparison)
        abstract = W.find_isomorphism(cop.obj, incl.obj) is not None
    disc_match = W.find_isomorphism(cop.obj, disc.obj) is not None
    return LemmaReport(X, index, comps, skipped, cop, disc, disc_match, connecting, missing,
                       incl, comparison, comp_iso, abstract, checks)


__all__ = ["GlobalObjectReport", "global_object", "TopologySpec", "make_topology",
           "SubObjectWitness", "sub_object", "SchemeVerdict", "scheme_check", "LemmaReport",
           "lemma_compare", "connecting_morphisms", "distinguished_open", "Point",
           "closed_form_localize"]
