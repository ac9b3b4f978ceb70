"""Base-pointed subcategories and localization by universal property.

Conventions (all in the working category, where points are arrows ``P -> X``):

* a pointed object is ``(C, marks)`` with ``marks`` a tuple of points of ``C``;
* a candidate ``(C, marks, rho)`` satisfies ``rho . m_i = x_i . b_i`` for some
  isomorphisms ``b_i`` between base objects;
* a test ``(L, l, gamma)`` is any member with ``gamma . l_i = x_i . b'_i``;
* a mediator is ``kappa: L -> C`` with ``kappa . l_i = m_i . b''_i`` and
  ``rho . kappa = gamma``.

The candidate passes when every test has exactly one mediator.  All verdicts
hold up to the subcategory's enumeration bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from sympy import isprime

from .core import (HomCache, MediatorProblem, VerificationTranscript, concrete_base,
                   verify_unique_mediator)
from .errors import AxiomViolation, CategoryError, NoLocalization, NotEnoughPoints
from .points import BasePointConfig, Point, point_image, pts

SINGLE_KINDS = ("prime_cyclic", "local_rings", "spanned", "singleton_sets", "explicit")
MULTI_ALIASES = {"semilocal_rings": "local_rings", "generated_prime_order": "prime_cyclic",
                 "sets_equal_marks": "singleton_sets"}

FOUND, ABSENT, AMBIGUOUS = "found", "absent", "ambiguous"


@dataclass(frozen=True)
class PointedObject:
    obj: object
    marks: tuple

    @property
    def point(self) -> Point:
        return self.marks[0]


@dataclass
class LocalizationCertificate:
    localized: object
    marks: tuple
    rho: object
    bottoms: tuple
    transcript: VerificationTranscript
    method: str = "exhaustive"
    points: tuple = ()

    @property
    def local_point(self) -> Point:
        return self.marks[0]

    @property
    def marked(self) -> tuple:
        return self.marks


MultiPointCertificate = LocalizationCertificate


@dataclass
class LocalizationResult:
    status: str
    certificates: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    points: tuple = ()

    @property
    def certificate(self):
        return self.certificates[0] if self.certificates else None

    @property
    def found(self) -> bool:
        return self.status != ABSENT

    @property
    def ambiguous(self) -> bool:
        return self.status == AMBIGUOUS


@dataclass
class ExclusionSet:
    r: int
    excluded: list


# ---------------------------------------------------------------------------
# subcategories


class BasePointedSubcat:
    """A finite, deterministically enumerated base-pointed subcategory.

    ``members(r)`` returns the r-pointed objects.  For ``r = 1`` the marked
    point is the fixed base point of the object; for ``r > 1`` one
    representative per isomorphism class of marking is kept.
    """

    def __init__(self, kind: str, cfg: BasePointConfig, bound: int = 16, explicit=None):
        kind = MULTI_ALIASES.get(kind, kind)
        if kind not in SINGLE_KINDS:
            raise AxiomViolation("unknown subcategory kind", kind)
        self.kind = kind
        self.cfg = cfg
        self.bound = bound
        self.explicit = list(explicit or [])
        self._members = {}

    def __repr__(self):
        return f"BasePointedSubcat({self.kind!r}, bound={self.bound})"

    @property
    def W(self):
        return self.cfg.working

    def members(self, r: int = 1) -> list:
        if r not in self._members:
            self._members[r] = self._enumerate(r)
            self._check_members(self._members[r])
        return self._members[r]

    def _check_members(self, members):
        for m in members:
            P = pts(m.obj, self.cfg)
            if any(p not in P.points for p in m.marks):
                raise AxiomViolation("subcategory member marks a non-point",
                                     self.cfg.category.describe(m.obj))

    # -- enumeration -----------------------------------------------------
    def _enumerate(self, r):
        if self.kind == "explicit":
            return [m for m in self.explicit if len(m.marks) == r]
        if r == 1:
            return getattr(self, f"_single_{self.kind}")()
        return getattr(self, f"_multi_{self.kind}")(r)

    def _objects(self):
        return self.cfg.category.objects(self.bound)

    def _single_prime_cyclic(self):
        from .instances.finab import FREE, FinAbObj
        C = self.cfg.category
        out = []
        for p in range(2, self.bound + 1):
            if isprime(p):
                G = FinAbObj((p,))
                out.append(PointedObject(G, (Point(FREE, C.element_point(G, (1,)), self.cfg.orientation),)))
        return out

    def _single_spanned(self):
        out = []
        for L in self._objects():
            for p in pts(L, self.cfg):
                if self.W.is_epi(p.working):
                    out.append(PointedObject(L, (p,)))
                    break
        return out

    def _single_singleton_sets(self):
        out = []
        for L in self._objects():
            if self.cfg.category.size(L) == 1:
                P = pts(L, self.cfg)
                if P.points:
                    out.append(PointedObject(L, (P.points[0],)))
        return out

    def _single_local_rings(self):
        from .instances.fincring import FinCRing
        C = self.cfg.category
        if not isinstance(C, FinCRing) or not self.cfg.contravariant:
            raise AxiomViolation("local_rings requires FinCRing in the contravariant orientation")
        out = []
        for L in C.local_objects(self.bound):
            for F in self.cfg.base_objects:
                if F.size * len(L.maximal_ideal) != L.size:
                    continue
                surj = [h for h in C.hom(L, F) if C.is_surjective(h)]
                if surj:
                    out.append(PointedObject(L, (Point(F, surj[0], self.cfg.orientation),)))
                    break
        return out

    def _orbit_members(self, objects, r, valid):
        """Markings of r distinct points satisfying ``valid``, one per orbit.

        Markings related by an automorphism of the object and base-object
        isomorphisms on the individual marks are identified.
        """
        W, cfg = self.W, self.cfg
        out = []
        for L in objects:
            P = pts(L, cfg).points
            if len(P) < r:
                continue
            index = {p: i for i, p in enumerate(P)}
            auts = automorphisms(W, L)
            twist = {}
            for a in auts:
                for i, p in enumerate(P):
                    moved = point_image(a, p, cfg)
                    best = min(index[Point.from_working(
                        moved.base, W.compose(moved.working, b), cfg.orientation)]
                        for b in cfg.base_isos(p.base, p.base))
                    twist[a, i] = best
            for combo in itertools.permutations(range(len(P)), r):
                marks = tuple(P[i] for i in combo)
                if not valid(L, marks):
                    continue
                canon = min(tuple(twist[a, i] for i in combo) for a in auts)
                if canon == combo:
                    out.append(PointedObject(L, marks))
        return out

    def _multi_spanned(self, r):
        from .instances.finvect import FinVect
        C = self.cfg.category
        if isinstance(C, FinVect) and not self.cfg.contravariant:
            return _rref_markings(C, r, self.bound)
        W = self.W

        def valid(L, marks):
            return _jointly_epi(W, L, marks)
        return self._orbit_members(self._objects(), r, valid)

    def _multi_singleton_sets(self, r):
        C = self.cfg.category
        out = []
        for L in self._objects():
            if C.size(L) != r:
                continue
            P = pts(L, self.cfg).points
            # one marking per object: every ordering is isomorphic to this one
            marks = []
            for x in L.elements:
                marks.append(next(p for p in P if p.arrow.data == (x,)))
            out.append(PointedObject(L, tuple(marks)))
        return out

    def _multi_prime_cyclic(self, r):
        from .instances.finab import span

        def valid(L, marks):
            els = [m.arrow.data[0] for m in marks]
            if not all(isprime(L.element_order(g)) for g in els):
                return False
            return len(span(L.add, L.zero, els)) == L.order
        return self._orbit_members(self._objects(), r, valid)

    def _multi_local_rings(self, r):
        from .instances.fincring import FinCRing
        C = self.cfg.category
        if not isinstance(C, FinCRing) or not self.cfg.contravariant:
            raise AxiomViolation("local_rings requires FinCRing in the contravariant orientation")

        def valid(L, marks):
            kernels = {frozenset(a for a, v in zip(L.elements, m.arrow.data) if v == m.base.zero)
                       for m in marks}
            return len(kernels) == r and all(C.is_surjective(m.arrow) for m in marks)

        objs = [L for L in C.objects(self.bound)
                if len(getattr(L, "factors", (L,))) == r]
        return self._orbit_members(objs, r, valid)


def automorphisms(W, L) -> list:
    """Automorphisms of ``L`` in the working category."""
    from .core import OpMorphism, Opposite
    base = W.base if isinstance(W, Opposite) else W
    if hasattr(base, "automorphisms"):
        auts = base.automorphisms(L)
        if isinstance(W, Opposite):
            return [OpMorphism.of(a) for a in auts]
        return auts
    return [a for a in W.hom(L, L) if W.is_iso(a)]


def _jointly_epi(W, L, marks) -> bool:
    """Marks jointly epi: no two distinct arrows out of ``L`` agree on all marks."""
    C = concrete_base(W)
    # concrete shortcut: the images cover L (covariant) or the marks separate L (contravariant)
    if W is C:
        seen = set()
        for m in marks:
            seen.update(_arrow_image(C, m.arrow))
        return len(seen) == C.size(L)
    vals = [tuple(m.arrow(a) for m in marks) for a in L.elements]
    return len(set(vals)) == len(vals)


def _arrow_image(C, f):
    if hasattr(C, "image_set"):
        return C.image_set(f)
    return {f(a) for a in f.dom.elements}


def _rref_markings(C, r, bound):
    """Spanning markings of ``k^n`` by r distinct vectors, one per GL_n-orbit (RREF)."""
    from .instances.finvect import LinearMap
    F, q = C.field, C.field.q
    out = []
    P = C.space(1)
    n = 0
    while q ** n <= bound and n <= r:
        V = C.space(n)
        for piv in itertools.combinations(range(r), n):
            free = [(i, j) for i in range(n) for j in range(r)
                    if j > piv[i] and j not in piv]
            for vals in itertools.product(range(q), repeat=len(free)):
                M = [[0] * r for _ in range(n)]
                for i, c in enumerate(piv):
                    M[i][c] = 1
                for (i, j), v in zip(free, vals):
                    M[i][j] = v
                cols = [tuple(M[i][j] for i in range(n)) for j in range(r)]
                if len(set(cols)) != r:
                    continue
                marks = tuple(Point(P, LinearMap(P, V, tuple((c[i],) for i in range(n))))
                              for c in cols)
                out.append(PointedObject(V, marks))
        n += 1
    return out


# ---------------------------------------------------------------------------
# the universal property


class _Engine:
    """Candidate and test enumeration for one ``(X, points)`` query."""

    def __init__(self, X, xs, subcat: BasePointedSubcat, hom=None):
        self.X, self.xs, self.subcat = X, tuple(xs), subcat
        self.cfg = subcat.cfg
        self.W = subcat.W
        self.hom = hom or HomCache(self.W)

    def square(self, rho, mark, x):
        """An iso ``b`` with ``rho . mark = x . b``, or ``None``."""
        W = self.W
        lhs = W.compose(rho, mark.working)
        for b in self.cfg.base_isos(mark.base, x.base):
            if W.compose(x.working, b) == lhs:
                return b
        return None

    def bottoms(self, rho, marks, targets):
        out = []
        for m, x in zip(marks, targets):
            b = self.square(rho, m, x)
            if b is None:
                return None
            out.append(b)
        return tuple(out)

    @cached_property
    def members(self):
        return self.subcat.members(len(self.xs))

    @cached_property
    def tests(self):
        out = []
        for k, mem in enumerate(self.members):
            for g in self.hom(mem.obj, self.X):
                bs = self.bottoms(g, mem.marks, self.xs)
                if bs is not None:
                    out.append((k, mem, g, bs))
        return out

    def candidates(self):
        for k, mem in enumerate(self.members):
            for rho in self.hom(mem.obj, self.X):
                bs = self.bottoms(rho, mem.marks, self.xs)
                if bs is not None:
                    yield k, mem, rho, bs

    def problems(self, mem, rho):
        W = self.W
        for k, L, gamma, _ in self.tests:
            def accept(kappa, L=L, gamma=gamma):
                if W.compose(rho, kappa) != gamma:
                    return False
                return self.bottoms(kappa, L.marks, mem.marks) is not None
            yield MediatorProblem(f"member {k}: {self.cfg.category.describe(L.obj)}",
                                  L.obj, mem.obj, accept,
                                  {"member": k, "marks": L.marks, "gamma": gamma})

    def verify(self, mem, rho, bs, stop_on_failure=False):
        checks = {"square_commutes": self.bottoms(rho, mem.marks, self.xs) == bs,
                  "candidate_is_member": mem in self.members}
        return verify_unique_mediator(self.W, self.cfg.category.describe(mem.obj),
                                      self.problems(mem, rho), self.subcat.bound, checks,
                                      stop_on_failure=stop_on_failure, hom=self.hom)


def _check_points(X, xs, cfg):
    allp = pts(X, cfg).points
    for x in xs:
        if x not in allp:
            raise AxiomViolation("not a point of the object", cfg.category.describe(X))
    if len(set(xs)) != len(xs):
        raise AxiomViolation("marked points must be pairwise distinct")


def _localize(X, xs, subcat, hom=None, full_failures=False):
    cfg = subcat.cfg
    _check_points(X, xs, cfg)
    eng = _Engine(X, xs, subcat, hom)
    passing, failures, seen_members = [], [], set()
    for k, mem, rho, bs in eng.candidates():
        if k in seen_members:
            continue
        t = eng.verify(mem, rho, bs, stop_on_failure=not full_failures)
        if t.passed:
            seen_members.add(k)
            t = eng.verify(mem, rho, bs) if not full_failures else t
            passing.append(LocalizationCertificate(mem.obj, mem.marks, rho, bs, t,
                                                   "exhaustive", tuple(xs)))
        else:
            failures.append(t)
    classes = []
    W = subcat.W
    for cert in passing:
        for cls in classes:
            if W.find_isomorphism(cls[0].localized, cert.localized) is not None:
                cls.append(cert)
                break
        else:
            classes.append([cert])
    if not passing:
        return LocalizationResult(ABSENT, [], failures, tuple(xs))
    if len(classes) > 1:
        return LocalizationResult(AMBIGUOUS, [c[0] for c in classes], failures, tuple(xs))
    return LocalizationResult(FOUND, [classes[0][0]], failures, tuple(xs))


def localize(X, x: Point, subcat: BasePointedSubcat, hom=None) -> LocalizationResult:
    """Exhaustive localization of ``X`` at ``x`` within ``subcat``."""
    return _localize(X, (x,), subcat, hom)


def localize_multi(X, M, subcat: BasePointedSubcat, hom=None) -> LocalizationResult:
    """Exhaustive localization of ``X`` in the finite point set ``M``."""
    M = tuple(M)
    if not M:
        raise AxiomViolation("M must contain at least one point")
    if len(set(pts(X, subcat.cfg).points)) < len(M):
        raise NotEnoughPoints(f"{subcat.cfg.category.describe(X)} has fewer than {len(M)} points")
    return _localize(X, M, subcat, hom)


def exclusion_set(objects, r: int, cfg: BasePointConfig) -> ExclusionSet:
    return ExclusionSet(r, [X for X in objects if len(set(pts(X, cfg).points)) < r])


# ---------------------------------------------------------------------------
# closed forms


def _finish(eng, X, xs, C, marks, rho, kind):
    """Transport a constructed ``(C, marks, rho)`` onto a member and self-verify."""
    W, cfg = eng.W, eng.cfg
    point = xs[0] if len(xs) == 1 else None
    for mem in eng.members:
        if W.size(mem.obj) != W.size(C):
            continue
        if W.find_isomorphism(C, mem.obj) is None:
            continue
        for phi in eng.hom(mem.obj, C):
            if not W.is_iso(phi):
                continue
            if eng.bottoms(phi, mem.marks, marks) is None:
                continue
            rho2 = W.compose(rho, phi)
            bs = eng.bottoms(rho2, mem.marks, xs)
            if bs is None:
                continue
            t = eng.verify(mem, rho2, bs)
            if not t.passed:
                failing = t.failures()[0] if t.failures() else None
                detail = (f"; {failing.test} has {failing.count} mediators"
                          if failing else "")
                raise NoLocalization(
                    f"closed-form {kind} candidate {cfg.category.describe(mem.obj)} fails the "
                    f"universal property ({t.verdict}{detail})", point=point, transcript=t)
            return LocalizationCertificate(mem.obj, mem.marks, rho2, bs, t, "closed_form",
                                           tuple(xs))
    raise NoLocalization(f"closed-form {kind} candidate {cfg.category.describe(C)} is not a "
                         f"member of the subcategory at bound {eng.subcat.bound}", point=point)


def closed_form_localize(X, x: Point, subcat: BasePointedSubcat, hom=None) -> LocalizationCertificate:
    """Direct construction per subcategory kind, then self-verification.

    Raises :class:`NoLocalization` when the construction's precondition or
    its verification fails.
    """
    return closed_form_localize_multi(X, (x,), subcat, hom)


def closed_form_localize_multi(X, M, subcat: BasePointedSubcat, hom=None) -> LocalizationCertificate:
    M = tuple(M)
    cfg = subcat.cfg
    _check_points(X, M, cfg)
    eng = _Engine(X, M, subcat, hom)
    kind = subcat.kind
    point = M[0] if len(M) == 1 else None
    if kind == "explicit":
        raise NoLocalization("explicit subcategories have no closed form", point=point)
    C, marks, rho = globals()[f"_construct_{kind}"](eng, X, M)
    return _finish(eng, X, M, C, marks, rho, kind)


def _construct_prime_cyclic(eng, X, M):
    from .instances.finab import FREE, FinAbObj, GroupMorphism, normal_form_basis, span
    cfg = eng.cfg
    C = cfg.category
    gs = [x.arrow.data[0] for x in M]
    orders = [X.element_order(g) for g in gs]
    if len(M) == 1:
        n = orders[0]
        if n == 1:
            p = 2  # smallest prime p with p.x = 0
        elif isprime(n):
            p = n
        else:
            raise NoLocalization(f"element {gs[0]} has order {n}: no prime p with p.x = 0",
                                 point=M[0])
        G = FinAbObj((p,))
        rho = GroupMorphism(G, X, (gs[0],))
        return G, (Point(FREE, C.element_point(G, (1,)), cfg.orientation),), rho
    for x, n in zip(M, orders):
        if not isprime(n):
            raise NoLocalization(f"marked element {x.arrow.data[0]} has non-prime order {n}")
    S = span(X.add, X.zero, gs)
    G, basis = normal_form_basis(sorted(S), X.add, X.zero)
    m = GroupMorphism(G, X, tuple(basis))
    coords = {m(a): a for a in G.elements}
    marks = tuple(Point(FREE, C.element_point(G, coords[g]), cfg.orientation) for g in gs)
    return G, marks, m


def _construct_spanned(eng, X, M):
    from .instances.finvect import FinVect, LinearMap
    W, cfg = eng.W, eng.cfg
    C = cfg.category
    if isinstance(C, FinVect) and not cfg.contravariant:
        F = C.field
        P = C.space(1)
        f = LinearMap(C.space(len(M)), X, tuple(tuple(x.arrow.data[i][0] for x in M)
                                                 for i in range(X.dim)))
        fac = C.image(f)
        I = fac.middle
        marks = tuple(Point(P, LinearMap(P, I, tuple((row[j],) for row in fac.epi_part.data)))
                      for j in range(len(M)))
        return I, marks, fac.mono_part
    if len(M) != 1:
        raise NoLocalization("multi-point spanned closed form is implemented for covariant FinVect")
    fac = W.image(M[0].working)
    return fac.middle, (Point.from_working(M[0].base, fac.epi_part, cfg.orientation),), fac.mono_part


def _construct_singleton_sets(eng, X, M):
    from .instances.finset import FinSetObj
    from .core import TableMorphism
    cfg = eng.cfg
    if cfg.contravariant:
        raise NoLocalization("singleton_sets closed form is covariant")
    vals = [x.arrow.data[0] for x in M]
    S = FinSetObj(range(len(M)))
    P = M[0].base
    marks = tuple(Point(x.base, TableMorphism(x.base, S, (i,)), cfg.orientation)
                  for i, x in enumerate(M))
    if any(len(x.base.elements) != 1 for x in M):
        raise NoLocalization("singleton_sets closed form needs singleton base objects")
    del P
    return S, marks, TableMorphism(S, X, tuple(vals))


def _construct_local_rings(eng, X, M):
    from .core import OpMorphism, TableMorphism
    from .instances.fincring import classical_localization, fraction_ring
    cfg = eng.cfg
    A = X
    kernels = [frozenset(a for a, v in zip(A.elements, x.arrow.data) if v == x.base.zero)
               for x in M]
    if len(M) == 1:
        L, rho = classical_localization(A, kernels[0], name=f"({A.name})_p")
    else:
        if len(set(kernels)) != len(kernels):
            raise NoLocalization("marked residue maps must have distinct kernels")
        union = set().union(*kernels)
        S = [a for a in A.elements if a not in union]
        L, rho = fraction_ring(A, S, f"({A.name})_M")
    marks = []
    for x in M:
        F = x.base
        table = []
        for a, s in L.elements:
            table.append(F.mul(x.arrow(a), F.inverse_of(x.arrow(s))))
        marks.append(Point(F, TableMorphism(L, F, tuple(table)), cfg.orientation))
    return L, tuple(marks), OpMorphism.of(rho)


# ---------------------------------------------------------------------------


def certificates_agree(cfg: BasePointConfig, c1: LocalizationCertificate,
                       c2: LocalizationCertificate, hom=None):
    """An isomorphism ``phi: C1 -> C2`` with ``rho2 . phi = rho1`` that respects the marks."""
    W = cfg.working
    hom = hom or W.hom
    if W.find_isomorphism(c1.localized, c2.localized) is None:
        return None
    for phi in hom(c1.localized, c2.localized):
        if not W.is_iso(phi) or W.compose(c2.rho, phi) != c1.rho:
            continue
        ok = True
        for m1, m2 in zip(c1.marks, c2.marks):
            lhs = W.compose(phi, m1.working)
            if not any(W.compose(m2.working, b) == lhs for b in cfg.base_isos(m1.base, m2.base)):
                ok = False
                break
        if ok:
            return phi
    return None


def localization_or_error(X, x, subcat, method="closed_form", hom=None):
    """Certificate or :class:`NoLocalization` (used by the global constructions)."""
    if method == "closed_form":
        return closed_form_localize(X, x, subcat, hom)
    res = localize(X, x, subcat, hom)
    if res.status != FOUND:
        raise NoLocalization(f"exhaustive localization {res.status}", point=x,
                             transcript=res.failures[0] if res.failures else None)
    return res.certificate


__all__ = [
    "BasePointedSubcat", "PointedObject", "LocalizationCertificate", "MultiPointCertificate",
    "LocalizationResult", "ExclusionSet", "localize", "localize_multi", "closed_form_localize",
    "closed_form_localize_multi", "exclusion_set", "certificates_agree", "localization_or_error",
    "FOUND", "ABSENT", "AMBIGUOUS", "CategoryError",
]
