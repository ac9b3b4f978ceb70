"""FinAb: finite abelian groups in Smith-normal (invariant factor) form.

An object is a divisor chain ``d_1 | d_2 | ... | d_k``; its elements are
tuples ``(a_1, ..., a_k)`` with ``0 <= a_i < d_i``.  A morphism is stored by
the images of the standard generators, which determines it extensionally.

The free cyclic group ``Z`` appears only as the base object for points: a
morphism ``Z -> G`` is an element of ``G``.  Its endomorphisms are restricted
to the automorphisms ``+1`` and ``-1``.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property, reduce

from sympy import factorint

from ..core import Category, DiagramOverPoset, Factorization, Morphism, Universal
from ..errors import AxiomViolation, SizeBoundExceeded

MAX_HOMS = 250_000


class FinAbObj:
    def __init__(self, orders=()):
        orders = tuple(int(d) for d in orders)
        if any(d < 2 for d in orders) or any(b % a for a, b in zip(orders, orders[1:])):
            raise AxiomViolation("cyclic orders must form a divisor chain of integers >= 2", orders)
        self.orders = orders

    def __eq__(self, other):
        return isinstance(other, FinAbObj) and self.orders == other.orders

    def __hash__(self):
        return hash(("ab", self.orders))

    def __repr__(self):
        if not self.orders:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.orders)

    @property
    def order(self):
        return math.prod(self.orders)

    @cached_property
    def elements(self):
        return tuple(itertools.product(*(range(d) for d in self.orders)))

    @property
    def zero(self):
        return (0,) * len(self.orders)

    def gens(self):
        k = len(self.orders)
        return [tuple(int(i == j) for i in range(k)) for j in range(k)]

    def add(self, a, b):
        return tuple((x + y) % d for x, y, d in zip(a, b, self.orders))

    def neg(self, a):
        return tuple(-x % d for x, d in zip(a, self.orders))

    def scale(self, n, a):
        return tuple((n * x) % d for x, d in zip(a, self.orders))

    def element_order(self, a):
        return reduce(math.lcm, (d // math.gcd(x, d) for x, d in zip(a, self.orders)), 1)


class FreeCyclic:
    """The free abelian group on one generator (base object only)."""

    elements = (1,)

    def __eq__(self, other):
        return isinstance(other, FreeCyclic)

    def __hash__(self):
        return hash("free-cyclic")

    def __repr__(self):
        return "Z"


FREE = FreeCyclic()

TRIVIAL = FinAbObj(())


class GroupMorphism(Morphism):
    """Homomorphism stored by generator images (``data[j]`` = image of ``e_j``)."""

    def __call__(self, a):
        if isinstance(self.dom, FreeCyclic):
            g = self.data[0]
            return g * a if isinstance(self.cod, FreeCyclic) else self.cod.scale(a, g)
        cod = self.cod
        if isinstance(cod, FreeCyclic):
            return 0
        out = cod.zero
        for x, g in zip(a, self.data):
            if x:
                out = cod.add(out, cod.scale(x, g))
        return out

    @property
    def table(self):
        return tuple(self(a) for a in self.dom.elements)


# ---------------------------------------------------------------------------
# invariant factors and explicit presentation isomorphisms


def invariant_factors(orders) -> tuple:
    """Divisor chain of ``Z/n_1 + ... + Z/n_r`` (entries equal to 1 dropped)."""
    by_prime = {}
    for n in orders:
        for p, a in factorint(int(n)).items():
            by_prime.setdefault(p, []).append(a)
    if not by_prime:
        return ()
    k = max(len(v) for v in by_prime.values())
    for v in by_prime.values():
        v.sort(reverse=True)
    chain = [math.prod(p ** v[t] for p, v in by_prime.items() if t < len(v)) for t in range(k)]
    return tuple(reversed(chain))


def build_fin_ab(orders) -> FinAbObj:
    if any(int(n) < 1 for n in orders):
        raise AxiomViolation("cyclic orders must be >= 1", tuple(orders))
    return FinAbObj(invariant_factors(orders))


class Presentation:
    """Explicit isomorphism between ``D = Z/n_1 + ... + Z/n_r`` and its normal form.

    ``to_normal`` sends a tuple of ``D`` to an element of ``group``;
    ``from_normal`` is its inverse.  Built constructively through the
    primary decomposition, so no search is involved.
    """

    def __init__(self, orders):
        self.orders = tuple(int(n) for n in orders)
        comps = {}
        for i, n in enumerate(self.orders):
            for p, a in factorint(n).items():
                comps.setdefault(p, []).append((a, i))
        for v in comps.values():
            v.sort(key=lambda t: (-t[0], t[1]))
        k = max((len(v) for v in comps.values()), default=0)
        chain = [math.prod(p ** v[t][0] for p, v in comps.items() if t < len(v)) for t in range(k)]
        self.group = FinAbObj(tuple(reversed(chain)))
        pos = {t: k - 1 - t for t in range(k)}
        # image in the normal form of each standard generator e_i of D
        self._psi_gen = []
        for i, n in enumerate(self.orders):
            g = self.group.zero
            for p, a in factorint(n).items():
                pa = p ** a
                c = pow(n // pa, -1, pa)
                t = next(t for t, (aa, ii) in enumerate(comps[p]) if ii == i)
                d_t = chain[t]
                eps = (d_t // pa) * pow(d_t // pa, -1, pa) % d_t
                u = [0] * k
                u[pos[t]] = eps
                g = self.group.add(g, self.group.scale(c, tuple(u)))
            self._psi_gen.append(g)
        # image in D of each normal-form generator
        self._phi_gen = [None] * k
        for t in range(k):
            vec = [0] * len(self.orders)
            for p, v in comps.items():
                if t < len(v):
                    a, i = v[t]
                    vec[i] = (vec[i] + self.orders[i] // p ** a) % self.orders[i]
            self._phi_gen[pos[t]] = tuple(vec)

    def to_normal(self, x):
        G = self.group
        out = G.zero
        for xi, g in zip(x, self._psi_gen):
            if xi:
                out = G.add(out, G.scale(xi, g))
        return out

    def from_normal(self, y):
        out = [0] * len(self.orders)
        for yj, v in zip(y, self._phi_gen):
            for i, vi in enumerate(v):
                out[i] = (out[i] + yj * vi) % self.orders[i]
        return tuple(out)


# ---------------------------------------------------------------------------
# abstract groups (subgroups, quotients) -> normal form with an explicit basis


def span(elements_add, zero, gens):
    """Subgroup generated by ``gens`` under ``elements_add``."""
    S = {zero}
    for g in gens:
        if g in S:
            continue
        new = set(S)
        frontier = set(S)
        while frontier:
            frontier = {elements_add(s, g) for s in frontier} - new
            new |= frontier
        S = new
    return S


def _order(add, zero, a):
    n, x = 1, a
    while x != zero:
        x = add(x, a)
        n += 1
    return n


def normal_form_basis(elements, add, zero):
    """Invariant factors of a finite abelian group and a matching basis.

    ``elements`` is the full element list (deterministic order).  Returns
    ``(FinAbObj, basis)`` such that ``a -> sum a_j basis_j`` is an
    isomorphism from the normal form onto the group.
    """
    elements = list(elements)
    n = len(elements)
    orders = {a: _order(add, zero, a) for a in elements}
    chain = []
    for p, e in factorint(n).items():
        counts = []
        for i in range(e + 1):
            counts.append(sum(1 for a in elements if (p ** i) % orders[a] == 0))
        ranks = [round(math.log(counts[i] / counts[i - 1], p)) for i in range(1, e + 1)]
        exps = []
        for i in range(1, e + 1):
            nxt = ranks[i] if i < len(ranks) else 0
            exps.extend([i] * (ranks[i - 1] - nxt))
        chain.append((p, sorted(exps, reverse=True)))
    k = max((len(v) for _, v in chain), default=0)
    targets = [math.prod(p ** v[t] for p, v in chain if t < len(v)) for t in range(k)]
    # targets[0] is the largest invariant factor
    basis = _basis_search(elements, add, zero, orders, targets)
    if basis is None:
        raise AxiomViolation("no basis found for abelian group", n)
    return FinAbObj(tuple(reversed(targets))), tuple(reversed(basis))


def _basis_search(elements, add, zero, orders, targets):
    def rec(t, chosen, S):
        if t == len(targets):
            return list(chosen)
        d = targets[t]
        for a in elements:
            if orders[a] != d:
                continue
            S2 = span(add, zero, list(chosen) + [a])
            if len(S2) == len(S) * d:
                out = rec(t + 1, chosen + [a], S2)
                if out is not None:
                    return out
        return None
    return rec(0, [], {zero})


# ---------------------------------------------------------------------------


class FinAb(Category):
    name = "FinAb"

    def size(self, A):
        return 1 if isinstance(A, FreeCyclic) else A.order

    def describe(self, A):
        return repr(A)

    def objects(self, bound=None):
        bound = self.bound if bound is None else bound
        out = []

        def rec(prefix, prod_so_far):
            out.append(FinAbObj(prefix))
            start = prefix[-1] if prefix else 2
            d = start
            while prod_so_far * d <= bound:
                if not prefix or d % prefix[-1] == 0:
                    rec(prefix + (d,), prod_so_far * d)
                d += 1
        rec((), 1)
        return sorted(out, key=lambda G: (G.order, G.orders))

    def hom(self, A, B):
        self.check_bound(A, B)
        if isinstance(A, FreeCyclic):
            if isinstance(B, FreeCyclic):
                return [GroupMorphism(A, B, (1,)), GroupMorphism(A, B, (-1,))]
            return [GroupMorphism(A, B, (b,)) for b in B.elements]
        if isinstance(B, FreeCyclic):
            return [GroupMorphism(A, B, (0,) * len(A.orders))]
        choices = [[b for b in B.elements if B.scale(d, b) == B.zero] for d in A.orders]
        if math.prod(len(c) for c in choices) > MAX_HOMS:
            raise SizeBoundExceeded(f"hom({A}, {B}) too large to enumerate")
        return [GroupMorphism(A, B, imgs) for imgs in itertools.product(*choices)]

    def compose(self, g, f):
        return GroupMorphism(f.dom, g.cod, tuple(g(x) for x in f.data))

    def identity(self, A):
        if isinstance(A, FreeCyclic):
            return GroupMorphism(A, A, (1,))
        return GroupMorphism(A, A, tuple(A.gens()))

    def morphism(self, A, B, images):
        """Homomorphism from generator images; checks the order relations."""
        images = tuple(tuple(x) if not isinstance(B, FreeCyclic) else x for x in images)
        if not isinstance(A, FreeCyclic):
            for d, b in zip(A.orders, images):
                if B.scale(d, b) != B.zero:
                    raise AxiomViolation("generator image violates order relation", (d, b))
        return GroupMorphism(A, B, images)

    def element_point(self, G, a):
        """The point ``Z -> G`` sending the generator to ``a``."""
        return GroupMorphism(FREE, G, (tuple(a),))

    def image_set(self, f):
        if isinstance(f.dom, FreeCyclic):
            return span(f.cod.add, f.cod.zero, [f.data[0]])
        return span(f.cod.add, f.cod.zero, list(f.data))

    def is_mono(self, f):
        if isinstance(f.dom, FreeCyclic):
            return isinstance(f.cod, FreeCyclic)
        if isinstance(f.cod, FreeCyclic):
            return f.dom.order == 1
        return len(self.image_set(f)) == f.dom.order

    def is_epi(self, f):
        if isinstance(f.cod, FreeCyclic):
            return isinstance(f.dom, FreeCyclic)
        return len(self.image_set(f)) == f.cod.order

    def is_iso(self, f):
        return self.is_mono(f) and self.is_epi(f)

    def inverse(self, f):
        if not self.is_iso(f):
            return None
        if isinstance(f.dom, FreeCyclic):
            return f
        back = {f(a): a for a in f.dom.elements}
        return GroupMorphism(f.cod, f.dom, tuple(back[g] for g in f.cod.gens()))

    # -- (co)products: direct sums --------------------------------------
    def _direct_sum(self, objs):
        orders = [d for A in objs for d in A.orders]
        pres = Presentation(orders)
        offsets = list(itertools.accumulate([0] + [len(A.orders) for A in objs]))
        return pres, offsets

    def coproduct(self, objs):
        pres, off = self._direct_sum(objs)
        G, r = pres.group, len(pres.orders)
        legs = []
        for s, A in enumerate(objs):
            imgs = []
            for j in range(len(A.orders)):
                v = [0] * r
                v[off[s] + j] = 1
                imgs.append(pres.to_normal(v))
            legs.append(GroupMorphism(A, G, tuple(imgs)))
        return Universal(G, tuple(legs))

    def _components(self, objs, pres, off, y):
        x = pres.from_normal(y)
        return [tuple(x[off[s]:off[s + 1]]) for s in range(len(objs))]

    def copair(self, cocone, maps, target=None):
        objs = tuple(i.dom for i in cocone.legs)
        T = maps[0].cod if maps else target
        pres, off = self._direct_sum(objs)
        imgs = []
        for g in cocone.obj.gens():
            out = T.zero
            for f, comp in zip(maps, self._components(objs, pres, off, g)):
                out = T.add(out, f(comp))
            imgs.append(out)
        return GroupMorphism(cocone.obj, T, tuple(imgs))

    def product(self, objs):
        pres, off = self._direct_sum(objs)
        G = pres.group
        legs = []
        for s, A in enumerate(objs):
            imgs = tuple(self._components(objs, pres, off, g)[s] for g in G.gens())
            legs.append(GroupMorphism(G, A, imgs))
        return Universal(G, tuple(legs))

    def pair(self, cone, maps, source=None):
        objs = tuple(p.cod for p in cone.legs)
        S = maps[0].dom if maps else source
        pres, _ = self._direct_sum(objs)
        gens = [1] if isinstance(S, FreeCyclic) else S.gens()
        imgs = tuple(pres.to_normal(tuple(c for f in maps for c in f(g))) for g in gens)
        return GroupMorphism(S, cone.obj, imgs)

    # -- image / coimage --------------------------------------------------
    def _factor_through_subgroup(self, f, S):
        B = f.cod
        elems = sorted(S)
        I, basis = normal_form_basis(elems, B.add, B.zero)
        m = GroupMorphism(I, B, tuple(basis))
        coords = {m(a): a for a in I.elements}
        gens = [1] if isinstance(f.dom, FreeCyclic) else f.dom.gens()
        e = GroupMorphism(f.dom, I, tuple(coords[f(g)] for g in gens))
        return Factorization(e, I, m)

    def image(self, f):
        return self._factor_through_subgroup(f, self.image_set(f))

    def coimage(self, f):
        # X / ker f is identified with f(X) through the first isomorphism theorem
        return self._factor_through_subgroup(f, self.image_set(f))

    def colimit_directed(self, d: DiagramOverPoset):
        objs = [d.node_objects[i] for i in d.index]
        cop = self.coproduct(objs)
        D = cop.obj
        legs = dict(zip(d.index, cop.legs))
        rel = []
        for (i, j), f in d.edges.items():
            for g in d.node_objects[i].gens():
                rel.append(D.add(legs[j](f(g)), D.neg(legs[i](g))))
        R = span(D.add, D.zero, rel)
        rep = {}
        for a in D.elements:
            if a in rep:
                continue
            coset = sorted(D.add(a, r) for r in R)
            for b in coset:
                rep[b] = coset[0]
        reps = sorted(set(rep.values()))
        qadd = lambda a, b: rep[D.add(a, b)]
        Q, basis = normal_form_basis(reps, qadd, rep[D.zero])
        to_q = {}
        for a in Q.elements:
            v = rep[D.zero]
            for x, b in zip(a, basis):
                for _ in range(x):
                    v = qadd(v, b)
            to_q[v] = a
        out = []
        for i in d.index:
            A = d.node_objects[i]
            out.append(GroupMorphism(A, Q, tuple(to_q[rep[legs[i](g)]] for g in A.gens())))
        return Universal(Q, tuple(out))

    def find_isomorphism(self, A, B):
        return self.identity(A) if A == B else None

    def object_data(self, A):
        if isinstance(A, FreeCyclic):
            return {"group": "Z"}
        return {"group": list(A.orders)}

    def morphism_data(self, f):
        data = {"generator_images": [list(g) if isinstance(g, tuple) else g for g in f.data]}
        if not isinstance(f.dom, FreeCyclic) and f.dom.order <= 64:
            data["table"] = [[list(a), list(b) if isinstance(b, tuple) else b]
                             for a, b in zip(f.dom.elements, f.table)]
        return data
