"""FinSet: finite sets of hashable labels and all functions between them."""

from __future__ import annotations

import itertools

from ..core import (Category, DiagramOverPoset, Factorization, TableMorphism, Universal,
                    sort_key)
from ..errors import AxiomViolation, SizeBoundExceeded

MAX_HOMS = 250_000


class FinSetObj:
    """A finite set; elements are kept sorted so equal sets compare equal."""

    __slots__ = ("elements", "_hash")

    def __init__(self, elements=()):
        elems = list(elements)
        if len(set(elems)) != len(elems):
            raise AxiomViolation("set labels must be distinct", elems)
        self.elements = tuple(sorted(elems, key=sort_key))
        self._hash = hash(("set", self.elements))

    def __eq__(self, other):
        return isinstance(other, FinSetObj) and self.elements == other.elements

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return "{" + ", ".join(map(repr, self.elements)) + "}"


class FinSet(Category):
    name = "FinSet"

    def size(self, A):
        return len(A.elements)

    def describe(self, A):
        return repr(A)

    def objects(self, bound=None):
        bound = self.bound if bound is None else bound
        return [FinSetObj(range(n)) for n in range(bound + 1)]

    def hom(self, A, B):
        self.check_bound(A, B)
        n, m = len(A.elements), len(B.elements)
        if m ** n > MAX_HOMS:
            raise SizeBoundExceeded(f"|hom({A}, {B})| = {m ** n} exceeds {MAX_HOMS}")
        return [TableMorphism(A, B, t) for t in itertools.product(B.elements, repeat=n)]

    def compose(self, g, f):
        return TableMorphism(f.dom, g.cod, tuple(g(y) for y in f.data))

    def identity(self, A):
        return TableMorphism(A, A, A.elements)

    def morphism(self, A, B, mapping):
        """Build a function from a dict or callable."""
        get = mapping.__getitem__ if isinstance(mapping, dict) else mapping
        table = tuple(get(x) for x in A.elements)
        if any(y not in B.elements for y in table):
            raise AxiomViolation("function does not land in codomain", table)
        return TableMorphism(A, B, table)

    def is_mono(self, f):
        return len(set(f.data)) == len(f.data)

    def is_epi(self, f):
        return set(f.data) == set(f.cod.elements)

    def is_iso(self, f):
        return self.is_mono(f) and self.is_epi(f)

    def inverse(self, f):
        if not self.is_iso(f):
            return None
        back = {y: x for x, y in zip(f.dom.elements, f.data)}
        return TableMorphism(f.cod, f.dom, tuple(back[y] for y in f.cod.elements))

    def coproduct(self, objs):
        S = FinSetObj((i, x) for i, A in enumerate(objs) for x in A.elements)
        legs = tuple(TableMorphism(A, S, tuple((i, x) for x in A.elements))
                     for i, A in enumerate(objs))
        return Universal(S, legs)

    def copair(self, cocone, maps, target=None):
        T = maps[0].cod if maps else target
        return TableMorphism(cocone.obj, T, tuple(maps[i](x) for i, x in cocone.obj.elements))

    def product(self, objs):
        P = FinSetObj(itertools.product(*(A.elements for A in objs)))
        legs = tuple(TableMorphism(P, A, tuple(t[i] for t in P.elements))
                     for i, A in enumerate(objs))
        return Universal(P, legs)

    def pair(self, cone, maps, source=None):
        S = maps[0].dom if maps else source
        return TableMorphism(S, cone.obj, tuple(tuple(f(x) for f in maps) for x in S.elements))

    def image(self, f):
        I = FinSetObj(set(f.data))
        return Factorization(TableMorphism(f.dom, I, f.data), I,
                             TableMorphism(I, f.cod, I.elements))

    def coimage(self, f):
        classes = {}
        for x, y in zip(f.dom.elements, f.data):
            classes.setdefault(y, []).append(x)
        labels = {y: tuple(xs) for y, xs in classes.items()}
        C = FinSetObj(labels.values())
        e = TableMorphism(f.dom, C, tuple(labels[y] for y in f.data))
        value = {lab: y for y, lab in labels.items()}
        return Factorization(e, C, TableMorphism(C, f.cod, tuple(value[c] for c in C.elements)))

    def colimit_directed(self, d: DiagramOverPoset):
        parent = {}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i in d.index:
            for x in d.node_objects[i].elements:
                parent[(i, x)] = (i, x)
        for (i, j), f in d.edges.items():
            for x, y in zip(f.dom.elements, f.data):
                a, b = find((i, x)), find((j, y))
                if a != b:
                    lo, hi = sorted((a, b), key=sort_key)
                    parent[hi] = lo
        classes = {}
        for node in parent:
            classes.setdefault(find(node), []).append(node)
        label = {root: tuple(sorted(members, key=sort_key)) for root, members in classes.items()}
        L = FinSetObj(label.values())
        legs = tuple(TableMorphism(d.node_objects[i], L,
                                   tuple(label[find((i, x))] for x in d.node_objects[i].elements))
                     for i in d.index)
        return Universal(L, legs)

    def find_isomorphism(self, A, B):
        if len(A.elements) != len(B.elements):
            return None
        return TableMorphism(A, B, B.elements)

    def object_data(self, A):
        return {"set": list(A.elements)}

    def morphism_data(self, f):
        return {"table": [[x, y] for x, y in zip(f.dom.elements, f.data)]}
