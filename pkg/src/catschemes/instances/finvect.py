"""FinVect(F_q): finite-dimensional vector spaces ``k^n`` and matrices."""

from __future__ import annotations

import itertools

from ..core import Category, DiagramOverPoset, Factorization, Morphism, Universal
from ..errors import AxiomViolation, SizeBoundExceeded
from ..fields import FieldTable

MAX_HOMS = 250_000


class FinVectObj:
    def __init__(self, dim: int, field: FieldTable):
        if dim < 0:
            raise AxiomViolation("dimension must be non-negative", dim)
        self.dim = int(dim)
        self.field = field

    def __eq__(self, other):
        return isinstance(other, FinVectObj) and self.dim == other.dim and self.field == other.field

    def __hash__(self):
        return hash(("vect", self.dim, self.field.key))

    def __repr__(self):
        return f"{self.field.name}^{self.dim}"

    @property
    def elements(self):
        return tuple(itertools.product(range(self.field.q), repeat=self.dim))

    @property
    def zero(self):
        return (0,) * self.dim


class LinearMap(Morphism):
    """``data`` is the matrix as a tuple of ``cod.dim`` rows of length ``dom.dim``."""

    def __call__(self, v):
        F = self.dom.field
        out = []
        for row in self.data:
            acc = 0
            for a, x in zip(row, v):
                acc = F.add[acc][F.mul[a][x]]
            out.append(acc)
        return tuple(out)

    @property
    def columns(self):
        return [tuple(row[j] for row in self.data) for j in range(self.dom.dim)]


def rref(F: FieldTable, rows):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    M = [list(r) for r in rows]
    if not M:
        return [], []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv[M[r][c]]
        M[r] = [F.mul[inv][x] for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                factor = F.neg[M[i][c]]
                M[i] = [F.add[x][F.mul[factor][y]] for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return [tuple(row) for row in M[:r]], pivots


def matmul(F, G, H, inner):
    """Product of matrices ``G`` (m x inner) and ``H`` (inner x n)."""
    n = len(H[0]) if H else 0
    out = []
    for row in G:
        new = []
        for j in range(n):
            acc = 0
            for t in range(inner):
                if row[t] and H[t][j]:
                    acc = F.add[acc][F.mul[row[t]][H[t][j]]]
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


class FinVect(Category):

    def __init__(self, field: FieldTable, bound: int = 64):
        super().__init__(bound)
        self.field = field
        self.name = f"FinVect({field.name})"

    def __repr__(self):
        return f"FinVect({self.field!r}, bound={self.bound})"

    def space(self, n):
        return FinVectObj(n, self.field)

    def size(self, A):
        return self.field.q ** A.dim

    def describe(self, A):
        return repr(A)

    def objects(self, bound=None):
        bound = self.bound if bound is None else bound
        out, n = [], 0
        while self.field.q ** n <= bound:
            out.append(self.space(n))
            n += 1
        return out

    def matrix(self, A, B, rows):
        rows = tuple(tuple(int(x) % self.field.q for x in r) for r in rows)
        if len(rows) != B.dim or any(len(r) != A.dim for r in rows):
            raise AxiomViolation("matrix shape does not match (cod.dim, dom.dim)", (B.dim, A.dim))
        return LinearMap(A, B, rows)

    def hom(self, A, B):
        self.check_bound(A, B)
        q, m, n = self.field.q, B.dim, A.dim
        if q ** (m * n) > MAX_HOMS:
            raise SizeBoundExceeded(f"|hom({A}, {B})| = {q ** (m * n)} exceeds {MAX_HOMS}")
        out = []
        for flat in itertools.product(range(q), repeat=m * n):
            out.append(LinearMap(A, B, tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(m))))
        return out

    def compose(self, g, f):
        return LinearMap(f.dom, g.cod, matmul(self.field, g.data, f.data, f.cod.dim)
                         if f.cod.dim else tuple(tuple([0] * f.dom.dim) for _ in range(g.cod.dim)))

    def identity(self, A):
        return LinearMap(A, A, tuple(tuple(int(i == j) for j in range(A.dim)) for i in range(A.dim)))

    def zero_map(self, A, B):
        return LinearMap(A, B, tuple(tuple([0] * A.dim) for _ in range(B.dim)))

    def rank(self, f):
        return len(rref(self.field, f.data)[0])

    def is_mono(self, f):
        return self.rank(f) == f.dom.dim

    def is_epi(self, f):
        return self.rank(f) == f.cod.dim

    def is_iso(self, f):
        return f.dom.dim == f.cod.dim and self.rank(f) == f.dom.dim

    def inverse(self, f):
        if not self.is_iso(f):
            return None
        n = f.dom.dim
        aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(f.data)]
        red, _ = rref(self.field, aug)
        return LinearMap(f.cod, f.dom, tuple(tuple(r[n:]) for r in red))

    # -- constructions ----------------------------------------------------
    def _blocks(self, objs):
        total = sum(A.dim for A in objs)
        offs, o = [], 0
        for A in objs:
            offs.append(o)
            o += A.dim
        return self.space(total), offs

    def coproduct(self, objs):
        S, offs = self._blocks(objs)
        legs = []
        for A, o in zip(objs, offs):
            legs.append(LinearMap(A, S, tuple(tuple(int(i == o + j) for j in range(A.dim))
                                              for i in range(S.dim))))
        return Universal(S, tuple(legs))

    def copair(self, cocone, maps, target=None):
        T = maps[0].cod if maps else target
        rows = tuple(tuple(x for f in maps for x in f.data[i]) for i in range(T.dim))
        return LinearMap(cocone.obj, T, rows)

    def product(self, objs):
        S, offs = self._blocks(objs)
        legs = []
        for A, o in zip(objs, offs):
            legs.append(LinearMap(S, A, tuple(tuple(int(j == o + i) for j in range(S.dim))
                                              for i in range(A.dim))))
        return Universal(S, tuple(legs))

    def pair(self, cone, maps, source=None):
        S = maps[0].dom if maps else source
        rows = tuple(row for f in maps for row in f.data)
        return LinearMap(S, cone.obj, rows)

    def _rank_factorization(self, f):
        red, piv = rref(self.field, f.data) if f.cod.dim else ([], [])
        r = len(red)
        I = self.space(r)
        e = LinearMap(f.dom, I, tuple(red))
        m = LinearMap(I, f.cod, tuple(tuple(row[c] for c in piv) for row in f.data))
        return Factorization(e, I, m)

    def image(self, f):
        return self._rank_factorization(f)

    def coimage(self, f):
        return self._rank_factorization(f)

    def colimit_directed(self, d: DiagramOverPoset):
        objs = [d.node_objects[i] for i in d.index]
        cop = self.coproduct(objs)
        N = cop.obj.dim
        legs = dict(zip(d.index, cop.legs))
        F = self.field
        rel = []
        for (i, j), f in d.edges.items():
            for col in self.identity(d.node_objects[i]).columns:
                a = legs[j](f(col))
                b = legs[i](col)
                rel.append(tuple(F.add[x][F.neg[y]] for x, y in zip(a, b)))
        red, piv = rref(F, rel) if rel else ([], [])
        free = [c for c in range(N) if c not in piv]
        Q = self.space(len(free))
        qrows = []
        for c in free:
            qrows.append(tuple(self._reduce_coordinate(red, piv, c, k) for k in range(N)))
        qmap = LinearMap(cop.obj, Q, tuple(qrows))
        return Universal(Q, tuple(self.compose(qmap, legs[i]) for i in d.index))

    def _reduce_coordinate(self, red, piv, c, k):
        # coordinate ``c`` of basis vector ``e_k`` after reduction modulo the relation space
        F = self.field
        v = int(k == c)
        for row, p in zip(red, piv):
            if p == k:
                v = F.add[v][F.neg[row[c]]]
        return v

    def find_isomorphism(self, A, B):
        if A.dim != B.dim or A.field != B.field:
            return None
        return LinearMap(A, B, self.identity(A).data)

    def object_data(self, A):
        return {"dim": A.dim, "field": {"p": A.field.p, "k": A.field.k, "poly": list(A.field.poly)}}

    def morphism_data(self, f):
        return {"matrix": [list(r) for r in f.data]}
