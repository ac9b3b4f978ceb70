"""FinCRing: finite commutative unital rings.

Two representations share one interface (``elements``, ``zero``, ``one``,
``add``, ``mul``, ``neg``):

* :class:`TableRing` stores explicit operation tables and checks the ring
  axioms at construction;
* :class:`ProductRing` is a direct product computed componentwise, so that
  large products (global objects) never need materialized tables.

Ring homomorphisms are :class:`~catschemes.core.TableMorphism` values whose
table is aligned with ``dom.elements``.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property, lru_cache

import numpy as np
from sympy import factorint, isprime

from ..core import Category, Factorization, Morphism, TableMorphism, Universal, sort_key
from ..errors import AxiomViolation, NoCoproduct, NotPrime, SizeBoundExceeded
from ..fields import field_table, poly_str


class FinCRingObj:
    name = "?"

    @property
    def size(self):
        return len(self.elements)

    def __eq__(self, other):
        return isinstance(other, FinCRingObj) and self.key == other.key

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash(self.key)

    def __repr__(self):
        return self.name

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def power(self, a, n):
        out = self.one
        for _ in range(n):
            out = self.mul(out, a)
        return out

    def additive_order(self, a):
        n, x = 1, a
        while x != self.zero:
            x = self.add(x, a)
            n += 1
        return n

    @property
    def characteristic(self):
        return self.additive_order(self.one)

    @cached_property
    def units(self):
        els = self.elements
        return tuple(a for a in els if any(self.mul(a, b) == self.one for b in els))

    def inverse_of(self, a):
        for b in self.elements:
            if self.mul(a, b) == self.one:
                return b
        return None

    @cached_property
    def idempotents(self):
        return tuple(a for a in self.elements if self.mul(a, a) == a)

    @cached_property
    def nilpotents(self):
        out = []
        for a in self.elements:
            x = a
            for _ in range(len(self.elements)):
                if x == self.zero:
                    out.append(a)
                    break
                x = self.mul(x, a)
        return tuple(out)

    def is_local(self):
        units = set(self.units)
        non_units = [a for a in self.elements if a not in units]
        if len(non_units) == len(self.elements):
            return False
        nu = set(non_units)
        return all(self.add(a, b) in nu for a in non_units for b in non_units)

    @cached_property
    def maximal_ideal(self):
        """Non-units of a local ring (raises if the ring is not local)."""
        if not self.is_local():
            raise AxiomViolation(f"{self.name} is not local")
        units = set(self.units)
        return frozenset(a for a in self.elements if a not in units)

    def is_field(self):
        return len(self.units) == len(self.elements) - 1 and len(self.elements) > 1


class TableRing(FinCRingObj):
    def __init__(self, elements, add_table, mul_table, zero, one, name="R",
                 check=True, allow_zero=False):
        self.elements = tuple(elements)
        self._index = {a: i for i, a in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise AxiomViolation("ring elements must be distinct", name)
        self.add_table = tuple(tuple(r) for r in add_table)
        self.mul_table = tuple(tuple(r) for r in mul_table)
        self.zero, self.one, self.name = zero, one, name
        self._z, self._o = self._index[zero], self._index[one]
        self._neg = tuple(row.index(self._z) if self._z in row else None for row in self.add_table)
        if check:
            self._check(allow_zero)

    @classmethod
    def from_ops(cls, elements, add, mul, zero, one, name="R", check=True, allow_zero=False):
        elements = tuple(elements)
        idx = {a: i for i, a in enumerate(elements)}
        try:
            at = [[idx[add(a, b)] for b in elements] for a in elements]
            mt = [[idx[mul(a, b)] for b in elements] for a in elements]
        except KeyError as exc:
            raise AxiomViolation("operation not closed on the element set", exc.args[0]) from None
        return cls(elements, at, mt, zero, one, name, check, allow_zero)

    @cached_property
    def key(self):
        return ("table", self.elements, self.add_table, self.mul_table, self.zero, self.one)

    @cached_property
    def _addm(self):
        el = self.elements
        return {a: dict(zip(el, (el[k] for k in row))) for a, row in zip(el, self.add_table)}

    @cached_property
    def _mulm(self):
        el = self.elements
        return {a: dict(zip(el, (el[k] for k in row))) for a, row in zip(el, self.mul_table)}

    def add(self, a, b):
        return self._addm[a][b]

    def mul(self, a, b):
        return self._mulm[a][b]

    def neg(self, a):
        return self.elements[self._neg[self._index[a]]]

    def _check(self, allow_zero):
        n = len(self.elements)
        if n == 1 and not allow_zero:
            raise AxiomViolation("zero ring not permitted here", self.name)
        if n > 1 and self._z == self._o:
            raise AxiomViolation("0 = 1 in a nonzero ring", self.name)
        A = np.array(self.add_table)
        M = np.array(self.mul_table)
        r = np.arange(n)
        el = self.elements

        def fail(msg, idx):
            raise AxiomViolation(msg, tuple(el[int(i)] for i in idx))

        for label, T in (("addition", A), ("multiplication", M)):
            bad = np.argwhere(T != T.T)
            if len(bad):
                fail(f"{label} not commutative", bad[0])
            lhs = T[T[:, :, None], r[None, None, :]]
            rhs = T[r[:, None, None], T[None, :, :]]
            bad = np.argwhere(lhs != rhs)
            if len(bad):
                fail(f"{label} not associative", bad[0])
        bad = np.argwhere(A[self._z] != r)
        if len(bad):
            fail("zero is not additive identity", bad[0])
        bad = np.argwhere(M[self._o] != r)
        if len(bad):
            fail("one is not multiplicative identity", bad[0])
        if any(x is None for x in self._neg):
            fail("missing additive inverse", [self._neg.index(None)])
        lhs = M[r[:, None, None], A[None, :, :]]
        rhs = A[M[:, :, None], M[:, None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            fail("distributivity fails", bad[0])


class ProductRing(FinCRingObj):
    """Direct product ``R_1 x ... x R_n`` with componentwise operations."""

    def __init__(self, factors, name=None):
        self.factors = tuple(factors)
        self.name = name or (" x ".join(_paren(f.name) for f in self.factors) if self.factors else "0")
        self.zero = tuple(f.zero for f in self.factors)
        self.one = tuple(f.one for f in self.factors)

    @cached_property
    def key(self):
        return ("product", tuple(f.key for f in self.factors))

    @cached_property
    def elements(self):
        return tuple(itertools.product(*(f.elements for f in self.factors)))

    @property
    def size(self):
        return math.prod(f.size for f in self.factors)

    TABLE_LIMIT = 256

    @cached_property
    def _tables(self):
        # small products get memoized operation tables
        if self.size > self.TABLE_LIMIT:
            return None
        els = self.elements
        add = {(a, b): self._add(a, b) for a in els for b in els}
        mul = {(a, b): self._mul(a, b) for a in els for b in els}
        return add, mul

    def _add(self, a, b):
        return tuple(f.add(x, y) for f, x, y in zip(self.factors, a, b))

    def _mul(self, a, b):
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def add(self, a, b):
        t = self._tables
        return t[0][a, b] if t else self._add(a, b)

    def mul(self, a, b):
        t = self._tables
        return t[1][a, b] if t else self._mul(a, b)

    def neg(self, a):
        return tuple(f.neg(x) for f, x in zip(self.factors, a))


def _paren(name):
    return f"({name})" if " x " in name else name


class LazyMorphism(Morphism):
    """Structural map out of an oversize ring, evaluated on demand.

    ``data`` is a symbolic description; ``fn`` evaluates it.
    """

    def __init__(self, dom, cod, data, fn):
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "_fn", fn)

    def __call__(self, x):
        return self._fn(x)


# ---------------------------------------------------------------------------
# constructors


def zmod(n: int) -> TableRing:
    if n < 2:
        raise AxiomViolation("Z/n requires n >= 2", n)
    els = range(n)
    return TableRing.from_ops(els, lambda a, b: (a + b) % n, lambda a, b: (a * b) % n,
                              0, 1, f"Z/{n}", check=False)


def field_ring(p: int, k: int = 1, poly=None) -> TableRing:
    if k == 1:
        return zmod(p)
    F = field_table(p, k, None if poly is None else tuple(poly))
    return TableRing(range(F.q), F.add, F.mul, 0, 1, F.name, check=False)


def poly_quotient(base: FinCRingObj, poly, name=None, check=True) -> TableRing:
    """``base[x]/(poly)`` for a monic ``poly`` given low -> high over ``base``."""
    poly = tuple(poly)
    d = len(poly) - 1
    if d < 1 or poly[-1] != base.one:
        raise AxiomViolation("quotient polynomial must be monic of degree >= 1", poly)
    els = tuple(itertools.product(base.elements, repeat=d))
    zero = (base.zero,) * d
    one = (base.one,) + (base.zero,) * (d - 1)

    def add(u, v):
        return tuple(base.add(a, b) for a, b in zip(u, v))

    def mul(u, v):
        prod = [base.zero] * (2 * d - 1)
        for i, a in enumerate(u):
            for j, b in enumerate(v):
                prod[i + j] = base.add(prod[i + j], base.mul(a, b))
        for deg in range(2 * d - 2, d - 1, -1):
            c = prod[deg]
            if c != base.zero:
                for j in range(d + 1):
                    prod[deg - d + j] = base.sub(prod[deg - d + j], base.mul(c, poly[j]))
        return tuple(prod[:d])

    if name is None:
        name = f"{base.name}[x]/({poly_str(poly)})"
    return TableRing.from_ops(els, add, mul, zero, one, name, check=check)


def zmod_quotient(n: int, poly) -> TableRing:
    """``(Z/n)[x]/(poly)``; coefficients low -> high."""
    base = zmod(n)
    return poly_quotient(base, tuple(int(c) % n for c in poly))


def product_ring(factors) -> ProductRing:
    return ProductRing(factors)


def zero_ring() -> TableRing:
    return TableRing([0], [[0]], [[0]], 0, 0, "0", check=True, allow_zero=True)


def materialize(R: FinCRingObj, name=None) -> TableRing:
    if isinstance(R, TableRing):
        return R
    return TableRing.from_ops(R.elements, R.add, R.mul, R.zero, R.one, name or R.name,
                              check=False, allow_zero=True)


def build_ring(spec, bound: int = 64) -> FinCRingObj:
    """Build a ring from a description.

    Accepted forms: ``"Z/6"``, ``"F_4"`` / ``"F4"``, ``"Z/2 x Z/3"``,
    ``{"zmod": n}``, ``{"field": q, "poly": [...]}``,
    ``{"product": [spec, ...]}``, ``{"quotient": {"n": n, "poly": [...]}}``
    and ``{"quotient": {"base": spec, "poly": [...]}}``.
    """
    R = _build_ring(spec)
    if R.size > bound:
        raise SizeBoundExceeded(f"ring {R.name} has {R.size} elements > bound {bound}")
    if isinstance(R, ProductRing):
        return R
    return R


def _build_ring(spec):
    if isinstance(spec, FinCRingObj):
        return spec
    if isinstance(spec, str):
        s = spec.strip()
        if " x " in s:
            return ProductRing([_build_ring(part) for part in s.split(" x ")])
        s = s.strip("()")
        if s.startswith("Z/"):
            return zmod(int(s[2:]))
        if s.startswith("F"):
            q = int(s.lstrip("F_"))
            return _field_of_order(q)
        raise AxiomViolation("unrecognized ring description", spec)
    if isinstance(spec, dict):
        if "zmod" in spec:
            return zmod(int(spec["zmod"]))
        if "field" in spec:
            return _field_of_order(int(spec["field"]), spec.get("poly"))
        if "product" in spec:
            return ProductRing([_build_ring(s) for s in spec["product"]])
        if "quotient" in spec:
            qd = spec["quotient"]
            base = zmod(int(qd["n"])) if "n" in qd else _build_ring(qd["base"])
            if isinstance(base, ProductRing):
                base = materialize(base)
            poly = tuple(int(c) % base.size if isinstance(base.zero, int) else c for c in qd["poly"])
            return poly_quotient(base, poly)
    raise AxiomViolation("unrecognized ring description", spec)


def _field_of_order(q, poly=None):
    f = factorint(q)
    if len(f) != 1:
        raise AxiomViolation("field order must be a prime power", q)
    (p, k), = f.items()
    R = field_ring(p, k, poly)
    if poly is not None and k > 1:
        R = TableRing(R.elements, R.add_table, R.mul_table, 0, 1,
                      f"F_{q}[{poly_str(tuple(poly))}]", check=False)
    return R


# ---------------------------------------------------------------------------
# subrings, homomorphisms


def closure(R: FinCRingObj, gens) -> set:
    """Elements of the subring generated by ``gens`` (with 0 and 1)."""
    S = {R.zero, R.one}
    order = [R.zero, R.one]
    queue = [R.zero, R.one]
    for g in gens:
        if g not in S:
            S.add(g)
            order.append(g)
            queue.append(g)
    i = 0
    while i < len(queue):
        x = queue[i]
        i += 1
        for y in list(order):
            for z in (R.add(x, y), R.mul(x, y)):
                if z not in S:
                    S.add(z)
                    order.append(z)
                    queue.append(z)
        nz = R.neg(x)
        if nz not in S:
            S.add(nz)
            order.append(nz)
            queue.append(nz)
    return S


def subring_from_set(R: FinCRingObj, S, name=None) -> TableRing:
    els = sorted(S, key=sort_key)
    return TableRing.from_ops(els, R.add, R.mul, R.zero, R.one, name or f"subring of {R.name}",
                              check=False, allow_zero=True)


def subring_generated(R: FinCRingObj, gens, name=None):
    """Subring generated by ``gens``; returns ``(subring, inclusion)``."""
    S = closure(R, gens)
    sub = subring_from_set(R, S, name)
    return sub, TableMorphism(sub, R, sub.elements)


def generating_set(R: FinCRingObj) -> tuple:
    cache = _GEN_CACHE.get(R.key)
    if cache is not None:
        return cache
    gens, S = [], closure(R, [])
    for a in R.elements:
        if a not in S:
            gens.append(a)
            S = closure(R, gens)
            if len(S) == R.size:
                break
    out = tuple(gens)
    _GEN_CACHE[R.key] = out
    return out


_GEN_CACHE: dict = {}


_ITAB_CACHE: dict = {}


def _itab(R):
    """Index form of a ring: elements, positions, add/mul tables and negation."""
    t = _ITAB_CACHE.get(R)
    if t is None:
        el = tuple(R.elements)
        ix = {a: i for i, a in enumerate(el)}
        add = [[ix[R.add(a, b)] for b in el] for a in el]
        mul = [[ix[R.mul(a, b)] for b in el] for a in el]
        neg = [ix[R.neg(a)] for a in el]
        t = _ITAB_CACHE[R] = (el, ix, add, mul, neg)
    return t


def _extend(A, B, phi, order, new_pairs):
    """Close a partial map (index lists) under +, *, -; return ``None`` on conflict."""
    _, ixA, addA, mulA, negA = _itab(A)
    _, ixB, addB, mulB, negB = _itab(B)
    phi = list(phi) if phi else [-1] * len(ixA)
    order = list(order)
    queue = []
    for a, b in new_pairs:
        i, j = ixA[a], ixB[b]
        if phi[i] >= 0:
            if phi[i] != j:
                return None
            continue
        phi[i] = j
        order.append(i)
        queue.append(i)
    q = 0
    while q < len(queue):
        x = queue[q]
        q += 1
        fx = phi[x]
        ax, mx, bx, nx = addA[x], mulA[x], addB[fx], mulB[fx]
        for y in list(order):
            fy = phi[y]
            z, fz = ax[y], bx[fy]
            got = phi[z]
            if got < 0:
                phi[z] = fz
                order.append(z)
                queue.append(z)
            elif got != fz:
                return None
            z, fz = mx[y], nx[fy]
            got = phi[z]
            if got < 0:
                phi[z] = fz
                order.append(z)
                queue.append(z)
            elif got != fz:
                return None
        z, fz = negA[x], negB[fx]
        got = phi[z]
        if got < 0:
            phi[z] = fz
            order.append(z)
            queue.append(z)
        elif got != fz:
            return None
    return phi, order


def _signature(R, a):
    """Isomorphism invariants of an element."""
    x, k = a, 1
    while x != R.zero and k <= R.size:
        x = R.mul(x, a)
        k += 1
    nil = k if x == R.zero else 0
    return (R.additive_order(a), R.mul(a, a) == a, nil, a in set(R.units))


_HOM_CACHE: dict = {}


def ring_homs(A: FinCRingObj, B: FinCRingObj, injective=False, limit=None) -> list:
    """All unital ring homomorphisms ``A -> B`` in deterministic order."""
    # objects compare structurally, so hom sets are shared across category instances
    ck = (A, B, injective, limit)
    if ck not in _HOM_CACHE:
        _HOM_CACHE[ck] = tuple(_ring_homs(A, B, injective, limit))
    return [TableMorphism(A, B, h.data) for h in _HOM_CACHE[ck]]


def _ring_homs(A, B, injective, limit):
    gens = generating_set(A)
    start = _extend(A, B, {}, [], [(A.zero, B.zero), (A.one, B.one)])
    if start is None:
        return []
    if injective:
        sigB = {}
        for b in B.elements:
            sigB.setdefault(_signature(B, b), []).append(b)
        candidates = [sigB.get(_signature(A, g), []) for g in gens]
    else:
        candidates = [B.elements] * len(gens)
    out = []
    ixA, elB = _itab(A)[1], _itab(B)[0]

    def rec(t, state):
        if limit is not None and len(out) >= limit:
            return
        phi, order = state
        if t == len(gens):
            if len(order) == A.size:
                table = tuple(elB[j] for j in phi)
                if not injective or len(set(table)) == len(table):
                    out.append(TableMorphism(A, B, table))
            return
        g = gens[t]
        if phi[ixA[g]] >= 0:
            rec(t + 1, state)
            return
        for h in candidates[t]:
            nxt = _extend(A, B, phi, order, [(g, h)])
            if nxt is not None:
                rec(t + 1, nxt)

    rec(0, start)
    return out


def is_ring_hom(A, B, table) -> bool:
    f = dict(zip(A.elements, table))
    if f[A.one] != B.one:
        return False
    for a in A.elements:
        for b in A.elements:
            if f[A.add(a, b)] != B.add(f[a], f[b]) or f[A.mul(a, b)] != B.mul(f[a], f[b]):
                return False
    return True


# ---------------------------------------------------------------------------
# ideals, local factors, localization


def is_ideal(A, I) -> bool:
    I = set(I)
    if A.zero not in I:
        return False
    for a in I:
        if A.neg(a) not in I:
            return False
        for b in I:
            if A.add(a, b) not in I:
                return False
        for r in A.elements:
            if A.mul(r, a) not in I:
                return False
    return True


def ideal_generated(A, gens) -> frozenset:
    I = {A.zero}
    frontier = [A.mul(r, g) for g in gens for r in A.elements]
    for x in frontier:
        I.add(x)
    changed = True
    while changed:
        changed = False
        cur = list(I)
        for a in cur:
            for b in cur:
                s = A.add(a, b)
                if s not in I:
                    I.add(s)
                    changed = True
    return frozenset(I)


def all_ideals(A) -> list:
    """Every ideal, as joins of principal ideals (exhaustive for finite rings)."""
    principal = {ideal_generated(A, [a]) for a in A.elements}
    ideals = set(principal)
    frontier = set(principal)
    while frontier:
        new = set()
        for I in frontier:
            for P in principal:
                J = ideal_generated(A, list(I | P))
                if J not in ideals:
                    new.add(J)
        ideals |= new
        frontier = new
    return sorted(ideals, key=lambda I: (len(I), sorted(map(sort_key, I))))


def is_prime_ideal(A, p) -> bool:
    p = set(p)
    if A.one in p or not is_ideal(A, p):
        return False
    S = [a for a in A.elements if a not in p]
    return all(A.mul(a, b) not in p for a in S for b in S)


def local_factors(A: FinCRingObj):
    """Primitive idempotents with their local factor rings and a product witness.

    Returns ``(factors, witness)`` where ``factors`` is a list of
    ``(e, eA)`` and ``witness`` is the isomorphism ``A -> prod eA``,
    ``a -> (e_i a)_i``.
    """
    idem = [e for e in A.idempotents if e != A.zero]
    primitive = [e for e in idem
                 if not any(f != e and A.mul(f, e) == f for f in idem)]
    primitive.sort(key=sort_key)
    factors = []
    for e in primitive:
        S = sorted({A.mul(e, a) for a in A.elements}, key=sort_key)
        R = TableRing.from_ops(S, A.add, A.mul, A.zero, e,
                               name=f"{A.name}*{e}", check=False, allow_zero=True)
        factors.append((e, R))
    P = ProductRing([R for _, R in factors])
    witness = TableMorphism(A, P, tuple(tuple(A.mul(e, a) for e, _ in factors)
                                        for a in A.elements))
    return factors, witness


def prime_ideals(A: FinCRingObj, brute_force_limit: int = 16) -> list:
    """Prime ideals in deterministic order.

    Exhaustive ideal enumeration for ``|A| <= brute_force_limit``; above that
    the primes are the preimages of the maximal ideals of the local factors.
    """
    if A.size <= brute_force_limit:
        return [frozenset(I) for I in all_ideals(A) if is_prime_ideal(A, I)]
    factors, _ = local_factors(A)
    out = []
    for e, R in factors:
        m = R.maximal_ideal
        out.append(frozenset(a for a in A.elements if A.mul(e, a) in m))
    return sorted(out, key=lambda I: (len(I), sorted(map(sort_key, I))))


def classical_localization(A: FinCRingObj, p, name=None):
    """``S^-1 A`` for ``S = A \\ p`` built from fraction pairs.

    Returns ``(ring, rho)`` with ``rho: A -> S^-1 A``.
    """
    p = frozenset(p)
    if not is_prime_ideal(A, p):
        raise NotPrime(f"{sorted(p, key=sort_key)} is not a prime ideal of {A.name}")
    S = [a for a in A.elements if a not in p]
    R, rho = fraction_ring(A, S, name or f"({A.name})_p")
    if not R.is_local():
        raise AxiomViolation("localization at a prime is not local", R.name)
    return R, rho


def fraction_ring(A: FinCRingObj, S, name, method: str = "cosets"):
    """``S^-1 A`` for a multiplicative set ``S`` (containing 1).

    By default the elements are fractions ``(a, 1)``: over a finite ring
    every ``s`` in ``S`` becomes a unit via a power of itself, so
    ``A -> S^-1 A`` is onto and the classes are the cosets of the ideal ``K``
    of elements killed by some ``s``.  ``method="pairs"`` runs the direct
    construction on all fraction pairs (quadratic; kept as a cross-check).
    """
    S = list(S)
    if A.one not in S:
        raise AxiomViolation("multiplicative set must contain 1")
    if method == "pairs":
        return _fraction_ring_pairs(A, S, name)
    K = frozenset(z for z in A.elements if any(A.mul(u, z) == A.zero for u in S))
    reps, at, mt, rho = _quotient_tables(A, K)
    els = [(c, A.one) for c in reps]
    pos = {a: i for i, a in enumerate(A.elements)}
    R = TableRing(els, at, mt, els[rho[pos[A.zero]]], els[rho[pos[A.one]]], name,
                  check=False, allow_zero=True)
    return R, TableMorphism(A, R, tuple(els[i] for i in rho))


@lru_cache(maxsize=4096)
def _quotient_tables(A, K):
    """Index tables of ``A/K`` on first-met coset representatives."""
    rep = {}
    for c in A.elements:
        if c not in rep:
            for k in K:
                rep.setdefault(A.add(c, k), c)
    reps = [c for c in A.elements if rep[c] == c]
    ridx = {c: i for i, c in enumerate(reps)}
    at = tuple(tuple(ridx[rep[A.add(a, b)]] for b in reps) for a in reps)
    mt = tuple(tuple(ridx[rep[A.mul(a, b)]] for b in reps) for a in reps)
    rho = tuple(ridx[rep[a]] for a in A.elements)
    return reps, at, mt, rho


def _fraction_ring_pairs(A, S, name):
    killed = {z for z in A.elements if any(A.mul(u, z) == A.zero for u in S)}
    reps, cls = [], {}
    for a in A.elements:
        for s in S:
            for b, t in reps:
                if A.sub(A.mul(a, t), A.mul(b, s)) in killed:
                    cls[a, s] = (b, t)
                    break
            else:
                reps.append((a, s))
                cls[a, s] = (a, s)

    def add(x, y):
        (a, s), (b, t) = x, y
        return cls[A.add(A.mul(a, t), A.mul(b, s)), A.mul(s, t)]

    def mul(x, y):
        (a, s), (b, t) = x, y
        return cls[A.mul(a, b), A.mul(s, t)]

    R = TableRing.from_ops(reps, add, mul, cls[A.zero, A.one], cls[A.one, A.one], name,
                           check=False, allow_zero=True)
    return R, TableMorphism(A, R, tuple(cls[a, A.one] for a in A.elements))


def residue_field_order(L: FinCRingObj) -> int:
    return L.size // len(L.maximal_ideal)


def residue_fields(A: FinCRingObj) -> list:
    """Shipped field objects isomorphic to the residue fields of ``A`` (deduplicated)."""
    out = []
    for _, R in local_factors(A)[0]:
        q = residue_field_order(R)
        F = _field_of_order(q)
        if F not in out:
            out.append(F)
    return sorted(out, key=lambda F: F.size)


# ---------------------------------------------------------------------------
# catalog of test objects


LOCAL_EXTRAS = (
    # (base spec, monic poly low -> high)
    ({"zmod": 4}, (0, 0, 1)),     # Z/4[x]/(x^2)
    ({"zmod": 4}, (2, 0, 1)),     # Z/4[x]/(x^2 + 2)
    ({"zmod": 4}, (2, 2, 1)),     # Z/4[x]/(x^2 + 2x + 2)
    ({"zmod": 4}, (1, 1, 1)),     # Galois ring GR(4, 2)
    ({"zmod": 4}, (0, 0, 0, 1)),  # Z/4[x]/(x^3)
    ({"zmod": 8}, (0, 0, 1)),     # Z/8[x]/(x^2)
    ({"zmod": 8}, (1, 1, 1)),     # GR(8, 2)
)


def local_catalog(bound: int) -> list:
    """Local rings of size <= bound used as test objects (not a classification)."""
    return list(_local_catalog(bound))


@lru_cache(maxsize=None)
def _local_catalog(bound: int) -> tuple:
    out = []
    for n in range(2, bound + 1):
        f = factorint(n)
        if len(f) == 1:
            out.append(zmod(n))
    for q in range(4, bound + 1):
        f = factorint(q)
        if len(f) == 1 and list(f.values())[0] > 1:
            try:
                out.append(_field_of_order(q))
            except AxiomViolation:
                pass
    fields = [R for R in out if R.is_field()]
    for F in fields:
        k = 2
        while F.size ** k <= bound:
            out.append(poly_quotient(F, (F.zero,) * k + (F.one,), name=f"{F.name}[t]/(t^{k})",
                                     check=False))
            k += 1
    for base, poly in LOCAL_EXTRAS:
        B = _build_ring(base)
        if B.size ** (len(poly) - 1) <= bound:
            R = poly_quotient(B, poly, check=True)
            if R.is_local():
                out.append(R)
    return tuple(sorted(out, key=lambda R: (R.size, R.name)))


def ring_catalog(bound: int) -> list:
    """Local catalog plus products of two or more catalog rings, size <= bound."""
    return list(_ring_catalog(bound))


@lru_cache(maxsize=None)
def _ring_catalog(bound: int) -> tuple:
    local = local_catalog(bound)
    out = list(local)

    def rec(start, chosen, size):
        if len(chosen) >= 2:
            out.append(ProductRing(chosen))
        for i in range(start, len(local)):
            R = local[i]
            if size * R.size <= bound:
                rec(i, chosen + [R], size * R.size)
    rec(0, [], 1)
    return tuple(sorted(out, key=lambda R: (R.size, len(getattr(R, "factors", (R,))), R.name)))


# ---------------------------------------------------------------------------


class FinCRing(Category):
    """Finite commutative rings; products and images, but no coproducts."""

    name = "FinCRing"
    has_coproducts = False
    has_colimits = False

    def __init__(self, bound: int = 64):
        super().__init__(bound)
        self._homs = {}
        self._catalog = {}

    def size(self, A):
        return A.size

    def describe(self, A):
        return A.name

    def objects(self, bound=None):
        bound = self.bound if bound is None else bound
        if bound not in self._catalog:
            self._catalog[bound] = ring_catalog(bound)
        return self._catalog[bound]

    def local_objects(self, bound=None):
        return [R for R in self.objects(bound) if not isinstance(R, ProductRing)]

    def hom(self, A, B):
        self.check_bound(A, B)
        key = (A, B)
        if key not in self._homs:
            self._homs[key] = ring_homs(A, B)
        return self._homs[key]

    def compose(self, g, f):
        if isinstance(f, LazyMorphism):
            self.check_bound(f.dom)
        return TableMorphism(f.dom, g.cod, tuple(g(f(a)) for a in f.dom.elements)
                             if isinstance(f, LazyMorphism) else tuple(g(y) for y in f.data))

    def identity(self, A):
        return TableMorphism(A, A, A.elements)

    def morphism(self, A, B, mapping):
        get = mapping.__getitem__ if isinstance(mapping, dict) else mapping
        table = tuple(get(a) for a in A.elements)
        if not is_ring_hom(A, B, table):
            raise AxiomViolation("map is not a unital ring homomorphism", (A.name, B.name))
        return TableMorphism(A, B, table)

    def automorphisms(self, A):
        return ring_homs(A, A, injective=True)

    def is_mono(self, f):
        return len(set(f.data)) == len(f.data)

    def is_surjective(self, f):
        return len(set(f.data)) == f.cod.size

    def is_epi(self, f):
        if self.is_surjective(f):
            return True
        return self.is_epi_by_enumeration(f)

    def is_iso(self, f):
        return f.dom.size == f.cod.size and self.is_mono(f)

    def inverse(self, f):
        if not self.is_iso(f):
            return None
        back = {y: x for x, y in zip(f.dom.elements, f.data)}
        return TableMorphism(f.cod, f.dom, tuple(back[y] for y in f.cod.elements))

    def coproduct(self, objs):
        raise NoCoproduct("finite coproducts (tensor products) are not provided in FinCRing")

    def copair(self, cocone, maps, target=None):
        raise NoCoproduct("finite coproducts (tensor products) are not provided in FinCRing")

    def product(self, objs):
        P = ProductRing(objs)
        legs = []
        for i, R in enumerate(objs):
            fn = (lambda i: lambda x: x[i])(i)
            if P.size <= self.bound:
                legs.append(TableMorphism(P, R, tuple(x[i] for x in P.elements)))
            else:
                legs.append(LazyMorphism(P, R, ("projection", i, len(objs)), fn))
        return Universal(P, tuple(legs))

    def pair(self, cone, maps, source=None):
        S = maps[0].dom if maps else source
        return TableMorphism(S, cone.obj, tuple(tuple(f(a) for f in maps) for a in S.elements))

    def image(self, f):
        I = subring_from_set(f.cod, set(f.data), name=f"im({f.dom.name} -> {f.cod.name})")
        return Factorization(TableMorphism(f.dom, I, f.data), I,
                             TableMorphism(I, f.cod, I.elements))

    def coimage(self, f):
        classes = {}
        for a, b in zip(f.dom.elements, f.data):
            classes.setdefault(b, []).append(a)
        label = {b: tuple(sorted(v, key=sort_key)) for b, v in classes.items()}
        value = {lab: b for b, lab in label.items()}
        A = f.dom
        C = TableRing.from_ops(sorted(label.values(), key=sort_key),
                               lambda x, y: label[f(A.add(x[0], y[0]))],
                               lambda x, y: label[f(A.mul(x[0], y[0]))],
                               label[f(A.zero)], label[f(A.one)],
                               name=f"{A.name}/ker", check=False, allow_zero=True)
        e = TableMorphism(A, C, tuple(label[b] for b in f.data))
        m = TableMorphism(C, f.cod, tuple(value[c] for c in C.elements))
        return Factorization(e, C, m)

    def find_isomorphism(self, A, B):
        if A == B:
            return self.identity(A)
        if A.size != B.size:
            return None
        inv = lambda R: (R.characteristic, len(R.units), len(R.idempotents), len(R.nilpotents))
        if inv(A) != inv(B):
            return None
        found = ring_homs(A, B, injective=True, limit=1)
        return found[0] if found else None

    def object_data(self, A):
        if isinstance(A, ProductRing):
            return {"name": A.name, "product": [self.object_data(R) for R in A.factors]}
        return {"name": A.name, "elements": list(A.elements), "zero": A.zero, "one": A.one,
                "add": [list(r) for r in A.add_table], "mul": [list(r) for r in A.mul_table]}

    def morphism_data(self, f):
        if isinstance(f, LazyMorphism):
            return {"symbolic": list(f.data)}
        return {"table": [[a, b] for a, b in zip(f.dom.elements, f.data)]}
