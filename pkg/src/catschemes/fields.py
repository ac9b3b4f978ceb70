"""Arithmetic tables for F_{p^k} built from an explicitly stored irreducible polynomial.

Elements are encoded as integers ``0 .. q-1`` whose base-``p`` digits are the
coefficients of the residue polynomial (least significant digit = constant
term).  For ``k == 1`` this is plain arithmetic mod ``p``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from sympy import factorint, isprime

from .errors import AxiomViolation

# monic, low -> high coefficients
DEFAULT_POLYNOMIALS = {
    (2, 2): (1, 1, 1),           # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),        # x^3 + x + 1
    (2, 4): (1, 1, 0, 0, 1),     # x^4 + x + 1
    (2, 5): (1, 0, 1, 0, 0, 1),  # x^5 + x^2 + 1
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (3, 2): (1, 0, 1),           # x^2 + 1
    (3, 3): (1, 2, 0, 1),        # x^3 + 2x + 1
    (5, 2): (2, 0, 1),           # x^2 + 2
    (7, 2): (1, 0, 1),           # x^2 + 1
}


def poly_str(poly, var="x") -> str:
    terms = []
    for deg in range(len(poly) - 1, -1, -1):
        c = poly[deg]
        if c == 0:
            continue
        if deg == 0:
            terms.append(str(c))
        else:
            mono = var if deg == 1 else f"{var}^{deg}"
            terms.append(mono if c == 1 else f"{c}{mono}")
    return " + ".join(terms) or "0"


class FieldTable:
    """Addition/multiplication tables of a finite field, checked at construction."""

    def __init__(self, p: int, k: int = 1, poly=None):
        if not isprime(p) or k < 1:
            raise AxiomViolation("field characteristic must be prime and degree >= 1", (p, k))
        if poly is None:
            poly = (0, 1) if k == 1 else DEFAULT_POLYNOMIALS.get((p, k))
            if poly is None:
                raise AxiomViolation("no default irreducible polynomial configured", (p, k))
        poly = tuple(int(c) % p for c in poly)
        if len(poly) != k + 1 or poly[-1] != 1:
            raise AxiomViolation("polynomial must be monic of degree k", poly)
        self.p, self.k, self.poly = p, k, poly
        self.q = q = p ** k
        digits = [self._digits(a) for a in range(q)]
        self.add = [[self._encode([(x + y) % p for x, y in zip(digits[a], digits[b])])
                     for b in range(q)] for a in range(q)]
        self.mul = [[self._encode(self._polymulmod(digits[a], digits[b]))
                     for b in range(q)] for a in range(q)]
        self.neg = [self.add[a].index(0) for a in range(q)]
        self.inv = [None] + [self.mul[a].index(1) if 1 in self.mul[a] else None
                             for a in range(1, q)]
        self._check()

    @property
    def key(self):
        return (self.p, self.k, self.poly)

    @property
    def name(self):
        return f"F_{self.q}"

    def __eq__(self, other):
        return isinstance(other, FieldTable) and self.key == other.key

    def __hash__(self):
        return hash(("field",) + self.key)

    def __repr__(self):
        if self.k == 1:
            return f"FieldTable({self.p})"
        return f"FieldTable({self.p}, {self.k}, {self.poly})"

    def describe(self):
        if self.k == 1:
            return self.name
        return f"{self.name} = F_{self.p}[x]/({poly_str(self.poly)})"

    def _digits(self, a):
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return out

    def _encode(self, digits):
        a = 0
        for d in reversed(digits):
            a = a * self.p + d
        return a

    def _polymulmod(self, u, v):
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    prod[i + j] = (prod[i + j] + a * b) % p
        for deg in range(len(prod) - 1, k - 1, -1):
            c = prod[deg]
            if c:
                for j in range(k + 1):
                    prod[deg - k + j] = (prod[deg - k + j] - c * self.poly[j]) % p
        return prod[:k]

    def _check(self):
        q = self.q
        A = np.array(self.add)
        M = np.array(self.mul)
        r = np.arange(q)
        for name, T in (("addition", A), ("multiplication", M)):
            if not (T == T.T).all():
                raise AxiomViolation(f"{name} not commutative", tuple(np.argwhere(T != T.T)[0]))
            lhs = T[T[:, :, None], r[None, None, :]]
            rhs = T[r[:, None, None], T[None, :, :]]
            bad = np.argwhere(lhs != rhs)
            if len(bad):
                raise AxiomViolation(f"{name} not associative", tuple(int(x) for x in bad[0]))
        dist_l = M[r[:, None, None], A[None, :, :]]
        dist_r = A[M[:, :, None], M[:, None, :]]
        bad = np.argwhere(dist_l != dist_r)
        if len(bad):
            raise AxiomViolation("distributivity fails", tuple(int(x) for x in bad[0]))
        missing = [a for a in range(1, q) if self.inv[a] is None]
        if missing:
            raise AxiomViolation("polynomial is reducible: element without inverse", missing[0])
        if self.generator() is None:
            raise AxiomViolation("multiplicative group not cyclic", q)

    def mult_order(self, a):
        if a == 0:
            return None
        x, n = a, 1
        while x != 1:
            x = self.mul[x][a]
            n += 1
        return n

    def generator(self):
        """Smallest element of multiplicative order q - 1."""
        for a in range(1, self.q):
            if self.mult_order(a) == self.q - 1:
                return a
        return None


@lru_cache(maxsize=None)
def field_table(p: int, k: int = 1, poly=None) -> FieldTable:
    return FieldTable(p, k, None if poly is None else tuple(poly))


def field_of_order(q: int, poly=None) -> FieldTable:
    f = factorint(q)
    if len(f) != 1:
        raise AxiomViolation("field order must be a prime power", q)
    (p, k), = f.items()
    return field_table(p, k, None if poly is None else tuple(poly))
