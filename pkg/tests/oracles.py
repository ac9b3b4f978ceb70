"""Brute-force reference computations used to derive frozen test values.

These use plain integers and exhaustive search over functions, subsets and
test objects.  None of them call the engine's constructions; ring oracles
read only element lists and the ``add``/``mul`` operations.
"""

from __future__ import annotations

import itertools
from math import gcd


def primes_upto(n):
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, int(p ** 0.5) + 1))]


# -- abelian groups as tuples of residues --------------------------------

def group_elements(orders):
    return list(itertools.product(*[range(n) for n in orders]))


def group_add(orders, a, b):
    return tuple((x + y) % n for x, y, n in zip(a, b, orders))


def group_scale(orders, k, a):
    return tuple((k * x) % n for x, n in zip(a, orders))


def element_order(orders, a):
    k, x = 1, a
    while any(x):
        x = group_add(orders, x, a)
        k += 1
    return k


def count_group_homs(src, dst):
    """All functions src -> dst checked for additivity (generator images
    enumerated only to avoid |dst|^|src| work; each is checked on all pairs)."""
    S, D = group_elements(src), group_elements(dst)
    count = 0
    for imgs in itertools.product(D, repeat=len(src)):
        f = {}
        for a in S:
            v = tuple(0 for _ in dst)
            for ai, g in zip(a, imgs):
                v = group_add(dst, v, group_scale(dst, ai, g))
            f[a] = v
        if all(f[group_add(src, a, b)] == group_add(dst, f[a], f[b]) for a in S for b in S):
            count += 1
    return count


def group_localization(orders, a, bound):
    """Localization of ``(G, a)`` among ``(Z/p, 1)`` with ``p`` prime ``<= bound``.

    Squares use the base isos ``+-1`` of Z.  Returns the prime ``p`` of the
    unique passing candidate, or ``None``.
    """
    primes = primes_upto(bound)
    neg = group_scale(orders, -1, a)

    def maps(q, target_images):
        # additive maps Z/q -> G given by the image of 1
        return [g for g in group_elements(orders)
                if not any(group_scale(orders, q, g)) and g in target_images]

    found = []
    for p in primes:
        for r in maps(p, {a, neg}):
            ok = True
            for q in primes:
                for l in range(1, q):
                    for g in group_elements(orders):
                        # gamma: Z/q -> G with gamma(l) = +-a
                        if any(group_scale(orders, q, g)):
                            continue
                        if group_scale(orders, l, g) not in (a, neg):
                            continue
                        count = 0
                        for k in range(p):  # kappa: Z/q -> Z/p, 1 -> k
                            if (q * k) % p:
                                continue
                            if (l * k) % p not in (1, p - 1):
                                continue
                            if group_scale(orders, k, r) == g:
                                count += 1
                        if count != 1:
                            ok = False
                if not ok:
                    break
            if ok:
                found.append(p)
                break
    return found[0] if found else None


# -- finite rings through their element lists ----------------------------

def prime_ideals_bruteforce(A):
    """All proper ideals ``p`` with ``ab in p => a in p or b in p``, by subsets."""
    els = list(A.elements)
    out = []
    for r in range(1, len(els)):
        for sub in itertools.combinations(els, r):
            I = set(sub)
            if A.zero not in I or A.one in I:
                continue
            if any(A.add(x, y) not in I for x in I for y in I):
                continue
            if any(A.mul(a, x) not in I for a in els for x in I):
                continue
            if any(A.mul(a, b) in I and a not in I and b not in I for a in els for b in els):
                continue
            out.append(frozenset(I))
    return out


def localization_size(A, p):
    """``|A_p| = |A| / |K|`` with ``K`` the elements killed by something outside ``p``."""
    S = [s for s in A.elements if s not in p]
    K = [z for z in A.elements if any(A.mul(s, z) == A.zero for s in S)]
    return len(A.elements) // len(K)


def count_ring_homs(A, B, limit=300_000):
    """Every function ``A -> B`` checked against 0, 1, + and *."""
    a, b = list(A.elements), list(B.elements)
    if len(b) ** len(a) > limit:
        raise ValueError("too many functions")
    count = 0
    for imgs in itertools.product(b, repeat=len(a)):
        f = dict(zip(a, imgs))
        if f[A.one] != B.one:
            continue
        if all(f[A.add(x, y)] == B.add(f[x], f[y]) and f[A.mul(x, y)] == B.mul(f[x], f[y])
               for x in a for y in a):
            count += 1
    return count


def zmod_inverted_size(n, f):
    """``|Z/n [1/f]|``: cosets of the ideal of elements killed by a power of ``f``."""
    K = {z for z in range(n) if any((pow(f, k, n) * z) % n == 0 for k in range(n + 1))}
    return n // len(K)


def idempotents_bruteforce(A):
    return sorted(e for e in A.elements if A.mul(e, e) == e)


def vect_hom_count(q, m, n):
    return q ** (m * n)


def finset_hom_count(m, n):
    return n ** m


def cyclic_hom_count(m, n):
    return gcd(m, n)
