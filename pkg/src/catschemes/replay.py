"""Independent replay of serialized certificates.

Only the JSON documents are used: algebras are rebuilt from their element
lists and operation tables, homomorphisms are enumerated by a separate
backtracking search over element indices, and every commuting square and
mediator count is re-derived.  Nothing here calls the engine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np


class ReplayError(Exception):
    pass


class Alg:
    def __init__(self, oid, d):
        self.oid = oid
        self.kind = d["kind"]
        self.name = d.get("name", oid)
        self.binary, self.unary, self.constants = [], [], []
        if self.kind == "opaque":
            if "dim" not in d or "add" not in d.get("field", {}):
                raise ReplayError(f"object {self.name} was too large to embed")
            # oversize vector spaces are checked through their matrices only
            self.kind, self.n, self.dim, self._field = "linear", None, d["dim"], d["field"]
            return
        if self.kind == "free_cyclic":
            self.n = None
            return
        els = [_tup(e) for e in d["elements"]]
        self.n = len(els)
        if self.kind == "set":
            return
        if self.kind == "abelian_group":
            self.binary = [d["add"]]
            self.constants = [d["zero"]]
        elif self.kind == "ring":
            self.binary = [d["add"], d["mul"]]
            self.constants = [d["zero"], d["one"]]
        elif self.kind == "vector_space":
            F = d["field"]
            fa, fm = F["add"], F["mul"]
            idx = {e: i for i, e in enumerate(els)}
            self.binary = [[[idx[tuple(fa[x][y] for x, y in zip(a, b))] for b in els]
                            for a in els]]
            self.unary = [[idx[tuple(fm[c][x] for x in a)] for a in els] for c in range(F["q"])]
            self.constants = [d["zero"]]
            self._field, self.dim, self.els, self.idx = F, d["dim"], els, idx
        else:
            raise ReplayError(f"unknown algebra kind {self.kind}")

    @property
    def free(self):
        return self.kind == "free_cyclic"

    def axiom_problems(self) -> list:
        """Laws of the tables: abelian group under the first operation, then a
        commutative unital ring for the second.  Vector spaces check their field."""
        if self.kind in ("free_cyclic", "set"):
            return []
        if self.kind in ("vector_space", "linear"):
            F = self._field
            return [f"field: {p}" for p in _table_laws(F["q"], [F["add"], F["mul"]], [0, 1])]
        return _table_laws(self.n, self.binary, self.constants)

    def neg(self, a):
        add, z = self.binary[0], self.constants[0]
        return next(j for j in range(self.n) if add[a][j] == z)


def _table_laws(n, binary, constants) -> list:
    out = []
    tabs = [np.asarray(t, dtype=np.int64) for t in binary]
    if any(t.shape != (n, n) or t.min(initial=0) < 0 or t.max(initial=0) >= n for t in tabs):
        return ["operation table has the wrong shape or leaves the element set"]
    if any(not (0 <= c < n) for c in constants):
        return ["constant outside the element set"]
    ar = np.arange(n)
    names = ["addition", "multiplication"]
    for t, c, name in zip(tabs, constants, names):
        if not (t == t.T).all():
            out.append(f"{name} is not commutative")
        if not (t[c] == ar).all():
            out.append(f"{name} has no identity {c}")
        if any(not (t[t[i]] == t[i][t]).all() for i in range(n)):
            out.append(f"{name} is not associative")
    add = tabs[0]
    if not (add == constants[0]).any(axis=1).all():
        out.append("addition has elements without a negative")
    if len(tabs) > 1:
        mul = tabs[1]
        if any(not (mul[i][add] == add[mul[i]][:, mul[i]]).all() for i in range(n)):
            out.append("multiplication does not distribute over addition")
    return out


def _is_matrix_map(A, B, m) -> bool:
    lin = ("vector_space", "linear")
    if A.kind not in lin or B.kind not in lin or A._field != B._field:
        return False
    q = A._field["q"]
    return (len(m) == B.dim and all(len(r) == A.dim for r in m)
            and all(0 <= x < q for r in m for x in r))


def _matmul(F, g, f):
    add, mul = F["add"], F["mul"]
    inner = len(f)
    cols = len(f[0]) if f else 0
    out = []
    for row in g:
        r = []
        for j in range(cols):
            acc = 0
            for k in range(inner):
                acc = add[acc][mul[row[k]][f[k][j]]]
            r.append(acc)
        out.append(tuple(r))
    return tuple(out)


def _apply(F, m, v) -> tuple:
    add, mul = F["add"], F["mul"]
    out = []
    for row in m:
        acc = 0
        for a, x in zip(row, v):
            acc = add[acc][mul[a][x]]
        out.append(acc)
    return tuple(out)


def _rank(F, m) -> int:
    """Row rank over the field given by its tables (additive zero 0, unit 1)."""
    add, mul, q = F["add"], F["mul"], F["q"]
    inv = {a: next(b for b in range(q) if mul[a][b] == 1) for a in range(1, q)}
    neg = [next(b for b in range(q) if add[a][b] == 0) for a in range(q)]
    rows = [list(r) for r in m]
    rank, cols = 0, len(rows[0]) if rows else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        s = inv[rows[rank][c]]
        rows[rank] = [mul[s][x] for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                t = neg[rows[i][c]]
                rows[i] = [add[x][mul[t][y]] for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _tup(e):
    return tuple(_tup(x) for x in e) if isinstance(e, list) else e


@dataclass(frozen=True)
class Map:
    dom: str
    cod: str
    kind: str
    data: tuple
    # linear table maps also keep their matrix, for composing with matrix-only maps
    matrix: tuple | None = field(default=None, compare=False)

    @classmethod
    def parse(cls, d):
        if "scalar" in d:
            return cls(d["dom"], d["cod"], "scalar", (d["scalar"],))
        if "generator" in d:
            return cls(d["dom"], d["cod"], "generator", (d["generator"],))
        if "map" not in d:
            if "matrix" in d:
                return cls(d["dom"], d["cod"], "matrix", tuple(tuple(r) for r in d["matrix"]))
            raise ReplayError("morphism was too large to embed as a table")
        mat = tuple(tuple(r) for r in d["matrix"]) if "matrix" in d else None
        return cls(d["dom"], d["cod"], "map", tuple(d["map"]), mat)


class Replayer:
    def __init__(self, doc):
        self.doc = doc
        self.algs = {oid: Alg(oid, d) for oid, d in doc["objects"].items()}
        self.axiom_problems = [f"object {a.name}: {p}" for a in self.algs.values()
                               for p in a.axiom_problems()]
        self.contra = doc["orientation"] == "contravariant"
        self._homs = {}

    # -- concrete maps --------------------------------------------------
    def compose(self, g: Map, f: Map) -> Map:
        """Concrete ``g . f`` (apply ``f`` first)."""
        if f.cod != g.dom:
            raise ReplayError("composition of non-composable maps")
        if "matrix" in (f.kind, g.kind):
            mg, mf = (m.data if m.kind == "matrix" else m.matrix for m in (g, f))
            if mg is None or mf is None:
                raise ReplayError("cannot compose a matrix with a table")
            return Map(f.dom, g.cod, "matrix", _matmul(self.algs[f.dom]._field, mg, mf))
        if f.kind == "map":
            return Map(f.dom, g.cod, "map", tuple(g.data[i] for i in f.data))
        if f.kind == "generator":
            if g.kind != "map":
                raise ReplayError("unexpected map out of a finite object")
            return Map(f.dom, g.cod, "generator", (g.data[f.data[0]],))
        s = f.data[0]
        if g.kind == "scalar":
            return Map(f.dom, g.cod, "scalar", (s * g.data[0],))
        a = g.data[0]
        return Map(f.dom, g.cod, "generator", (a if s == 1 else self.algs[g.cod].neg(a),))

    def wcompose(self, g: Map, f: Map) -> Map:
        """Composition in the working category."""
        return self.compose(f, g) if self.contra else self.compose(g, f)

    def is_hom(self, f: Map) -> bool:
        A, B = self.algs[f.dom], self.algs[f.cod]
        if f.kind == "matrix":
            return _is_matrix_map(A, B, f.data)
        if f.kind == "scalar":
            return A.free and B.free and f.data[0] in (1, -1)
        if f.kind == "generator":
            return A.free and not B.free and 0 <= f.data[0] < B.n
        m = f.data
        if len(m) != A.n or any(not (0 <= y < B.n) for y in m):
            return False
        if f.matrix is not None and not self._matrix_matches(A, B, f):
            return False
        if any(m[a] != b for a, b in zip(A.constants, B.constants)):
            return False
        for TA, TB in zip(A.unary, B.unary):
            if any(m[TA[a]] != TB[m[a]] for a in range(A.n)):
                return False
        for TA, TB in zip(A.binary, B.binary):
            for a in range(A.n):
                ra, ma = TA[a], m[a]
                rb = TB[ma]
                for b in range(A.n):
                    if m[ra[b]] != rb[m[b]]:
                        return False
        return True

    def _matrix_matches(self, A, B, f) -> bool:
        if A.kind != "vector_space" or B.kind != "vector_space" or not _is_matrix_map(A, B, f.matrix):
            return False
        for i, v in enumerate(A.els):
            if B.idx.get(_apply(A._field, f.matrix, v)) != f.data[i]:
                return False
        return True

    def is_iso(self, f: Map) -> bool:
        if f.kind == "scalar":
            return f.data[0] in (1, -1)
        if f.kind == "generator":
            return False
        if f.kind == "matrix":
            A, B = self.algs[f.dom], self.algs[f.cod]
            return (self.is_hom(f) and A.dim == B.dim
                    and _rank(A._field, f.data) == A.dim)
        return self.is_hom(f) and len(set(f.data)) == len(f.data) == self.algs[f.cod].n

    # -- independent hom enumeration ------------------------------------
    def homs(self, a: str, b: str) -> list:
        key = (a, b)
        if key in self._homs:
            return self._homs[key]
        A, B = self.algs[a], self.algs[b]
        if A.free:
            out = ([Map(a, b, "scalar", (1,)), Map(a, b, "scalar", (-1,))] if B.free
                   else [Map(a, b, "generator", (i,)) for i in range(B.n)])
        elif B.free:
            raise ReplayError("maps into the free cyclic group are not replayed")
        elif A.kind == "set":
            out = [Map(a, b, "map", t) for t in itertools.product(range(B.n), repeat=A.n)]
        else:
            out = [Map(a, b, "map", t) for t in self._search(A, B)]
        self._homs[key] = out
        return out

    def _search(self, A, B):
        start = {}
        for ca, cb in zip(A.constants, B.constants):
            if start.get(ca, cb) != cb:
                return []
            start[ca] = cb
        start = self._propagate(A, B, start, list(start))
        if start is None:
            return []
        found = []

        def rec(m):
            free = next((i for i in range(A.n) if i not in m), None)
            if free is None:
                found.append(tuple(m[i] for i in range(A.n)))
                return
            for y in range(B.n):
                m2 = dict(m)
                m2[free] = y
                m2 = self._propagate(A, B, m2, [free])
                if m2 is not None:
                    rec(m2)

        rec(start)
        return found

    def _propagate(self, A, B, m, fresh):
        queue = list(fresh)
        while queue:
            x = queue.pop()
            pairs = [(x, y) for y in list(m)] + [(y, x) for y in list(m)]
            for TA, TB in zip(A.unary, B.unary):
                z, fz = TA[x], TB[m[x]]
                if z in m:
                    if m[z] != fz:
                        return None
                else:
                    m[z] = fz
                    queue.append(z)
            for TA, TB in zip(A.binary, B.binary):
                for u, v in pairs:
                    z, fz = TA[u][v], TB[m[u]][m[v]]
                    if z in m:
                        if m[z] != fz:
                            return None
                    else:
                        m[z] = fz
                        queue.append(z)
        return m

    def whoms(self, a, b) -> list:
        """Working-category arrows ``a -> b`` as concrete maps."""
        return self.homs(b, a) if self.contra else self.homs(a, b)

    def isos(self, p, q) -> list:
        return [f for f in self.whoms(p, q) if self.is_iso(f)]

    def square(self, top: Map, left: Map, right: Map, p: str, q: str) -> bool:
        """Some working iso ``b: p -> q`` with ``top . left = right . b``."""
        lhs = self.wcompose(top, left)
        return any(self.wcompose(right, b) == lhs for b in self.isos(p, q))


@dataclass
class ReplayResult:
    ok: bool
    problems: list = field(default_factory=list)
    recounted: int = 0


def replay_certificate(doc) -> ReplayResult:
    problems = []
    try:
        R = Replayer(doc)
        X, C = doc["object"], doc["localized"]
        xs = [(p["base"], Map.parse(p["arrow"])) for p in doc["points"]]
        ms = [(p["base"], Map.parse(p["arrow"])) for p in doc["marks"]]
        rho = Map.parse(doc["rho"])
        want = (X, C) if R.contra else (C, X)
        if (rho.dom, rho.cod) != want:
            problems.append("rho has the wrong endpoints")
        for name, f in [("rho", rho)] + [("point", f) for _, f in xs] + [("mark", f) for _, f in ms]:
            if not R.is_hom(f):
                problems.append(f"{name} is not a homomorphism")
        if len(xs) != len(ms):
            problems.append("marks and points differ in number")
        for (pb, m), (xb, x) in zip(ms, xs):
            if not R.square(rho, m, x, pb, xb):
                problems.append("rho does not carry the mark to the point")
        problems.extend(R.axiom_problems)
        recorded_tests = {}
        recounted = 0
        for k, t in enumerate(doc["tests"]):
            L = t["object"]
            ls = [(p["base"], Map.parse(p["arrow"])) for p in t["marks"]]
            gamma = Map.parse(t["gamma"])
            if not R.is_hom(gamma):
                problems.append(f"test {k}: gamma is not a homomorphism")
            for (lb, l), (xb, x) in zip(ls, xs):
                if not R.square(gamma, l, x, lb, xb):
                    problems.append(f"test {k}: gamma does not carry the mark to the point")
            found = []
            for kappa in R.whoms(L, C):
                if R.wcompose(rho, kappa) != gamma:
                    continue
                if all(R.square(kappa, l, m, lb, mb) for (lb, l), (mb, m) in zip(ls, ms)):
                    found.append(kappa)
            recorded = [Map.parse(d) for d in t["mediators"]]
            recounted += 1
            if len(found) != 1:
                problems.append(f"test {k}: recount finds {len(found)} mediators")
            if len(recorded) != len(found) or set(found) != set(recorded):
                problems.append(f"test {k}: recorded mediators differ from the recount")
            key = (L, tuple(ls), gamma)
            if key in recorded_tests:
                problems.append(f"test {k} repeats test {recorded_tests[key]}")
            recorded_tests.setdefault(key, k)
        # every gamma out of every member must have been tested
        members = doc.get("members")
        if members is None:
            problems.append("certificate does not list the subcategory members")
            members = []
        for j, mem in enumerate(members):
            L = mem["object"]
            ls = tuple((p["base"], Map.parse(p["arrow"])) for p in mem["marks"])
            for g in R.whoms(L, X):
                if all(R.square(g, l, x, lb, xb) for (lb, l), (xb, x) in zip(ls, xs)):
                    if (L, ls, g) not in recorded_tests:
                        problems.append(f"member {j} ({R.algs[L].name}): an admissible gamma "
                                        "was not tested")
                        break
        member_keys = {(m["object"], tuple((p["base"], Map.parse(p["arrow"])) for p in m["marks"]))
                       for m in members}
        for (L, ls, _), k in recorded_tests.items():
            if (L, ls) not in member_keys:
                problems.append(f"test {k} is not over a listed member")
        return ReplayResult(not problems, problems, recounted)
    except (ReplayError, KeyError, IndexError, TypeError) as exc:
        return ReplayResult(False, problems + [f"{type(exc).__name__}: {exc}"])


def replay_iso(doc) -> ReplayResult:
    try:
        R = Replayer(doc)
        f = Map.parse(doc["iso"])
        problems = list(R.axiom_problems)
        if not R.is_iso(f):
            problems.append("witness is not a bijective homomorphism")
        return ReplayResult(not problems, problems)
    except (ReplayError, KeyError, IndexError, TypeError) as exc:
        return ReplayResult(False, [f"{type(exc).__name__}: {exc}"])


def replay_maps(doc) -> ReplayResult:
    """Check each table-embedded map of a morphism document is a homomorphism.

    When ``gamma`` and both factorization parts are present, also checks
    ``mono_part . epi_part == gamma``.  Maps written only structurally are
    counted as not replayed rather than failed.
    """
    try:
        R = Replayer(doc)
    except ReplayError as exc:
        return ReplayResult(True, [f"not replayed: {exc}"])
    problems, maps = list(R.axiom_problems), {}
    for k, d in doc.items():
        if k in ("objects", "orientation") or not isinstance(d, dict):
            continue
        try:
            maps[k] = Map.parse(d)
        except ReplayError:
            continue
        if not R.is_hom(maps[k]):
            problems.append(f"{k} is not a homomorphism")
    if {"gamma", "epi_part", "mono_part"} <= set(maps):
        try:
            composed = R.wcompose(maps["mono_part"], maps["epi_part"])
        except ReplayError as exc:
            composed = None
            problems.append(f"factorization: {exc}")
        if composed is not None and composed != maps["gamma"]:
            problems.append("factorization does not compose to gamma")
    return ReplayResult(not problems, problems, len(maps))


def replay_report(report) -> list:
    """Replay every certificate and isomorphism witness embedded in a report."""
    out = []

    def walk(node, path):
        if isinstance(node, dict):
            if "tests" in node and "rho" in node and "objects" in node:
                out.append((path, replay_certificate(node)))
                return
            if "iso" in node and "objects" in node:
                out.append((path, replay_iso(node)))
                return
            if "objects" in node and "orientation" in node:
                out.append((path, replay_maps(node)))
                return
            for k in sorted(node):
                walk(node[k], f"{path}/{k}")
        elif isinstance(node, list):
            for i, v in enumerate(node):
                walk(v, f"{path}/{i}")

    walk(report, "")
    return out
