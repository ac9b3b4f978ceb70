"""Report encoding.

Objects are written as explicit algebras (element list plus operation
tables) so that certificates can be replayed without the engine; morphisms
are concrete maps written as index lists aligned with the domain's elements.
Output is JSON with sorted keys, so equal reports are byte-identical.
"""

from __future__ import annotations

import json

from .core import underlying
from .instances.finab import FREE, FinAbObj, FreeCyclic, GroupMorphism
from .instances.fincring import FinCRingObj, LazyMorphism, ProductRing
from .instances.finset import FinSetObj
from .instances.finvect import FinVectObj, LinearMap

EMBED_LIMIT = 256


def plain(v):
    """JSON-friendly form: tuples and sets become (sorted) lists."""
    if isinstance(v, (list, tuple)):
        return [plain(x) for x in v]
    if isinstance(v, (set, frozenset)):
        return sorted((plain(x) for x in v), key=lambda x: json.dumps(x, sort_keys=True))
    if isinstance(v, dict):
        return {str(k): plain(x) for k, x in v.items()}
    if isinstance(v, bool) or v is None or isinstance(v, (int, float, str)):
        return v
    return repr(v)


def dumps(doc) -> str:
    return json.dumps(plain(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _elements(A):
    if isinstance(A, FinVectObj):
        return A.elements
    return tuple(A.elements)


def size_of(A) -> int:
    if isinstance(A, FreeCyclic):
        return 1
    if isinstance(A, FinVectObj):
        return A.field.q ** A.dim
    if isinstance(A, FinAbObj):
        return A.order
    if isinstance(A, FinCRingObj):
        return A.size
    return len(A.elements)


def _name(A):
    return A.name if isinstance(A, FinCRingObj) else repr(A)


def _field_doc(F) -> dict:
    return {"p": F.p, "k": F.k, "poly": list(F.poly), "q": F.q,
            "add": [list(r) for r in F.add], "mul": [list(r) for r in F.mul]}


def algebra(A) -> dict:
    """Explicit structure of ``A`` for independent checking."""
    if isinstance(A, FreeCyclic):
        return {"kind": "free_cyclic", "name": "Z"}
    if size_of(A) > EMBED_LIMIT:
        out = {"kind": "opaque", "name": _name(A), "size": size_of(A)}
        if isinstance(A, FinVectObj):
            out.update(dim=A.dim, field=_field_doc(A.field))
        elif isinstance(A, FinAbObj):
            out["orders"] = list(A.orders)
        elif isinstance(A, ProductRing):
            out["factors"] = [_name(R) for R in A.factors]
        return out
    els = _elements(A)
    idx = {a: i for i, a in enumerate(els)}
    if isinstance(A, FinSetObj):
        return {"kind": "set", "name": repr(A), "elements": plain(els)}
    if isinstance(A, FinAbObj):
        return {"kind": "abelian_group", "name": repr(A), "orders": list(A.orders),
                "elements": plain(els), "zero": idx[A.zero],
                "add": [[idx[A.add(a, b)] for b in els] for a in els]}
    if isinstance(A, FinVectObj):
        return {"kind": "vector_space", "name": repr(A), "dim": A.dim, "field": _field_doc(A.field),
                "elements": plain(els), "zero": idx[A.zero]}
    if isinstance(A, FinCRingObj):
        return {"kind": "ring", "name": A.name, "elements": plain(els),
                "zero": idx[A.zero], "one": idx[A.one],
                "add": [[idx[A.add(a, b)] for b in els] for a in els],
                "mul": [[idx[A.mul(a, b)] for b in els] for a in els]}
    raise TypeError(f"cannot serialize {A!r}")


class Encoder:
    """Assigns stable ids to objects in order of first appearance."""

    def __init__(self, cfg=None):
        self.cfg = cfg
        self.objects = {}
        self._ids = {}

    def obj(self, A) -> str:
        key = (type(A).__name__, A)
        if key not in self._ids:
            oid = f"o{len(self._ids)}"
            self._ids[key] = oid
            self.objects[oid] = algebra(A)
        return self._ids[key]

    def mor(self, f) -> dict:
        """Concrete map (opposite wrappers removed)."""
        f = underlying(f)
        out = {"dom": self.obj(f.dom), "cod": self.obj(f.cod)}
        if isinstance(f.dom, FreeCyclic):
            if isinstance(f.cod, FreeCyclic):
                out["scalar"] = f.data[0]
            else:
                out["generator"] = _elements(f.cod).index(f(1))
            return out
        if isinstance(f, LinearMap):
            out["matrix"] = [list(r) for r in f.data]
        if size_of(f.dom) > EMBED_LIMIT or size_of(f.cod) > EMBED_LIMIT:
            out.update(self._structured(f))
            return out
        cod_idx = {a: i for i, a in enumerate(_elements(f.cod))}
        out["map"] = [cod_idx[f(a)] for a in _elements(f.dom)]
        return out

    def _structured(self, f) -> dict:
        """Explicit but table-free form for maps touching an oversize object."""
        if isinstance(f, LinearMap):
            return {}
        if isinstance(f, GroupMorphism):
            return {"generator_images": plain(f.data)}
        if isinstance(f.cod, ProductRing) and size_of(f.dom) <= EMBED_LIMIT:
            comps = []
            for k, R in enumerate(f.cod.factors):
                idx = {a: i for i, a in enumerate(_elements(R))}
                comps.append({"factor": self.obj(R),
                              "map": [idx[f(a)[k]] for a in _elements(f.dom)]})
            return {"components": comps}
        if isinstance(f, LazyMorphism):
            return {"symbolic": plain(f.data)}
        return {"opaque": True}

    def point(self, p) -> dict:
        return {"base": self.obj(p.base), "arrow": self.mor(p.arrow)}


def certificate_doc(cert, X, cfg, members) -> dict:
    """Self-contained certificate with its full mediator transcript.

    ``members`` are the pointed objects the candidate was tested against; the
    replay checks that every admissible gamma out of each of them was tested.
    """
    enc = Encoder(cfg)
    t = cert.transcript
    doc = {
        "orientation": cfg.orientation,
        "category": cfg.category.name,
        "object": enc.obj(X),
        "points": [enc.point(x) for x in cert.points],
        "localized": enc.obj(cert.localized),
        "marks": [enc.point(m) for m in cert.marks],
        "rho": enc.mor(cert.rho),
        "bottoms": [enc.mor(b) for b in cert.bottoms],
        "method": cert.method,
        "bound": t.bound,
        "verdict": t.verdict,
        "checks": dict(sorted(t.checks.items())),
        "tests": [{"test": e.test,
                   "member": e.context.get("member"),
                   "object": enc.obj(e.source),
                   "marks": [enc.point(m) for m in e.context.get("marks", ())],
                   "gamma": enc.mor(e.context["gamma"]),
                   "mediators": [enc.mor(k) for k in e.mediators]}
                  for e in t.entries],
        "members": [{"object": enc.obj(m.obj), "marks": [enc.point(p) for p in m.marks]}
                    for m in members],
    }
    doc["objects"] = enc.objects
    return doc


def iso_doc(f, cfg) -> dict:
    enc = Encoder(cfg)
    doc = {"orientation": cfg.orientation, "iso": enc.mor(f)}
    doc["objects"] = enc.objects
    return doc


def describe_point(p, cfg) -> dict:
    C = cfg.category
    return {"base": C.describe(p.base), "arrow": plain(C.morphism_data(p.arrow))}


def transcript_summary(t) -> dict:
    return {"bound": t.bound, "candidate": t.candidate, "verdict": t.verdict,
            "checks": dict(sorted(t.checks.items())),
            "entries": [{"test": e.test, "count": e.count} for e in t.entries]}


__all__ = ["plain", "dumps", "algebra", "Encoder", "certificate_doc", "iso_doc",
           "describe_point", "transcript_summary", "FREE"]
