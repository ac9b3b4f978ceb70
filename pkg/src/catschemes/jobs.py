"""Job files: schema, loading with line diagnostics, and query execution.

A job names a category instance, its base objects, a base-pointed
subcategory, one object and a query.  ``run_job`` returns a report made of
plain JSON values; timings are kept apart so that reports can be compared
byte for byte.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import jsonschema
import yaml

from .core import HomCache
from .errors import CategoryError, NoLocalization
from .fields import field_of_order, field_table
from .global_scheme import global_object, lemma_compare, make_topology, scheme_check
from .instances.finab import FREE, FinAb, FreeCyclic, build_fin_ab
from .instances.fincring import FinCRing, build_ring, fraction_ring, residue_fields
from .instances.finset import FinSet, FinSetObj
from .instances.finvect import FinVect, FinVectObj
from .localize import (ABSENT, FOUND, BasePointedSubcat, certificates_agree,
                       closed_form_localize, closed_form_localize_multi, localize,
                       localize_multi)
from .points import BasePointConfig, pts
from .serialize import Encoder, certificate_doc, iso_doc, plain, size_of, transcript_summary
from .sheaf import build_spec, compare_distinguished, crosscheck_global

CATEGORIES = ("FinSet", "FinAb", "FinVect", "FinCRing")
QUERIES = ("points", "localize", "localize-multi", "global", "affine", "scheme", "lemma",
           "sheaf-compare")

_POINT_REF = {"oneOf": [{"type": "integer", "minimum": 0},
                        {"type": "object", "minProperties": 1, "maxProperties": 1,
                         "properties": {"index": {"type": "integer", "minimum": 0},
                                        "value": {}, "kernel": {"type": "array"}},
                         "additionalProperties": False}]}

SCHEMA = {
    "type": "object",
    "required": ["category", "object", "query"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "category": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": list(CATEGORIES)},
                "field": {"oneOf": [{"type": "integer", "minimum": 2},
                                    {"type": "object", "required": ["p"],
                                     "additionalProperties": False,
                                     "properties": {"p": {"type": "integer", "minimum": 2},
                                                    "k": {"type": "integer", "minimum": 1},
                                                    "poly": {"type": "array",
                                                             "items": {"type": "integer"}}}}]},
                "bound": {"type": "integer", "minimum": 1},
            },
        },
        "orientation": {"enum": ["covariant", "contravariant"]},
        "base_points": {"oneOf": [{"const": "residue_fields"},
                                  {"type": "array", "minItems": 1}]},
        "subcategory": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"kind": {"type": "string"},
                           "bound": {"type": "integer", "minimum": 1}},
        },
        "object": {},
        "query": {"enum": list(QUERIES)},
        "query_params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "point": _POINT_REF,
                "points": {"type": "array", "minItems": 1, "items": _POINT_REF},
                "method": {"enum": ["closed_form", "exhaustive", "both"]},
                "global_mode": {"enum": ["single", "associative"]},
                "topology": {"enum": ["discrete", "zariski", "explicit"]},
                "opens": {"type": "array", "items": {"type": "array",
                                                     "items": {"type": "integer"}}},
                "cover_only": {"type": "boolean"},
                "cover": {"type": "array", "minItems": 1},
                "f": {},
                "crosscheck": {"type": "boolean"},
                "raise_missing": {"type": "boolean"},
            },
        },
        "mode": {"enum": ["strict", "permissive"]},
        "bound": {"type": "integer", "minimum": 1},
    },
}

DEFAULT_SUBCATEGORY = {"FinSet": "singleton_sets", "FinAb": "prime_cyclic",
                       "FinVect": "spanned", "FinCRing": "local_rings"}


class JobError(Exception):
    """Schema or reference error; ``diagnostics`` holds one line per problem."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


def _path_str(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<job>"


def _node_at(node, path):
    """Deepest YAML node along ``path`` (for line numbers)."""
    for key in path:
        if isinstance(node, yaml.MappingNode):
            nxt = next((v for k, v in node.value if k.value == str(key)), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            nxt = node.value[key]
        else:
            nxt = None
        if nxt is None:
            break
        node = nxt
    return node


def load_job(path) -> dict:
    """Parse and schema-check a YAML or JSON job file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise JobError([f"{path}: cannot read job file: {exc.strerror}"]) from None
    return parse_job(text, str(path))


def parse_job(text: str, source: str = "<job>") -> dict:
    try:
        root = yaml.compose(text)
        job = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f":{mark.line + 1}" if mark else ""
        raise JobError([f"{source}{line}: not valid YAML/JSON: {getattr(exc, 'problem', exc)}"]) from None
    if not isinstance(job, dict):
        raise JobError([f"{source}: a job must be a mapping"])
    errors = sorted(jsonschema.Draft7Validator(SCHEMA).iter_errors(job),
                    key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        diags = []
        for e in errors:
            node = _node_at(root, list(e.absolute_path))
            line = node.start_mark.line + 1 if node is not None else 0
            diags.append(f"{source}:{line}: {_path_str(e.absolute_path)}: {e.message}")
        raise JobError(diags)
    return job


# ---------------------------------------------------------------------------
# instances


@dataclass
class Instance:
    kind: str
    category: object
    cfg: BasePointConfig
    subcat: BasePointedSubcat
    X: object
    bound: int
    hom: HomCache


def _tupled(v):
    return tuple(_tupled(x) for x in v) if isinstance(v, list) else v


def _field(spec):
    if spec is None:
        return field_table(2)
    if isinstance(spec, int):
        return field_of_order(spec)
    return field_table(spec["p"], spec.get("k", 1), spec.get("poly"))


def _object(kind, spec, bound, field=None, where="object"):
    try:
        if kind == "FinSet":
            if isinstance(spec, int):
                return FinSetObj(range(spec))
            if isinstance(spec, list):
                return FinSetObj(_tupled(x) for x in spec)
        elif kind == "FinAb":
            if spec == "Z":
                return FREE
            if isinstance(spec, int):
                spec = [spec]
            if isinstance(spec, list) and all(isinstance(n, int) and n >= 1 for n in spec):
                return build_fin_ab([n for n in spec if n > 1])
        elif kind == "FinVect":
            if isinstance(spec, dict) and set(spec) == {"dim"}:
                spec = spec["dim"]
            if isinstance(spec, int) and spec >= 0:
                return FinVectObj(spec, field)
        elif kind == "FinCRing":
            return build_ring(spec, max(bound, 1 << 16))
    except CategoryError as exc:
        raise JobError([f"{where}: {exc}"]) from None
    except (ValueError, KeyError, TypeError) as exc:
        raise JobError([f"{where}: cannot build a {kind} object from {spec!r}: {exc}"]) from None
    raise JobError([f"{where}: cannot build a {kind} object from {spec!r}"])


def build_instance(job: dict, bound: int | None = None) -> Instance:
    cat = job["category"]
    kind = cat["kind"]
    field = _field(cat.get("field")) if kind == "FinVect" else None
    if kind != "FinVect" and "field" in cat:
        raise JobError(["category.field: only FinVect takes a field"])
    X = _object(kind, job["object"], 1 << 16, field)
    sub = job.get("subcategory", {})
    verify = bound or job.get("bound") or sub.get("bound") or max(16, size_of(X))
    cap = max(cat.get("bound", 64), verify, size_of(X))
    category = {"FinSet": lambda: FinSet(cap), "FinAb": lambda: FinAb(cap),
                "FinVect": lambda: FinVect(field, cap), "FinCRing": lambda: FinCRing(cap)}[kind]()
    orientation = job.get("orientation", "contravariant" if kind == "FinCRing" else "covariant")
    bp = job.get("base_points")
    if kind == "FinCRing" and bp in (None, "residue_fields"):
        base = residue_fields(X)
    elif bp == "residue_fields":
        raise JobError(["base_points: residue_fields only applies to FinCRing"])
    elif bp is None:
        base = {"FinSet": [FinSetObj((0,))], "FinAb": [FREE], "FinVect": [FinVectObj(1, field)]}[kind]
    else:
        base = [_object(kind, b, cap, field, f"base_points[{i}]") for i, b in enumerate(bp)]
    try:
        cfg = BasePointConfig(category, base, orientation)
        subcat = BasePointedSubcat(sub.get("kind", DEFAULT_SUBCATEGORY[kind]), cfg, verify)
    except CategoryError as exc:
        raise JobError([f"subcategory: {exc}"]) from None
    return Instance(kind, category, cfg, subcat, X, verify, HomCache(cfg.working))


def _point_doc(inst, i, p) -> dict:
    C = inst.category
    doc = {"index": i, "base": C.describe(p.base), "arrow": plain(C.morphism_data(p.arrow))}
    if inst.kind == "FinAb":
        doc["element"] = plain(p.arrow.data[0])
    elif inst.kind == "FinSet":
        doc["element"] = plain(p.arrow.data[0])
    elif inst.kind == "FinVect":
        doc["vector"] = [r[0] for r in p.arrow.data] if p.base.dim == 1 else None
    elif inst.kind == "FinCRing" and inst.cfg.contravariant:
        doc["kernel"] = plain([a for a, v in zip(p.arrow.dom.elements, p.arrow.data)
                               if v == p.arrow.cod.zero])
    return doc


def resolve_point(inst, ref, P, where="query_params.point"):
    if isinstance(ref, int):
        ref = {"index": ref}
    if "index" in ref:
        i = ref["index"]
        if i >= len(P):
            raise JobError([f"{where}: point index {i} out of range (object has {len(P)} points)"])
        return P[i]
    key, v = next(iter(ref.items()))
    v = _tupled(v)
    for i, p in enumerate(P):
        d = _point_doc(inst, i, p)
        have = _tupled(d.get("element", d.get("vector")) if key == "value" else d.get("kernel"))
        if have == v or (key == "kernel" and have is not None and set(have) == set(v)):
            return p
    raise JobError([f"{where}: no point with {key} {ref[key]!r}"])


def _element(X, v, where):
    v = _tupled(v)
    if v not in set(X.elements):
        raise JobError([f"{where}: {v!r} is not an element of {X.name}"])
    return v


# ---------------------------------------------------------------------------
# queries


def _cert(inst, cert, full):
    doc = {"localized": inst.category.describe(cert.localized), "method": cert.method,
           "transcript": transcript_summary(cert.transcript)}
    if full:
        doc["certificate"] = certificate_doc(cert, inst.X, inst.cfg,
                                             inst.subcat.members(len(cert.marks)))
    return doc


def _localize_query(inst, marks, method, full):
    X, sc = inst.X, inst.subcat
    multi = len(marks) > 1
    out = {}
    ex = cf = None
    if method in ("exhaustive", "both"):
        res = (localize_multi(X, marks, sc, inst.hom) if multi
               else localize(X, marks[0], sc, inst.hom))
        out["exhaustive"] = {"status": res.status,
                             "certificates": [_cert(inst, c, full) for c in res.certificates],
                             "failed_candidates": len(res.failures)}
        ex = res.certificate if res.status == FOUND else None
        status = res.status
    if method in ("closed_form", "both"):
        try:
            cf = (closed_form_localize_multi(X, marks, sc, inst.hom) if multi
                  else closed_form_localize(X, marks[0], sc, inst.hom))
            out["closed_form"] = {"status": FOUND, "certificates": [_cert(inst, cf, full)]}
        except NoLocalization as exc:
            out["closed_form"] = {"status": ABSENT, "reason": str(exc), "certificates": []}
        if method == "closed_form":
            status = out["closed_form"]["status"]
    verdict = {"status": status}
    best = ex or cf
    if best is not None and status == FOUND:
        verdict["localized"] = inst.category.describe(best.localized)
    if method == "both":
        both = out["exhaustive"]["status"], out["closed_form"]["status"]
        if both == (ABSENT, ABSENT):
            agree = True
        elif ex is not None and cf is not None:
            agree = certificates_agree(inst.cfg, ex, cf, inst.hom) is not None
        else:
            agree = False
        verdict["methods_agree"] = agree
    return verdict, out


def _mor_doc(cfg, **maps):
    enc = Encoder(cfg)
    doc = {"orientation": cfg.orientation}
    for k, f in maps.items():
        doc[k] = enc.mor(f)
    doc["objects"] = enc.objects
    return doc


def _global_query(inst, params, mode, full):
    C = inst.category
    g = global_object(inst.X, inst.cfg, inst.subcat, mode=params.get("global_mode", "single"),
                      strictness=mode, method=params.get("method", "closed_form"), hom=inst.hom)
    P = pts(inst.X, inst.cfg).points
    skipped = []
    for M, reason in g.skipped_points:
        row = {"subset": list(M), "reason": reason}
        if len(M) == 1:
            row["point"] = _point_doc(inst, M[0], P[M[0]])
        skipped.append(row)
    verdict = {"affine": g.affine, "O_of_X": C.describe(g.O_of_X),
               "script_O": C.describe(g.script_O), "script_O_size": size_of(g.script_O),
               "skipped_points": [list(M) for M, _ in g.skipped_points],
               "checks_pass": all(g.checks.values())}
    if isinstance(g.script_O, FinVectObj):
        verdict["script_O_dim"] = g.script_O.dim
    result = {"global_mode": g.mode, "components": [list(M) for M in g.index],
              "skipped": skipped, "checks": dict(sorted(g.checks.items())),
              "object_data": {"O_of_X": plain(C.object_data(g.O_of_X)),
                              "script_O": plain(C.object_data(g.script_O))}}
    if full:
        result["certificates"] = [_cert(inst, c, True) for c in g.components]
        result["gamma"] = _mor_doc(inst.cfg, gamma=g.gamma, epi_part=g.factorization.epi_part,
                                   mono_part=g.factorization.mono_part)
        if g.iso_witness is not None:
            result["iso_witness"] = iso_doc(g.iso_witness, inst.cfg)
    return verdict, result


def _cover_element(inst, spec, where):
    X, cfg = inst.X, inst.cfg
    if spec == "identity":
        return inst.category.identity(X)
    if isinstance(spec, dict) and set(spec) == {"distinguished"}:
        if inst.kind != "FinCRing" or not cfg.contravariant:
            raise JobError([f"{where}: distinguished covers need contravariant FinCRing"])
        f = _element(X, spec["distinguished"], where)
        powers, x = [], X.one
        while x not in powers:
            powers.append(x)
            x = X.mul(x, f)
        _, rho = fraction_ring(X, powers, name=f"{X.name}[1/{plain(f)}]")
        return rho
    if isinstance(spec, dict) and set(spec) == {"object", "map"}:
        U = _object(inst.kind, spec["object"], inst.category.bound,
                    getattr(X, "field", None), where)
        dom, cod = (X, U) if cfg.contravariant else (U, X)
        images = [_tupled(v) for v in spec["map"]]
        els = list(dom.elements) if not isinstance(dom, FreeCyclic) else None
        if els is None or len(images) != len(els) or not set(images) <= set(cod.elements):
            raise JobError([f"{where}: map must list one codomain element per domain element"])
        return _table_morphism(inst, dom, cod, images, where)
    raise JobError([f"{where}: cover elements are 'identity', {{distinguished: f}} "
                    "or {object, map}"])


def _table_morphism(inst, dom, cod, images, where):
    table = dict(zip(dom.elements, images))
    for f in inst.category.hom(dom, cod):
        if all(f(a) == table[a] for a in dom.elements):
            return f
    raise JobError([f"{where}: the map is not a morphism of {inst.kind}"])


def _scheme_query(inst, params, mode, full):
    kind = params.get("topology", "zariski" if inst.kind == "FinCRing" else "discrete")
    try:
        topo = make_topology(inst.X, inst.cfg, kind, params.get("opens"),
                             params.get("cover_only", False))
    except CategoryError as exc:
        raise JobError([f"query_params.topology: {exc}"]) from None
    cover = [_cover_element(inst, c, f"query_params.cover[{i}]")
             for i, c in enumerate(params.get("cover", ["identity"]))]
    v = scheme_check(inst.X, inst.cfg, inst.subcat, topo, cover, strictness=mode,
                     method=params.get("method", "closed_form"), hom=inst.hom)
    rows = []
    for r in v.elements:
        row = {k: r[k] for k in ("index", "sub_object", "open", "point_range", "affine", "ok",
                                 "error") if k in r}
        if full and "witness" in r:
            row["arrow"] = _mor_doc(inst.cfg, u=r["witness"].u_arrow)
        if "report" in r:
            row["script_O"] = inst.category.describe(r["report"].script_O)
        rows.append(row)
    opens = topo.opens if topo.opens is not None else None
    result = {"topology": {"kind": topo.kind, "n_points": topo.n_points,
                           "opens": None if opens is None else [sorted(o) for o in opens],
                           "cover_only": topo.cover_only},
              "elements": rows}
    return {"scheme": v.scheme, "covers": v.covers}, result


def _lemma_query(inst, params, mode, full):
    C, W = inst.category, inst.cfg.working
    rep = lemma_compare(inst.X, inst.cfg, inst.subcat, params.get("method", "closed_form"),
                        mode, params.get("raise_missing", False), inst.hom)

    def side(u):
        return None if u is None else {"object": C.describe(u.obj),
                                       "canonical_form": plain(C.object_data(u.obj))}

    readings = {
        "discrete": {"coproduct": side(rep.coproduct), "colimit": side(rep.discrete_colimit),
                     "isomorphic": rep.discrete_matches_coproduct},
        "inclusion": {"coproduct": side(rep.coproduct), "colimit": side(rep.inclusion_colimit),
                      "comparison_is_iso": rep.comparison_is_iso,
                      "isomorphic": rep.abstractly_isomorphic,
                      "missing_connecting": [[list(M), list(N)] for M, N in rep.missing]},
    }
    result = {"subsets": [list(M) for M in rep.subsets],
              "skipped": [{"subset": list(M), "reason": r} for M, r in rep.skipped],
              "components": {",".join(map(str, M)): C.describe(c.localized)
                             for M, c in rep.components.items()},
              "connecting_counts": {f"{','.join(map(str, M))}->{','.join(map(str, N))}": len(v)
                                    for (M, N), v in rep.connecting.items()},
              "checks": dict(sorted(rep.checks.items())), "readings": readings}
    if full:
        iso = W.find_isomorphism(rep.coproduct.obj, rep.discrete_colimit.obj)
        if iso is not None:
            result["discrete_iso_witness"] = iso_doc(iso, inst.cfg)
    if full and rep.comparison is not None:
        result["comparison"] = _mor_doc(inst.cfg, comparison=rep.comparison)
        iso = W.find_isomorphism(rep.coproduct.obj, rep.inclusion_colimit.obj)
        if iso is not None:
            result["iso_witness"] = iso_doc(iso, inst.cfg)
    verdict = {"discrete_isomorphic": rep.discrete_matches_coproduct,
               "inclusion_isomorphic": rep.abstractly_isomorphic,
               "comparison_is_iso": rep.comparison_is_iso}
    return verdict, result


def _sheaf_query(inst, params, mode, full):
    if inst.kind != "FinCRing" or not inst.cfg.contravariant:
        raise JobError(["query: sheaf-compare needs contravariant FinCRing"])
    X = inst.X
    spec = build_spec(X, inst.cfg.base_objects)
    fs = params.get("f", "all")
    if fs == "all":
        fs = list(X.elements)
    elif not isinstance(fs, list) or _tupled(fs) in set(X.elements):
        fs = [fs]
    fs = [_element(X, f, "query_params.f") for f in fs]
    rows = []
    for f in fs:
        r = compare_distinguished(spec, f)
        row = {"f": plain(f), "D_f": r["D_f"], "sizes": list(r["sizes"]),
               "isomorphic": r["isomorphic"]}
        if full and r["witness"] is not None:
            row["iso_witness"] = iso_doc(r["witness"], inst.cfg)
        rows.append(row)
    result = {"primes": [plain(sorted(p, key=repr)) for p in spec.primes],
              "missed_primes": [plain(sorted(p, key=repr)) for p in spec.missed],
              "opens": [sorted(o) for o in spec.opens], "rows": rows}
    verdict = {"all_isomorphic": all(r["isomorphic"] for r in rows)}
    if params.get("crosscheck", True):
        cc = crosscheck_global(spec, inst.cfg, inst.subcat, strictness=mode, hom=inst.hom)
        verdict["crosscheck"] = cc["passed"]
        result["crosscheck"] = {"passed": cc["passed"],
                                "global": inst.category.describe(cc["global"].script_O),
                                "section": cc["section"].section_ring.name}
    return verdict, result


def run_job(job: dict, bound: int | None = None, mode: str | None = None,
            fmt: str = "full") -> tuple[dict, dict]:
    """Execute a validated job; returns ``(report, timings)``."""
    t0 = time.perf_counter()
    inst = build_instance(job, bound)
    t1 = time.perf_counter()
    mode = mode or job.get("mode", "permissive")
    full = fmt == "full"
    q = job["query"]
    params = job.get("query_params", {})
    P = pts(inst.X, inst.cfg).points
    if q == "points":
        verdict = {"count": len(P)}
        result = {"points": [_point_doc(inst, i, p) for i, p in enumerate(P)]}
    elif q == "localize":
        x = resolve_point(inst, params.get("point", 0), P)
        verdict, result = _localize_query(inst, (x,), params.get("method", "both"), full)
        verdict["point"] = P.index(x)
    elif q == "localize-multi":
        refs = params.get("points")
        if refs is None:
            raise JobError(["query_params.points: localize-multi needs a list of points"])
        marks = tuple(resolve_point(inst, r, P, f"query_params.points[{i}]")
                      for i, r in enumerate(refs))
        if len(set(marks)) != len(marks):
            raise JobError(["query_params.points: marked points must be distinct"])
        verdict, result = _localize_query(inst, marks, params.get("method", "both"), full)
        verdict["points"] = [P.index(m) for m in marks]
    elif q in ("global", "affine"):
        verdict, result = _global_query(inst, params, mode, full)
        if q == "affine":
            verdict = {k: verdict[k] for k in ("affine", "skipped_points", "script_O")}
    elif q == "scheme":
        verdict, result = _scheme_query(inst, params, mode, full)
    elif q == "lemma":
        verdict, result = _lemma_query(inst, params, mode, full)
    else:
        verdict, result = _sheaf_query(inst, params, mode, full)
    t2 = time.perf_counter()
    report = {
        "job": plain(job),
        "resolved": {"category": inst.kind, "orientation": inst.cfg.orientation,
                     "object": inst.category.describe(inst.X),
                     "base_objects": [inst.category.describe(b) for b in inst.cfg.base_objects],
                     "subcategory": {"kind": inst.subcat.kind, "bound": inst.subcat.bound},
                     "instance_bound": inst.category.bound, "mode": mode, "format": fmt,
                     "n_points": len(P)},
        "query": q,
        "verdict": plain(verdict),
        "result": plain(result) if full else {},
    }
    timings = {"setup_s": round(t1 - t0, 6), "query_s": round(t2 - t1, 6)}
    return report, timings
