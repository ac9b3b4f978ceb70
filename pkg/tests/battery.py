"""The acceptance battery.

Imported by the acceptance tests, and runnable as a script that writes the
report bytes of one full run to stdout (used for the determinism check).
"""

import sys
from dataclasses import dataclass, field

from helpers import instance
from catschemes.core import underlying
from catschemes.errors import CategoryError, NoLocalization
from catschemes.global_scheme import global_object
from catschemes.instances.finab import FinAb
from catschemes.instances.fincring import ring_catalog
from catschemes.localize import FOUND, certificates_agree, closed_form_localize, localize
from catschemes.points import pts
from catschemes.serialize import Encoder, dumps, iso_doc, plain
from catschemes.sheaf import build_spec, compare_distinguished, crosscheck_global

RING_BOUND = 64
GROUP_ORDER = 24
SET_SIZE = 4
VECT_DIM = 3
VECT_FIELDS = (2, 3)


def battery_specs() -> list:
    """``(label, kind, object, extra)`` for every battery object, in run order."""
    out = [(f"FinSet:{n}", "FinSet", n, {}) for n in range(SET_SIZE + 1)]
    for A in FinAb(GROUP_ORDER).objects():
        orders = list(A.orders) or [1]
        out.append((f"FinAb:{orders}", "FinAb", orders, {}))
    for q in VECT_FIELDS:
        out.extend((f"FinVect:F_{q}^{n}", "FinVect", n, {"field": q}) for n in range(VECT_DIM + 1))
    out.extend((f"FinCRing:{A.name}", "FinCRing", A, {}) for A in ring_catalog(RING_BOUND))
    return out


@dataclass
class PairResult:
    index: int
    point: object
    exhaustive: object
    closed: object
    closed_error: str | None
    agree: bool


@dataclass
class ItemResult:
    label: str
    kind: str
    inst: object
    pairs: list = field(default_factory=list)
    glob: object = None
    glob_error: str | None = None
    iso_doc: dict | None = None
    sheaf_rows: list = field(default_factory=list)
    crosscheck: dict | None = None
    doc: dict = field(default_factory=dict)


def _pairs(inst) -> list:
    out = []
    for i, x in enumerate(pts(inst.X, inst.cfg).points):
        r = localize(inst.X, x, inst.subcat, inst.hom)
        try:
            c, err = closed_form_localize(inst.X, x, inst.subcat, inst.hom), None
        except NoLocalization as exc:
            c, err = None, str(exc)
        if r.status == FOUND and c is not None:
            agree = certificates_agree(inst.cfg, r.certificate, c, inst.hom) is not None
        else:
            agree = r.status != FOUND and c is None
        out.append(PairResult(i, x, r, c, err, agree))
    return out


def run_item(label, kind, obj, extra) -> ItemResult:
    inst = instance(kind, obj, **extra)
    C, enc = inst.category, Encoder(inst.cfg)
    item = ItemResult(label, kind, inst, _pairs(inst))
    rows = []
    for p in item.pairs:
        cert = p.closed or p.exhaustive.certificate
        rows.append({"point": enc.point(p.point), "exhaustive": p.exhaustive.status,
                     "closed_form": "found" if p.closed else "absent", "agree": p.agree,
                     "localized": C.describe(cert.localized) if cert else None})
    doc = {"label": label, "bound": inst.bound, "points": rows}
    try:
        g = item.glob = global_object(inst.X, inst.cfg, inst.subcat, hom=inst.hom)
    except CategoryError as exc:
        item.glob_error = f"{type(exc).__name__}: {exc}"
        doc["global"] = {"error": item.glob_error}
    else:
        doc["global"] = {"affine": g.affine, "script_O": C.describe(g.script_O),
                         "skipped": [plain(M) for M, _ in g.skipped_points],
                         "image": C.describe(g.factorization.middle),
                         "coimage": C.describe(C.coimage(underlying(g.gamma)).middle),
                         "checks": dict(sorted(g.checks.items()))}
        if g.iso_witness is not None:
            item.iso_doc = iso_doc(g.iso_witness, inst.cfg)
            doc["global"]["iso_witness"] = item.iso_doc
    if kind == "FinCRing":
        spec = build_spec(inst.X, inst.cfg.base_objects)
        for f in inst.X.elements:
            r = compare_distinguished(spec, f)
            item.sheaf_rows.append(r)
        cc = item.crosscheck = crosscheck_global(spec, inst.cfg, inst.subcat, report=item.glob)
        doc["sheaf"] = {"rows": [{"f": plain(r["f"]), "D_f": r["D_f"], "sizes": list(r["sizes"]),
                                  "isomorphic": r["isomorphic"]} for r in item.sheaf_rows],
                        "crosscheck": cc["passed"]}
    doc["objects"] = enc.objects
    item.doc = doc
    return item


def run_battery() -> list:
    return [run_item(*s) for s in battery_specs()]


def report_bytes(items) -> bytes:
    """One canonical JSON line per battery object; the run carries no timings."""
    return "".join(dumps(it.doc) + "\n" for it in items).encode()


if __name__ == "__main__":
    sys.stdout.buffer.write(report_bytes(run_battery()))
