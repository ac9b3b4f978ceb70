"""Instances built the same way job files build them."""

from catschemes.jobs import build_instance


def instance(kind, obj, bound=None, **extra):
    job = {"name": "t", "category": {"kind": kind}, "object": obj, "query": "localize"}
    for k in ("field",):
        if k in extra:
            job["category"][k] = extra.pop(k)
    job.update(extra)
    return build_instance(job, bound)


def point_by(inst, pred):
    from catschemes.points import pts
    return next(p for p in pts(inst.X, inst.cfg).points if pred(p))


def kernel(p):
    return frozenset(a for a, v in zip(p.arrow.dom.elements, p.arrow.data) if v == p.arrow.cod.zero)
