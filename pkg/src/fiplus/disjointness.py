"""Disjointness of types: two types are disjoint when all their common supertypes are top-like."""
from __future__ import annotations

from .syntax import Arrow, Base, Forall, Inter, Rcd, TVar, Type, TypeCtx
from .subtyping import common_binder, split, subtype, top_like


def _head(a: Type):
    match a:
        case Base(n):
            return ("base", n)
        case Arrow():
            return ("arrow",)
        case Rcd(lab, _):
            return ("rcd", lab)
        case Forall():
            return ("forall",)
        case _:
            return None


def disjoint_axiom(a: Type, b: Type) -> bool:
    """Different type constructors (or base types, or record labels) never share a useful supertype."""
    ha, hb = _head(a), _head(b)
    return ha is not None and hb is not None and ha != hb


def disjoint(delta: TypeCtx, a: Type, b: Type) -> bool:
    """Algorithmic disjointness `delta |- a * b`."""
    if top_like(delta, a) or top_like(delta, b):
        return True
    halves = split(a)
    if halves is not None:
        return disjoint(delta, halves[0], b) and disjoint(delta, halves[1], b)
    halves = split(b)
    if halves is not None:
        return disjoint(delta, a, halves[0]) and disjoint(delta, a, halves[1])
    if isinstance(a, TVar):
        bound = delta.lookup(a.name)
        if bound is not None and subtype(delta, bound, b):
            return True
    if isinstance(b, TVar):
        bound = delta.lookup(b.name)
        if bound is not None and subtype(delta, bound, a):
            return True
    match a, b:
        case Rcd(l1, f1), Rcd(l2, f2) if l1 == l2:
            return disjoint(delta, f1, f2)
        case Arrow(_, c1), Arrow(_, c2):
            return disjoint(delta, c1, c2)
        case Forall(_, b1, _), Forall(_, b2, _):
            z, body1, body2 = common_binder(delta, a, b)
            return disjoint(delta.extend(z, Inter(b1, b2)), body1, body2)
    return disjoint_axiom(a, b)
