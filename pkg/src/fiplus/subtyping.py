"""Splittable types, top/bottom-like predicates, subtyping and applicative distribution."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .syntax import (
    EMPTY_DELTA, Arrow, Base, Bot, Forall, Inter, Rcd, Top, TVar, Type,
    TypeCtx, alpha_eq_type, fresh, free_tvars, subst_type,
)


def split(a: Type) -> tuple[Type, Type] | None:
    """Split `a` into two halves whose intersection is equivalent to it, or None if ordinary."""
    t = type(a)
    if t is Inter:
        return a.left, a.right
    if t is Arrow:
        s = split(a.codomain)
        return (Arrow(a.domain, s[0]), Arrow(a.domain, s[1])) if s else None
    if t is Rcd:
        s = split(a.field)
        return (Rcd(a.label, s[0]), Rcd(a.label, s[1])) if s else None
    if t is Forall:
        s = split(a.body)
        return (Forall(a.binder, a.bound, s[0]), Forall(a.binder, a.bound, s[1])) if s else None
    return None


def ordinary(a: Type) -> bool:
    """No intersection in any covariant result position (checked without building halves)."""
    while True:
        t = type(a)
        if t is Inter:
            return False
        if t is Arrow:
            a = a.codomain
        elif t is Rcd:
            a = a.field
        elif t is Forall:
            a = a.body
        else:
            return True


def bottom_like(a: Type) -> bool:
    t = type(a)
    if t is Bot:
        return True
    if t is Inter:
        return bottom_like(a.left) or bottom_like(a.right)
    return False


def open_forall(delta: TypeCtx, a: Forall, avoid: set[str] = frozenset()) -> tuple[TypeCtx, str, Type]:
    """Extend `delta` with the quantifier's binder, renaming it when it would clash."""
    x, body = a.binder, a.body
    if x in delta or x in avoid:
        y = fresh(x, delta.names() | set(avoid) | free_tvars(body))
        body = subst_type(body, x, TVar(y))
        x = y
    return delta.extend(x, a.bound), x, body


def top_like(delta: TypeCtx, a: Type) -> bool:
    t = type(a)
    while t is Arrow or t is Rcd:
        a = a.codomain if t is Arrow else a.field
        t = type(a)
    if t is Top:
        return True
    if t is Inter:
        return top_like(delta, a.left) and top_like(delta, a.right)
    if t is Forall:
        inner, _, body = open_forall(delta, a)
        return top_like(inner, body)
    if t is TVar:
        bound = delta.lookup(a.name)
        return bound is not None and bottom_like(bound)
    return False


def common_binder(delta: TypeCtx, a: Forall, b: Forall) -> tuple[str, Type, Type]:
    """Rename the binders of two quantifiers to one name that is fresh for both and for `delta`."""
    if a.binder == b.binder and a.binder not in delta:
        return a.binder, a.body, b.body
    avoid = delta.names() | free_tvars(a) | free_tvars(b)
    z = fresh(a.binder, avoid)
    return z, subst_type(a.body, a.binder, TVar(z)), subst_type(b.body, b.binder, TVar(z))


def subtype(delta: TypeCtx, a: Type, b: Type) -> bool:
    """Algorithmic subtyping `delta |- a <: b`."""
    if not ordinary(b):
        halves = split(b)
        return subtype(delta, a, halves[0]) and subtype(delta, a, halves[1])
    if top_like(delta, b) or bottom_like(a):
        return True
    ta, tb = type(a), type(b)
    if ta is Inter:
        return subtype(delta, a.left, b) or subtype(delta, a.right, b)
    if ta is not tb:
        return False
    if ta is Base:
        return a.name == b.name
    if ta is TVar:
        return a.name == b.name
    if ta is Arrow:
        return subtype(delta, b.domain, a.domain) and subtype(delta, a.codomain, b.codomain)
    if ta is Rcd:
        return a.label == b.label and subtype(delta, a.field, b.field)
    if ta is Forall:
        if not subtype(delta, b.bound, a.bound):
            return False
        z, body1, body2 = common_binder(delta, a, b)
        return subtype(delta.extend(z, b.bound), body1, body2)
    return False


def type_equiv(delta: TypeCtx, a: Type, b: Type) -> bool:
    return subtype(delta, a, b) and subtype(delta, b, a)


def iso_subtype(a: Type, b: Type) -> bool:
    """Isomorphic subtyping: `a` is `b` with split positions spelled out as intersections."""
    if alpha_eq_type(a, b):
        return True
    halves = split(b)
    if halves is None or not isinstance(a, Inter):
        return False
    return iso_subtype(a.left, halves[0]) and iso_subtype(a.right, halves[1])


# ------------------------------------------------- applicative distribution


@dataclass(frozen=True)
class AsArrow:
    domain: Type
    codomain: Type

    def to_type(self) -> Type:
        return Arrow(self.domain, self.codomain)


@dataclass(frozen=True)
class AsForall:
    binder: str
    bound: Type
    body: Type

    def to_type(self) -> Type:
        return Forall(self.binder, self.bound, self.body)


@dataclass(frozen=True)
class AsRcd:
    label: str
    field: Type

    def to_type(self) -> Type:
        return Rcd(self.label, self.field)


ApplicableForm = Union[AsArrow, AsForall, AsRcd]


def app_dist(a: Type) -> ApplicableForm | None:
    """Combine every applicable component of `a` into one arrow, quantifier or record type."""
    match a:
        case Arrow(d, c):
            return AsArrow(d, c)
        case Forall(x, b, body):
            return AsForall(x, b, body)
        case Rcd(lab, f):
            return AsRcd(lab, f)
        case Inter(l, r):
            fl, fr = app_dist(l), app_dist(r)
            match fl, fr:
                case AsArrow(d1, c1), AsArrow(d2, c2):
                    return AsArrow(Inter(d1, d2), Inter(c1, c2))
                case AsRcd(l1, f1), AsRcd(l2, f2) if l1 == l2:
                    return AsRcd(l1, Inter(f1, f2))
                case AsForall(), AsForall():
                    z, body1, body2 = common_binder(EMPTY_DELTA, fl.to_type(), fr.to_type())
                    return AsForall(z, Inter(fl.bound, fr.bound), Inter(body1, body2))
            return None
        case _:
            return None
