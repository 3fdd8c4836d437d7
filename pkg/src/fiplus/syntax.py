"""Abstract syntax: types, expressions, contexts, substitution and printing.

Binders are named. Substitution renames binders on demand by priming the
name until it avoids every name it could capture, so there is no global
counter and results are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union


@dataclass(frozen=True, slots=True)
class Span:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


# ---------------------------------------------------------------- types


@dataclass(frozen=True, slots=True)
class Base:
    name: str  # "Int" | "Bool" | "String"


@dataclass(frozen=True, slots=True)
class Top:
    pass


@dataclass(frozen=True, slots=True)
class Bot:
    pass


@dataclass(frozen=True, slots=True)
class TVar:
    name: str


@dataclass(frozen=True, slots=True)
class Arrow:
    domain: Type
    codomain: Type


@dataclass(frozen=True, slots=True)
class Inter:
    left: Type
    right: Type


@dataclass(frozen=True, slots=True)
class Forall:
    binder: str
    bound: Type
    body: Type


@dataclass(frozen=True, slots=True)
class Rcd:
    label: str
    field: Type


Type = Union[Base, Top, Bot, TVar, Arrow, Inter, Forall, Rcd]

INT = Base("Int")
BOOL = Base("Bool")
STRING = Base("String")
TOP = Top()
BOT = Bot()
BASE_NAMES = ("Int", "Bool", "String")


# ---------------------------------------------------------- expressions

_span = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True, slots=True)
class Lam:
    param: str
    param_type: Type
    body: Expr
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class TLam:
    binder: str
    body: Expr
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class RcdE:
    label: str
    body: Expr
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class LitInt:
    value: int
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class LitBool:
    value: bool
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class LitStr:
    value: str
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class TopVal:
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class Anno:
    body: Expr
    ty: Type
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class Merge:
    left: Expr
    right: Expr
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class Fix:
    name: str
    ty: Type
    body: Expr
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class App:
    fn: Expr
    arg: Expr
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class TApp:
    fn: Expr
    arg_type: Type
    span: Span | None = _span


@dataclass(frozen=True, slots=True)
class Proj:
    target: Expr
    label: str
    span: Span | None = _span


Expr = Union[Lam, TLam, RcdE, Var, LitInt, LitBool, LitStr, TopVal, Anno,
             Merge, Fix, App, TApp, Proj]

Literal = (LitInt, LitBool, LitStr)
PForms = (Lam, TLam, RcdE)


# ------------------------------------------------------------- contexts


@dataclass(frozen=True)
class TypeCtx:
    """Ordered type-variable bindings `X * bound`; later entries may mention earlier ones."""
    bindings: tuple[tuple[str, Type], ...] = ()

    def extend(self, name: str, bound: Type) -> TypeCtx:
        return TypeCtx(self.bindings + ((name, bound),))

    def lookup(self, name: str) -> Type | None:
        for n, b in reversed(self.bindings):
            if n == name:
                return b
        return None

    def names(self) -> set[str]:
        return {n for n, _ in self.bindings}

    def __contains__(self, name: str) -> bool:
        return any(n == name for n, _ in self.bindings)


@dataclass(frozen=True)
class TermCtx:
    bindings: tuple[tuple[str, Type], ...] = ()

    def extend(self, name: str, ty: Type) -> TermCtx:
        return TermCtx(self.bindings + ((name, ty),))

    def lookup(self, name: str) -> Type | None:
        for n, t in reversed(self.bindings):
            if n == name:
                return t
        return None

    def names(self) -> set[str]:
        return {n for n, _ in self.bindings}

    def __contains__(self, name: str) -> bool:
        return any(n == name for n, _ in self.bindings)


EMPTY_DELTA = TypeCtx()
EMPTY_GAMMA = TermCtx()


# -------------------------------------------------------- free variables


def free_tvars(a: Type) -> set[str]:
    match a:
        case TVar(n):
            return {n}
        case Arrow(d, c):
            return free_tvars(d) | free_tvars(c)
        case Inter(l, r):
            return free_tvars(l) | free_tvars(r)
        case Forall(x, b, body):
            return free_tvars(b) | (free_tvars(body) - {x})
        case Rcd(_, f):
            return free_tvars(f)
        case _:
            return set()


def all_tvars(a: Type) -> set[str]:
    """Every type-variable name occurring in `a`, bound or free."""
    match a:
        case TVar(n):
            return {n}
        case Arrow(d, c):
            return all_tvars(d) | all_tvars(c)
        case Inter(l, r):
            return all_tvars(l) | all_tvars(r)
        case Forall(x, b, body):
            return {x} | all_tvars(b) | all_tvars(body)
        case Rcd(_, f):
            return all_tvars(f)
        case _:
            return set()


def free_vars(e: Expr) -> set[str]:
    """Free term variables."""
    match e:
        case Var(n):
            return {n}
        case Lam(x, _, body) | Fix(x, _, body):
            return free_vars(body) - {x}
        case TLam(_, body) | RcdE(_, body) | Anno(body, _) | TApp(body, _) | Proj(body, _):
            return free_vars(body)
        case Merge(l, r):
            return free_vars(l) | free_vars(r)
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case _:
            return set()


def free_tvars_expr(e: Expr) -> set[str]:
    """Free type variables of an expression, including those in annotations."""
    match e:
        case Lam(_, t, body) | Fix(_, t, body) | Anno(body, t) | TApp(body, t):
            return free_tvars(t) | free_tvars_expr(body)
        case TLam(x, body):
            return free_tvars_expr(body) - {x}
        case RcdE(_, body) | Proj(body, _):
            return free_tvars_expr(body)
        case Merge(l, r):
            return free_tvars_expr(l) | free_tvars_expr(r)
        case App(f, a):
            return free_tvars_expr(f) | free_tvars_expr(a)
        case _:
            return set()


def bound_names(e: Expr) -> set[str]:
    """Names bound anywhere inside `e` (term and type binders alike)."""
    match e:
        case Lam(x, t, body) | Fix(x, t, body):
            return {x} | all_tvars(t) | bound_names(body)
        case TLam(x, body):
            return {x} | bound_names(body)
        case Anno(body, t) | TApp(body, t):
            return all_tvars(t) | bound_names(body)
        case RcdE(_, body) | Proj(body, _):
            return bound_names(body)
        case Merge(l, r) | App(l, r):
            return bound_names(l) | bound_names(r)
        case _:
            return set()


def fresh(name: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    while name in avoid:
        name += "'"
    return name


# ---------------------------------------------------------- substitution


def subst_type(a: Type, x: str, b: Type) -> Type:
    """a[x := b], renaming binders of `a` that would capture free variables of `b`."""
    return _subst_type(a, x, b, free_tvars(b))


def _subst_type(a: Type, x: str, b: Type, fv_b: set[str]) -> Type:
    match a:
        case TVar(n):
            return b if n == x else a
        case Arrow(d, c):
            return Arrow(_subst_type(d, x, b, fv_b), _subst_type(c, x, b, fv_b))
        case Inter(l, r):
            return Inter(_subst_type(l, x, b, fv_b), _subst_type(r, x, b, fv_b))
        case Rcd(lab, f):
            return Rcd(lab, _subst_type(f, x, b, fv_b))
        case Forall(y, bound, body):
            bound2 = _subst_type(bound, x, b, fv_b)
            if y == x or x not in free_tvars(body):
                return Forall(y, bound2, body)
            if y in fv_b:
                y2 = fresh(y, fv_b | free_tvars(body) | {x})
                body = _subst_type(body, y, TVar(y2), {y2})
                y = y2
            return Forall(y, bound2, _subst_type(body, x, b, fv_b))
        case _:
            return a


def subst_type_in_expr(e: Expr, x: str, b: Type) -> Expr:
    """Replace free type variable `x` by `b` in every type position of `e`."""
    return _subst_te(e, x, b, free_tvars(b))


def _subst_te(e: Expr, x: str, b: Type, fv_b: set[str]) -> Expr:
    def go(e: Expr) -> Expr:
        return _subst_te(e, x, b, fv_b)

    def ty(t: Type) -> Type:
        return _subst_type(t, x, b, fv_b)

    sp = e.span
    match e:
        case Lam(p, t, body):
            return Lam(p, ty(t), go(body), span=sp)
        case TLam(y, body):
            if y == x or x not in free_tvars_expr(body):
                return e
            if y in fv_b:
                y2 = fresh(y, fv_b | free_tvars_expr(body) | {x})
                body = _subst_te(body, y, TVar(y2), {y2})
                y = y2
            return TLam(y, go(body), span=sp)
        case RcdE(lab, body):
            return RcdE(lab, go(body), span=sp)
        case Anno(body, t):
            return Anno(go(body), ty(t), span=sp)
        case Merge(l, r):
            return Merge(go(l), go(r), span=sp)
        case Fix(n, t, body):
            return Fix(n, ty(t), go(body), span=sp)
        case App(f, a):
            return App(go(f), go(a), span=sp)
        case TApp(f, t):
            return TApp(go(f), ty(t), span=sp)
        case Proj(body, lab):
            return Proj(go(body), lab, span=sp)
        case _:
            return e


def subst_expr(e: Expr, x: str, v: Expr) -> Expr:
    """e[x := v], capture-avoiding for both term and type binders."""
    return _subst_e(e, x, v, free_vars(v), free_tvars_expr(v))


def _subst_e(e: Expr, x: str, v: Expr, fv: set[str], ftv: set[str]) -> Expr:
    def go(e: Expr) -> Expr:
        return _subst_e(e, x, v, fv, ftv)

    sp = e.span
    match e:
        case Var(n):
            return v if n == x else e
        case Lam(y, t, body) | Fix(y, t, body):
            if y == x or x not in free_vars(body):
                return e
            if y in fv:
                y2 = fresh(y, fv | free_vars(body) | {x})
                body = _subst_e(body, y, Var(y2), {y2}, set())
                y = y2
            return type(e)(y, t, go(body), span=sp)
        case TLam(y, body):
            if x not in free_vars(body):
                return e
            if y in ftv:
                y2 = fresh(y, ftv | free_tvars_expr(body))
                body = _subst_te(body, y, TVar(y2), {y2})
                y = y2
            return TLam(y, go(body), span=sp)
        case RcdE(lab, body):
            return RcdE(lab, go(body), span=sp)
        case Anno(body, t):
            return Anno(go(body), t, span=sp)
        case Merge(l, r):
            return Merge(go(l), go(r), span=sp)
        case App(f, a):
            return App(go(f), go(a), span=sp)
        case TApp(f, t):
            return TApp(go(f), t, span=sp)
        case Proj(body, lab):
            return Proj(go(body), lab, span=sp)
        case _:
            return e


# ------------------------------------------------------ alpha-equivalence


def alpha_eq_type(a: Type, b: Type) -> bool:
    return _aeq_t(a, b, {}, {}, 0)


def _aeq_t(a: Type, b: Type, ea: dict, eb: dict, depth: int) -> bool:
    match a, b:
        case TVar(x), TVar(y):
            ix, iy = ea.get(x), eb.get(y)
            if ix is None and iy is None:
                return x == y
            return ix == iy
        case Arrow(d1, c1), Arrow(d2, c2):
            return _aeq_t(d1, d2, ea, eb, depth) and _aeq_t(c1, c2, ea, eb, depth)
        case Inter(l1, r1), Inter(l2, r2):
            return _aeq_t(l1, l2, ea, eb, depth) and _aeq_t(r1, r2, ea, eb, depth)
        case Rcd(l1, f1), Rcd(l2, f2):
            return l1 == l2 and _aeq_t(f1, f2, ea, eb, depth)
        case Forall(x, b1, t1), Forall(y, b2, t2):
            if not _aeq_t(b1, b2, ea, eb, depth):
                return False
            return _aeq_t(t1, t2, {**ea, x: depth}, {**eb, y: depth}, depth + 1)
        case _:
            return a == b


def alpha_eq(e1: Expr, e2: Expr) -> bool:
    """Equality up to renaming of bound term and type variables; spans are ignored."""
    return _aeq_e(e1, e2, {}, {}, {}, {}, 0)


def _aeq_e(e1, e2, v1, v2, t1, t2, depth) -> bool:
    def ty(a, b):
        return _aeq_t(a, b, t1, t2, depth)

    def go(a, b):
        return _aeq_e(a, b, v1, v2, t1, t2, depth)

    match e1, e2:
        case Var(x), Var(y):
            ix, iy = v1.get(x), v2.get(y)
            if ix is None and iy is None:
                return x == y
            return ix == iy
        case Lam(x, a, b1), Lam(y, b, b2):
            return ty(a, b) and _aeq_e(b1, b2, {**v1, x: depth}, {**v2, y: depth}, t1, t2, depth + 1)
        case Fix(x, a, b1), Fix(y, b, b2):
            return ty(a, b) and _aeq_e(b1, b2, {**v1, x: depth}, {**v2, y: depth}, t1, t2, depth + 1)
        case TLam(x, b1), TLam(y, b2):
            return _aeq_e(b1, b2, v1, v2, {**t1, x: depth}, {**t2, y: depth}, depth + 1)
        case RcdE(l1, b1), RcdE(l2, b2):
            return l1 == l2 and go(b1, b2)
        case Proj(b1, l1), Proj(b2, l2):
            return l1 == l2 and go(b1, b2)
        case Anno(b1, a), Anno(b2, b):
            return ty(a, b) and go(b1, b2)
        case TApp(b1, a), TApp(b2, b):
            return ty(a, b) and go(b1, b2)
        case Merge(l1, r1), Merge(l2, r2):
            return go(l1, l2) and go(r1, r2)
        case App(f1, a1), App(f2, a2):
            return go(f1, f2) and go(a1, a2)
        case _:
            return e1 == e2


# -------------------------------------------------------- classification


@dataclass(frozen=True, slots=True)
class SyntaxClass:
    value: bool
    prevalue: bool


def is_pform(e: Expr) -> bool:
    return isinstance(e, PForms)


def is_value(e: Expr) -> bool:
    while isinstance(e, Merge):
        if not is_value(e.left):
            return False
        e = e.right
    match e:
        case Lam() | TLam() | RcdE() | LitInt() | LitBool() | LitStr() | TopVal():
            return True
        case Anno(body, _):
            return is_pform(body)
        case _:
            return False


def is_prevalue(e: Expr) -> bool:
    while isinstance(e, Merge):
        if not is_prevalue(e.left):
            return False
        e = e.right
    return isinstance(e, (LitInt, LitBool, LitStr, TopVal, Anno))


def classify(e: Expr) -> SyntaxClass:
    return SyntaxClass(value=is_value(e), prevalue=is_prevalue(e))


# --------------------------------------------------------- pretty printing

# Expression precedence levels: 0 merge, 1 annotation, 2 application,
# 3 projection / atom. Binder forms extend to the right, so they are
# parenthesised anywhere above level 0.


def pretty_type(a: Type, level: int = 0) -> str:
    match a:
        case Base(n):
            return n
        case Top():
            return "Top"
        case Bot():
            return "Bot"
        case TVar(n):
            return n
        case Rcd(lab, f):
            return f"{{{lab} : {pretty_type(f)}}}"
        case Inter(l, r):
            s = f"{pretty_type(l, 1)} & {pretty_type(r, 2)}"
            return f"({s})" if level > 1 else s
        case Arrow(d, c):
            s = f"{pretty_type(d, 1)} -> {pretty_type(c, 0)}"
            return f"({s})" if level > 0 else s
        case Forall(x, b, body):
            s = f"forall {x} * {pretty_type(b)}. {pretty_type(body)}"
            return f"({s})" if level > 0 else s
    raise TypeError(f"not a type: {a!r}")


def _quote(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def pretty(e: Expr, level: int = 0) -> str:
    def paren(s: str, needed: int) -> str:
        return f"({s})" if level > needed else s

    match e:
        case Var(n):
            return n
        case LitInt(i):
            return str(i)
        case LitBool(b):
            return "true" if b else "false"
        case LitStr(s):
            return _quote(s)
        case TopVal():
            return "()"
        case RcdE(lab, body):
            return f"{{{lab} = {pretty(body)}}}"
        case Lam(x, t, body):
            return paren(f"\\{x} : {_binder_type(t)}. {pretty(body)}", 0)
        case TLam(x, body):
            return paren(f"/\\{x}. {pretty(body)}", 0)
        case Fix(x, t, body):
            return paren(f"fix {x} : {_binder_type(t)}. {pretty(body)}", 0)
        case Merge(l, r):
            # A binder on the left would run on over the right operand.
            left = pretty(l, 1 if isinstance(l, (Lam, TLam, Fix)) else 0)
            return paren(f"{left} ,, {pretty(r, 1)}", 0)
        case Anno():
            # Iterative so that long chains (a diverging fixpoint) print without deep recursion.
            types = []
            while isinstance(e, Anno):
                types.append(pretty_type(e.ty))
                e = e.body
            return paren(" : ".join([pretty(e, 1), *reversed(types)]), 1)
        case App(f, a):
            return paren(f"{pretty(f, 2)} {pretty(a, 3)}", 2)
        case TApp(f, t):
            return paren(f"{pretty(f, 2)} @{pretty_type(t, 2)}", 2)
        case Proj(body, lab):
            return f"{pretty(body, 3)}.{lab}"
    raise TypeError(f"not an expression: {e!r}")


def _binder_type(t: Type) -> str:
    # A quantifier in binder position would swallow the '.' that ends the binder.
    return pretty_type(t, 1) if isinstance(t, Forall) else pretty_type(t)
