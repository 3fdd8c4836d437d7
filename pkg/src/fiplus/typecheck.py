"""Well-formedness, principal types, consistency and bidirectional type checking."""
from __future__ import annotations

from enum import Enum

from .disjointness import disjoint
from .subtyping import AsArrow, AsForall, AsRcd, app_dist, split, subtype
from .syntax import (
    BOOL, EMPTY_DELTA, EMPTY_GAMMA, INT, STRING, TOP, Anno, App, Arrow, Expr, Fix,
    Forall, Inter, Lam, LitBool, LitInt, LitStr, Merge, Proj, Rcd, RcdE, TApp,
    TermCtx, TLam, TopVal, TVar, Type, TypeCtx, Var, alpha_eq, fresh,
    free_tvars, free_tvars_expr, free_vars, is_prevalue, pretty, pretty_type,
    subst_type, subst_type_in_expr,
)


class ErrorKind(str, Enum):
    NOT_WELL_FORMED = "NotWellFormed"
    NO_INFERRED_TYPE = "NoInferredType"
    SUBTYPE_FAILURE = "SubtypeFailure"
    NOT_APPLICABLE = "NotApplicable"
    DISJOINTNESS_FAILURE = "DisjointnessFailure"
    CONSISTENCY_FAILURE = "ConsistencyFailure"
    UNBOUND_VARIABLE = "UnboundVariable"
    CHECK_SHAPE_MISMATCH = "CheckShapeMismatch"


class TypeCheckError(Exception):
    def __init__(self, kind: ErrorKind, rule: str, message: str, expr: Expr | None = None,
                 expected: Type | None = None, actual: Type | None = None):
        super().__init__(message)
        self.kind = kind
        self.rule = rule
        self.message = message
        self.span = getattr(expr, "span", None)
        self.expected = expected
        self.actual = actual

    def __str__(self) -> str:
        return f"{self.kind.value} ({self.rule}): {self.message}"


# ------------------------------------------------------- well-formedness


def wf_type(delta: TypeCtx, a: Type) -> bool:
    return free_tvars(a) <= delta.names()


def wf_type_ctx(delta: TypeCtx) -> bool:
    seen = TypeCtx()
    for x, bound in delta.bindings:
        if x in seen or not wf_type(seen, bound):
            return False
        seen = seen.extend(x, bound)
    return True


def wf_term_ctx(delta: TypeCtx, gamma: TermCtx) -> bool:
    names = [x for x, _ in gamma.bindings]
    return len(set(names)) == len(names) and all(wf_type(delta, t) for _, t in gamma.bindings)


def _require_wf(delta: TypeCtx, a: Type, rule: str, e: Expr | None) -> None:
    if not wf_type(delta, a):
        missing = ", ".join(sorted(free_tvars(a) - delta.names()))
        raise TypeCheckError(ErrorKind.NOT_WELL_FORMED, rule,
                             f"type {pretty_type(a)} mentions unbound type variable(s) {missing}", e)


# ------------------------------------------------ pre-values and consistency


def principal_type(u: Expr) -> Type:
    match u:
        case LitInt():
            return INT
        case LitBool():
            return BOOL
        case LitStr():
            return STRING
        case TopVal():
            return TOP
        case Anno(_, a):
            return a
        case Merge(l, r):
            return Inter(principal_type(l), principal_type(r))
    raise ValueError(f"not a pre-value: {pretty(u)}")


def consistent(u1: Expr, u2: Expr) -> bool:
    """Whether two pre-values can be merged without making casts ambiguous."""
    if isinstance(u1, Merge):
        return consistent(u1.left, u2) and consistent(u1.right, u2)
    if isinstance(u2, Merge):
        return consistent(u1, u2.left) and consistent(u1, u2.right)
    if isinstance(u1, Anno) and isinstance(u2, Anno) and alpha_eq(u1.body, u2.body):
        return True
    if isinstance(u1, (LitInt, LitBool, LitStr, TopVal)) and alpha_eq(u1, u2):
        return True
    return disjoint(EMPTY_DELTA, principal_type(u1), principal_type(u2))


def _closed(e: Expr) -> bool:
    return not free_vars(e) and not free_tvars_expr(e)


# ---------------------------------------------------------------- typing


def infer(delta: TypeCtx, gamma: TermCtx, e: Expr) -> Type:
    """Synthesize the type of `e`; raises TypeCheckError."""
    _check_contexts(delta, gamma)
    return _infer(delta, gamma, e)


def check(delta: TypeCtx, gamma: TermCtx, e: Expr, b: Type) -> None:
    """Check `e` against `b`; raises TypeCheckError."""
    _check_contexts(delta, gamma)
    _require_wf(delta, b, "Typ-check", e)
    _check(delta, gamma, e, b)


def infer_closed(e: Expr) -> Type:
    return infer(EMPTY_DELTA, EMPTY_GAMMA, e)


def check_closed(e: Expr, b: Type) -> None:
    check(EMPTY_DELTA, EMPTY_GAMMA, e, b)


def _check_contexts(delta: TypeCtx, gamma: TermCtx) -> None:
    if not wf_type_ctx(delta):
        raise TypeCheckError(ErrorKind.NOT_WELL_FORMED, "TCW", "ill-formed type context")
    if not wf_term_ctx(delta, gamma):
        raise TypeCheckError(ErrorKind.NOT_WELL_FORMED, "CW", "ill-formed term context")


def _infer(delta: TypeCtx, gamma: TermCtx, e: Expr) -> Type:
    match e:
        case TopVal():
            return TOP
        case LitInt():
            return INT
        case LitBool():
            return BOOL
        case LitStr():
            return STRING
        case Var(x):
            t = gamma.lookup(x)
            if t is None:
                raise TypeCheckError(ErrorKind.UNBOUND_VARIABLE, "Typ-var", f"unbound variable {x}", e)
            return t
        case Anno(body, a):
            _require_wf(delta, a, "Typ-anno", e)
            _check(delta, gamma, body, a)
            return a
        case Fix(x, a, body):
            _require_wf(delta, a, "Typ-fix", e)
            _check(delta, gamma.extend(x, a), body, a)
            return a
        case App(f, arg):
            ft = _infer(delta, gamma, f)
            form = app_dist(ft)
            if not isinstance(form, AsArrow):
                raise TypeCheckError(ErrorKind.NOT_APPLICABLE, "Typ-app",
                                     f"cannot apply a term of type {pretty_type(ft)}", e, actual=ft)
            _check(delta, gamma, arg, form.domain)
            return form.codomain
        case TApp(f, a):
            _require_wf(delta, a, "Typ-tapp", e)
            ft = _infer(delta, gamma, f)
            form = app_dist(ft)
            if not isinstance(form, AsForall):
                raise TypeCheckError(ErrorKind.NOT_APPLICABLE, "Typ-tapp",
                                     f"cannot instantiate a term of type {pretty_type(ft)}", e, actual=ft)
            if not disjoint(delta, a, form.bound):
                raise TypeCheckError(ErrorKind.DISJOINTNESS_FAILURE, "Typ-tapp",
                                     f"{pretty_type(a)} is not disjoint with {pretty_type(form.bound)}",
                                     e, expected=form.bound, actual=a)
            return subst_type(form.body, form.binder, a)
        case Proj(target, label):
            tt = _infer(delta, gamma, target)
            form = app_dist(tt)
            if not (isinstance(form, AsRcd) and form.label == label):
                raise TypeCheckError(ErrorKind.NOT_APPLICABLE, "Typ-proj",
                                     f"no field {label} in {pretty_type(tt)}", e, actual=tt)
            return form.field
        case Merge():
            return _infer_merge(delta, gamma, e)[0]
        case Lam() | TLam() | RcdE():
            raise TypeCheckError(ErrorKind.NO_INFERRED_TYPE, "Typ-sub",
                                 f"{pretty(e)} needs a type annotation", e)
    raise TypeError(f"not an expression: {e!r}")


def merge_rule(delta: TypeCtx, gamma: TermCtx, e: Merge) -> str:
    """Name of the rule that types the merge `e`: "Typ-merge" (disjoint) or "Typ-mergev" (consistent)."""
    _check_contexts(delta, gamma)
    return _infer_merge(delta, gamma, e)[1]


def _infer_merge(delta: TypeCtx, gamma: TermCtx, e: Merge) -> tuple[Type, str]:
    l, r = e.left, e.right
    lt = _infer(delta, gamma, l)
    rt = _infer(delta, gamma, r)
    if disjoint(delta, lt, rt):
        return Inter(lt, rt), "Typ-merge"
    # Duplicated pre-values (as produced by casting) only need to be consistent.
    if is_prevalue(l) and is_prevalue(r) and _closed(l) and _closed(r) and consistent(l, r):
        return Inter(lt, rt), "Typ-mergev"
    raise TypeCheckError(ErrorKind.DISJOINTNESS_FAILURE, "Typ-merge",
                         f"merged types {pretty_type(lt)} and {pretty_type(rt)} are not disjoint",
                         e, expected=lt, actual=rt)


_INTRO_NAMES = {Lam: "Typ-abs", TLam: "Typ-tabs", RcdE: "Typ-rcd"}


def checking_rule(delta: TypeCtx, gamma: TermCtx, e: Expr, b: Type) -> str:
    """Name of the rule that concludes `e <= b`: an introduction rule, "Typ-inter" or "Typ-sub"."""
    check(delta, gamma, e, b)
    if not isinstance(e, (Lam, TLam, RcdE)):
        return "Typ-sub"
    intro = _intro_rule(e, b)
    if intro is not None:
        try:
            intro(delta, gamma, e, b)
            return _INTRO_NAMES[type(e)]
        except TypeCheckError:
            pass
    return "Typ-inter"


def _check(delta: TypeCtx, gamma: TermCtx, e: Expr, b: Type) -> None:
    if not isinstance(e, (Lam, TLam, RcdE)):
        a = _infer(delta, gamma, e)
        if not subtype(delta, a, b):
            raise TypeCheckError(ErrorKind.SUBTYPE_FAILURE, "Typ-sub",
                                 f"{pretty_type(a)} is not a subtype of {pretty_type(b)}",
                                 e, expected=b, actual=a)
        return

    first_error: TypeCheckError | None = None
    intro = _intro_rule(e, b)
    if intro is not None:
        try:
            intro(delta, gamma, e, b)
            return
        except TypeCheckError as err:
            first_error = err
    halves = split(b)
    if halves is not None:
        try:
            _check(delta, gamma, e, halves[0])
            _check(delta, gamma, e, halves[1])
            return
        except TypeCheckError as err:
            raise first_error or err
    if first_error is not None:
        raise first_error
    raise TypeCheckError(ErrorKind.CHECK_SHAPE_MISMATCH, "Typ-check",
                         f"{pretty(e)} cannot have type {pretty_type(b)}", e, expected=b)


def _intro_rule(e: Expr, b: Type):
    match e, b:
        case Lam(), Arrow():
            return _check_abs
        case TLam(), Forall():
            return _check_tabs
        case RcdE(l1, _), Rcd(l2, _) if l1 == l2:
            return _check_rcd
    return None


def _check_abs(delta: TypeCtx, gamma: TermCtx, e: Lam, b: Arrow) -> None:
    _require_wf(delta, e.param_type, "Typ-abs", e)
    if not subtype(delta, b.domain, e.param_type):
        raise TypeCheckError(ErrorKind.SUBTYPE_FAILURE, "Typ-abs",
                             f"argument type {pretty_type(b.domain)} is not a subtype of the "
                             f"parameter type {pretty_type(e.param_type)}",
                             e, expected=e.param_type, actual=b.domain)
    _check(delta, gamma.extend(e.param, e.param_type), e.body, b.codomain)


def _check_tabs(delta: TypeCtx, gamma: TermCtx, e: TLam, b: Forall) -> None:
    body, tbody, x = e.body, b.body, b.binder
    if x in delta or e.binder != x:  # align both binders on a name unused in delta
        x = fresh(b.binder, delta.names() | free_tvars(b) | free_tvars_expr(e))
        body = subst_type_in_expr(e.body, e.binder, TVar(x))
        tbody = subst_type(b.body, b.binder, TVar(x))
    _require_wf(delta, b.bound, "Typ-tabs", e)
    _check(delta.extend(x, b.bound), gamma, body, tbody)


def _check_rcd(delta: TypeCtx, gamma: TermCtx, e: RcdE, b: Rcd) -> None:
    _check(delta, gamma, e.body, b.field)
