"""Call-by-name type-directed reduction: casting, wrapping, parallel application, stepping."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

from .subtyping import AsArrow, AsForall, AsRcd, app_dist, split, subtype, top_like
from .syntax import (
    BOOL, EMPTY_DELTA, INT, STRING, TOP, Anno, App, Arrow, Expr, Fix, Forall,
    Lam, LitBool, LitInt, LitStr, Merge, Proj, Rcd, RcdE, TApp, TLam, Top,
    TopVal, Type, Var, is_pform, is_prevalue, is_value, pretty, pretty_type, subst_expr,
    subst_type, subst_type_in_expr,
)

DEFAULT_FUEL = 100_000


# ------------------------------------------------------------ arguments


@dataclass(frozen=True)
class TermArg:
    expr: Expr


@dataclass(frozen=True)
class TypeArg:
    ty: Type


@dataclass(frozen=True)
class LabelArg:
    label: str


Argument = Union[TermArg, TypeArg, LabelArg]


# ------------------------------------------------------- step outcomes


@dataclass(frozen=True)
class Stepped:
    next: Expr
    rule: str
    detail: tuple[str, ...] = ()


@dataclass(frozen=True)
class IsValue:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str


StepOutcome = Union[Stepped, IsValue, Stuck]

# Called at every cast site with (value, target type, result or None).
CastHook = Callable[[Expr, Type, "Expr | None"], None]


# --------------------------------------------------- top-like values


def top_like_value(a: Type) -> Expr:
    """The canonical value of an ordinary top-like type."""
    match a:
        case Top():
            return TopVal()
        case Arrow():
            return Anno(Lam("x", TOP, TopVal()), a)
        case Rcd(lab, _):
            return Anno(RcdE(lab, TopVal()), a)
        case Forall(x, _, _):
            return Anno(TLam(x, TopVal()), a)
    raise AssertionError(f"no canonical value for {a!r}")


# ---------------------------------------------------------------- casting

_LIT_TYPES = {LitInt: (INT, "Cast-int"), LitBool: (BOOL, "Cast-bool"), LitStr: (STRING, "Cast-string")}


def cast(v: Expr, a: Type, log: list[str] | None = None) -> Expr | None:
    """Cast the closed pre-value `v` to type `a`; None if no rule applies."""
    if log is None:
        log = []
    mark = len(log)
    halves = split(a)
    if halves is not None:
        log.append("Cast-and")
        left = cast(v, halves[0], log)
        right = cast(v, halves[1], log) if left is not None else None
        if right is None:
            del log[mark:]
            return None
        return Merge(left, right)
    if top_like(EMPTY_DELTA, a):
        log.append("Cast-top")
        return top_like_value(a)
    match v:
        case LitInt() | LitBool() | LitStr():
            ty, rule = _LIT_TYPES[type(v)]
            if ty == a:
                log.append(rule)
                return v
        case Anno(p, b) if is_pform(p):
            if subtype(EMPTY_DELTA, b, a):
                log.append("Cast-anno")
                return Anno(p, a)
        case Merge(l, r):
            log.append("Cast-mergel")
            out = cast(l, a, log)
            if out is not None:
                return out
            log[mark] = "Cast-merger"
            del log[mark + 1:]
            out = cast(r, a, log)
            if out is not None:
                return out
    del log[mark:]
    return None


def cast_all(v: Expr, a: Type) -> list[Expr]:
    """Every result the (overlapping) casting rules permit, in rule order."""
    halves = split(a)
    if halves is not None:
        return [Merge(l, r) for l in cast_all(v, halves[0]) for r in cast_all(v, halves[1])]
    if top_like(EMPTY_DELTA, a):
        return [top_like_value(a)]
    match v:
        case LitInt() | LitBool() | LitStr():
            return [v] if _LIT_TYPES[type(v)][0] == a else []
        case Anno(p, b) if is_pform(p):
            return [Anno(p, a)] if subtype(EMPTY_DELTA, b, a) else []
        case Merge(l, r):
            return cast_all(l, a) + cast_all(r, a)
    return []


def wrap(e: Expr, a: Type, log: list[str] | None = None) -> Expr:
    """Annotate `e` with `a`, splitting `a` and replacing top-like parts by their canonical values."""
    if log is None:
        log = []
    halves = split(a)
    if halves is not None:
        log.append("EW-and")
        return Merge(wrap(e, halves[0], log), wrap(e, halves[1], log))
    if top_like(EMPTY_DELTA, a):
        log.append("EW-top")
        return top_like_value(a)
    log.append("EW-anno")
    return Anno(e, a)


# -------------------------------------------------- parallel application


def papp(v: Expr, arg: Argument, log: list[str] | None = None) -> Expr | None:
    """Apply every component of the value `v` to `arg`; None when some component cannot be applied."""
    if log is None:
        log = []
    match v, arg:
        case Merge(l, r), _:
            log.append("PApp-merge")
            left = papp(l, arg, log)
            right = papp(r, arg, log) if left is not None else None
            return None if right is None else Merge(left, right)
        case Anno(Lam(x, param_t, body), t), TermArg(e):
            form = app_dist(t)
            if isinstance(form, AsArrow):
                log.append("PApp-abs")
                return Anno(subst_expr(body, x, wrap(e, param_t, log)), form.codomain)
        case Anno(TLam(x, body), t), TypeArg(ty):
            form = app_dist(t)
            if isinstance(form, AsForall):
                log.append("PApp-tabs")
                return Anno(subst_type_in_expr(body, x, ty), subst_type(form.body, form.binder, ty))
        case Anno(RcdE(lab, body), t), LabelArg(want) if lab == want:
            form = app_dist(t)
            if isinstance(form, AsRcd) and form.label == want:
                log.append("PApp-proj")
                return Anno(body, form.field)
    return None


# -------------------------------------------------------------- stepping

_ELIM_RULES = {App: "Step-papp", TApp: "Step-ptapp", Proj: "Step-pproj"}


def _descends(e: Expr) -> Expr | None:
    """The sub-term an evaluation context would focus on, if any."""
    match e:
        case App(f, _) | TApp(f, _) | Proj(f, _) if not is_value(f):
            return f
        case Anno(b, _) if not is_value(b):
            return b
    return None


def _plug(frame: Expr, child: Expr) -> Expr:
    match frame:
        case App(_, a):
            return App(child, a, span=frame.span)
        case TApp(_, t):
            return TApp(child, t, span=frame.span)
        case Proj(_, lab):
            return Proj(child, lab, span=frame.span)
        case Anno(_, t):
            return Anno(child, t, span=frame.span)
    raise AssertionError(frame)


def _argument(e: App | TApp | Proj) -> Argument:
    match e:
        case App(_, a):
            return TermArg(a)
        case TApp(_, t):
            return TypeArg(t)
        case Proj(_, lab):
            return LabelArg(lab)


def _step_here(e: Expr, on_cast: CastHook | None) -> StepOutcome:
    """Step `e` itself, assuming no evaluation context applies at its root."""
    match e:
        case App(f, _) | TApp(f, _) | Proj(f, _):
            log: list[str] = []
            out = papp(f, _argument(e), log)
            if out is None:
                return Stuck(f"cannot apply {pretty(f)}")
            return Stepped(out, _ELIM_RULES[type(e)], tuple(log))
        case Fix(x, t, body):
            return Stepped(Anno(subst_expr(body, x, e), t), "Step-fix")
        case Anno(v, t):
            if is_pform(v):
                return IsValue()
            if not is_prevalue(v):
                return Stuck(f"value {pretty(v)} has no principal type")
            log = []
            out = cast(v, t, log)
            if on_cast is not None:
                on_cast(v, t, out)
            if out is None:
                return Stuck(f"cannot cast {pretty(v)} to {pretty_type(t)}")
            return Stepped(out, "Step-annov", tuple(log))
        case Merge(l, r):
            lo, ro = step(l, on_cast), step(r, on_cast)
            match lo, ro:
                case Stepped(), Stepped():
                    return Stepped(Merge(lo.next, ro.next, span=e.span), "Step-merge",
                                   (lo.rule, *lo.detail, ro.rule, *ro.detail))
                case Stepped(), _:
                    return Stepped(Merge(lo.next, r, span=e.span), lo.rule, lo.detail)
                case _, Stepped():
                    return Stepped(Merge(l, ro.next, span=e.span), ro.rule, ro.detail)
                case IsValue(), IsValue():
                    return IsValue()
                case Stuck(), _:
                    return lo
                case _:
                    return ro
        case Var(x):
            return Stuck(f"free variable {x}")
    if is_value(e):
        return IsValue()
    return Stuck(f"no rule applies to {pretty(e)}")


def step(e: Expr, on_cast: CastHook | None = None) -> StepOutcome:
    """One reduction step of the whole term `e`."""
    frames: list[Expr] = []
    focus = e
    while (inner := _descends(focus)) is not None:
        frames.append(focus)
        focus = inner
    out = _step_here(focus, on_cast)
    if not isinstance(out, Stepped) or not frames:
        return out
    nxt = out.next
    for fr in reversed(frames):
        nxt = _plug(fr, nxt)
    return Stepped(nxt, out.rule, out.detail)


def step_all(e: Expr) -> list[Expr]:
    """All successors of `e` when every overlapping cast rule may fire (a relational reading of `step`)."""
    frames: list[Expr] = []
    focus = e
    while (inner := _descends(focus)) is not None:
        frames.append(focus)
        focus = inner
    match focus:
        case Anno(v, t) if is_value(v) and is_prevalue(v):
            results = cast_all(v, t)
        case Merge(l, r):
            ls, rs = step_all(l), step_all(r)
            if ls and rs:
                results = [Merge(a, b) for a in ls for b in rs]
            elif ls:
                results = [Merge(a, r) for a in ls]
            else:
                results = [Merge(l, b) for b in rs]
        case _:
            out = _step_here(focus, None)
            results = [out.next] if isinstance(out, Stepped) else []
    for fr in reversed(frames):
        results = [_plug(fr, x) for x in results]
    return results


# ----------------------------------------------------------- evaluation


@dataclass
class TraceStep:
    rule: str
    detail: tuple[str, ...]
    term: Expr


@dataclass
class Trace:
    initial: Expr
    verdict: str  # "value" | "fuel-exhausted" | "stuck"
    result: Expr
    count: int
    reason: str | None = None
    steps: list[TraceStep] = field(default_factory=list)

    def text_lines(self) -> list[str]:
        out = []
        for n, s in enumerate(self.steps, 1):
            rule = s.rule + (f"[{','.join(s.detail)}]" if s.detail else "")
            out.append(f"STEP {n} {rule} {pretty(s.term)}")
        return out

    def to_json(self) -> dict:
        return {
            "initial": pretty(self.initial),
            "steps": [{"n": n, "rule": s.rule, "detail": list(s.detail), "term": pretty(s.term)}
                      for n, s in enumerate(self.steps, 1)],
            "verdict": self.verdict,
            "result": pretty(self.result),
            "count": self.count,
            "reason": self.reason,
        }


def evaluate(e: Expr, fuel: int = DEFAULT_FUEL, record: bool = False,
             on_cast: CastHook | None = None) -> Trace:
    """Reduce `e` until it is a value, gets stuck, or `fuel` steps have been taken.

    The evaluation context is kept between steps, so each step only
    revisits the part of the term around the last redex.
    """
    frames: list[Expr] = []
    focus = e
    count = 0
    steps: list[TraceStep] = []

    def whole() -> Expr:
        t = focus
        for fr in reversed(frames):
            t = _plug(fr, t)
        return t

    while True:
        while (inner := _descends(focus)) is not None:
            frames.append(focus)
            focus = inner
        if is_value(focus):
            if not frames:
                return Trace(e, "value", focus, count, steps=steps)
            focus = _plug(frames.pop(), focus)
            continue
        if count >= fuel:
            return Trace(e, "fuel-exhausted", whole(), count, f"no value after {fuel} steps", steps)
        out = _step_here(focus, on_cast)
        if isinstance(out, Stuck):
            return Trace(e, "stuck", whole(), count, out.reason, steps)
        assert isinstance(out, Stepped)
        focus = out.next
        count += 1
        if record:
            steps.append(TraceStep(out.rule, out.detail, whole()))
