"""Type enumeration, well-typed term generation, brute-force oracles and property suites."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator

from .disjointness import disjoint
from .evaluator import Stepped, Stuck, cast, evaluate, step, step_all, wrap
from .subtyping import app_dist, AsArrow, AsForall, AsRcd, iso_subtype, ordinary, split, subtype, top_like
from .syntax import (
    BOOL, BOT, EMPTY_DELTA, INT, STRING, TOP, Anno, App, Arrow, Expr, Fix, Forall,
    Inter, Lam, LitBool, LitInt, LitStr, Merge, Proj, Rcd, RcdE, TApp, TLam, TopVal,
    TVar, Type, TypeCtx, Var, all_tvars, alpha_eq, fresh, free_tvars,
    free_tvars_expr, free_vars, is_prevalue, pretty, pretty_type,
    subst_expr, subst_type, subst_type_in_expr,
)
from .typecheck import TypeCheckError, check_closed, consistent, infer_closed

# ------------------------------------------------------------ type universes


@dataclass(frozen=True)
class TypeUniverse:
    """Every closed type up to `depth` built from the bases, Top and Bot with `&`, `->` and one record label.

    Depth d holds the atoms plus each constructor applied to depth d-1
    members, so members never repeat. With `include_vars`, each level from
    1 up also holds `forall X * a. b` for atoms a and b in the atoms or X.
    Members stream in a fixed order, so the depth-3 universe (about 21
    million types) can be walked without being stored.
    """
    depth: int
    bases: tuple[Type, ...] = (INT, BOOL)
    include_vars: bool = False
    label: str = "l"

    @property
    def atoms(self) -> tuple[Type, ...]:
        return (*self.bases, TOP, BOT)

    def _quantifiers(self) -> list[Type]:
        if not self.include_vars:
            return []
        return [Forall("X", b, t) for b in self.atoms for t in (*self.atoms, TVar("X"))]

    def _layer(self, prev: list[Type]) -> Iterator[Type]:
        yield from self.atoms
        for a in prev:
            for b in prev:
                yield Inter(a, b)
        for a in prev:
            for b in prev:
                yield Arrow(a, b)
        for a in prev:
            yield Rcd(self.label, a)
        yield from self._quantifiers()

    def level(self, d: int) -> list[Type]:
        """Materialized members of depth at most `d` (d < depth, or small universes)."""
        out = list(self.atoms)
        for _ in range(d):
            out = list(self._layer(out))
        return out

    def __iter__(self) -> Iterator[Type]:
        if self.depth == 0:
            return iter(self.atoms)
        return self._layer(self.level(self.depth - 1))

    def __len__(self) -> int:
        n = len(self.atoms)
        for _ in range(self.depth):
            n = len(self.atoms) + 2 * n * n + n + len(self._quantifiers())
        return n

    @cached_property
    def members(self) -> tuple[Type, ...]:
        return tuple(self)


def enum_types(depth: int, bases: tuple[Type, ...] = (INT, BOOL), include_vars: bool = False) -> TypeUniverse:
    if not 0 <= depth <= 3:
        raise ValueError("type universes are enumerated up to depth 3")
    return TypeUniverse(depth, tuple(bases), include_vars)


# ------------------------------------------------------------ type oracles


def oracle_disjoint_spec(a: Type, b: Type, universe: Iterable[Type]) -> bool:
    """Brute force: every common supertype of `a` and `b` in `universe` is top-like."""
    return all(top_like(EMPTY_DELTA, c) for c in universe
               if subtype(EMPTY_DELTA, a, c) and subtype(EMPTY_DELTA, b, c))


def witness_types(depth: int, bases: tuple[Type, ...] = (INT, BOOL), label: str = "l") -> tuple[Type, ...]:
    """Ordinary, non-top-like types up to `depth` whose arrow domains are all Bot.

    Any non-top-like type C of that universe has an ordinary non-top-like
    half (split repeatedly, keeping a non-top-like part), and replacing the
    arrow domains of that half by Bot gives one of these types, a
    supertype of C. So two types share a non-top-like supertype in the
    universe exactly when they share one of these.
    """
    level = [*bases, BOT]
    for _ in range(depth):
        level = list(dict.fromkeys([*bases, BOT] + [Arrow(BOT, c) for c in level]
                                   + [Rcd(label, c) for c in level]))
    return tuple(level)


def supertype_mask(a: Type, witnesses: tuple[Type, ...]) -> int:
    """Bit i is set when `witnesses[i]` is a supertype of `a`."""
    mask = 0
    for i, w in enumerate(witnesses):
        if subtype(EMPTY_DELTA, a, w):
            mask |= 1 << i
    return mask


@dataclass
class SoundnessReport:
    pairs: int = 0
    disjoint_pairs: int = 0
    violations: list[tuple[Type, Type, Type]] = field(default_factory=list)  # (a, b, shared supertype)
    incomplete: int = 0  # judged overlapping although no non-top-like common supertype exists


def disjoint_soundness(types: list[Type], witnesses: tuple[Type, ...],
                       on_row: Callable[[int, Type, list], None] | None = None) -> SoundnessReport:
    """Compare `disjoint` with the witness oracle on every unordered pair of `types`."""
    masks = [supertype_mask(a, witnesses) for a in types]
    report = SoundnessReport()
    for i, a in enumerate(types):
        row_violations = []
        mi = masks[i]
        for j in range(i, len(types)):
            shared = mi & masks[j]
            report.pairs += 1
            if disjoint(EMPTY_DELTA, a, types[j]):
                report.disjoint_pairs += 1
                if shared:
                    w = witnesses[(shared & -shared).bit_length() - 1]
                    row_violations.append((a, types[j], w))
            elif not shared:
                report.incomplete += 1
        report.violations.extend(row_violations)
        if on_row is not None:
            on_row(i, a, row_violations)
    return report


def splittable_types(universe: Iterable[Type]) -> Iterator[Type]:
    return (a for a in universe if not ordinary(a))


def split_equivalence_holds(a: Type) -> bool:
    b, c = split(a)
    both = Inter(b, c)
    return subtype(EMPTY_DELTA, a, both) and subtype(EMPTY_DELTA, both, a)


def reflexivity_failures(types: Iterable[Type]) -> list[Type]:
    return [a for a in types if not subtype(EMPTY_DELTA, a, a)]


def transitivity_failures(triples: Iterable[tuple[Type, Type, Type]]) -> list[tuple[Type, Type, Type]]:
    out = []
    for a, b, c in triples:
        if subtype(EMPTY_DELTA, a, b) and subtype(EMPTY_DELTA, b, c) and not subtype(EMPTY_DELTA, a, c):
            out.append((a, b, c))
    return out


def subtype_chains(types: list[Type], count: int, seed: int, pool: int = 400) -> list[tuple[Type, Type, Type]]:
    """`count` triples a <: b <: c drawn from a random pool of `types`, so the premises always hold."""
    rng = random.Random(seed)
    sample = rng.sample(types, min(pool, len(types)))
    ups = [[b for b in sample if subtype(EMPTY_DELTA, a, b)] for a in sample]
    index = {id(t): i for i, t in enumerate(sample)}
    out = []
    while len(out) < count:
        i = rng.randrange(len(sample))
        b = rng.choice(ups[i])
        c = rng.choice(ups[index[id(b)]])
        out.append((sample[i], b, c))
    return out


# ------------------------------------------------------- term generation


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 5  # height of the generated syntax tree; types do not count
    term_count: int = 1000
    fuel: int = 10_000
    universe_depth: int = 2  # for the type-universe suites


@dataclass(frozen=True)
class GeneratedTerm:
    seed: int
    expr: Expr
    type: Type


class NoTerm(Exception):
    """The generator reached a type it cannot inhabit within the remaining height."""


@dataclass(frozen=True)
class _Ctx:
    delta: TypeCtx = EMPTY_DELTA
    vars: tuple[tuple[str, Type, bool, bool], ...] = ()  # (name, type, guarded, is fixpoint self)
    eliminated: bool = False  # inside a term that is applied, projected or passed as an argument

    def names(self) -> set[str]:
        return {v[0] for v in self.vars}

    def bind(self, x: str, t: Type, is_self: bool = False) -> _Ctx:
        return _Ctx(self.delta, (*self.vars, (x, t, not is_self, is_self)), self.eliminated)

    def under_binder(self) -> _Ctx:
        return _Ctx(self.delta, tuple((x, t, True, s) for x, t, _, s in self.vars), self.eliminated)

    def bind_tvar(self, x: str, bound: Type) -> _Ctx:
        return _Ctx(self.delta.extend(x, bound), self.vars, self.eliminated)

    def eliminating(self) -> _Ctx:
        return _Ctx(self.delta, self.vars, True)

    def usable(self) -> Iterator[tuple[str, Type]]:
        # A fixpoint's self-reference may only sit under a binder and only in a
        # position whose value is never applied or passed on; then unfolding
        # the fixpoint always stops at a value.
        for x, t, guarded, is_self in self.vars:
            if guarded and not (is_self and self.eliminated):
                yield x, t


LABELS = ("l", "m")


def height(e: Expr) -> int:
    match e:
        case Lam(_, _, b) | Fix(_, _, b) | TLam(_, b) | RcdE(_, b) | Anno(b, _) | TApp(b, _) | Proj(b, _):
            return 1 + height(b)
        case Merge(l, r) | App(l, r):
            return 1 + max(height(l), height(r))
    return 1


class TermGenerator:
    """Type-directed generator of closed well-typed terms.

    It leans on merges, annotations (often over splittable types, so that
    casts duplicate values), fixpoints and type applications. Each term
    is built bottom-up against a target type and then re-checked by the
    type checker, so only terms the checker accepts are returned.
    """

    def __init__(self, rng: random.Random, max_depth: int = 5):
        self.rng = rng
        self.max_depth = max_depth

    # -- types

    def rand_type(self, size: int, tvars: tuple[str, ...] = ()) -> Type:
        r = self.rng
        if size <= 1 or r.random() < 0.3:
            return r.choice([INT, INT, BOOL, STRING, TOP, *(TVar(x) for x in tvars)])
        kind = r.choices(("arrow", "inter", "rcd", "forall"), weights=(3, 4, 2, 1))[0]
        if kind == "arrow":
            return Arrow(self.rand_type(size - 1, tvars), self.rand_type(size - 1, tvars))
        if kind == "inter":
            return Inter(self.rand_type(size - 1, tvars), self.rand_type(size - 1, tvars))
        if kind == "rcd":
            return Rcd(r.choice(LABELS), self.rand_type(size - 1, tvars))
        x = fresh("X", tvars)
        bound = r.choice([TOP, INT, BOOL, BOT])
        return Forall(x, bound, self.rand_type(size - 1, (*tvars, x)))

    # -- synthesis: a term whose inferred type is a subtype of `want`

    def syn(self, ctx: _Ctx, want: Type, d: int) -> tuple[Expr, Type]:
        if d < 1:
            raise NoTerm
        builders = [(self._leaf, 3), (self._anno, 2), (self._merge, 4), (self._app, 2),
                    (self._tapp, 2), (self._proj, 1), (self._fix, 2)]
        order = []
        pool = list(builders)
        while pool:
            pick = self.rng.choices(range(len(pool)), weights=[w for _, w in pool])[0]
            order.append(pool.pop(pick)[0])
        for build in order:
            try:
                return build(ctx, want, d)
            except NoTerm:
                continue
        raise NoTerm

    def _leaf(self, ctx: _Ctx, want: Type, d: int) -> tuple[Expr, Type]:
        r, delta = self.rng, ctx.delta
        lits = [(LitInt(r.randint(0, 9)), INT), (LitBool(r.random() < 0.5), BOOL),
                (LitStr(r.choice("abc")), STRING)]
        cands = [(e, t) for e, t in lits if subtype(delta, t, want)]
        if top_like(delta, want):
            cands.append((TopVal(), TOP))
        cands += [(Var(x), t) for x, t in ctx.usable() if subtype(delta, t, want)]
        if not cands:
            raise NoTerm
        return r.choice(cands)

    def _anno(self, ctx: _Ctx, want: Type, d: int) -> tuple[Expr, Type]:
        if d < 2:
            raise NoTerm
        return Anno(self.chk(ctx, want, d - 1), want), want

    def _merge(self, ctx: _Ctx, want: Type, d: int) -> tuple[Expr, Type]:
        if d < 2:
            raise NoTerm
        halves = split(want)
        if halves is not None:
            l, tl = self.syn(ctx, halves[0], d - 1)
            r, tr = self.syn(ctx, halves[1], d - 1)
        else:
            l, tl = self.syn(ctx, want, d - 1)
            r, tr = self.syn(ctx, self.rand_type(2, tuple(ctx.delta.names())), d - 1)
            if self.rng.random() < 0.5:
                l, tl, r, tr = r, tr, l, tl
        if not disjoint(ctx.delta, tl, tr):
            raise NoTerm
        return Merge(l, r), Inter(tl, tr)

    def _app(self, ctx: _Ctx, want: Type, d: int) -> tuple[Expr, Type]:
        if d < 2:
            raise NoTerm
        dom = self.rand_type(2, tuple(ctx.delta.names()))
        f, tf = self.syn(ctx.eliminating(), Arrow(dom, want), d - 1)
        form = app_dist(tf)
        if not isinstance(form, AsArrow) or not subtype(ctx.delta, form.codomain, want):
            raise NoTerm
        return App(f, self.chk(ctx.eliminating(), form.domain, d - 1)), form.codomain

    def _tapp(self, ctx: _Ctx, want: Type, d: int) -> tuple[Expr, Type]:
        if d < 2:
            raise NoTerm
        r = self.rng
        arg = r.choice([INT, BOOL, STRING, self.rand_type(2, tuple(ctx.delta.names()))])
        bound = r.choice([b for b in (TOP, INT, BOOL, STRING) if disjoint(ctx.delta, arg, b)])
        x = fresh("X", ctx.delta.names() | all_tvars(want) | free_tvars(arg))
        body = self._abstract(want, arg, x)
        f, tf = self.syn(ctx.eliminating(), Forall(x, bound, body), d - 1)
        form = app_dist(tf)
        if not isinstance(form, AsForall) or not disjoint(ctx.delta, arg, form.bound):
            raise NoTerm
        result = subst_type(form.body, form.binder, arg)
        if not subtype(ctx.delta, result, want):
            raise NoTerm
        return TApp(f, arg), result

    def _abstract(self, a: Type, target: Type, x: str) -> Type:
        """Replace some occurrences of `target` in `a` by the variable `x`."""
        if a == target and self.rng.random() < 0.6:
            return TVar(x)
        match a:
            case Arrow(dom, cod):
                return Arrow(self._abstract(dom, target, x), self._abstract(cod, target, x))
            case Inter(l, r):
                return Inter(self._abstract(l, target, x), self._abstract(r, target, x))
            case Rcd(lab, f):
                return Rcd(lab, self._abstract(f, target, x))
        return a

    def _proj(self, ctx: _Ctx, want: Type, d: int) -> tuple[Expr, Type]:
        if d < 2:
            raise NoTerm
        lab = self.rng.choice(LABELS)
        f, tf = self.syn(ctx.eliminating(), Rcd(lab, want), d - 1)
        form = app_dist(tf)
        if not (isinstance(form, AsRcd) and form.label == lab) or not subtype(ctx.delta, form.field, want):
            raise NoTerm
        return Proj(f, lab), form.field

    def _fix(self, ctx: _Ctx, want: Type, d: int) -> tuple[Expr, Type]:
        if d < 2:
            raise NoTerm
        x = fresh("self", ctx.names())
        return Fix(x, want, self.chk(ctx.bind(x, want, is_self=True), want, d - 1)), want

    # -- checking: a term that checks against `want`

    def chk(self, ctx: _Ctx, want: Type, d: int) -> Expr:
        if d < 1:
            raise NoTerm
        intro = self._intro(ctx, want, d)
        if intro is not None and self.rng.random() < 0.7:
            return intro
        try:
            return self.syn(ctx, want, d)[0]
        except NoTerm:
            if intro is not None:
                return intro
            raise

    def _intro(self, ctx: _Ctx, want: Type, d: int) -> Expr | None:
        """A lambda, type abstraction or record checked directly against `want`, if its shape allows."""
        if d < 2:
            return None
        try:
            match want:
                case Arrow(dom, cod):
                    return self._lam(ctx, [dom], cod, d)
                case Rcd(lab, f):
                    return RcdE(lab, self.chk(ctx, f, d - 1))
                case Forall(x, bound, body):
                    y = fresh(x, ctx.delta.names())
                    inner = ctx.bind_tvar(y, bound).under_binder()
                    return TLam(y, self.chk(inner, subst_type(body, x, TVar(y)), d - 1))
                case Inter(Arrow(d1, c1), Arrow(d2, c2)):
                    return self._lam(ctx, [d1, d2], Inter(c1, c2), d)
                case Inter(Rcd(l1, f1), Rcd(l2, f2)) if l1 == l2:
                    return RcdE(l1, self.chk(ctx, Inter(f1, f2), d - 1))
        except NoTerm:
            return None
        return None

    def _lam(self, ctx: _Ctx, doms: list[Type], cod: Type, d: int) -> Expr:
        delta = ctx.delta
        # The parameter type must be a supertype of every expected domain.
        cands = [p for p in (*doms, *(split(doms[0]) or ())) if all(subtype(delta, q, p) for q in doms)]
        param = self.rng.choice(cands) if cands and self.rng.random() < 0.85 else TOP
        x = fresh(self.rng.choice("xyz"), ctx.names())
        return Lam(x, param, self.chk(ctx.under_binder().bind(x, param), cod, d - 1))

    # -- whole terms

    def term(self) -> tuple[Expr, Type]:
        while True:
            want = self.rand_type(3)
            try:
                e, _ = self.syn(_Ctx(), want, self.max_depth)
            except NoTerm:
                continue
            if height(e) > self.max_depth:
                continue
            return e, want


@dataclass
class GenStats:
    emitted: int = 0
    ill_typed: int = 0  # rejected by the self-check; should stay 0
    diverging: int = 0  # rejected because evaluation ran out of fuel


def gen_well_typed(cfg: GenConfig, stats: GenStats | None = None) -> Iterator[GeneratedTerm]:
    """`cfg.term_count` closed, well-typed terms; term i comes from seed `cfg.seed + i` alone."""
    stats = stats if stats is not None else GenStats()
    for i in range(cfg.term_count):
        seed = cfg.seed + i
        gen = TermGenerator(random.Random(seed), cfg.max_depth)
        while True:
            e, _ = gen.term()
            try:
                t = infer_closed(e)
            except TypeCheckError:
                stats.ill_typed += 1
                continue
            try:
                verdict = evaluate(e, cfg.fuel).verdict
            except RecursionError:  # the term kept growing: divergence by another route
                verdict = "fuel-exhausted"
            if verdict == "fuel-exhausted":
                stats.diverging += 1
                continue
            stats.emitted += 1
            yield GeneratedTerm(seed, e, t)
            break


# ---------------------------------------------------------- alpha-renaming


def rename_type_binders(a: Type) -> Type:
    match a:
        case Arrow(d, c):
            return Arrow(rename_type_binders(d), rename_type_binders(c))
        case Inter(l, r):
            return Inter(rename_type_binders(l), rename_type_binders(r))
        case Rcd(lab, f):
            return Rcd(lab, rename_type_binders(f))
        case Forall(x, b, body):
            body = rename_type_binders(body)
            y = fresh(x + "_", free_tvars(body) | all_tvars(body))
            return Forall(y, rename_type_binders(b), subst_type(body, x, TVar(y)))
    return a


def rename_binders(e: Expr) -> Expr:
    """An alpha-equivalent copy of `e` in which every binder has a new name."""
    t = rename_type_binders
    match e:
        case Lam(x, a, body) | Fix(x, a, body):
            body = rename_binders(body)
            y = fresh(x + "_", free_vars(body))
            return type(e)(y, t(a), subst_expr(body, x, Var(y)))
        case TLam(x, body):
            body = rename_binders(body)
            y = fresh(x + "_", free_tvars_expr(body))
            return TLam(y, subst_type_in_expr(body, x, TVar(y)))
        case RcdE(lab, body):
            return RcdE(lab, rename_binders(body))
        case Anno(body, a):
            return Anno(rename_binders(body), t(a))
        case TApp(body, a):
            return TApp(rename_binders(body), t(a))
        case Proj(body, lab):
            return Proj(rename_binders(body), lab)
        case Merge(l, r):
            return Merge(rename_binders(l), rename_binders(r))
        case App(f, a):
            return App(rename_binders(f), rename_binders(a))
    return e


# ------------------------------------------------------------------ suites


TERM_SUITES = ("determinism", "progress", "preservation", "upcast-only", "consistency")
UNIVERSE_SUITES = ("disjoint-soundness", "split-equivalence")
SUITES = TERM_SUITES + UNIVERSE_SUITES


@dataclass(frozen=True)
class CaseResult:
    seed: int
    suite: str
    passed: bool
    term: str = ""
    message: str = ""

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"SEED {self.seed} {verdict} {self.suite} {self.term}".rstrip()


@dataclass
class SuiteReport:
    cases: list[CaseResult] = field(default_factory=list)
    stats: GenStats = field(default_factory=GenStats)
    rules: dict[str, int] = field(default_factory=dict)  # how often each rule name fired

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.cases)

    def failures(self, suite: str | None = None) -> list[CaseResult]:
        return [c for c in self.cases if not c.passed and (suite is None or c.suite == suite)]

    def lines(self) -> list[str]:
        return [c.line() for c in sorted(self.cases, key=lambda c: (c.seed, c.suite))]


class _Failure(Exception):
    pass


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise _Failure(message)


def _step_checks(term: GeneratedTerm, wanted: set[str], fuel: int, rules: dict[str, int]) -> dict[str, str | None]:
    """Walk the reduction of one term, checking the per-step properties. Returns suite -> failure."""
    failed: dict[str, str | None] = {s: None for s in wanted}
    e, a = term.expr, term.type
    cast_sites: list[str] = []

    def on_cast(v: Expr, target: Type, out: Expr | None) -> None:
        if "upcast-only" not in wanted or out is None or failed["upcast-only"]:
            return
        try:
            b = infer_closed(v)
        except TypeCheckError as err:
            cast_sites.append(f"cast source {pretty(v)} is ill-typed: {err}")
            return
        if not subtype(EMPTY_DELTA, b, target):
            cast_sites.append(f"downcast of {pretty(v)} : {pretty_type(b)} to {pretty_type(target)}")

    for _ in range(fuel):
        out = step(e, on_cast)
        if cast_sites and not failed.get("upcast-only"):
            failed["upcast-only"] = cast_sites[0]
        if "progress" in wanted and isinstance(out, Stuck):
            failed["progress"] = f"stuck at {pretty(e)}: {out.reason}"
        if "determinism" in wanted and not failed["determinism"]:
            failed["determinism"] = _determinism(e, out)
        if not isinstance(out, Stepped):
            break
        for name in (out.rule, *out.detail):
            rules[name] = rules.get(name, 0) + 1
        e = out.next
        if "preservation" in wanted and not failed["preservation"]:
            failed["preservation"] = _preservation(e, a)
    return failed


def _determinism(e: Expr, out) -> str | None:
    succs = step_all(e)
    if isinstance(out, Stepped):
        if not succs or not all(alpha_eq(s, out.next) for s in succs):
            return f"{pretty(e)} has {len(succs)} distinct successor(s)"
        again = step(rename_binders(e))
        if not (isinstance(again, Stepped) and alpha_eq(again.next, out.next)):
            return f"renaming the binders of {pretty(e)} changes its step"
    elif succs:
        return f"{pretty(e)} steps relationally but not functionally"
    return None


def _preservation(e: Expr, a: Type) -> str | None:
    try:
        check_closed(e, a)
    except TypeCheckError as err:
        return f"{pretty(e)} no longer checks against {pretty_type(a)}: {err}"
    try:
        b = infer_closed(e)
    except TypeCheckError:
        return None
    if not iso_subtype(b, a):
        return f"{pretty(e)} synthesizes {pretty_type(b)}, not isomorphic to {pretty_type(a)}"
    return None


def _consistency(term: GeneratedTerm, rng: random.Random, fuel: int, previous: list[Expr]) -> str | None:
    """Casting and wrapping lemmas on the term's final value."""
    final = evaluate(term.expr, fuel)
    if final.verdict != "value":
        return None
    v = final.result
    if not is_prevalue(v):
        return f"final value {pretty(v)} is not a pre-value"
    c = infer_closed(v)
    targets = _supertypes(c, rng)
    casts = []
    for target in targets:
        out = cast(v, target)
        if out is None:
            return f"cannot cast {pretty(v)} : {pretty_type(c)} to {pretty_type(target)}"
        got = infer_closed(out)
        if not iso_subtype(got, target):
            return f"cast of {pretty(v)} to {pretty_type(target)} synthesizes {pretty_type(got)}"
        if ordinary(target) and top_like(EMPTY_DELTA, target) and out != cast(TopVal(), target):
            return f"casting to top-like {pretty_type(target)} depends on the value"
        casts.append(out)
    for i, v1 in enumerate(casts):
        for v2 in casts[i:]:
            if not consistent(v1, v2):
                return f"casts {pretty(v1)} and {pretty(v2)} of one value are inconsistent"
    for target in targets:
        u = wrap(term.expr, target)
        got = infer_closed(u)
        if not iso_subtype(got, target):
            return f"wrapping at {pretty_type(target)} synthesizes {pretty_type(got)}"
    for w in previous:
        if disjoint(EMPTY_DELTA, c, infer_closed(w)) and not consistent(v, w):
            return f"disjoint pre-values {pretty(v)} and {pretty(w)} are inconsistent"
    previous.append(v)
    del previous[:-3]
    return None


def _supertypes(c: Type, rng: random.Random) -> list[Type]:
    """A few supertypes of `c`: itself, its split halves, Top and some small random candidates."""
    out = [c, TOP]
    stack = [c]
    while stack:
        halves = split(stack.pop())
        if halves:
            out.extend(halves)
            stack.extend(halves)
    small = enum_types(1, (INT, BOOL, STRING)).members
    out += [t for t in rng.sample(small, 12) if subtype(EMPTY_DELTA, c, t)]
    return list(dict.fromkeys(out))


def run_term_suites(names: Iterable[str], cfg: GenConfig) -> SuiteReport:
    """Run the named term suites over one shared stream of generated terms."""
    wanted = set(names)
    unknown = wanted - set(TERM_SUITES)
    if unknown:
        raise ValueError(f"unknown term suite(s): {', '.join(sorted(unknown))}")
    report = SuiteReport()
    previous: list[Expr] = []
    for term in gen_well_typed(cfg, report.stats):
        shown = pretty(term.expr)
        failed = _step_checks(term, wanted - {"consistency"}, cfg.fuel, report.rules)
        if "consistency" in wanted:
            try:
                failed["consistency"] = _consistency(term, random.Random(term.seed), cfg.fuel, previous)
            except TypeCheckError as err:
                failed["consistency"] = f"ill-typed cast result: {err}"
        for suite in sorted(wanted):
            msg = failed.get(suite)
            report.cases.append(CaseResult(term.seed, suite, msg is None, shown, msg or ""))
    return report


def run_suite(name: str, cfg: GenConfig = GenConfig()) -> SuiteReport:
    if name in TERM_SUITES:
        return run_term_suites([name], cfg)
    if name == "disjoint-soundness":
        return _run_disjoint_soundness(cfg)
    if name == "split-equivalence":
        return _run_split_equivalence(cfg)
    raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")


def _run_disjoint_soundness(cfg: GenConfig) -> SuiteReport:
    universe = enum_types(cfg.universe_depth)
    witnesses = witness_types(cfg.universe_depth + 1, universe.bases, universe.label)
    report = SuiteReport()

    def on_row(i: int, a: Type, bad: list) -> None:
        msg = "; ".join(f"{pretty_type(x)} * {pretty_type(y)} share {pretty_type(w)}" for x, y, w in bad)
        report.cases.append(CaseResult(i, "disjoint-soundness", not bad, pretty_type(a), msg))

    disjoint_soundness(universe.level(cfg.universe_depth), witnesses, on_row)
    return report


def _run_split_equivalence(cfg: GenConfig) -> SuiteReport:
    report = SuiteReport()
    for i, a in enumerate(splittable_types(enum_types(cfg.universe_depth))):
        report.cases.append(CaseResult(i, "split-equivalence", split_equivalence_holds(a), pretty_type(a)))
    return report
