from __future__ import annotations

import itertools

import pytest

import fiplus.testgen as tg
from fiplus.disjointness import disjoint
from fiplus.evaluator import Stepped, evaluate, step
from fiplus.subtyping import ordinary, subtype, top_like
from fiplus.syntax import (
    BOOL, BOT, EMPTY_DELTA, EMPTY_GAMMA, INT, STRING, TOP, Anno, App, Arrow, Expr, Fix, Inter, LitInt, Merge,
    Proj, Rcd, RcdE, TApp, TLam, Lam, alpha_eq, bound_names,
)
from fiplus.testgen import (
    SUITES, GenConfig, GenStats, TypeUniverse, enum_types, gen_well_typed, height,
    oracle_disjoint_spec, reflexivity_failures, rename_binders, run_suite, run_term_suites,
    split_equivalence_holds, splittable_types, subtype_chains, supertype_mask,
    transitivity_failures, witness_types,
)
from fiplus.typecheck import TypeCheckError, infer_closed, merge_rule

E = EMPTY_DELTA


def subterms(e: Expr):
    yield e
    match e:
        case Lam(_, _, b) | Fix(_, _, b) | TLam(_, b) | RcdE(_, b) | Anno(b, _) | TApp(b, _) | Proj(b, _):
            yield from subterms(b)
        case Merge(l, r) | App(l, r):
            yield from subterms(l)
            yield from subterms(r)


# ------------------------------------------------------------ universes


def test_depth_zero_universe():
    assert set(enum_types(0)) == {INT, BOOL, TOP, BOT}


def test_depth_one_universe_contains_each_constructor():
    u1 = set(enum_types(1))
    assert {Inter(INT, BOOL), Arrow(INT, TOP), Rcd("l", INT)} <= u1


def test_universe_sizes():
    assert [len(enum_types(d)) for d in range(4)] == [4, 40, 3244, 21_050_320]
    assert len(enum_types(2).members) == 3244 == len(set(enum_types(2)))


def test_universe_levels_are_nested():
    u = enum_types(2)
    assert set(u.level(1)) <= set(u)
    assert set(u.level(0)) == set(u.atoms)


def test_universe_with_quantifiers():
    u = enum_types(1, include_vars=True)
    assert len(u) == len(u.members) == 60
    assert all(not tg.free_tvars(a) for a in u)


def test_depth_is_limited():
    with pytest.raises(ValueError):
        enum_types(4)


def test_universe_streams_without_materializing():
    u = TypeUniverse(3)
    first = list(itertools.islice(u, 5))
    assert first == list(u.atoms) + [Inter(INT, INT)]


# ----------------------------------------------------------- type oracles


def test_oracle_examples():
    u = enum_types(2, bases=(INT, BOOL, STRING))
    assert oracle_disjoint_spec(INT, BOOL, u)
    assert not oracle_disjoint_spec(Inter(INT, BOOL), Inter(INT, STRING), u)
    assert oracle_disjoint_spec(TOP, Inter(INT, BOOL), u)


def test_witnesses():
    ws = witness_types(3)
    assert len(ws) == 45 and len(set(ws)) == 45
    assert all(ordinary(w) and not top_like(E, w) for w in ws)
    assert Arrow(BOT, Rcd("l", INT)) in ws


def test_supertype_mask():
    ws = (INT, BOOL, Arrow(BOT, INT))
    assert supertype_mask(Inter(INT, Arrow(BOOL, INT)), ws) == 0b101


def test_soundness_check_passes_on_depth_one():
    report = tg.disjoint_soundness(list(enum_types(1)), witness_types(2))
    assert report.pairs == 40 * 41 // 2
    assert report.violations == [] and report.incomplete == 0


def test_soundness_check_catches_an_unsound_disjointness(monkeypatch):
    monkeypatch.setattr(tg, "disjoint", lambda delta, a, b: True)
    report = tg.disjoint_soundness(list(enum_types(1)), witness_types(2))
    assert (INT, INT, INT) in report.violations


def test_algebra_helpers():
    u1 = list(enum_types(1))
    assert reflexivity_failures(u1) == []
    assert all(split_equivalence_holds(a) for a in splittable_types(enum_types(2)))
    chains = subtype_chains(u1, 200, seed=3)
    assert len(chains) == 200
    assert all(subtype(E, a, b) and subtype(E, b, c) for a, b, c in chains)
    assert transitivity_failures(chains) == []


def test_transitivity_check_catches_a_broken_relation(monkeypatch):
    monkeypatch.setattr(tg, "subtype", lambda delta, a, b: a == b or (a, b) != (INT, TOP))
    assert transitivity_failures([(INT, BOOL, TOP)]) == [(INT, BOOL, TOP)]


# --------------------------------------------------------------- generator


@pytest.fixture(scope="module")
def corpus():
    stats = GenStats()
    terms = list(gen_well_typed(GenConfig(seed=0, term_count=300), stats))
    return terms, stats


def test_generation_is_seed_deterministic(corpus):
    terms, _ = corpus
    again = list(gen_well_typed(GenConfig(seed=0, term_count=20)))
    assert [g.expr for g in again] == [g.expr for g in terms[:20]]
    shifted = list(gen_well_typed(GenConfig(seed=7, term_count=1)))
    assert shifted[0] == terms[7]


def test_generated_terms_are_closed_and_well_typed(corpus):
    terms, stats = corpus
    assert stats.ill_typed == 0 and stats.emitted == len(terms) == 300
    for g in terms:
        assert infer_closed(g.expr) == g.type
        assert not tg.free_vars(g.expr)


def test_generated_terms_respect_the_height_limit(corpus):
    terms, _ = corpus
    assert max(height(g.expr) for g in terms) <= 5


def test_generated_terms_terminate(corpus):
    terms, _ = corpus
    assert all(evaluate(g.expr, 10_000).verdict == "value" for g in terms)


def test_generator_contract(corpus):
    terms, _ = corpus
    subs = [s for g in terms for s in subterms(g.expr)]
    typed = []
    for s in subs:
        if isinstance(s, Merge) and not tg.free_vars(s) and not tg.free_tvars_expr(s):
            try:
                typed.append((infer_closed(s.left), infer_closed(s.right)))
            except TypeCheckError:
                pass
    assert any(disjoint(E, a, b) for a, b in typed)
    assert any(isinstance(s, Anno) and not ordinary(s.ty) for s in subs)
    assert any(isinstance(g.expr, Fix) or any(isinstance(s, Fix) for s in subterms(g.expr)) for g in terms)


def test_runs_exercise_the_main_rules():
    report = run_term_suites(["progress"], GenConfig(seed=0, term_count=300))
    for rule in ("Step-fix", "Step-annov", "Step-papp", "Step-ptapp", "Step-pproj", "Step-merge",
                 "Cast-and", "Cast-anno", "Cast-top", "Cast-mergel", "Cast-merger",
                 "PApp-abs", "PApp-tabs", "PApp-proj", "EW-anno", "EW-top"):
        assert report.rules.get(rule, 0) > 0, rule


def test_rename_binders_gives_fresh_names(corpus):
    terms, _ = corpus
    for g in terms[:100]:
        r = rename_binders(g.expr)
        assert alpha_eq(r, g.expr)
        assert not (bound_names(r) & bound_names(g.expr))


# ------------------------------------------------------------------ suites


def test_term_suites_pass_on_a_small_run():
    report = run_term_suites(tg.TERM_SUITES, GenConfig(seed=100, term_count=60))
    assert report.ok, [c.message for c in report.failures()]
    assert len(report.cases) == 60 * len(tg.TERM_SUITES)


def test_report_lines():
    report = run_suite("progress", GenConfig(seed=4, term_count=3))
    lines = report.lines()
    assert len(lines) == 3
    assert lines[0].startswith("SEED 4 PASS progress ")


def test_preservation_suite_catches_a_broken_step(monkeypatch):
    def bad_step(e, on_cast=None):
        out = step(e, on_cast)
        if isinstance(out, Stepped) and out.rule == "Step-annov":
            return Stepped(LitInt(0), out.rule, out.detail)
        return out
    monkeypatch.setattr(tg, "step", bad_step)
    report = run_suite("preservation", GenConfig(seed=0, term_count=40))
    assert report.failures("preservation")


def test_determinism_suite_catches_a_name_sensitive_step(monkeypatch):
    def bad_step(e, on_cast=None):
        out = step(e, on_cast)
        if isinstance(out, Stepped) and any(n.endswith("_") for n in bound_names(e)):
            return Stepped(LitInt(0), out.rule, out.detail)
        return out
    monkeypatch.setattr(tg, "step", bad_step)
    report = run_suite("determinism", GenConfig(seed=0, term_count=40))
    assert report.failures("determinism")


def test_universe_suites_on_depth_one():
    for name in ("disjoint-soundness", "split-equivalence"):
        report = run_suite(name, GenConfig(universe_depth=1))
        assert report.ok
    assert len(run_suite("disjoint-soundness", GenConfig(universe_depth=1)).cases) == 40


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nonsense")
    assert "determinism" in SUITES and "disjoint-soundness" in SUITES


def _needs_consistency(m: Expr) -> bool:
    try:
        return merge_rule(E, EMPTY_GAMMA, m) == "Typ-mergev"
    except TypeCheckError:
        return False


def test_reductions_reach_merges_only_consistency_accepts(corpus):
    reached = 0
    for g in corpus[0]:
        e = g.expr
        for _ in range(200):
            closed = (s for s in subterms(e) if isinstance(s, Merge) and not tg.free_vars(s)
                      and not tg.free_tvars_expr(s))
            if any(_needs_consistency(s) for s in closed):
                reached += 1
                break
            out = step(e)
            if not isinstance(out, Stepped):
                break
            e = out.next
    assert reached > 0
