"""Acceptance criteria. Each test prints a PASS/FAIL line in the terminal summary.

Run alone with `python3 -m pytest tests/test_acceptance.py -v`; the split
check over every splittable depth-3 type takes several minutes.
"""
from __future__ import annotations

import random
import time

from fiplus.evaluator import cast, evaluate
from fiplus.parser import parse_expr, parse_type
from fiplus.subtyping import app_dist, subtype, type_equiv
from fiplus.syntax import EMPTY_DELTA, EMPTY_GAMMA, INT, Anno, Lam, LitBool, LitInt, Merge, Var, pretty
from fiplus.testgen import (
    GenConfig, disjoint_soundness, enum_types, gen_well_typed, reflexivity_failures,
    run_term_suites, split_equivalence_holds, splittable_types, subtype_chains,
    transitivity_failures, witness_types,
)
from fiplus.typecheck import ErrorKind, TypeCheckError, checking_rule, infer_closed, merge_rule

E = EMPTY_DELTA
P, T = parse_expr, parse_type


def timed(fn, *args):
    start = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - start


def test_criterion_1_golden_application(criterion):
    with criterion(1, "golden application trace") as c:
        e = P("((\\x:Int. x ,, false) : Int&Bool -> Int&Bool) (1,,true)")
        infer_closed(e)
        trace, secs = timed(evaluate, e)
        c.detail = f"{trace.count} steps, {secs * 1000:.2f} ms, result {pretty(trace.result)}"
        assert trace.verdict == "value" and trace.result == P("1 ,, false")
        assert trace.count <= 10
        assert secs < 0.010


def test_criterion_2_golden_split_function(criterion):
    with criterion(2, "golden trace through a split function") as c:
        e = P("(((\\x:Int&Top. x ,, false) : (Int&Top -> Int)&(Int&Top -> Bool)) : Int&Bool -> Int&Bool)"
              " (1,,true)")
        infer_closed(e)
        trace, secs = timed(evaluate, e, 1000, True)
        c.detail = f"{trace.count} steps, {secs * 1000:.2f} ms, result {pretty(trace.result)}"
        assert trace.verdict == "value" and trace.result == P("1 ,, false")
        split_fn = trace.steps[0]
        assert split_fn.rule == "Step-annov" and split_fn.detail[0] == "Cast-and"
        assert isinstance(split_fn.term.fn, Merge)
        wrapped = Merge(Anno(P("1 ,, true"), INT), P("()"))
        applied = [s for s in trace.steps if s.rule == "Step-papp"]
        assert applied and "EW-and" in applied[0].detail
        assert applied[0].term.left.body == Merge(wrapped, LitBool(False))
        assert secs < 0.010


def test_criterion_3_fixpoint_projection(criterion):
    with criterion(3, "fixpoint projection and divergence") as c:
        diverge = evaluate(P("fix x:Int. x"), 1000)
        annotated = evaluate(P("((fix self:{l1:Int}&{l2:Int}. ({l1=1} : {l1:Int}) ,, "
                               "({l2=(self : {l1:Int}).l1} : {l2:Int})) : {l2:Int}).l2"), 1000)
        literal = evaluate(P("(fix self:{l1:Int}&{l2:Int}. {l1=1} ,, {l2=self.l1}).l2"), 1000)
        c.detail = (f"fix x:Int. x: {diverge.verdict}; annotated variant: {annotated.verdict} "
                    f"{pretty(annotated.result)}; literal term: {literal.verdict}"
                    + (f" ({literal.reason})" if literal.reason else ""))
        assert diverge.verdict == "fuel-exhausted"
        assert annotated.verdict == "value" and annotated.result == LitInt(1)
        assert literal.verdict == "value" and literal.result == LitInt(1)


def test_criterion_4_subtyping_checks(criterion):
    with criterion(4, "subtyping checks") as c:
        checks = [
            (lambda: subtype(E, T("(forall X*Int. X) & (forall X*Int. Int)"), T("forall X*Int. X & Int")), True),
            (lambda: subtype(E, T("Int & Bool"), T("Int")), True),
            (lambda: type_equiv(E, T("Top"), T("Top -> Top")), True),
            (lambda: app_dist(T("Top")), None),
        ]
        times = []
        for check, want in checks:
            got, secs = timed(check)
            times.append(secs)
            assert got == want
        c.detail = "slowest " + f"{max(times) * 1000:.3f} ms"
        assert max(times) < 0.001


def test_criterion_5_casting_table(criterion):
    with criterion(5, "casting table"):
        assert cast(P("1 ,, true"), INT) == LitInt(1)
        assert cast(LitInt(1), T("Int & Int")) == Merge(LitInt(1), LitInt(1))
        v = P("(\\x:Int. x) : Int -> Int ,, (\\x:Int. true) : Int -> Bool")
        assert cast(v, T("Int -> Int & Bool")) == Merge(
            Anno(Lam("x", INT, Var("x")), T("Int -> Int")),
            Anno(Lam("x", INT, LitBool(True)), T("Int -> Bool")),
        )


def test_criterion_6_typing(criterion):
    with criterion(6, "typing"):
        try:
            infer_closed(P("1 ,, 2"))
            raise AssertionError("1 ,, 2 was accepted")
        except TypeCheckError as err:
            assert err.kind is ErrorKind.DISJOINTNESS_FAILURE
        dup = P("1 ,, 1")
        assert infer_closed(dup) == T("Int & Int")
        assert merge_rule(E, EMPTY_GAMMA, dup) == "Typ-mergev"
        lam, want = P("\\x:Int. x ,, true"), T("(Int -> Int) & (Int -> Bool)")
        assert checking_rule(E, EMPTY_GAMMA, lam, want) == "Typ-inter"


SUITES = ("determinism", "progress", "preservation", "upcast-only")


def test_criterion_7_property_suites(criterion):
    with criterion(7, "property suites over generated terms") as c:
        cfg = GenConfig(seed=0, max_depth=5, term_count=1000, fuel=10_000)
        report, secs = timed(run_term_suites, SUITES, cfg)
        failures = {s: len(report.failures(s)) for s in SUITES}
        c.detail = (f"{report.stats.emitted} terms, {secs:.1f} s, failures "
                    + ", ".join(f"{s}={n}" for s, n in failures.items()))
        assert report.stats.emitted >= 1000 and report.stats.ill_typed == 0
        assert all(n == 0 for n in failures.values()), [f.message for f in report.failures()[:3]]
        again = [g.expr for g in gen_well_typed(GenConfig(seed=0, term_count=25))]
        seen = sorted({case.seed: case.term for case in report.cases}.items())[:25]
        assert [pretty(e) for e in again] == [term for _, term in seen]
        assert secs < 60


def test_criterion_8_disjointness_soundness(criterion):
    with criterion(8, "disjointness soundness over the depth-2 universe") as c:
        universe = enum_types(2).members
        # A non-top-like depth-3 common supertype exists exactly when an ordinary one with Bot
        # arrow domains does; those are the witnesses.
        witnesses = witness_types(3)
        report, secs = timed(disjoint_soundness, list(universe), witnesses)
        c.detail = (f"{report.pairs} pairs, {report.disjoint_pairs} disjoint, "
                    f"{len(report.violations)} violations, {report.incomplete} incomplete, {secs:.1f} s")
        assert report.violations == []
        assert secs < 120


def test_criterion_9_subtyping_algebra(criterion):
    with criterion(9, "subtyping algebra") as c:
        u2 = list(enum_types(2).members)
        refl = reflexivity_failures(u2)
        rng = random.Random(2024)
        uniform = [(rng.choice(u2), rng.choice(u2), rng.choice(u2)) for _ in range(10_000)]
        chains = subtype_chains(u2, 10_000, seed=2024)
        trans = transitivity_failures(uniform) + transitivity_failures(chains)
        premises = sum(1 for a, b, cc in uniform if subtype(E, a, b) and subtype(E, b, cc))
        start = time.perf_counter()
        splittable = bad = 0
        for a in splittable_types(enum_types(3)):
            splittable += 1
            if not split_equivalence_holds(a):
                bad += 1
        secs = time.perf_counter() - start
        c.detail = (f"reflexivity {len(u2) - len(refl)}/{len(u2)}; transitivity {len(trans)} violations "
                    f"over 10000 uniform triples ({premises} meet the premises) and 10000 chains; "
                    f"split {bad} violations over {splittable} types in {secs:.0f} s")
        assert refl == []
        assert trans == []
        assert bad == 0
