"""Command-line interface: `fiplus check | run | repl | suite`."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import TextIO

from .evaluator import DEFAULT_FUEL, Trace, evaluate
from .parser import ParseError, SourceFile, parse_program
from .syntax import Expr, Type, pretty, pretty_type
from .testgen import SUITES, GenConfig, run_suite
from .typecheck import TypeCheckError, infer_closed

EXIT_OK = 0
EXIT_TYPE_ERROR = 1
EXIT_PARSE_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_FUEL_EXHAUSTED = 4
EXIT_STUCK = 5

FUEL_ENV = "FIPLUS_MAX_STEPS"


@dataclass(frozen=True)
class CliConfig:
    command: str
    path: str | None = None
    max_steps: int = DEFAULT_FUEL
    trace: bool = False
    json: bool = False
    seed: int | None = None


class _Failure(Exception):
    def __init__(self, code: int, message: str, detail: dict | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.detail = detail or {}


def default_fuel() -> int:
    raw = os.environ.get(FUEL_ENV)
    if raw is None:
        return DEFAULT_FUEL
    try:
        fuel = int(raw)
    except ValueError:
        raise _Failure(EXIT_IO_ERROR, f"{FUEL_ENV} must be a positive integer, got {raw!r}")
    if fuel <= 0:
        raise _Failure(EXIT_IO_ERROR, f"{FUEL_ENV} must be a positive integer, got {raw!r}")
    return fuel


# ----------------------------------------------------------- front end


def _read(path: str) -> SourceFile:
    try:
        with open(path, encoding="utf-8") as f:
            return SourceFile(path, f.read())
    except (OSError, UnicodeDecodeError) as err:
        raise _Failure(EXIT_IO_ERROR, f"{path}: cannot read file: {err}", {"kind": "IOError"})


def _parse(src: SourceFile) -> Expr:
    try:
        return parse_program(src)
    except ParseError as err:
        raise _Failure(EXIT_PARSE_ERROR, str(err),
                       {"kind": "ParseError", "line": err.span.line, "col": err.span.col})


def _type_error(path: str, err: TypeCheckError) -> _Failure:
    where = f"{path}:{err.span.line}:{err.span.col}" if err.span else path
    detail = {"kind": err.kind.value, "rule": err.rule, "message": err.message}
    if err.span:
        detail.update(line=err.span.line, col=err.span.col)
    if err.expected is not None:
        detail["expected"] = pretty_type(err.expected)
    if err.actual is not None:
        detail["actual"] = pretty_type(err.actual)
    return _Failure(EXIT_TYPE_ERROR, f"{where}: {err}", detail)


def _typecheck(path: str, e: Expr) -> Type:
    try:
        return infer_closed(e)
    except TypeCheckError as err:
        raise _type_error(path, err)


def _evaluate(e: Expr, fuel: int, record: bool) -> Trace:
    try:
        return evaluate(e, fuel, record=record)
    except RecursionError:
        raise _Failure(EXIT_FUEL_EXHAUSTED, "FUEL-EXHAUSTED: the term grew deeper than the interpreter can follow",
                       {"kind": "FuelExhausted"})


# ------------------------------------------------------------ commands


def check_file(path: str, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    try:
        t = _typecheck(path, _parse(_read(path)))
    except _Failure as f:
        print(f.message, file=err)
        return f.code
    print(pretty_type(t), file=out)
    return EXIT_OK


def run_file(cfg: CliConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    assert cfg.path is not None
    out, err = out or sys.stdout, err or sys.stderr
    doc: dict = {"file": cfg.path}
    try:
        e = _parse(_read(cfg.path))
        t = _typecheck(cfg.path, e)
        doc["type"] = pretty_type(t)
        trace = _evaluate(e, cfg.max_steps, record=cfg.trace)
    except _Failure as f:
        if cfg.json:
            doc["error"] = {"message": f.message, **f.detail}
            print(json.dumps(doc, indent=2), file=out)
        else:
            print(f.message, file=err)
        return f.code

    code = {"value": EXIT_OK, "fuel-exhausted": EXIT_FUEL_EXHAUSTED, "stuck": EXIT_STUCK}[trace.verdict]
    if cfg.json:
        doc["trace"] = trace.to_json()
        print(json.dumps(doc, indent=2), file=out)
        return code
    if cfg.trace:
        for line in trace.text_lines():
            print(line, file=out)
    if trace.verdict == "value":
        print(pretty(trace.result), file=out)
    elif trace.verdict == "fuel-exhausted":
        print("FUEL-EXHAUSTED", file=out)
        print(f"{cfg.path}: {trace.reason}", file=err)
    else:
        print("STUCK", file=out)
        print(f"{cfg.path}: {trace.reason}", file=err)
    return code


def repl(inp: TextIO | None = None, out: TextIO | None = None, err: TextIO | None = None,
         fuel: int = DEFAULT_FUEL) -> int:
    inp, out, err = inp or sys.stdin, out or sys.stdout, err or sys.stderr
    interactive = inp.isatty()
    n = 0
    while True:
        if interactive:
            print("fiplus> ", end="", file=out, flush=True)
        line = inp.readline()
        if not line:
            return EXIT_OK
        n += 1
        text = line.strip()
        if not text:
            continue
        if text in (":q", ":quit"):
            return EXIT_OK
        where = f"<repl:{n}>"
        try:
            if text.startswith(":t"):
                e = _parse(SourceFile(where, text[2:]))
                print(pretty_type(_typecheck(where, e)), file=out)
                continue
            if text.startswith(":"):
                print(f"{where}: unknown command {text.split()[0]} (use :t <expr> or :q)", file=err)
                continue
            e = _parse(SourceFile(where, text))
            _typecheck(where, e)
            trace = _evaluate(e, fuel, record=False)
        except _Failure as f:
            print(f.message, file=err)
            continue
        if trace.verdict == "value":
            print(pretty(trace.result), file=out)
        elif trace.verdict == "fuel-exhausted":
            print("FUEL-EXHAUSTED", file=out)
        else:
            print(f"STUCK: {trace.reason}", file=out)


def suite(name: str, cfg: GenConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    report = run_suite(name, cfg)
    for line in report.lines():
        print(line, file=out)
    failures = report.failures()
    for case in failures:
        print(f"seed {case.seed}: {case.message}", file=err)
    print(f"{name}: {len(report.cases) - len(failures)} passed, {len(failures)} failed", file=err)
    return EXIT_OK if not failures else 1


# ---------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fiplus", description="Type checker and interpreter for a calculus "
                                "with disjoint intersection types, merges and disjoint polymorphism.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="type-check a file and print its type")
    c.add_argument("path")

    r = sub.add_parser("run", help="type-check, then evaluate a file")
    r.add_argument("path")
    r.add_argument("--trace", action="store_true", help="print every step with its rule")
    r.add_argument("--max-steps", type=int, default=None, metavar="N",
                   help=f"step budget (default ${FUEL_ENV} or {DEFAULT_FUEL})")
    r.add_argument("--json", action="store_true", help="print one JSON document")

    sub.add_parser("repl", help="interactive loop (:t <expr> shows a type, :q quits)")

    s = sub.add_parser("suite", help="run a property suite and print one line per case")
    s.add_argument("name", choices=SUITES)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=GenConfig.term_count, help="generated terms")
    s.add_argument("--max-depth", type=int, default=GenConfig.max_depth, help="generated term height")
    s.add_argument("--fuel", type=int, default=GenConfig.fuel, help="step budget per term")
    s.add_argument("--depth", type=int, default=GenConfig.universe_depth,
                   help="type-universe depth for the type suites")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        match args.command:
            case "check":
                return check_file(args.path)
            case "run":
                steps = args.max_steps if args.max_steps is not None else default_fuel()
                if steps <= 0:
                    print("--max-steps must be positive", file=sys.stderr)
                    return EXIT_IO_ERROR
                return run_file(CliConfig("run", args.path, steps, args.trace, args.json))
            case "repl":
                return repl(fuel=default_fuel())
            case "suite":
                cfg = GenConfig(args.seed, args.max_depth, args.count, args.fuel, args.depth)
                return suite(args.name, cfg)
    except _Failure as f:
        print(f.message, file=sys.stderr)
        return f.code
    except KeyboardInterrupt:
        return 130
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
