"""Lexer and recursive-descent parser for the `.fip` surface syntax.

    types   A ::= A -> A | A & A | forall X * A. A | forall X. A
                | Int | Bool | String | Top | Bot | X | {l : A; ...} | (A)
    exprs   e ::= e ,, e | e : A | e e | e @A | e.l
                | \\x : A. e | /\\X. e | /\\X * A. e : B | fix x : A. e
                | {l = e; ...} | x | 42 | true | false | "s" | () | (e)
    program   ::= (let x : A = e;)* e

`->` is right-associative, `&` left-associative and tighter than `->`.
`,,` is the loosest expression operator, then `:`, then application,
then projection. Binder forms extend as far right as possible.
`--` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .syntax import (
    App, Anno, Arrow, Base, Bot, Expr, Fix, Forall, Inter, Lam, LitBool,
    LitInt, LitStr, Merge, Proj, Rcd, RcdE, Span, TApp, TLam, Top, TopVal,
    TVar, Type, Var, subst_expr,
)


@dataclass(frozen=True)
class SourceFile:
    path: str
    contents: str


class ParseError(Exception):
    def __init__(self, message: str, span: Span, expected: set[str] | None = None,
                 found: str = "", path: str = "<input>"):
        super().__init__(message)
        self.message = message
        self.span = span
        self.expected = expected or set()
        self.found = found
        self.path = path

    def __str__(self) -> str:
        return f"{self.path}:{self.span.line}:{self.span.col}: {self.message}"


@dataclass(frozen=True)
class Token:
    kind: str  # punctuation text itself, or INT / STRING / IDENT / KW / EOF
    text: str
    span: Span
    value: object = field(default=None, compare=False)

    def describe(self) -> str:
        if self.kind == "EOF":
            return "end of input"
        return repr(self.text)


KEYWORDS = {"Int", "Bool", "String", "Top", "Bot", "forall", "fix", "true", "false", "let"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|--[^\n]*)
  | (?P<int>-?[0-9]+)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>,,|->|/\\|\\|[:;.@&*=(){}]|[λΛ∀→])
""", re.VERBOSE)

_UNICODE = {"λ": "\\", "Λ": "/\\", "∀": "forall", "→": "->"}
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


def tokenize(text: str, path: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        span = Span(line, pos - line_start + 1)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", span, found=text[pos], path=path)
        kind = m.lastgroup
        s = m.group()
        if kind == "ws":
            nl = s.count("\n")
            if nl:
                line += nl
                line_start = pos + s.rindex("\n") + 1
        elif kind == "int":
            tokens.append(Token("INT", s, span, int(s)))
        elif kind == "str":
            tokens.append(Token("STRING", s, span, _unescape(s[1:-1])))
        elif kind == "ident":
            tokens.append(Token("KW" if s in KEYWORDS else "IDENT", s, span))
        else:
            s = _UNICODE.get(s, s)
            tokens.append(Token("KW" if s == "forall" else s, s, span))
        pos = m.end()
    tokens.append(Token("EOF", "", Span(line, pos - line_start + 1)))
    return tokens


class Parser:
    def __init__(self, text: str, path: str = "<input>"):
        self.path = path
        self.toks = tokenize(text, path)
        self.i = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def at_kw(self, word: str) -> bool:
        return self.at("KW", word)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def error(self, expected: set[str] | str) -> ParseError:
        if isinstance(expected, str):
            expected = {expected}
        t = self.tok
        want = " or ".join(sorted(expected))
        return ParseError(f"expected {want}, found {t.describe()}", t.span, expected,
                          t.describe(), self.path)

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        if not self.at(kind, text):
            raise self.error(what or repr(text or kind))
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        return self.expect("IDENT", what=what)

    def end(self) -> None:
        if not self.at("EOF"):
            raise self.error("end of input")

    # -- types

    def type_(self) -> Type:
        left = self.inter_type()
        if self.at("->"):
            self.advance()
            return Arrow(left, self.type_())
        return left

    def inter_type(self) -> Type:
        left = self.atom_type()
        while self.at("&"):
            self.advance()
            left = Inter(left, self.atom_type())
        return left

    def atom_type(self) -> Type:
        t = self.tok
        if t.kind == "KW":
            match t.text:
                case "Int" | "Bool" | "String":
                    self.advance()
                    return Base(t.text)
                case "Top":
                    self.advance()
                    return Top()
                case "Bot":
                    self.advance()
                    return Bot()
                case "forall":
                    self.advance()
                    x = self.ident("type variable").text
                    bound: Type = Top()
                    if self.at("*"):
                        self.advance()
                        bound = self.type_()
                    self.expect(".", ".", "'.'")
                    return Forall(x, bound, self.type_())
        if t.kind == "IDENT":
            self.advance()
            return TVar(t.text)
        if t.kind == "(":
            self.advance()
            a = self.type_()
            self.expect(")", ")", "')'")
            return a
        if t.kind == "{":
            self.advance()
            fields = [self.field_type()]
            while self.at(";"):
                self.advance()
                if self.at("}"):
                    break
                fields.append(self.field_type())
            self.expect("}", "}", "'}'")
            out = fields[0]
            for f in fields[1:]:
                out = Inter(out, f)
            return out
        raise self.error("type")

    def field_type(self) -> Type:
        lab = self.ident("label").text
        self.expect(":", ":", "':'")
        return Rcd(lab, self.type_())

    # -- expressions

    def expr(self) -> Expr:
        left = self.anno_expr()
        while self.at(",,"):
            sp = self.advance().span
            left = Merge(left, self.anno_expr(), span=sp)
        return left

    def anno_expr(self) -> Expr:
        e = self.app_expr()
        while self.at(":"):
            sp = self.advance().span
            e = Anno(e, self.type_(), span=sp)
        return e

    def _starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("INT", "STRING", "IDENT", "(", "{", "\\", "/\\"):
            return True
        return t.kind == "KW" and t.text in ("true", "false", "fix")

    def app_expr(self) -> Expr:
        e = self.postfix_expr()
        while True:
            if self.at("@"):
                sp = self.advance().span
                e = TApp(e, self.atom_type(), span=sp)
            elif self._starts_atom():
                sp = self.tok.span
                binder = self.tok.kind in ("\\", "/\\") or self.at_kw("fix")
                e = App(e, self.postfix_expr(), span=sp)
                if binder:  # a binder argument consumed the rest of the phrase
                    return e
            else:
                return e

    def postfix_expr(self) -> Expr:
        start = self.tok.kind
        e = self.atom_expr()
        if start in ("\\", "/\\") or (start == "KW" and isinstance(e, Fix)):
            return e  # an unparenthesised binder already ran to the end of the phrase
        while self.at("."):
            self.advance()
            t = self.ident("label")
            e = Proj(e, t.text, span=t.span)
        return e

    def atom_expr(self) -> Expr:
        t = self.tok
        sp = t.span
        match t.kind:
            case "INT":
                self.advance()
                return LitInt(t.value, span=sp)
            case "STRING":
                self.advance()
                return LitStr(t.value, span=sp)
            case "IDENT":
                self.advance()
                return Var(t.text, span=sp)
            case "KW" if t.text in ("true", "false"):
                self.advance()
                return LitBool(t.text == "true", span=sp)
            case "KW" if t.text == "fix":
                self.advance()
                x = self.ident("variable").text
                self.expect(":", ":", "':'")
                a = self.type_()
                self.expect(".", ".", "'.'")
                return Fix(x, a, self.expr(), span=sp)
            case "\\":
                self.advance()
                x = self.ident("variable").text
                self.expect(":", ":", "':'")
                a = self.type_()
                self.expect(".", ".", "'.'")
                return Lam(x, a, self.expr(), span=sp)
            case "/\\":
                self.advance()
                x = self.ident("type variable").text
                if self.at("*"):
                    self.advance()
                    bound = self.type_()
                    self.expect(".", ".", "'.'")
                    body = self.expr()
                    if not isinstance(body, Anno):
                        raise ParseError("a bounded type abstraction must end in a result annotation",
                                         sp, {"':'"}, self.tok.describe(), self.path)
                    return Anno(TLam(x, body.body, span=sp), Forall(x, bound, body.ty), span=body.span)
                self.expect(".", ".", "'.'")
                return TLam(x, self.expr(), span=sp)
            case "(":
                self.advance()
                if self.at(")"):
                    self.advance()
                    return TopVal(span=sp)
                e = self.expr()
                self.expect(")", ")", "')'")
                return e
            case "{":
                self.advance()
                fields = [self.field_expr()]
                while self.at(";"):
                    self.advance()
                    if self.at("}"):
                        break
                    fields.append(self.field_expr())
                self.expect("}", "}", "'}'")
                out = fields[0]
                for f in fields[1:]:
                    out = Merge(out, f, span=sp)
                return out
        raise self.error("expression")

    def field_expr(self) -> Expr:
        t = self.ident("label")
        self.expect("=", "=", "'='")
        return RcdE(t.text, self.expr(), span=t.span)

    # -- programs

    def program(self) -> Expr:
        lets: list[tuple[str, Type, Expr]] = []
        while self.at_kw("let"):
            self.advance()
            x = self.ident("variable").text
            self.expect(":", ":", "':'")
            a = self.type_()
            self.expect("=", "=", "'='")
            e = self.expr()
            self.expect(";", ";", "';'")
            lets.append((x, a, e))
        body = self.expr()
        self.end()
        for x, a, e in reversed(lets):
            body = subst_expr(body, x, Anno(e, a, span=e.span))
        return body


def parse_type(text: str, path: str = "<input>") -> Type:
    p = Parser(text, path)
    if p.at("EOF"):
        raise p.error("type")
    a = p.type_()
    p.end()
    return a


def parse_expr(text: str, path: str = "<input>") -> Expr:
    p = Parser(text, path)
    if p.at("EOF"):
        raise p.error("expression")
    e = p.expr()
    p.end()
    return e


def parse_program(src: SourceFile | str) -> Expr:
    if isinstance(src, str):
        src = SourceFile("<input>", src)
    p = Parser(src.contents, src.path)
    if p.at("EOF"):
        raise p.error("expression")
    return p.program()
