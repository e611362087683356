"""Concrete syntax: parser and printer for types, terms, contexts and
`.fmlc` corpus files.

ASCII-only: `[]` for box, `<>` for dia, `#` for a lock. `--` starts a
line comment. Declaration forms:

    mode ik_dia
    def  name [ ctx |- term : type ]     (the `: type` part is optional)
    goal name [ ctx |- t1 == t2 : type ]
    model name { kind = chain(1); A = sizes [1,2] trans [[0]]; }
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    Abort, App, Base, Box, Case, Ctx, Dia, DiaIntro, Empty, Fun, Inl, Inr,
    Lam, LetDia, Lock, Mode, Open, Pair, Prod, Proj1, Proj2, Shut, Sum, Term,
    Ty, Unit, UnitIntro, Var, VarBind, mode_named,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = expected
        loc = f"{line}:{col}"
        exp = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"parse error at {loc}: {message}{exp}")


# ---------------------------------------------------------------------------
# Lexer

KEYWORDS = {
    "shut", "open", "dia", "fst", "snd", "inl", "inr", "abort",
    "case", "of", "let", "in", "def", "goal", "model", "mode",
    "sizes", "trans", "kind",
}

_PUNCT = ["|-", "->", "==", "[]", "<>", "(", ")", "[", "]", "{", "}",
          "\\", ".", ":", ",", ";", "*", "+", "|", "=", "#"]


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "keyword" | "number" | punctuation itself | "eof"
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] in "_'"):
                j += 1
            text = src[i:j]
            kind = "keyword" if text in KEYWORDS else "ident"
            toks.append(Token(kind, text, line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("number", src[i:j], line, col))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if src.startswith(p, i):
                toks.append(Token(p, p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"got {tok.text or 'end of input'!r}", tok.line, tok.col,
                             expected=(what or kind,))
        return self.next()

    def fail(self, *expected: str):
        tok = self.peek()
        raise ParseError(f"got {tok.text or 'end of input'!r}", tok.line, tok.col,
                         expected=expected)

    # -- types ------------------------------------------------------------

    def type_(self) -> Ty:
        left = self.type_sum()
        if self.peek().kind == "->":
            self.next()
            return Fun(left, self.type_())  # right-associative
        return left

    def type_sum(self) -> Ty:
        left = self.type_prefix()
        while self.peek().kind in ("*", "+"):
            op = self.next().kind
            right = self.type_prefix()
            left = Prod(left, right) if op == "*" else Sum(left, right)
        return left

    def type_prefix(self) -> Ty:
        tok = self.peek()
        if tok.kind == "[]":
            self.next()
            return Box(self.type_prefix())
        if tok.kind == "<>":
            self.next()
            return Dia(self.type_prefix())
        return self.type_atom()

    def type_atom(self) -> Ty:
        tok = self.peek()
        if tok.kind == "number" and tok.text == "1":
            self.next()
            return Unit()
        if tok.kind == "number" and tok.text == "0":
            self.next()
            return Empty()
        if tok.kind == "ident":
            self.next()
            return Base(tok.text)
        if tok.kind == "(":
            self.next()
            ty = self.type_()
            self.expect(")")
            return ty
        self.fail("type")

    # -- terms ------------------------------------------------------------

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "\\":
            self.next()
            name = self.expect("ident").text
            self.expect(":")
            ty = self.type_()
            self.expect(".")
            return Lam(name, ty, self.term())
        if tok.kind == "keyword" and tok.text == "let":
            self.next()
            kw = self.expect("keyword", "dia")
            if kw.text != "dia":
                raise ParseError(f"got {kw.text!r}", kw.line, kw.col, expected=("dia",))
            name = self.expect("ident").text
            self.expect(":")
            ty = self.type_()
            self.expect("=")
            scrut = self.term()
            in_tok = self.expect("keyword", "in")
            if in_tok.text != "in":
                raise ParseError(f"got {in_tok.text!r}", in_tok.line, in_tok.col, expected=("in",))
            return LetDia(name, ty, scrut, self.term())
        if tok.kind == "keyword" and tok.text == "case":
            self.next()
            scrut = self.application()
            of_tok = self.expect("keyword", "of")
            if of_tok.text != "of":
                raise ParseError(f"got {of_tok.text!r}", of_tok.line, of_tok.col, expected=("of",))
            kw = self.expect("keyword", "inl")
            if kw.text != "inl":
                raise ParseError(f"got {kw.text!r}", kw.line, kw.col, expected=("inl",))
            lx = self.expect("ident").text
            self.expect("->")
            lbody = self.term()
            self.expect("|")
            kw = self.expect("keyword", "inr")
            if kw.text != "inr":
                raise ParseError(f"got {kw.text!r}", kw.line, kw.col, expected=("inr",))
            rx = self.expect("ident").text
            self.expect("->")
            rbody = self.term()
            return Case(scrut, lx, lbody, rx, rbody)
        return self.application()

    def application(self) -> Term:
        t = self.prefixed()
        while self._starts_prefixed():
            t = App(t, self.prefixed())
        return t

    def _starts_prefixed(self) -> bool:
        tok = self.peek()
        if tok.kind in ("ident", "("):
            return True
        return tok.kind == "keyword" and tok.text in (
            "shut", "open", "dia", "fst", "snd", "inl", "inr", "abort")

    def prefixed(self) -> Term:
        tok = self.peek()
        if tok.kind == "keyword":
            if tok.text == "shut":
                self.next()
                return Shut(self.prefixed())
            if tok.text == "open":
                self.next()
                return Open(self.prefixed())
            if tok.text == "dia":
                self.next()
                return DiaIntro(self.prefixed())
            if tok.text == "fst":
                self.next()
                return Proj1(self.prefixed())
            if tok.text == "snd":
                self.next()
                return Proj2(self.prefixed())
            if tok.text in ("inl", "inr", "abort"):
                self.next()
                self.expect("[")
                ty = self.type_()
                self.expect("]")
                body = self.prefixed()
                if tok.text == "inl":
                    return Inl(ty, body)
                if tok.text == "inr":
                    return Inr(ty, body)
                return Abort(ty, body)
        return self.atom()

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "ident":
            self.next()
            return Var(tok.text)
        if tok.kind == "(":
            self.next()
            if self.peek().kind == ")":
                self.next()
                return UnitIntro()
            t = self.term()
            if self.peek().kind == ",":
                self.next()
                u = self.term()
                self.expect(")")
                return Pair(t, u)
            self.expect(")")
            return t
        self.fail("term")

    # -- contexts ---------------------------------------------------------

    def ctx(self, terminators: tuple[str, ...] = ("eof",)) -> Ctx:
        entries: list = []
        if self.peek().kind in terminators:
            return Ctx(())
        while True:
            tok = self.peek()
            if tok.kind == "#":
                self.next()
                entries.append(Lock())
            elif tok.kind == "ident":
                self.next()
                self.expect(":")
                entries.append(VarBind(tok.text, self.type_()))
            else:
                self.fail("context entry (`x : T` or `#`)")
            if self.peek().kind == ",":
                self.next()
                continue
            break
        try:
            return Ctx(tuple(entries))
        except ValueError as exc:
            raise ParseError(str(exc), tok.line, tok.col) from None


def parse_term(src: str) -> Term:
    p = _Parser(tokenize(src))
    t = p.term()
    p.expect("eof", "end of input")
    return t


def parse_type(src: str) -> Ty:
    p = _Parser(tokenize(src))
    t = p.type_()
    p.expect("eof", "end of input")
    return t


def parse_ctx(src: str) -> Ctx:
    p = _Parser(tokenize(src))
    c = p.ctx()
    p.expect("eof", "end of input")
    return c


# ---------------------------------------------------------------------------
# Source files

@dataclass(frozen=True)
class DefDecl:
    name: str
    ctx: Ctx
    term: Term
    expected_ty: Ty | None


@dataclass(frozen=True)
class GoalDecl:
    name: str
    ctx: Ctx
    lhs: Term
    rhs: Term
    ty: Ty


@dataclass(frozen=True)
class BaseInterp:
    sizes: tuple[int, ...]
    tables: tuple[tuple[int, ...], ...]  # tables[k] maps stage k to stage k+1


@dataclass(frozen=True)
class ModelDecl:
    name: str
    kind: str  # "identity" | "chain" | "constant_comonad"
    stages: int  # the N in chain(N) / constant_comonad(N); 0 for identity
    bases: dict[str, BaseInterp] = field(default_factory=dict)


@dataclass(frozen=True)
class SourceFile:
    mode: Mode | None
    defs: dict[str, DefDecl]
    goals: dict[str, GoalDecl]
    models: dict[str, ModelDecl]


def parse_file(src: str) -> SourceFile:
    p = _Parser(tokenize(src))
    mode: Mode | None = None
    defs: dict[str, DefDecl] = {}
    goals: dict[str, GoalDecl] = {}
    models: dict[str, ModelDecl] = {}

    def check_unique(name: str, tok: Token):
        if name in defs or name in goals or name in models:
            raise ParseError(f"duplicate declaration {name!r}", tok.line, tok.col)

    while p.peek().kind != "eof":
        tok = p.peek()
        if tok.kind != "keyword":
            p.fail("def", "goal", "model", "mode")
        if tok.text == "mode":
            p.next()
            name_tok = p.expect("ident")
            try:
                mode = mode_named(name_tok.text)
            except ValueError as exc:
                raise ParseError(str(exc), name_tok.line, name_tok.col) from None
        elif tok.text == "def":
            p.next()
            name_tok = p.expect("ident")
            check_unique(name_tok.text, name_tok)
            p.expect("[")
            ctx = p.ctx(terminators=("|-",))
            p.expect("|-")
            term = p.term()
            expected = None
            if p.peek().kind == ":":
                p.next()
                expected = p.type_()
            p.expect("]")
            defs[name_tok.text] = DefDecl(name_tok.text, ctx, term, expected)
        elif tok.text == "goal":
            p.next()
            name_tok = p.expect("ident")
            check_unique(name_tok.text, name_tok)
            p.expect("[")
            ctx = p.ctx(terminators=("|-",))
            p.expect("|-")
            lhs = p.term()
            p.expect("==")
            rhs = p.term()
            p.expect(":")
            ty = p.type_()
            p.expect("]")
            goals[name_tok.text] = GoalDecl(name_tok.text, ctx, lhs, rhs, ty)
        elif tok.text == "model":
            p.next()
            name_tok = p.expect("ident")
            check_unique(name_tok.text, name_tok)
            models[name_tok.text] = _parse_model(p, name_tok.text)
        else:
            p.fail("def", "goal", "model", "mode")
    return SourceFile(mode, defs, goals, models)


def _parse_model(p: _Parser, name: str) -> ModelDecl:
    p.expect("{")
    kind, stages = "identity", 0
    bases: dict[str, BaseInterp] = {}
    while p.peek().kind != "}":
        tok = p.peek()
        if tok.kind == "keyword" and tok.text == "kind":
            p.next()
            p.expect("=")
            kind_tok = p.next()
            if kind_tok.text == "identity":
                kind, stages = "identity", 0
            elif kind_tok.text in ("chain", "constant_comonad", "constant"):
                kind = "chain" if kind_tok.text == "chain" else "constant_comonad"
                p.expect("(")
                stages = int(p.expect("number").text)
                p.expect(")")
            else:
                raise ParseError(f"unknown model kind {kind_tok.text!r}",
                                 kind_tok.line, kind_tok.col,
                                 expected=("identity", "chain(N)", "constant_comonad(N)"))
        elif tok.kind == "ident":
            p.next()
            p.expect("=")
            kw = p.expect("keyword", "sizes")
            if kw.text != "sizes":
                raise ParseError(f"got {kw.text!r}", kw.line, kw.col, expected=("sizes",))
            sizes = tuple(_int_list(p))
            tables: tuple[tuple[int, ...], ...] = ()
            if p.peek().kind == "keyword" and p.peek().text == "trans":
                p.next()
                p.expect("[")
                rows = []
                while p.peek().kind != "]":
                    rows.append(tuple(_int_list(p)))
                    if p.peek().kind == ",":
                        p.next()
                p.expect("]")
                tables = tuple(rows)
            _validate_base(name, tok, sizes, tables, stages)
            bases[tok.text] = BaseInterp(sizes, tables)
        else:
            p.fail("kind", "base-type interpretation")
        if p.peek().kind == ";":
            p.next()
    p.expect("}")
    return ModelDecl(name, kind, stages, bases)


def _int_list(p: _Parser) -> list[int]:
    p.expect("[")
    out = []
    while p.peek().kind != "]":
        out.append(int(p.expect("number").text))
        if p.peek().kind == ",":
            p.next()
    p.expect("]")
    return out


def _validate_base(model: str, tok: Token, sizes, tables, stages: int):
    if len(sizes) != stages + 1:
        raise ParseError(
            f"model {model!r}: {tok.text} needs {stages + 1} stage sizes, got {len(sizes)}",
            tok.line, tok.col)
    if len(tables) != stages:
        raise ParseError(
            f"model {model!r}: {tok.text} needs {stages} transition tables, got {len(tables)}",
            tok.line, tok.col)
    for k, table in enumerate(tables):
        if len(table) != sizes[k]:
            raise ParseError(
                f"model {model!r}: {tok.text} table {k} has {len(table)} entries, "
                f"stage {k} has {sizes[k]} elements", tok.line, tok.col)
        if any(v >= sizes[k + 1] or v < 0 for v in table):
            raise ParseError(
                f"model {model!r}: {tok.text} table {k} has out-of-range entries",
                tok.line, tok.col)


# ---------------------------------------------------------------------------
# Printer

def print_type(ty: Ty, prec: int = 0) -> str:
    # prec levels: 0 arrow, 1 sum/prod, 2 prefix/atom
    match ty:
        case Base(name):
            return name
        case Unit():
            return "1"
        case Empty():
            return "0"
        case Fun(a, b):
            s = f"{print_type(a, 1)} -> {print_type(b, 0)}"
            return f"({s})" if prec > 0 else s
        case Prod(a, b):
            s = f"{print_type(a, 1)} * {print_type(b, 2)}"
            return f"({s})" if prec > 1 else s
        case Sum(a, b):
            s = f"{print_type(a, 1)} + {print_type(b, 2)}"
            return f"({s})" if prec > 1 else s
        case Box(a):
            return f"[]{print_type(a, 2)}"
        case Dia(a):
            return f"<>{print_type(a, 2)}"
    raise TypeError(f"not a type: {ty!r}")


def print_term(t: Term, prec: int = 0) -> str:
    # prec levels: 0 binder forms, 1 application, 2 prefixed/atom
    match t:
        case Var(x):
            return x
        case UnitIntro():
            return "()"
        case Lam(x, ty, b):
            s = f"\\{x}:{print_type(ty, 1)}. {print_term(b, 0)}"
            return f"({s})" if prec > 0 else s
        case LetDia(x, ty, scrut, b):
            s = (f"let dia {x}:{print_type(ty, 1)} = {print_term(scrut, 0)} "
                 f"in {print_term(b, 0)}")
            return f"({s})" if prec > 0 else s
        case Case(s0, x, l, y, r):
            s = (f"case {print_term(s0, 1)} of inl {x} -> {print_term(l, 0)} "
                 f"| inr {y} -> {print_term(r, 0)}")
            return f"({s})" if prec > 0 else s
        case App(f, a):
            s = f"{print_term(f, 1)} {print_term(a, 2)}"
            return f"({s})" if prec > 1 else s
        case Pair(a, b):
            return f"({print_term(a, 0)}, {print_term(b, 0)})"
        case Shut(b):
            return _prefix("shut", b, prec)
        case Open(b):
            return _prefix("open", b, prec)
        case DiaIntro(b):
            return _prefix("dia", b, prec)
        case Proj1(b):
            return _prefix("fst", b, prec)
        case Proj2(b):
            return _prefix("snd", b, prec)
        case Inl(ty, b):
            return _prefix(f"inl[{print_type(ty, 0)}]", b, prec)
        case Inr(ty, b):
            return _prefix(f"inr[{print_type(ty, 0)}]", b, prec)
        case Abort(ty, b):
            return _prefix(f"abort[{print_type(ty, 0)}]", b, prec)
    raise TypeError(f"not a term: {t!r}")


def _prefix(kw: str, body: Term, prec: int) -> str:
    s = f"{kw} {print_term(body, 2)}"
    return f"({s})" if prec > 1 else s


def print_ctx(ctx: Ctx) -> str:
    parts = []
    for e in ctx.entries:
        if isinstance(e, VarBind):
            parts.append(f"{e.name} : {print_type(e.ty)}")
        else:
            parts.append("#")
    return ", ".join(parts)


def pretty(x) -> str:
    if isinstance(x, Term):
        return print_term(x)
    if isinstance(x, Ty):
        return print_type(x)
    if isinstance(x, Ctx):
        return print_ctx(x)
    raise TypeError(f"cannot print {x!r}")
