"""Litmus-test frontend: AST, parser, pretty-printer and elaboration.

The core statement language has exactly nine constructors (skip, load,
store, register assignment, dmb, asm, seq, choice, iterate).  ``if`` and
``while`` exist only as surface syntax and are desugared while parsing.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Union

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1

ARITH_OPS = ("+", "-", "*")
CMP_OPS = ("=", "!=", "<", "<=")


def wrap64(value: int) -> int:
    """Wrap an integer into the signed 64-bit range."""
    value &= (1 << 64) - 1
    return value - (1 << 64) if value > INT64_MAX else value


class LitmusError(Exception):
    """Parse or validation failure, with an optional source position."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + message)


class ValueUniverseOverflow(LitmusError):
    pass


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Reg:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Reg, BinOp]


@dataclass(frozen=True)
class BConst:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not:
    arg: "BExpr"


@dataclass(frozen=True)
class And:
    left: "BExpr"
    right: "BExpr"


@dataclass(frozen=True)
class Or:
    left: "BExpr"
    right: "BExpr"


BExpr = Union[BConst, Cmp, Not, And, Or]


def expr_registers(e) -> frozenset[str]:
    """Registers mentioned by an arithmetic or boolean expression."""
    if isinstance(e, Reg):
        return frozenset((e.name,))
    if isinstance(e, (Const, BConst)):
        return frozenset()
    if isinstance(e, Not):
        return expr_registers(e.arg)
    return expr_registers(e.left) | expr_registers(e.right)


def apply_op(op: str, a: int, b: int) -> int:
    if op == "+":
        return wrap64(a + b)
    if op == "-":
        return wrap64(a - b)
    if op == "*":
        return wrap64(a * b)
    raise ValueError(f"unknown operator {op!r}")


def compare(op: str, a: int, b: int) -> bool:
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    raise ValueError(f"unknown comparison {op!r}")


def eval_expr(e: Expr, value_of) -> int:
    """Evaluate ``e`` with register values supplied by ``value_of(name)``."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Reg):
        return value_of(e.name)
    return apply_op(e.op, eval_expr(e.left, value_of), eval_expr(e.right, value_of))


def eval_bexpr(b: BExpr, value_of) -> bool:
    if isinstance(b, BConst):
        return b.value
    if isinstance(b, Cmp):
        return compare(b.op, eval_expr(b.left, value_of), eval_expr(b.right, value_of))
    if isinstance(b, Not):
        return not eval_bexpr(b.arg, value_of)
    if isinstance(b, And):
        return eval_bexpr(b.left, value_of) and eval_bexpr(b.right, value_of)
    return eval_bexpr(b.left, value_of) or eval_bexpr(b.right, value_of)


# -- statements --------------------------------------------------------------


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Load:
    reg: str
    loc: str


@dataclass(frozen=True)
class Store:
    loc: str
    value: Union[Const, Reg]


@dataclass(frozen=True)
class Assign:
    reg: str
    expr: Expr


@dataclass(frozen=True)
class Dmb:
    pass


@dataclass(frozen=True)
class Asm:
    cond: BExpr


def _cached_hash(self) -> int:
    # compound statements are hashed constantly during search
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
        object.__setattr__(self, "_hash", h)
    return h


def _plain_reduce(self):
    # keep the cached hash out of pickles; str hashes differ across processes
    return (type(self), tuple(getattr(self, f) for f in self.__dataclass_fields__))


@dataclass(frozen=True)
class Seq:
    first: "Statement"
    second: "Statement"
    __hash__ = _cached_hash
    __reduce__ = _plain_reduce


@dataclass(frozen=True)
class Choice:
    left: "Statement"
    right: "Statement"
    __hash__ = _cached_hash
    __reduce__ = _plain_reduce


@dataclass(frozen=True)
class Iterate:
    body: "Statement"
    __hash__ = _cached_hash
    __reduce__ = _plain_reduce


Statement = Union[Skip, Load, Store, Assign, Dmb, Asm, Seq, Choice, Iterate]
ATOMIC = (Skip, Load, Store, Assign, Dmb, Asm)

SKIP = Skip()


def seq(*parts: Statement) -> Statement:
    """Right-nested sequence of ``parts`` (skip when empty)."""
    parts = [p for p in parts]
    if not parts:
        return SKIP
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Seq(p, out)
    return out


def negate(b: BExpr) -> BExpr:
    return b.arg if isinstance(b, Not) else Not(b)


def desugar_if(cond: BExpr, then: Statement, other: Statement) -> Statement:
    return Choice(Seq(Asm(cond), then), Seq(Asm(negate(cond)), other))


def desugar_while(cond: BExpr, body: Statement) -> Statement:
    return Seq(Iterate(Seq(Asm(cond), body)), Asm(negate(cond)))


def walk(s: Statement) -> Iterator[Statement]:
    """Pre-order traversal of all sub-statements."""
    yield s
    if isinstance(s, Seq):
        yield from walk(s.first)
        yield from walk(s.second)
    elif isinstance(s, Choice):
        yield from walk(s.left)
        yield from walk(s.right)
    elif isinstance(s, Iterate):
        yield from walk(s.body)


def statement_registers(s: Statement) -> frozenset[str]:
    regs: set[str] = set()
    for st in walk(s):
        if isinstance(st, Load):
            regs.add(st.reg)
        elif isinstance(st, Store):
            regs |= expr_registers(st.value)
        elif isinstance(st, Assign):
            regs.add(st.reg)
            regs |= expr_registers(st.expr)
        elif isinstance(st, Asm):
            regs |= expr_registers(st.cond)
    return frozenset(regs)


def statement_locations(s: Statement) -> frozenset[str]:
    return frozenset(
        st.loc for st in walk(s) if isinstance(st, (Load, Store))
    )


def has_iterate(s: Statement) -> bool:
    return any(isinstance(st, Iterate) for st in walk(s))


def _expr_constants(e) -> set[int]:
    if isinstance(e, Const):
        return {e.value}
    if isinstance(e, (Reg, BConst)):
        return set()
    if isinstance(e, Not):
        return _expr_constants(e.arg)
    return _expr_constants(e.left) | _expr_constants(e.right)


def statement_constants(s: Statement) -> set[int]:
    out: set[int] = set()
    for st in walk(s):
        if isinstance(st, Store):
            out |= _expr_constants(st.value)
        elif isinstance(st, Assign):
            out |= _expr_constants(st.expr)
        elif isinstance(st, Asm):
            out |= _expr_constants(st.cond)
    return out


# -- tests -------------------------------------------------------------------


@dataclass(frozen=True)
class OutcomePredicate:
    """Conjunction of ``reg = k`` and ``loc = k`` clauses.

    Location clauses refer to the value of the last write to that location
    in the final memory (0 when there is none).
    """

    registers: tuple[tuple[str, int], ...] = ()
    locations: tuple[tuple[str, int], ...] = ()

    def holds(self, valuation: dict[str, int], final_memory: dict[str, int] | None = None) -> bool:
        if any(valuation.get(r, 0) != k for r, k in self.registers):
            return False
        if self.locations:
            mem = final_memory or {}
            if any(mem.get(x, 0) != k for x, k in self.locations):
                return False
        return True

    def __str__(self) -> str:
        parts = [f"{r}={k}" for r, k in self.registers + self.locations]
        return "(" + r" /\ ".join(parts) + ")" if parts else "(true)"


@dataclass(frozen=True)
class LitmusTest:
    name: str
    threads: tuple[tuple[int, Statement], ...]
    outcome: OutcomePredicate = OutcomePredicate()
    expected: str = "unspecified"
    locations: tuple[str, ...] = ()
    # set by elaborate() when at least one iterate was cut off at the bound
    unrolled: bool = field(default=False, compare=False)

    @property
    def tids(self) -> list[int]:
        return [t for t, _ in self.threads]

    def thread(self, tid: int) -> Statement:
        for t, s in self.threads:
            if t == tid:
                return s
        raise KeyError(tid)

    def registers(self, tid: int) -> tuple[str, ...]:
        return tuple(sorted(statement_registers(self.thread(tid))))

    def all_registers(self) -> dict[str, int]:
        return {r: t for t, s in self.threads for r in statement_registers(s)}


_PLAIN_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


# -- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>(\#|//)[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|/\\|\\/|==|!=|<=|>=|[-+*()<>={};:,!~])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise LitmusError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            tokens.append(Token("nl", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parser ------------------------------------------------------------------

_KEYWORDS = {"skip", "dmb", "assume", "asm", "if", "else", "while", "loop", "choose", "or",
             "true", "false", "not", "thread", "exists"}


@dataclass(frozen=True)
class _RawAssign:
    target: str
    expr: Expr
    line: int
    col: int
    expr_line: int
    expr_col: int


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None) -> LitmusError:
        tok = tok or self.tok
        return LitmusError(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "ident")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text.strip() or self.tok.kind
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def skip_separators(self) -> None:
        while self.tok.kind == "nl" or self.at(";"):
            self.i += 1

    def skip_newlines(self) -> None:
        while self.tok.kind == "nl":
            self.i += 1

    # statements

    def block(self, stop) -> Statement:
        parts: list = []
        self.skip_separators()
        while not stop():
            parts.append(self.statement())
            if not (stop() or self.tok.kind == "nl" or self.at(";")):
                raise self.error(f"expected end of statement, found {self.tok.text!r}")
            self.skip_separators()
        return seq(*parts)

    def braced(self) -> Statement:
        self.skip_newlines()
        self.expect("{")
        body = self.block(lambda: self.at("}") or self.tok.kind == "eof")
        self.expect("}")
        return body

    def statement(self):
        tok = self.tok
        if tok.kind != "ident":
            raise self.error(f"expected a statement, found {tok.text!r}")
        word = tok.text
        if word == "skip":
            self.i += 1
            return SKIP
        if word == "dmb":
            self.i += 1
            return Dmb()
        if word in ("assume", "asm"):
            self.i += 1
            return Asm(self.bexpr())
        if word == "if":
            self.i += 1
            cond = self.bexpr()
            then = self.braced()
            save = self.i
            self.skip_newlines()
            if self.at("else"):
                self.i += 1
                other = self.braced()
            else:
                self.i = save
                other = SKIP
            return desugar_if(cond, then, other)
        if word == "while":
            self.i += 1
            cond = self.bexpr()
            return desugar_while(cond, self.braced())
        if word == "loop":
            self.i += 1
            return Iterate(self.braced())
        if word == "choose":
            self.i += 1
            left = self.braced()
            self.skip_newlines()
            self.expect("or")
            return Choice(left, self.braced())
        if word in _KEYWORDS:
            raise self.error(f"unexpected keyword {word!r}")
        self.i += 1
        self.expect(":=")
        etok = self.tok
        if etok.kind in ("nl", "eof") or self.at(";") or self.at("}"):
            raise self.error("missing value in assignment", etok)
        expr = self.expr()
        return _RawAssign(word, expr, tok.line, tok.col, etok.line, etok.col)

    # expressions

    def expr(self) -> Expr:
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.atom()
        while self.at("*"):
            self.i += 1
            left = BinOp("*", left, self.atom())
        return left

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return Const(wrap64(int(tok.text)))
        if self.at("-") and self.peek().kind == "int":
            self.i += 2
            return Const(wrap64(-int(self.toks[self.i - 1].text)))
        if tok.kind == "ident" and tok.text not in _KEYWORDS:
            self.i += 1
            return Reg(tok.text)
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        raise self.error(f"expected an expression, found {tok.text.strip() or tok.kind!r}")

    def bexpr(self) -> BExpr:
        left = self.bconj()
        while self.at("\\/"):
            self.i += 1
            left = Or(left, self.bconj())
        return left

    def bconj(self) -> BExpr:
        left = self.bneg()
        while self.at("/\\"):
            self.i += 1
            left = And(left, self.bneg())
        return left

    def bneg(self) -> BExpr:
        if self.at("!") or self.at("~") or self.at("not"):
            self.i += 1
            return Not(self.bneg())
        return self.batom()

    def batom(self) -> BExpr:
        if self.at("true"):
            self.i += 1
            return BConst(True)
        if self.at("false"):
            self.i += 1
            return BConst(False)
        if self.at("("):
            save = self.i
            try:
                self.i += 1
                b = self.bexpr()
                self.expect(")")
                return b
            except LitmusError:
                self.i = save
        left = self.expr()
        op = self.tok.text if self.tok.kind == "op" else ""
        if op not in ("=", "==", "!=", "<", "<=", ">", ">="):
            raise self.error(f"expected a comparison, found {self.tok.text.strip() or self.tok.kind!r}")
        self.i += 1
        right = self.expr()
        if op == "==":
            op = "="
        if op == ">":
            return Cmp("<", right, left)
        if op == ">=":
            return Cmp("<=", right, left)
        return Cmp(op, left, right)


def _header_value(line: str) -> str:
    return line.split(":", 1)[1].strip()


def _mentions(stmt) -> tuple[set[str], set[str]]:
    """(identifiers assigned, identifiers mentioned) in a raw statement tree."""
    assigned: set[str] = set()
    mentioned: set[str] = set()
    for st in _raw_walk(stmt):
        if isinstance(st, _RawAssign):
            assigned.add(st.target)
            mentioned.add(st.target)
            mentioned |= expr_registers(st.expr)
        elif isinstance(st, Asm):
            mentioned |= expr_registers(st.cond)
    return assigned, mentioned


def _raw_walk(s) -> Iterator:
    yield s
    if isinstance(s, Seq):
        yield from _raw_walk(s.first)
        yield from _raw_walk(s.second)
    elif isinstance(s, Choice):
        yield from _raw_walk(s.left)
        yield from _raw_walk(s.right)
    elif isinstance(s, Iterate):
        yield from _raw_walk(s.body)


def _resolve(s, locations: set[str]):
    if isinstance(s, _RawAssign):
        if s.target in locations:
            if isinstance(s.expr, Const) or (isinstance(s.expr, Reg) and s.expr.name not in locations):
                return Store(s.target, s.expr)
            raise LitmusError("store value must be a constant or a register", s.expr_line, s.expr_col)
        if isinstance(s.expr, Reg) and s.expr.name in locations:
            return Load(s.target, s.expr.name)
        bad = expr_registers(s.expr) & locations
        if bad:
            raise LitmusError(f"location {sorted(bad)[0]!r} used inside an expression", s.expr_line, s.expr_col)
        return Assign(s.target, s.expr)
    if isinstance(s, Asm):
        bad = expr_registers(s.cond) & locations
        if bad:
            raise LitmusError(f"location {sorted(bad)[0]!r} used in a condition")
        return s
    if isinstance(s, Seq):
        return Seq(_resolve(s.first, locations), _resolve(s.second, locations))
    if isinstance(s, Choice):
        return Choice(_resolve(s.left, locations), _resolve(s.right, locations))
    if isinstance(s, Iterate):
        return Iterate(_resolve(s.body, locations))
    return s


_THREAD_RE = re.compile(r"^\s*thread\s+(\d+)\s*:(.*)$")
_HEADER_RE = re.compile(r"^\s*(name|locations|expected)\s*:", re.IGNORECASE)
_EXISTS_RE = re.compile(r"^\s*exists\b")


def parse_litmus(text: str, default_name: str = "test") -> LitmusTest:
    """Parse the ``.lit`` text format into a validated :class:`LitmusTest`."""
    lines = text.split("\n")
    name = default_name
    declared: list[str] | None = None
    expected = "unspecified"
    exists_src: tuple[int, str] | None = None
    # (tid, header line number, body source lines with their line numbers)
    threads: list[tuple[int, int, list[tuple[int, str]]]] = []
    for lineno, raw in enumerate(lines, start=1):
        stripped = re.sub(r"(#|//).*$", "", raw).strip()
        if not stripped:
            if threads:
                threads[-1][2].append((lineno, ""))
            continue
        m = _THREAD_RE.match(stripped)
        if m:
            threads.append((int(m.group(1)), lineno, []))
            rest = m.group(2)
            col = raw.index(":", raw.index("thread")) + 2
            threads[-1][2].append((lineno, " " * (col - 1) + rest))
            continue
        h = _HEADER_RE.match(stripped)
        if h:
            key = h.group(1).lower()
            value = _header_value(stripped)
            if key == "name":
                if not value:
                    raise LitmusError("empty test name", lineno, 1)
                name = value
            elif key == "locations":
                declared = [v for v in re.split(r"[\s,]+", value) if v]
                for v in declared:
                    if not _PLAIN_IDENT.fullmatch(v):
                        raise LitmusError(f"bad location name {v!r}", lineno, 1)
            else:
                if value not in ("reachable", "unreachable", "unspecified"):
                    raise LitmusError(f"expected verdict must be reachable or unreachable, got {value!r}", lineno, 1)
                expected = value
            continue
        if _EXISTS_RE.match(stripped):
            if exists_src is not None:
                raise LitmusError("duplicate exists clause", lineno, 1)
            exists_src = (lineno, raw)
            continue
        if not threads:
            raise LitmusError(f"unexpected text before the first thread: {stripped!r}", lineno, 1)
        threads[-1][2].append((lineno, raw))

    if not threads:
        raise LitmusError("no threads", 1, 1)
    tids = [t for t, _, _ in threads]
    if sorted(tids) != list(range(1, len(tids) + 1)) or tids != sorted(tids):
        raise LitmusError("thread ids must be 1..n in order", threads[0][1], 1)

    raw_threads = []
    for tid, header_line, body in threads:
        toks = _body_tokens(body)
        p = _Parser(toks)
        stmt = p.block(lambda: p.tok.kind == "eof")
        raw_threads.append((tid, stmt))

    info = [_mentions(s) for _, s in raw_threads]
    all_assigned = set().union(*(a for a, _ in info))
    if declared is not None:
        locations = set(declared)
    else:
        locations = set()
        idents = set().union(*(m for _, m in info))
        for ident in idents:
            users = [i for i, (_, m) in enumerate(info) if ident in m]
            if len(users) > 1 or ident not in all_assigned:
                locations.add(ident)

    resolved = tuple((tid, _resolve(s, locations)) for tid, s in raw_threads)

    owner: dict[str, int] = {}
    for tid, s in resolved:
        for r in statement_registers(s):
            if r in owner:
                raise LitmusError(f"register {r!r} used by threads {owner[r]} and {tid}")
            owner[r] = tid
    outcome = OutcomePredicate()
    if exists_src is not None:
        outcome = _parse_exists(exists_src[0], exists_src[1], owner, locations)
    used_locs = set().union(*(statement_locations(s) for _, s in resolved))
    return LitmusTest(
        name=name,
        threads=resolved,
        outcome=outcome,
        expected=expected,
        locations=tuple(sorted(locations | used_locs)),
    )


def _body_tokens(body: list[tuple[int, str]]) -> list[Token]:
    toks: list[Token] = []
    for lineno, src in body:
        for t in tokenize(src)[:-1]:
            toks.append(Token(t.kind, t.text, lineno, t.col))
        toks.append(Token("nl", "\n", lineno, len(src) + 1))
    last = body[-1][0] if body else 1
    toks.append(Token("eof", "", last + 1, 1))
    return toks


def _parse_exists(lineno: int, raw: str, owner: dict[str, int], locations: set[str]) -> OutcomePredicate:
    toks = [Token(t.kind, t.text, lineno, t.col) for t in tokenize(raw)]
    p = _Parser(toks)
    while p.tok.text != "exists":
        p.i += 1
    p.i += 1
    regs: list[tuple[str, int]] = []
    locs: list[tuple[str, int]] = []
    if p.at("("):
        p.i += 1
        closing = True
    else:
        closing = False
    if p.at("true"):
        p.i += 1
    else:
        while True:
            tok = p.tok
            if tok.kind != "ident":
                raise p.error("expected a register or location name")
            p.i += 1
            if not (p.at("=") or p.at("==")):
                raise p.error("expected '='")
            p.i += 1
            neg = p.at("-")
            if neg:
                p.i += 1
            if p.tok.kind != "int":
                raise p.error("expected an integer")
            value = wrap64(-int(p.tok.text) if neg else int(p.tok.text))
            p.i += 1
            if tok.text in owner:
                regs.append((tok.text, value))
            elif tok.text in locations:
                locs.append((tok.text, value))
            else:
                raise LitmusError(f"unknown identifier {tok.text!r} in outcome", tok.line, tok.col)
            if p.at("/\\"):
                p.i += 1
                continue
            break
    if closing:
        p.expect(")")
    if p.tok.kind not in ("eof", "nl"):
        raise p.error(f"unexpected {p.tok.text!r} after outcome")
    return OutcomePredicate(tuple(regs), tuple(locs))


# -- pretty printer ----------------------------------------------------------


def format_expr(e: Expr) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Reg):
        return e.name
    return f"({format_expr(e.left)} {e.op} {format_expr(e.right)})"


def format_bexpr(b: BExpr) -> str:
    if isinstance(b, BConst):
        return "true" if b.value else "false"
    if isinstance(b, Cmp):
        return f"{format_expr(b.left)} {b.op} {format_expr(b.right)}"
    if isinstance(b, Not):
        return f"!({format_bexpr(b.arg)})"
    op = "/\\" if isinstance(b, And) else "\\/"
    return f"({format_bexpr(b.left)} {op} {format_bexpr(b.right)})"


def _format_stmt(s: Statement, indent: str) -> list[str]:
    if isinstance(s, Skip):
        return [indent + "skip"]
    if isinstance(s, Load):
        return [f"{indent}{s.reg} := {s.loc}"]
    if isinstance(s, Store):
        return [f"{indent}{s.loc} := {format_expr(s.value)}"]
    if isinstance(s, Assign):
        return [f"{indent}{s.reg} := {format_expr(s.expr)}"]
    if isinstance(s, Dmb):
        return [indent + "dmb"]
    if isinstance(s, Asm):
        return [f"{indent}assume {format_bexpr(s.cond)}"]
    if isinstance(s, Seq):
        return _format_seq_left(s, indent)
    if isinstance(s, Choice):
        return (
            [indent + "choose {"]
            + _format_stmt(s.left, indent + "  ")
            + [indent + "} or {"]
            + _format_stmt(s.right, indent + "  ")
            + [indent + "}"]
        )
    if isinstance(s, Iterate):
        return [indent + "loop {"] + _format_stmt(s.body, indent + "  ") + [indent + "}"]
    raise TypeError(s)


def _format_seq_left(s: Seq, indent: str) -> list[str]:
    # the parser right-nests sequences; a left-nested one is flattened
    parts: list[Statement] = []

    def flat(x):
        if isinstance(x, Seq):
            flat(x.first)
            flat(x.second)
        else:
            parts.append(x)

    flat(s)
    out: list[str] = []
    for p in parts:
        out += _format_stmt(p, indent)
    return out


def normalize(s: Statement) -> Statement:
    """Right-nest sequences and drop skips inside them (the parser's shape)."""
    if isinstance(s, Seq):
        parts: list[Statement] = []

        def flat(x):
            if isinstance(x, Seq):
                flat(x.first)
                flat(x.second)
            else:
                parts.append(normalize(x))

        flat(s)
        parts = [p for p in parts if not isinstance(p, Skip)]
        return seq(*parts)
    if isinstance(s, Choice):
        return Choice(normalize(s.left), normalize(s.right))
    if isinstance(s, Iterate):
        return Iterate(normalize(s.body))
    return s


def format_litmus(test: LitmusTest) -> str:
    """Render ``test`` in the ``.lit`` format; parsing the result gives it back."""
    lines = [f"name: {test.name}"]
    if test.locations:
        lines.append("locations: " + " ".join(test.locations))
    for tid, s in test.threads:
        lines.append(f"thread {tid}:")
        lines += _format_stmt(s, "  ")
    if test.outcome.registers or test.outcome.locations:
        lines.append(f"exists {test.outcome}")
    if test.expected != "unspecified":
        lines.append(f"expected: {test.expected}")
    return "\n".join(lines) + "\n"


# -- elaboration and value bounds -------------------------------------------


def power(s: Statement, n: int) -> Statement:
    if n == 0:
        return SKIP
    if n == 1:
        return s
    return Seq(s, power(s, n - 1))


def elaborate_statement(s: Statement, unroll: int) -> tuple[Statement, bool]:
    """Replace every iterate by a choice over 0..unroll copies of its body."""
    if isinstance(s, Iterate):
        body, _ = elaborate_statement(s.body, unroll)
        out = power(body, unroll)
        for n in range(unroll - 1, -1, -1):
            out = Choice(power(body, n), out)
        return out, True
    if isinstance(s, Seq):
        a, fa = elaborate_statement(s.first, unroll)
        b, fb = elaborate_statement(s.second, unroll)
        return Seq(a, b), fa or fb
    if isinstance(s, Choice):
        a, fa = elaborate_statement(s.left, unroll)
        b, fb = elaborate_statement(s.right, unroll)
        return Choice(a, b), fa or fb
    return s, False


def elaborate(test: LitmusTest, unroll: int = 2) -> LitmusTest:
    if unroll < 0:
        raise ValueError("unroll must be non-negative")
    threads = []
    cut = test.unrolled
    for tid, s in test.threads:
        e, flag = elaborate_statement(s, unroll)
        threads.append((tid, e))
        cut = cut or flag
    return dataclasses.replace(test, threads=tuple(threads), unrolled=cut)


def _count_ops(s: Statement) -> int:
    def ops(e) -> int:
        return 1 + ops(e.left) + ops(e.right) if isinstance(e, BinOp) else 0

    return sum(ops(st.expr) for st in walk(s) if isinstance(st, Assign))


def _used_ops(s: Statement) -> set[str]:
    out: set[str] = set()

    def visit(e):
        if isinstance(e, BinOp):
            out.add(e.op)
            visit(e.left)
            visit(e.right)

    for st in walk(s):
        if isinstance(st, Assign):
            visit(st.expr)
    return out


DEFAULT_VALUE_CAP = 4096


def value_universe(test: LitmusTest, unroll: int = 2, cap: int = DEFAULT_VALUE_CAP) -> frozenset[int]:
    """Finite superset of every value an execution within the bound can produce.

    Every value is built from literals and 0 by arithmetic; each assignment
    statement runs at most once per elaborated path, so closing the literal
    set under the program's operators once per operator occurrence suffices.
    """
    if any(has_iterate(s) for _, s in test.threads):
        test = elaborate(test, unroll)
    values: set[int] = {0}
    ops: set[str] = set()
    rounds = 0
    for _, s in test.threads:
        values |= statement_constants(s)
        ops |= _used_ops(s)
        rounds += _count_ops(s)
    if len(values) > cap:
        raise ValueUniverseOverflow(f"value universe overflow: more than {cap} values")
    for _ in range(rounds):
        new = set(values)
        for op in ops:
            for a in values:
                for b in values:
                    new.add(apply_op(op, a, b))
                if len(new) > cap:
                    raise ValueUniverseOverflow(f"value universe overflow: more than {cap} values")
        if new == values:
            break
        values = new
    return frozenset(values)


# -- corpus ------------------------------------------------------------------


def load_file(path: str | Path) -> LitmusTest:
    path = Path(path)
    return parse_litmus(path.read_text(encoding="utf-8"), default_name=path.stem)


def corpus_names() -> list[str]:
    files = resources.files("wmmr") / "corpus"
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".lit"))


def load_corpus() -> dict[str, LitmusTest]:
    files = resources.files("wmmr") / "corpus"
    out = {}
    for p in sorted(files.iterdir(), key=lambda q: q.name):
        if p.name.endswith(".lit"):
            t = parse_litmus(p.read_text(encoding="utf-8"), default_name=p.name[:-4])
            out[t.name] = t
    return out


def iter_paths(paths: Iterable[str | Path]) -> Iterator[Path]:
    """Expand directories into their ``.lit`` files, sorted."""
    for p in paths:
        p = Path(p)
        if p.is_dir():
            yield from sorted(p.rglob("*.lit"))
        else:
            yield p
