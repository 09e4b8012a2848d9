"""Reader and writer for the `.cdb` instance format.

A file is a sequence of dot-terminated statements::

    rel E(emp, dept, loc).            % or: rel E/3.
    @e1 E("E1", "D1", "Paderborn").
    fd: E: [emp] -> [dept].
    id: E[2] <= D[1].
    dc: ! E(X1,X2,X3), D(X2,X4,X5), X3 != X5.
    lav: D(X1,X2,X3) -> E(Y1,X1,Y2).

Variables start with an upper-case letter or underscore. Constants are
lower-case identifiers, digit strings or double-quoted strings. `%` starts a
comment running to the end of the line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .model import (
    DC,
    FD,
    ID,
    LTGD,
    Atom,
    Comparison,
    ConstrainedDatabase,
    Constant,
    Database,
    Fact,
    Schema,
    Variable,
)

SYNTAX = "Syntax"
UNKNOWN_RELATION = "UnknownRelation"
ARITY_MISMATCH = "ArityMismatch"
UNSAFE_VARIABLE = "UnsafeVariable"
DUPLICATE_LABEL = "DuplicateLabel"


class SourceError(Exception):
    """A located error in an instance file. Lines and columns are 1-based."""

    def __init__(self, line: int, column: int, kind: str, message: str):
        self.line = line
        self.column = column
        self.kind = kind
        self.message = message
        super().__init__(f"{line}:{column}: {kind}: {message}")


# ---------------------------------------------------------------- lexer


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, INT, STRING, PUNCT, EOF
    text: str
    line: int
    col: int


_PUNCT2 = ("->", "<=", "!=")
_PUNCT1 = "()[],.:!=/@"
_UNESCAPE = {"n": "\n", "r": "\r", "t": "\t", "\\": "\\", '"': '"'}


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch.isascii() and (ch.isalpha() or ch == "_"):
            j = i + 1
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("IDENT", text[i:j], line, start_col))
        elif ch.isascii() and ch.isdigit():
            j = i + 1
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
            toks.append(Token("INT", text[i:j], line, start_col))
        elif ch == '"':
            j = i + 1
            buf = []
            while True:
                if j >= n or text[j] in "\n\r":
                    raise SourceError(line, start_col, SYNTAX, "unterminated string")
                c = text[j]
                if c == '"':
                    j += 1
                    break
                if c == "\\":
                    if j + 1 >= n or text[j + 1] not in _UNESCAPE:
                        raise SourceError(line, col + (j - i), SYNTAX, "bad escape in string")
                    buf.append(_UNESCAPE[text[j + 1]])
                    j += 2
                    continue
                buf.append(c)
                j += 1
            toks.append(Token("STRING", "".join(buf), line, start_col))
        elif text.startswith(_PUNCT2, i):
            j = i + 2
            toks.append(Token("PUNCT", text[i:j], line, start_col))
        elif ch in _PUNCT1:
            j = i + 1
            toks.append(Token("PUNCT", ch, line, start_col))
        else:
            raise SourceError(line, col, SYNTAX, f"unexpected character {ch!r}")
        col += j - i
        i = j
    toks.append(Token("EOF", "", line, col))
    return toks


# ---------------------------------------------------------------- syntax tree


@dataclass
class _Term:
    tok: Token

    @property
    def is_var(self) -> bool:
        return self.tok.kind == "IDENT" and (self.tok.text[0].isupper() or self.tok.text[0] == "_")


@dataclass
class _Atom:
    rel: Token
    terms: list[_Term]


@dataclass
class _Stmt:
    kind: str  # rel, fact, fd, id, dc, lav
    start: Token
    rel: Token | None = None
    arity: int | None = None
    attr_names: list[str] | None = None
    label: Token | None = None
    atom: _Atom | None = None
    atoms: list[_Atom] = field(default_factory=list)
    head: list[_Atom] = field(default_factory=list)
    cmps: list[tuple[_Term, Token, _Term]] = field(default_factory=list)
    lhs: list[Token] = field(default_factory=list)
    rhs: list[Token] = field(default_factory=list)
    rel2: Token | None = None


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, expected: str, tok: Token | None = None):
        tok = tok or self.cur
        got = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise SourceError(tok.line, tok.col, SYNTAX, f"expected {expected}, found {got}")

    def eat(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        t = self.cur
        if t.kind != kind or (text is not None and t.text != text):
            self.fail(what or (repr(text) if text else kind.lower()))
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.cur.kind == "PUNCT" and self.cur.text == text

    def statements(self) -> list[_Stmt]:
        out = []
        while self.cur.kind != "EOF":
            out.append(self.statement())
        return out

    def statement(self) -> _Stmt:
        t = self.cur
        nxt = self.peek()
        if t.kind == "IDENT" and t.text == "rel" and nxt.kind == "IDENT":
            return self.decl()
        if t.kind == "IDENT" and t.text in ("fd", "id", "dc", "lav") and nxt.text == ":" and nxt.kind == "PUNCT":
            self.i += 2
            return getattr(self, "c_" + t.text)(t)
        return self.fact()

    def decl(self) -> _Stmt:
        start = self.eat("IDENT")
        rel = self.eat("IDENT", what="relation name")
        st = _Stmt("rel", start, rel=rel)
        if self.at("/"):
            self.i += 1
            st.arity = int(self.eat("INT", what="arity").text)
        elif self.at("("):
            self.i += 1
            names = [self.eat("IDENT", what="attribute name").text]
            while self.at(","):
                self.i += 1
                names.append(self.eat("IDENT", what="attribute name").text)
            self.eat("PUNCT", ")")
            if len(set(names)) != len(names):
                raise SourceError(rel.line, rel.col, SYNTAX, "repeated attribute name")
            st.attr_names = names
            st.arity = len(names)
        else:
            self.fail("'/' or '('")
        self.eat("PUNCT", ".")
        return st

    def fact(self) -> _Stmt:
        start = self.cur
        label = None
        if self.at("@"):
            self.i += 1
            label = self.eat("IDENT", what="label")
        atom = self.atom()
        for term in atom.terms:
            if term.is_var:
                raise SourceError(term.tok.line, term.tok.col, SYNTAX, "facts must be ground")
        self.eat("PUNCT", ".")
        return _Stmt("fact", start, label=label, atom=atom)

    def atom(self) -> _Atom:
        rel = self.eat("IDENT", what="relation name")
        self.eat("PUNCT", "(")
        terms = []
        if not self.at(")"):
            terms.append(self.term())
            while self.at(","):
                self.i += 1
                terms.append(self.term())
        self.eat("PUNCT", ")")
        return _Atom(rel, terms)

    def term(self) -> _Term:
        t = self.cur
        if t.kind in ("IDENT", "INT", "STRING"):
            self.i += 1
            return _Term(t)
        self.fail("term")

    def poslist(self) -> list[Token]:
        self.eat("PUNCT", "[")
        out = [self.pos()]
        while self.at(","):
            self.i += 1
            out.append(self.pos())
        self.eat("PUNCT", "]")
        return out

    def pos(self) -> Token:
        t = self.cur
        if t.kind in ("INT", "IDENT"):
            self.i += 1
            return t
        self.fail("attribute position")

    def c_fd(self, start: Token) -> _Stmt:
        rel = self.eat("IDENT", what="relation name")
        self.eat("PUNCT", ":")
        lhs = self.poslist()
        self.eat("PUNCT", "->")
        rhs = self.poslist()
        self.eat("PUNCT", ".")
        return _Stmt("fd", start, rel=rel, lhs=lhs, rhs=rhs)

    def c_id(self, start: Token) -> _Stmt:
        rel = self.eat("IDENT", what="relation name")
        lhs = self.poslist()
        self.eat("PUNCT", "<=")
        rel2 = self.eat("IDENT", what="relation name")
        rhs = self.poslist()
        self.eat("PUNCT", ".")
        return _Stmt("id", start, rel=rel, lhs=lhs, rel2=rel2, rhs=rhs)

    def c_dc(self, start: Token) -> _Stmt:
        self.eat("PUNCT", "!")
        st = _Stmt("dc", start)
        while True:
            if self.cur.kind == "IDENT" and self.peek().kind == "PUNCT" and self.peek().text == "(":
                if st.cmps:
                    self.fail("comparison")
                st.atoms.append(self.atom())
            else:
                left = self.term()
                op = self.cur
                if not (self.at("=") or self.at("!=")):
                    self.fail("'=' or '!='")
                self.i += 1
                st.cmps.append((left, op, self.term()))
            if not self.at(","):
                break
            self.i += 1
        if not st.atoms:
            raise SourceError(start.line, start.col, SYNTAX, "denial constraint without atoms")
        self.eat("PUNCT", ".")
        return st

    def c_lav(self, start: Token) -> _Stmt:
        body = self.atom()
        if self.at(","):
            raise SourceError(self.cur.line, self.cur.col, SYNTAX, "LTGD body must be a single atom")
        self.eat("PUNCT", "->")
        head = [self.atom()]
        while self.at(","):
            self.i += 1
            head.append(self.atom())
        self.eat("PUNCT", ".")
        return _Stmt("lav", start, atom=body, head=head)


# ---------------------------------------------------------------- semantic pass


@dataclass(frozen=True)
class Document:
    """A parsed instance together with its fact labels (in file order)."""

    cdb: ConstrainedDatabase
    labels: Mapping[str, Fact]


def _err(tok: Token, kind: str, msg: str) -> SourceError:
    return SourceError(tok.line, tok.col, kind, msg)


class _Resolver:
    def __init__(self):
        self.arity: dict[str, int] = {}
        self.attrs: dict[str, list[str]] = {}

    def declare(self, st: _Stmt):
        name = st.rel.text
        if name in self.arity and self.arity[name] != st.arity:
            raise _err(st.rel, ARITY_MISMATCH, f"{name} redeclared with arity {st.arity}")
        if st.attr_names is not None:
            if name in self.attrs and self.attrs[name] != st.attr_names:
                raise _err(st.rel, ARITY_MISMATCH, f"{name} redeclared with other attributes")
            self.attrs[name] = st.attr_names
        self.arity[name] = st.arity

    def use(self, a: _Atom):
        name = a.rel.text
        n = len(a.terms)
        if self.arity.setdefault(name, n) != n:
            raise _err(a.rel, ARITY_MISMATCH, f"{name} has arity {self.arity[name]}, used with {n}")

    def positions(self, rel: Token, toks: list[Token]) -> tuple[int, ...]:
        if rel.text not in self.arity:
            raise _err(rel, UNKNOWN_RELATION, f"unknown relation {rel.text}")
        n = self.arity[rel.text]
        out = []
        for t in toks:
            if t.kind == "INT":
                p = int(t.text)
                if not 1 <= p <= n:
                    raise _err(t, ARITY_MISMATCH, f"position {p} outside 1..{n} of {rel.text}")
            else:
                names = self.attrs.get(rel.text, [])
                if t.text not in names:
                    raise _err(t, SYNTAX, f"{rel.text} has no attribute {t.text}")
                p = names.index(t.text) + 1
            out.append(p)
        return tuple(out)


def _term(t: _Term):
    if t.is_var:
        return Variable(t.tok.text)
    return Constant(t.tok.text)


def _atom(a: _Atom) -> Atom:
    return Atom(a.rel.text, tuple(_term(t) for t in a.terms))


def parse_document(text: str) -> Document:
    """Parse an instance. Raises exactly one SourceError on bad input."""
    stmts = _Parser(tokenize(text)).statements()
    res = _Resolver()
    for st in stmts:
        if st.kind == "rel":
            res.declare(st)

    facts: list[Fact] = []
    labels: dict[str, Fact] = {}
    pending: list[tuple[_Stmt, object]] = []
    for st in stmts:
        if st.kind == "fact":
            res.use(st.atom)
            f = Fact(st.atom.rel.text, tuple(t.tok.text for t in st.atom.terms))
            facts.append(f)
            if st.label is not None:
                if st.label.text in labels:
                    raise _err(st.label, DUPLICATE_LABEL, f"label {st.label.text} already used")
                labels[st.label.text] = f
        elif st.kind == "dc":
            for a in st.atoms:
                res.use(a)
            bound = {t.tok.text for a in st.atoms for t in a.terms if t.is_var}
            for left, _, right in st.cmps:
                for t in (left, right):
                    if t.is_var and t.tok.text not in bound:
                        raise _err(t.tok, UNSAFE_VARIABLE, f"{t.tok.text} does not occur in an atom")
            pending.append((st, None))
        elif st.kind == "lav":
            res.use(st.atom)
            for a in st.head:
                res.use(a)
            pending.append((st, None))
        elif st.kind in ("fd", "id"):
            pending.append((st, None))

    constraints = []
    for st, _ in pending:
        try:
            if st.kind == "fd":
                c = FD(st.rel.text, res.positions(st.rel, st.lhs), res.positions(st.rel, st.rhs))
            elif st.kind == "id":
                lhs = res.positions(st.rel, st.lhs)
                rhs = res.positions(st.rel2, st.rhs)
                if len(lhs) != len(rhs):
                    raise _err(st.rel2, ARITY_MISMATCH, "attribute lists differ in length")
                c = ID(st.rel.text, lhs, st.rel2.text, rhs)
            elif st.kind == "dc":
                c = DC(
                    tuple(_atom(a) for a in st.atoms),
                    tuple(Comparison(_term(l), op.text, _term(r)) for l, op, r in st.cmps),
                )
            else:
                c = LTGD(_atom(st.atom), tuple(_atom(a) for a in st.head))
        except ValueError as exc:
            raise _err(st.start, SYNTAX, str(exc)) from None
        constraints.append(c)

    schema = Schema(res.arity, {k: tuple(v) for k, v in res.attrs.items()})
    cdb = ConstrainedDatabase(Database(schema, frozenset(facts)), tuple(constraints))
    return Document(cdb, labels)


def parse_instance(text: str) -> ConstrainedDatabase:
    return parse_document(text).cdb


def serialize_instance(cdb: ConstrainedDatabase, labels: Mapping[str, Fact] | None = None) -> str:
    """Canonical text: declarations, sorted facts, constraints in order."""
    lines = []
    schema = cdb.schema
    for name, n in schema.relations.items():
        if name in schema.attributes:
            lines.append(f"rel {name}({', '.join(schema.attributes[name])}).")
        else:
            lines.append(f"rel {name}/{n}.")
    by_fact: dict[Fact, list[str]] = {}
    for lab, f in sorted((labels or {}).items()):
        by_fact.setdefault(f, []).append(lab)
    if cdb.facts:
        lines.append("")
    for f in sorted(cdb.facts):
        for lab in by_fact.get(f, [None]):
            lines.append(f"@{lab} {f}." if lab else f"{f}.")
    if cdb.constraints:
        lines.append("")
    lines.extend(str(c) for c in cdb.constraints)
    return "\n".join(lines) + "\n"
