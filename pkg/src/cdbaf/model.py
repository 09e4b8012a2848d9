"""Relational data model: terms, atoms, facts, schemas and integrity constraints.

Attribute positions are 1-based throughout, matching the surface syntax.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Union

_VAR_RE = re.compile(r"[A-Z_][A-Za-z0-9_]*\Z")
_BARE_CONST_RE = re.compile(r"(?:[a-z][A-Za-z0-9_]*|[0-9]+)\Z")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def format_constant(value: str) -> str:
    """Render a constant so the parser reads it back unchanged."""
    if _BARE_CONST_RE.match(value):
        return value
    return '"' + "".join(_ESCAPES.get(ch, ch) for ch in value) + '"'


def is_identifier(name: str) -> bool:
    return bool(_IDENT_RE.match(name))


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __post_init__(self):
        if not _VAR_RE.match(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Constant:
    value: str

    def __str__(self) -> str:
        return format_constant(self.value)


Term = Union[Variable, Constant]


def _term_str(t: Term) -> str:
    return str(t)


@dataclass(frozen=True)
class Atom:
    relation: str
    terms: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not is_identifier(self.relation):
            raise ValueError(f"invalid relation name {self.relation!r}")

    @property
    def arity(self) -> int:
        return len(self.terms)

    def variables(self) -> tuple[Variable, ...]:
        """Variables in order of first occurrence."""
        seen: dict[Variable, None] = {}
        for t in self.terms:
            if isinstance(t, Variable):
                seen.setdefault(t)
        return tuple(seen)

    def __str__(self) -> str:
        return f"{self.relation}({','.join(map(_term_str, self.terms))})"


@dataclass(frozen=True)
class Comparison:
    left: Term
    op: str
    right: Term

    def __post_init__(self):
        if self.op not in ("=", "!="):
            raise ValueError(f"unknown comparison operator {self.op!r}")

    def variables(self) -> tuple[Variable, ...]:
        return tuple(t for t in (self.left, self.right) if isinstance(t, Variable))

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True, order=True)
class Fact:
    """A ground atom. Values are strings; numerals are kept as their text."""

    relation: str
    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not is_identifier(self.relation):
            raise ValueError(f"invalid relation name {self.relation!r}")
        for v in self.values:
            if not isinstance(v, str):
                raise TypeError(f"fact values must be strings, got {v!r}")

    @property
    def arity(self) -> int:
        return len(self.values)

    def __str__(self) -> str:
        return f"{self.relation}({','.join(map(format_constant, self.values))})"


# ---------------------------------------------------------------- constraints


def _check_positions(ps: Iterable[int], what: str) -> tuple[int, ...]:
    ps = tuple(ps)
    if not ps:
        raise ValueError(f"{what}: empty attribute list")
    for p in ps:
        if not isinstance(p, int) or p < 1:
            raise ValueError(f"{what}: positions are 1-based integers, got {p!r}")
    return ps


@dataclass(frozen=True)
class FD:
    """relation: determinant -> dependent."""

    relation: str
    determinant: tuple[int, ...]
    dependent: tuple[int, ...]

    kind = "fd"

    def __post_init__(self):
        object.__setattr__(self, "determinant", _check_positions(self.determinant, "FD"))
        object.__setattr__(self, "dependent", _check_positions(self.dependent, "FD"))

    def relations(self) -> tuple[str, ...]:
        return (self.relation,)

    def __str__(self) -> str:
        lhs = ",".join(map(str, self.determinant))
        rhs = ",".join(map(str, self.dependent))
        return f"fd: {self.relation}: [{lhs}] -> [{rhs}]."


@dataclass(frozen=True)
class ID:
    """source[source_attrs] <= target[target_attrs]."""

    source: str
    source_attrs: tuple[int, ...]
    target: str
    target_attrs: tuple[int, ...]

    kind = "id"

    def __post_init__(self):
        object.__setattr__(self, "source_attrs", _check_positions(self.source_attrs, "ID"))
        object.__setattr__(self, "target_attrs", _check_positions(self.target_attrs, "ID"))
        if len(self.source_attrs) != len(self.target_attrs):
            raise ValueError("ID: attribute lists differ in length")
        if len(set(self.target_attrs)) != len(self.target_attrs):
            # not expressible as a single-atom-body LTGD
            raise ValueError("ID: repeated target attribute")

    def relations(self) -> tuple[str, ...]:
        return (self.source, self.target)

    def __str__(self) -> str:
        lhs = ",".join(map(str, self.source_attrs))
        rhs = ",".join(map(str, self.target_attrs))
        return f"id: {self.source}[{lhs}] <= {self.target}[{rhs}]."


@dataclass(frozen=True)
class DC:
    """Denial constraint: not (body and comparisons)."""

    body: tuple[Atom, ...]
    comparisons: tuple[Comparison, ...] = ()

    kind = "dc"

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        object.__setattr__(self, "comparisons", tuple(self.comparisons))
        if not self.body:
            raise ValueError("DC: empty body")
        bound = {v for a in self.body for v in a.variables()}
        for c in self.comparisons:
            for v in c.variables():
                if v not in bound:
                    raise ValueError(f"DC: unsafe variable {v}")

    def relations(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(a.relation for a in self.body))

    def __str__(self) -> str:
        parts = [str(a) for a in self.body] + [str(c) for c in self.comparisons]
        return "dc: ! " + ", ".join(parts) + "."


@dataclass(frozen=True)
class LTGD:
    """Local-as-view TGD: a single body atom implies an existential conjunction."""

    body: Atom
    head: tuple[Atom, ...]

    kind = "lav"

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        if not self.head:
            raise ValueError("LTGD: empty head")

    def relations(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys([self.body.relation] + [a.relation for a in self.head]))

    def existential_variables(self) -> tuple[Variable, ...]:
        body_vars = set(self.body.variables())
        out: dict[Variable, None] = {}
        for a in self.head:
            for v in a.variables():
                if v not in body_vars:
                    out.setdefault(v)
        return tuple(out)

    def __str__(self) -> str:
        return f"lav: {self.body} -> " + ", ".join(map(str, self.head)) + "."


Constraint = Union[FD, ID, DC, LTGD]

DENIAL_KINDS = ("fd", "dc")
TGD_KINDS = ("id", "lav")


# ---------------------------------------------------------------- databases


@dataclass(frozen=True)
class Schema:
    """Relation names with their arities, plus optional attribute names."""

    relations: Mapping[str, int]
    attributes: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        rels = {}
        for name, ar in sorted(dict(self.relations).items()):
            if not is_identifier(name):
                raise ValueError(f"invalid relation name {name!r}")
            if not isinstance(ar, int) or ar < 0:
                raise ValueError(f"invalid arity for {name}: {ar!r}")
            rels[name] = ar
        attrs = {}
        for name, names in sorted(dict(self.attributes).items()):
            names = tuple(names)
            if name not in rels or len(names) != rels[name]:
                raise ValueError(f"attribute names for {name} do not match its arity")
            attrs[name] = names
        object.__setattr__(self, "relations", MappingProxyType(rels))
        object.__setattr__(self, "attributes", MappingProxyType(attrs))

    def __eq__(self, other):
        if not isinstance(other, Schema):
            return NotImplemented
        return dict(self.relations) == dict(other.relations) and dict(self.attributes) == dict(
            other.attributes
        )

    def __hash__(self):
        return hash((tuple(self.relations.items()), tuple(self.attributes.items())))

    def __contains__(self, name: object) -> bool:
        return name in self.relations

    def arity(self, name: str) -> int:
        return self.relations[name]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.relations)

    def merged(self, other: "Schema") -> "Schema":
        rels = dict(self.relations)
        for k, v in other.relations.items():
            if rels.setdefault(k, v) != v:
                raise ValueError(f"conflicting arity for {k}")
        attrs = dict(other.attributes)
        attrs.update(self.attributes)
        return Schema(rels, attrs)


@dataclass(frozen=True)
class Database:
    schema: Schema
    facts: frozenset[Fact]

    def __post_init__(self):
        object.__setattr__(self, "facts", frozenset(self.facts))
        for f in self.facts:
            if f.relation not in self.schema:
                raise ValueError(f"fact {f} uses undeclared relation {f.relation}")
            if self.schema.arity(f.relation) != f.arity:
                raise ValueError(f"fact {f} has wrong arity")

    @classmethod
    def from_facts(cls, facts: Iterable[Fact], schema: Schema | None = None) -> "Database":
        facts = frozenset(facts)
        inferred = Schema({f.relation: f.arity for f in facts})
        return cls(schema.merged(inferred) if schema else inferred, facts)

    def __iter__(self) -> Iterator[Fact]:
        return iter(sorted(self.facts))

    def __len__(self) -> int:
        return len(self.facts)

    def __contains__(self, f: object) -> bool:
        return f in self.facts

    @property
    def active_domain(self) -> frozenset[str]:
        return frozenset(v for f in self.facts for v in f.values)

    def restrict(self, facts: Iterable[Fact]) -> "Database":
        return Database(self.schema, frozenset(facts))


def _constraint_arity_check(c: Constraint, schema: Schema) -> None:
    def need(rel: str) -> int:
        if rel not in schema:
            raise ValueError(f"constraint {c} mentions undeclared relation {rel}")
        return schema.arity(rel)

    def check_atom(a: Atom) -> None:
        if need(a.relation) != a.arity:
            raise ValueError(f"atom {a} has wrong arity")

    if isinstance(c, FD):
        n = need(c.relation)
        if max(c.determinant + c.dependent) > n:
            raise ValueError(f"{c}: position out of range")
    elif isinstance(c, ID):
        if max(c.source_attrs) > need(c.source) or max(c.target_attrs) > need(c.target):
            raise ValueError(f"{c}: position out of range")
    elif isinstance(c, DC):
        for a in c.body:
            check_atom(a)
    elif isinstance(c, LTGD):
        check_atom(c.body)
        for a in c.head:
            check_atom(a)
    else:
        raise TypeError(f"not a constraint: {c!r}")


@dataclass(frozen=True)
class ConstrainedDatabase:
    database: Database
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for c in self.constraints:
            _constraint_arity_check(c, self.database.schema)

    @property
    def facts(self) -> frozenset[Fact]:
        return self.database.facts

    @property
    def schema(self) -> Schema:
        return self.database.schema

    @property
    def profile(self) -> "ConstraintProfile":
        return classify(self.constraints)

    def with_facts(self, facts: Iterable[Fact]) -> "ConstrainedDatabase":
        return ConstrainedDatabase(self.database.restrict(facts), self.constraints)


@dataclass(frozen=True)
class ConstraintProfile:
    has_fd: bool = False
    has_id: bool = False
    has_dc: bool = False
    has_ltgd: bool = False

    @property
    def has_denial(self) -> bool:
        return self.has_fd or self.has_dc

    @property
    def has_tgd(self) -> bool:
        return self.has_id or self.has_ltgd

    @property
    def family(self) -> str:
        """'none', 'denial', 'tgd' or 'mixed'."""
        if self.has_denial and self.has_tgd:
            return "mixed"
        if self.has_denial:
            return "denial"
        if self.has_tgd:
            return "tgd"
        return "none"

    def __str__(self) -> str:
        kinds = [k for k, on in zip(("fd", "id", "dc", "lav"), self._flags()) if on]
        return "+".join(kinds) or "none"

    def _flags(self):
        return (self.has_fd, self.has_id, self.has_dc, self.has_ltgd)


def classify(constraints: Iterable[Constraint]) -> ConstraintProfile:
    kinds = {c.kind for c in constraints}
    return ConstraintProfile("fd" in kinds, "id" in kinds, "dc" in kinds, "lav" in kinds)


# ---------------------------------------------------------------- normalisation


def normalize_fd_to_dc(fd: FD, schema: Schema | int) -> list[DC]:
    """One binary DC per dependent position.

    Two R-atoms agree on the determinant and differ on the given dependent
    position. The DCs share the FD's violating pairs exactly.
    """
    n = schema if isinstance(schema, int) else schema.arity(fd.relation)
    xs = [Variable(f"X{i}") for i in range(1, n + 1)]
    out = []
    for j in fd.dependent:
        ys = [xs[i - 1] if i in fd.determinant else Variable(f"Y{i}") for i in range(1, n + 1)]
        if j in fd.determinant:
            continue  # trivially satisfied
        body = (Atom(fd.relation, tuple(xs)), Atom(fd.relation, tuple(ys)))
        out.append(DC(body, (Comparison(xs[j - 1], "!=", ys[j - 1]),)))
    return out


def normalize_id_to_ltgd(ind: ID, schema: Schema) -> LTGD:
    """source(X1..Xn) -> target(...) with fresh existentials off the matched positions."""
    n = schema.arity(ind.source)
    m = schema.arity(ind.target)
    xs = [Variable(f"X{i}") for i in range(1, n + 1)]
    where = dict(zip(ind.target_attrs, ind.source_attrs))
    head_terms = tuple(
        xs[where[k] - 1] if k in where else Variable(f"Y{k}") for k in range(1, m + 1)
    )
    return LTGD(Atom(ind.source, tuple(xs)), (Atom(ind.target, head_terms),))
