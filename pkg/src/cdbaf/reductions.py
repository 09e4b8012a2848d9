"""Hardness constructions from SAT and ∀∃-QBF, formula readers, random instances.

Both constructions use one fixed set of constraints for every formula; only
the facts encode the formula.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import FormatError
from .model import (
    DC,
    FD,
    ID,
    LTGD,
    Atom,
    Comparison,
    ConstrainedDatabase,
    ConstraintProfile,
    Constant,
    Database,
    Fact,
    Schema,
    Variable,
)

Literal = tuple[str, bool]  # (variable, positive)


@dataclass(frozen=True)
class CnfFormula:
    variables: tuple[str, ...]
    clauses: tuple[tuple[Literal, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise ValueError("repeated variable")
        for c in self.clauses:
            if not c:
                raise ValueError("empty clause")
            for v, _ in c:
                if v not in declared:
                    raise ValueError(f"undeclared variable {v!r}")

    @classmethod
    def of(cls, clauses: Iterable[Iterable[str]]) -> "CnfFormula":
        """Build from clauses written as strings: `"x"` or `"-x"`."""
        parsed = []
        names: dict[str, None] = {}
        for c in clauses:
            lits = []
            for lit in c:
                neg = lit.startswith("-")
                name = lit[1:] if neg else lit
                names.setdefault(name)
                lits.append((name, not neg))
            parsed.append(tuple(lits))
        return cls(tuple(names), tuple(parsed))

    def occurring(self) -> set[str]:
        return {v for c in self.clauses for v, _ in c}

    def evaluate(self, assignment: Mapping[str, bool]) -> bool:
        return all(any(assignment[v] == pos for v, pos in c) for c in self.clauses)


@dataclass(frozen=True)
class QbfFormula:
    """∀ universals ∃ existentials . matrix."""

    universals: tuple[str, ...]
    existentials: tuple[str, ...]
    matrix: CnfFormula

    def __post_init__(self):
        object.__setattr__(self, "universals", tuple(self.universals))
        object.__setattr__(self, "existentials", tuple(self.existentials))
        if set(self.universals) & set(self.existentials):
            raise ValueError("a variable is quantified twice")
        if set(self.universals) | set(self.existentials) != set(self.matrix.variables):
            raise ValueError("quantified variables differ from the matrix variables")


@dataclass(frozen=True)
class ReductionResult:
    cdb: ConstrainedDatabase
    distinguished: Fact
    labels: Mapping[str, Fact]
    mode: str = ""


SAT_RESERVED = ("sat",)
QBF_RESERVED = ("d", "exists")

SAT_SCHEMA = Schema({"F": 4, "C": 2}, {"F": ("t0", "u0", "t1", "u1"), "C": ("t2", "u2")})
QBF_SCHEMA = Schema(
    {"F": 4, "S": 2, "C": 2},
    {"F": ("t0", "u0", "t1", "te"), "S": ("u1", "ue"), "C": ("t2", "u2")},
)


def sat_constraints(mode: str = "SR") -> tuple:
    cs = [
        FD("F", (1,), (2,)),
        ID("F", (4,), "C", (2,)),
        ID("C", (2,), "C", (1,)),
        ID("C", (1,), "F", (3,)),
    ]
    if mode == "REP":
        cs.append(ID("F", (4,), "F", (3,)))
    elif mode != "SR":
        raise ValueError(f"unknown mode {mode!r}")
    return tuple(cs)


def qbf_constraints() -> tuple:
    return (
        FD("F", (1,), (2,)),
        ID("S", (1,), "C", (2,)),
        ID("C", (2,), "C", (1,)),
        ID("C", (1,), "F", (3,)),
        ID("F", (4,), "S", (2,)),
    )


class _Labels:
    def __init__(self):
        self.map: dict[str, Fact] = {}

    def add(self, label: str, f: Fact) -> Fact:
        base = re.sub(r"[^A-Za-z0-9_]", "_", label)
        if not re.match(r"[A-Za-z_]", base):
            base = "l" + base
        name, k = base, 1
        while name in self.map:
            k += 1
            name = f"{base}_{k}"
        self.map[name] = f
        return f


def _lit_label(var: str, pos: bool, clause: int) -> str:
    return f"{'pos' if pos else 'neg'}_{var}_{clause}"


def sat_to_instance(phi: CnfFormula, mode: str = "SR") -> ReductionResult:
    """φ is satisfiable iff the dummy fact is in some repair (SR mode),
    iff some repair is non-empty (REP mode)."""
    constraints = sat_constraints(mode)
    if not phi.clauses:
        raise ValueError("formula has no clauses")
    missing = set(phi.variables) - phi.occurring()
    if missing:
        raise ValueError(f"variables never occur: {sorted(missing)}")
    clash = set(phi.variables) & set(SAT_RESERVED)
    if clash:
        raise ValueError(f"reserved variable names: {sorted(clash)}")
    labels = _Labels()
    facts = []
    m = len(phi.clauses)
    for i, clause in enumerate(phi.clauses, 1):
        for v, pos in dict.fromkeys(clause):
            f = Fact("F", (v, "1" if pos else "0", f"c{i}", "sat"))
            facts.append(labels.add(_lit_label(v, pos, i), f))
    sd = labels.add("sd", Fact("F", ("sat",) * 4))
    facts.append(sd)
    facts.append(labels.add("sc", Fact("C", ("sat", "c1"))))
    for i in range(1, m + 1):
        nxt = f"c{i + 1}" if i < m else "sat"
        facts.append(labels.add(f"s{i}", Fact("C", (f"c{i}", nxt))))
    cdb = ConstrainedDatabase(Database(SAT_SCHEMA, frozenset(facts)), constraints)
    return ReductionResult(cdb, sd, labels.map, mode)


def qbf_to_instance(phi: QbfFormula) -> ReductionResult:
    """Φ is true iff the fact S(c1, exists) is in every repair."""
    matrix = phi.matrix
    if not matrix.clauses:
        raise ValueError("formula has no clauses")
    clash = set(matrix.variables) & set(QBF_RESERVED)
    if clash:
        raise ValueError(f"reserved variable names: {sorted(clash)}")
    labels = _Labels()
    facts = []
    universal = set(phi.universals)
    m = len(matrix.clauses)
    seen: set[Literal] = set()
    for i, clause in enumerate(matrix.clauses, 1):
        for v, pos in dict.fromkeys(clause):
            last = "d" if v in universal else "exists"
            f = Fact("F", (v, "1" if pos else "0", f"c{i}", last))
            facts.append(labels.add(_lit_label(v, pos, i), f))
            seen.add((v, pos))
    # a universal literal occurring nowhere still needs a fact to be chosen
    for v in phi.universals:
        for pos in (True, False):
            if (v, pos) not in seen:
                f = Fact("F", (v, "1" if pos else "0", "d", "d"))
                facts.append(labels.add(_lit_label(v, pos, 0), f))
    facts.append(labels.add("dF", Fact("F", ("d",) * 4)))
    facts.append(labels.add("dS", Fact("S", ("d", "d"))))
    facts.append(labels.add("dC", Fact("C", ("d", "d"))))
    ssat = labels.add("ssat", Fact("S", ("c1", "exists")))
    facts.append(ssat)
    for i in range(1, m + 1):
        nxt = f"c{i + 1}" if i < m else "c1"
        facts.append(labels.add(f"s{i}", Fact("C", (f"c{i}", nxt))))
    cdb = ConstrainedDatabase(Database(QBF_SCHEMA, frozenset(facts)), qbf_constraints())
    return ReductionResult(cdb, ssat, labels.map)


# ---------------------------------------------------------------- readers


def _dimacs_body(text: str, allow_prefix: bool):
    header = None
    prefix: list[tuple[str, list[int]]] = []
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise FormatError("bad problem line", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise FormatError("bad problem line", lineno) from None
            continue
        if header is None:
            raise FormatError("data before problem line", lineno)
        if line[0] in "ae":
            if not allow_prefix:
                raise FormatError("quantifier line in a CNF file", lineno)
            if clauses or current:
                raise FormatError("quantifier line after clauses", lineno)
            nums = _ints(line[1:].split(), lineno)
            if not nums or nums[-1] != 0 or 0 in nums[:-1]:
                raise FormatError("quantifier block must end with a single 0", lineno)
            prefix.append((line[0], nums[:-1]))
            continue
        for n in _ints(line.split(), lineno):
            if n == 0:
                clauses.append(current)
                current = []
            else:
                if abs(n) > header[0]:
                    raise FormatError(f"variable {abs(n)} exceeds declared {header[0]}", lineno)
                current.append(n)
    if header is None:
        raise FormatError("missing problem line")
    if current:
        clauses.append(current)
    if len(clauses) != header[1]:
        raise FormatError(f"declared {header[1]} clauses, found {len(clauses)}")
    if any(not c for c in clauses):
        raise FormatError("empty clause")
    return prefix, clauses


def _ints(tokens, lineno) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError("expected integers", lineno) from None


def _to_cnf(clauses: list[list[int]]) -> CnfFormula:
    nums = sorted({abs(n) for c in clauses for n in c})
    return CnfFormula(
        tuple(f"x{n}" for n in nums),
        tuple(tuple((f"x{abs(n)}", n > 0) for n in c) for c in clauses),
    )


def parse_dimacs(text: str) -> CnfFormula:
    """Variables are named x<n>; only those occurring in a clause are kept."""
    _, clauses = _dimacs_body(text, allow_prefix=False)
    return _to_cnf(clauses)


def parse_qdimacs(text: str) -> QbfFormula:
    """Accepts prefixes of the shape ∀* ∃*. Free variables count as existential
    only when there is no universal block."""
    prefix, clauses = _dimacs_body(text, allow_prefix=True)
    seen_e = False
    universals: list[int] = []
    existentials: list[int] = []
    for q, vs in prefix:
        if q == "a":
            if seen_e:
                raise FormatError("only ∀∃ prefixes are supported")
            universals += vs
        else:
            seen_e = True
            existentials += vs
    if len(set(universals + existentials)) != len(universals) + len(existentials):
        raise FormatError("a variable is quantified twice")
    occurring = {abs(n) for c in clauses for n in c}
    free = occurring - set(universals) - set(existentials)
    if free:
        if universals:
            raise FormatError(f"free variables {sorted(free)} with a universal block")
        existentials += sorted(free)
    cnf = _to_cnf(clauses)
    # quantified variables absent from the matrix are dropped
    us = tuple(f"x{n}" for n in universals if n in occurring)
    es = tuple(f"x{n}" for n in existentials if n in occurring)
    return QbfFormula(us, es, cnf)


def to_dimacs(phi: CnfFormula) -> str:
    num = {v: i for i, v in enumerate(phi.variables, 1)}
    lines = [f"p cnf {len(num)} {len(phi.clauses)}"]
    for c in phi.clauses:
        lines.append(" ".join(str(num[v] if pos else -num[v]) for v, pos in c) + " 0")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- random instances


def _vars(prefix: str, n: int) -> tuple[Variable, ...]:
    return tuple(Variable(f"{prefix}{i}") for i in range(1, n + 1))


def _random_fd(rng: random.Random, rel: str, n: int) -> FD:
    det = rng.randrange(1, n + 1)
    dep = rng.choice([p for p in range(1, n + 1) if p != det])
    return FD(rel, (det,), (dep,))


def _random_id(rng: random.Random, rels: dict[str, int]) -> ID:
    src, tgt = rng.choice(list(rels)), rng.choice(list(rels))
    return ID(src, (rng.randrange(1, rels[src] + 1),), tgt, (rng.randrange(1, rels[tgt] + 1),))


def _random_dc(rng: random.Random, rels: dict[str, int]) -> DC:
    """Two or three atoms; no two atoms can land on the same fact."""
    names = list(rels)
    if len(names) > 1 and rng.random() < 0.5:
        r, s = rng.sample(names, 2)
        xs, ys = _vars("X", rels[r]), _vars("Y", rels[s])
        # join on one position, optionally disagree on another
        i, j = rng.randrange(rels[r]), rng.randrange(rels[s])
        ys = ys[:j] + (xs[i],) + ys[j + 1:]
        cmps = []
        others = [(a, b) for a in range(rels[r]) for b in range(rels[s]) if a != i and b != j]
        if others and rng.random() < 0.6:
            a, b = rng.choice(others)
            cmps.append(Comparison(xs[a], "!=", ys[b]))
        return DC((Atom(r, xs), Atom(s, ys)), tuple(cmps))
    r = rng.choice(names)
    n = rels[r]
    xs, ys = _vars("X", n), list(_vars("Y", n))
    diff = rng.randrange(n)
    for p in range(n):
        if p != diff and rng.random() < 0.5:
            ys[p] = xs[p]
    body = [Atom(r, xs), Atom(r, tuple(ys))]
    if len(names) > 1 and rng.random() < 0.3:
        s = rng.choice([x for x in names if x != r])
        zs = list(_vars("Z", rels[s]))
        zs[rng.randrange(rels[s])] = xs[rng.randrange(n)]
        body.append(Atom(s, tuple(zs)))
    return DC(tuple(body), (Comparison(xs[diff], "!=", ys[diff]),))


def _random_ltgd(rng: random.Random, rels: dict[str, int]) -> LTGD:
    names = list(rels)
    r = rng.choice(names)
    xs = _vars("X", rels[r])
    head = []
    fresh = 0
    for _ in range(rng.choice((1, 1, 2))):
        s = rng.choice(names)
        terms = []
        for _p in range(rels[s]):
            if rng.random() < 0.5:
                terms.append(rng.choice(xs))
            else:
                fresh += 1
                terms.append(Variable(f"E{fresh}"))
        head.append(Atom(s, tuple(terms)))
    return LTGD(Atom(r, xs), tuple(head))


def random_instance(seed: int, profile: ConstraintProfile, size: int = 6) -> ConstrainedDatabase:
    """Small pseudo-random instance with one or two constraints per flagged kind."""
    if size < 1:
        raise ValueError("size must be at least 1")
    rng = random.Random(seed)
    nrel = rng.choice((1, 2, 2, 3))
    rels = {name: rng.choice((2, 2, 3)) for name in ("R", "S", "T")[:nrel]}
    domain = [str(c) for c in "abc"[: rng.choice((2, 3))]]
    facts: set[Fact] = set()
    attempts = 0
    while len(facts) < size and attempts < 50 * size:
        attempts += 1
        r = rng.choice(list(rels))
        facts.add(Fact(r, tuple(rng.choice(domain) for _ in range(rels[r]))))
    if profile.has_tgd and facts and rng.random() < 0.8:
        # a value seen nowhere else tends to leave some source fact unsupported
        victim = rng.choice(sorted(facts))
        facts.discard(victim)
        pos = rng.randrange(len(victim.values)) if victim.values else 0
        facts.add(Fact(victim.relation, victim.values[:pos] + ("z",) + victim.values[pos + 1:]))
    constraints = []
    if profile.has_fd:
        for _ in range(rng.choice((1, 1, 2))):
            r = rng.choice(list(rels))
            constraints.append(_random_fd(rng, r, rels[r]))
    if profile.has_id:
        for _ in range(rng.choice((1, 1, 2))):
            constraints.append(_random_id(rng, rels))
    if profile.has_dc:
        for _ in range(rng.choice((1, 1, 2))):
            constraints.append(_random_dc(rng, rels))
    if profile.has_ltgd:
        for _ in range(rng.choice((1, 1, 2))):
            constraints.append(_random_ltgd(rng, rels))
    schema = Schema(rels)
    return ConstrainedDatabase(Database(schema, frozenset(facts)), tuple(constraints))


def profile_from_string(text: str) -> ConstraintProfile:
    """'fd+id', 'dc,lav', 'mixed', ... into a profile."""
    kinds = set(re.split(r"[+,\s]+", text.strip().lower())) - {""}
    if kinds == {"mixed"} or kinds == {"all"}:
        kinds = {"fd", "id", "dc", "lav"}
    unknown = kinds - {"fd", "id", "dc", "lav", "ltgd", "none"}
    if unknown:
        raise ValueError(f"unknown constraint kinds {sorted(unknown)}")
    return ConstraintProfile("fd" in kinds, "id" in kinds, "dc" in kinds, bool(kinds & {"lav", "ltgd"}))
