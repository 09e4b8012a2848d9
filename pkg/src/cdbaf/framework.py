"""Argumentation frameworks with collective attacks, built from constrained databases.

Arguments are facts of the database, auxiliary arguments standing for an
inclusion-type constraint applied to one of its source facts, or plain names
for frameworks read from apx files.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import FormatError
from .grounding import (
    FactIndex,
    compute_conflicts,
    compute_supports,
    id_supporters,
    source_facts,
)
from .model import FD, ID, LTGD, ConstrainedDatabase, Fact


@dataclass(frozen=True)
class FactArg:
    fact: Fact

    def __str__(self) -> str:
        return str(self.fact)


@dataclass(frozen=True)
class AuxArg:
    """Stands for the constraint at `constraint_index` applied to `fact`."""

    fact: Fact
    constraint_index: int

    def __str__(self) -> str:
        return f"{self.fact}#c{self.constraint_index}"


@dataclass(frozen=True)
class NamedArg:
    name: str

    def __str__(self) -> str:
        return self.name


Argument = Union[FactArg, AuxArg, NamedArg]


def argument_key(a: Argument) -> tuple:
    if isinstance(a, FactArg):
        return (0, str(a.fact), -1)
    if isinstance(a, AuxArg):
        return (1, str(a.fact), a.constraint_index)
    return (2, a.name, -1)


def sort_arguments(args: Iterable[Argument]) -> list[Argument]:
    return sorted(args, key=argument_key)


@dataclass(frozen=True)
class Attack:
    source: frozenset
    target: Argument

    def __post_init__(self):
        object.__setattr__(self, "source", frozenset(self.source))

    @property
    def is_self(self) -> bool:
        return self.target in self.source

    def sort_key(self):
        return (argument_key(self.target), len(self.source), [argument_key(a) for a in sort_arguments(self.source)])


@dataclass(frozen=True)
class Setaf:
    arguments: frozenset
    attacks: frozenset
    origins: Mapping[Attack, tuple[str, ...]] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "arguments", frozenset(self.arguments))
        object.__setattr__(self, "attacks", frozenset(self.attacks))
        for att in self.attacks:
            if not att.source:
                raise ValueError("attack with empty source")
            if not att.source <= self.arguments or att.target not in self.arguments:
                raise ValueError(f"attack {att} mentions unknown arguments")

    def sorted_arguments(self) -> list[Argument]:
        return sort_arguments(self.arguments)

    def sorted_attacks(self) -> list[Attack]:
        return sorted(self.attacks, key=Attack.sort_key)

    def is_plain(self) -> bool:
        return all(len(a.source) == 1 for a in self.attacks)

    def fact_arguments(self) -> list[FactArg]:
        return [a for a in self.sorted_arguments() if isinstance(a, FactArg)]

    def aux_arguments(self) -> list[AuxArg]:
        return [a for a in self.sorted_arguments() if isinstance(a, AuxArg)]


class _Builder:
    def __init__(self, args: Iterable[Argument] = ()):
        self.args: set = set(args)
        self.origins: dict[Attack, list[str]] = {}

    def attack(self, source: Iterable[Argument], target: Argument, why: str):
        att = Attack(frozenset(source), target)
        tags = self.origins.setdefault(att, [])
        if why not in tags:
            tags.append(why)

    def build(self) -> Setaf:
        return Setaf(self.args, self.origins.keys(), {k: tuple(v) for k, v in self.origins.items()})


def _fact_args(cdb: ConstrainedDatabase) -> list[FactArg]:
    return [FactArg(f) for f in sorted(cdb.facts)]


def _add_conflicts(b: _Builder, cdb: ConstrainedDatabase):
    for cf in compute_conflicts(cdb):
        for t in cf.facts:
            # a fact violating a constraint on its own attacks itself
            rest = (cf.facts - {t}) or {t}
            b.attack((FactArg(x) for x in rest), FactArg(t), f"conflict:c{cf.witness}")


def _add_supports(b: _Builder, cdb: ConstrainedDatabase):
    index = FactIndex(cdb.facts)
    for i, c in enumerate(cdb.constraints):
        if not isinstance(c, (LTGD, ID)):
            continue
        for s in source_facts(c, index):
            aux = AuxArg(s, i)
            b.args.add(aux)
            b.attack([aux], FactArg(s), f"aux:c{i}")
            b.attack([aux], aux, f"aux:c{i}")
            if isinstance(c, ID):
                supports = [frozenset([t]) for t in id_supporters(c, s, cdb.facts)]
            else:
                supports = [sp.facts for sp in compute_supports(cdb, c, s)]
            for sup in supports:
                b.attack((FactArg(t) for t in sup), aux, f"support:c{i}")


def build_dc_setaf(cdb: ConstrainedDatabase) -> Setaf:
    """Each conflict C yields attacks (C - {t}, t) for every t in C."""
    b = _Builder(_fact_args(cdb))
    _add_conflicts(b, cdb)
    return b.build()


def build_ltgd_setaf(cdb: ConstrainedDatabase) -> Setaf:
    """Self-attacking auxiliary argument per source fact, attacked by each support."""
    b = _Builder(_fact_args(cdb))
    _add_supports(b, cdb)
    return b.build()


def build_combined_setaf(cdb: ConstrainedDatabase) -> Setaf:
    b = _Builder(_fact_args(cdb))
    _add_conflicts(b, cdb)
    _add_supports(b, cdb)
    return b.build()


def _require(cdb: ConstrainedDatabase, allowed: tuple[type, ...], what: str):
    for c in cdb.constraints:
        if not isinstance(c, allowed):
            raise ValueError(f"{what} accepts only {', '.join(t.__name__ for t in allowed)}; got {c}")


def build_fd_af(cdb: ConstrainedDatabase) -> Setaf:
    """Symmetric attacks between facts jointly violating an FD."""
    _require(cdb, (FD,), "build_fd_af")
    b = _Builder(_fact_args(cdb))
    _add_conflicts(b, cdb)
    return b.build()


def build_id_af(cdb: ConstrainedDatabase) -> Setaf:
    """Every target fact agreeing with a source fact attacks its auxiliary argument."""
    _require(cdb, (ID,), "build_id_af")
    b = _Builder(_fact_args(cdb))
    _add_supports(b, cdb)
    return b.build()


def build_combined_af(cdb: ConstrainedDatabase) -> Setaf:
    _require(cdb, (FD, ID), "build_combined_af")
    return build_combined_setaf(cdb)


def build_framework(cdb: ConstrainedDatabase, force_setaf: bool = False) -> Setaf:
    """Pick the construction matching the constraint kinds present."""
    p = cdb.profile
    if not force_setaf and not p.has_dc and not p.has_ltgd:
        if p.has_fd and p.has_id:
            return build_combined_af(cdb)
        if p.has_fd:
            return build_fd_af(cdb)
        if p.has_id:
            return build_id_af(cdb)
    if p.has_tgd and p.has_denial:
        return build_combined_setaf(cdb)
    if p.has_tgd:
        return build_ltgd_setaf(cdb)
    return build_dc_setaf(cdb)


# ---------------------------------------------------------------- transformations


def strip_self_attacks(setaf: Setaf) -> Setaf:
    keep = [a for a in setaf.attacks if not a.is_self]
    return Setaf(setaf.arguments, keep, {a: setaf.origins[a] for a in keep if a in setaf.origins})


def restrict(setaf: Setaf, removed: Iterable[Argument]) -> Setaf:
    """Drop arguments and every attack touching them."""
    gone = set(removed)
    args = setaf.arguments - gone
    keep = [a for a in setaf.attacks if a.target not in gone and not (a.source & gone)]
    return Setaf(args, keep, {a: setaf.origins[a] for a in keep if a in setaf.origins})


def preprocess(setaf: Setaf, rng: random.Random | None = None) -> tuple[Setaf, frozenset[Fact]]:
    """Remove facts whose auxiliary argument cannot be defended.

    While some auxiliary argument has no attacker other than attack sets
    containing itself, its fact, all auxiliary arguments of that fact and
    every attack touching them are removed. With `rng`, one removable
    argument is picked at random per step, otherwise all current ones are
    processed in argument order. The result does not depend on the order.
    """
    alive = set(setaf.arguments)
    aux_of: dict[Fact, list[AuxArg]] = {}
    for a in setaf.arguments:
        if isinstance(a, AuxArg):
            aux_of.setdefault(a.fact, []).append(a)
    incoming: dict[Argument, list[Attack]] = {}
    for att in setaf.attacks:
        incoming.setdefault(att.target, []).append(att)
    removed: set[Fact] = set()

    def removable(aux: AuxArg) -> bool:
        return not any(
            aux not in att.source and att.source <= alive for att in incoming.get(aux, ())
        )

    while True:
        cands = [a for a in sort_arguments(x for x in alive if isinstance(x, AuxArg)) if removable(a)]
        if not cands:
            break
        batch = [rng.choice(cands)] if rng is not None else cands
        for aux in batch:
            if aux not in alive:
                continue
            f = aux.fact
            removed.add(f)
            alive.discard(FactArg(f))
            for other in aux_of.get(f, []):
                alive.discard(other)
    reduced = restrict(setaf, setaf.arguments - alive)
    return reduced, frozenset(removed)


# ---------------------------------------------------------------- apx


def _quote(name: str) -> str:
    if re.fullmatch(r"[a-z][A-Za-z0-9_]*", name):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def argument_names(setaf: Setaf, labels: Mapping[str, Fact] | None = None) -> dict[Argument, str]:
    """Stable printable names; labelled facts use their label."""
    fact_name: dict[Fact, str] = {}
    for lab, f in sorted((labels or {}).items()):
        fact_name.setdefault(f, lab)
    out = {}
    for a in setaf.sorted_arguments():
        if isinstance(a, FactArg):
            out[a] = fact_name.get(a.fact, str(a.fact))
        elif isinstance(a, AuxArg):
            out[a] = f"{fact_name.get(a.fact, str(a.fact))}__c{a.constraint_index}"
        else:
            out[a] = a.name
    if len(set(out.values())) != len(out):
        raise ValueError("argument names are not unique")
    return out


def to_apx(setaf: Setaf, labels: Mapping[str, Fact] | None = None) -> str:
    """`arg(x).`, `att(a,b).` for singleton sources, `satt([a,b],c).` otherwise."""
    names = argument_names(setaf, labels)
    lines = [f"arg({_quote(names[a])})." for a in setaf.sorted_arguments()]
    for att in setaf.sorted_attacks():
        tgt = _quote(names[att.target])
        srcs = [_quote(names[a]) for a in sort_arguments(att.source)]
        if len(srcs) == 1:
            lines.append(f"att({srcs[0]},{tgt}).")
        else:
            lines.append(f"satt([{','.join(srcs)}],{tgt}).")
    return "\n".join(lines) + "\n"


_APX_NAME = r'(?:[A-Za-z0-9_]+|"(?:[^"\\]|\\.)*")'
_APX_LINE = re.compile(
    rf"\s*(?:(arg)\(\s*({_APX_NAME})\s*\)|(att)\(\s*({_APX_NAME})\s*,\s*({_APX_NAME})\s*\)"
    rf"|(satt)\(\s*\[\s*({_APX_NAME}(?:\s*,\s*{_APX_NAME})*)\s*\]\s*,\s*({_APX_NAME})\s*\))\s*\.\s*"
)


def _unquote(tok: str) -> str:
    if tok.startswith('"'):
        return re.sub(r"\\(.)", r"\1", tok[1:-1])
    return tok


def from_apx(text: str) -> Setaf:
    """Read apx text; arguments become NamedArg."""
    args: dict[str, NamedArg] = {}
    raw_attacks: list[tuple[list[str], str, int]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        m = _APX_LINE.fullmatch(line)
        if not m:
            raise FormatError(f"cannot read {line!r}", lineno)
        if m.group(1):
            n = _unquote(m.group(2))
            args[n] = NamedArg(n)
        elif m.group(3):
            raw_attacks.append(([_unquote(m.group(4))], _unquote(m.group(5)), lineno))
        else:
            srcs = [_unquote(s) for s in re.findall(_APX_NAME, m.group(7))]
            raw_attacks.append((srcs, _unquote(m.group(8)), lineno))
    attacks = []
    for srcs, tgt, lineno in raw_attacks:
        for n in srcs + [tgt]:
            if n not in args:
                raise FormatError(f"attack mentions undeclared argument {n!r}", lineno)
        attacks.append(Attack(frozenset(args[s] for s in srcs), args[tgt]))
    return Setaf(args.values(), attacks)


def rename(setaf: Setaf, mapping: Mapping[Argument, Argument]) -> Setaf:
    """Apply an injective renaming of arguments."""
    def m(a):
        return mapping.get(a, a)

    atts = {}
    for att in setaf.attacks:
        new = Attack(frozenset(m(x) for x in att.source), m(att.target))
        atts[new] = setaf.origins.get(att, ())
    return Setaf({m(a) for a in setaf.arguments}, atts.keys(), atts)
