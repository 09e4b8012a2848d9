"""Homomorphisms, constraint satisfaction, conflicts and supports."""

from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .model import (
    DC,
    FD,
    ID,
    LTGD,
    Atom,
    Comparison,
    ConstrainedDatabase,
    Constant,
    Constraint,
    Database,
    Fact,
    Schema,
    Variable,
    normalize_fd_to_dc,
    normalize_id_to_ltgd,
)

Assignment = dict  # variable name -> constant


class FactIndex:
    """Facts grouped by relation, each group sorted."""

    def __init__(self, facts: Iterable[Fact]):
        groups: dict[str, list[Fact]] = defaultdict(list)
        for f in facts:
            groups[f.relation].append(f)
        self._groups = {k: sorted(v) for k, v in groups.items()}

    def relation(self, name: str) -> list[Fact]:
        return self._groups.get(name, [])


def _as_index(db) -> FactIndex:
    if isinstance(db, FactIndex):
        return db
    if isinstance(db, ConstrainedDatabase):
        return FactIndex(db.facts)
    if isinstance(db, Database):
        return FactIndex(db.facts)
    return FactIndex(db)


def match_atom(atom: Atom, fact: Fact, binding: Mapping[str, str]) -> dict | None:
    """Extend `binding` so that atom maps onto fact, or return None."""
    if atom.relation != fact.relation or len(atom.terms) != len(fact.values):
        return None
    out = dict(binding)
    for t, v in zip(atom.terms, fact.values):
        if isinstance(t, Constant):
            if t.value != v:
                return None
        else:
            have = out.get(t.name)
            if have is None:
                out[t.name] = v
            elif have != v:
                return None
    return out


def _homs(atoms: tuple[Atom, ...], index: FactIndex, binding: dict) -> Iterator[tuple[dict, tuple[Fact, ...]]]:
    if not atoms:
        yield binding, ()
        return
    first, rest = atoms[0], atoms[1:]
    for f in index.relation(first.relation):
        b = match_atom(first, f, binding)
        if b is None:
            continue
        for b2, image in _homs(rest, index, b):
            yield b2, (f,) + image


def enumerate_homomorphisms(
    atoms: Iterable[Atom], db, fixed: Mapping[str, str] | None = None
) -> list[Assignment]:
    """All assignments mapping every atom into db, extending `fixed`.

    Sorted lexicographically on (variable, value) pairs.
    """
    index = _as_index(db)
    seen = {}
    for b, _ in _homs(tuple(atoms), index, dict(fixed or {})):
        seen.setdefault(tuple(sorted(b.items())), b)
    return [seen[k] for k in sorted(seen)]


def _value(t, b: Mapping[str, str]) -> str:
    return t.value if isinstance(t, Constant) else b[t.name]


def comparisons_hold(cmps: Iterable[Comparison], b: Mapping[str, str]) -> bool:
    for c in cmps:
        eq = _value(c.left, b) == _value(c.right, b)
        if eq != (c.op == "="):
            return False
    return True


def dc_images(dc: DC, db) -> Iterator[tuple[Fact, ...]]:
    """Fact tuples onto which the DC body maps with its comparisons true."""
    for b, image in _homs(dc.body, _as_index(db), {}):
        if comparisons_hold(dc.comparisons, b):
            yield image


def _project(f: Fact, positions: tuple[int, ...]) -> tuple[str, ...]:
    return tuple(f.values[p - 1] for p in positions)


def fd_violated_by(fd: FD, s: Fact, t: Fact) -> bool:
    if s.relation != fd.relation or t.relation != fd.relation:
        return False
    return _project(s, fd.determinant) == _project(t, fd.determinant) and _project(
        s, fd.dependent
    ) != _project(t, fd.dependent)


def source_facts(c: LTGD | ID, db) -> list[Fact]:
    """Facts of db that the constraint's body can be matched to."""
    index = _as_index(db)
    if isinstance(c, ID):
        return list(index.relation(c.source))
    return [f for f in index.relation(c.body.relation) if match_atom(c.body, f, {}) is not None]


def has_head_match(c: LTGD, s: Fact, index: FactIndex) -> bool:
    b = match_atom(c.body, s, {})
    if b is None:
        return True  # not a source fact; nothing to satisfy
    return next(_homs(c.head, index, b), None) is not None


def unsupported_sources(c: LTGD | ID, db) -> list[Fact]:
    """Source facts whose body match cannot be extended to the head."""
    index = _as_index(db)
    if isinstance(c, ID):
        targets = {_project(t, c.target_attrs) for t in index.relation(c.target)}
        return [s for s in index.relation(c.source) if _project(s, c.source_attrs) not in targets]
    return [s for s in source_facts(c, index) if not has_head_match(c, s, index)]


def satisfies(db, c: Constraint) -> bool:
    """Whether the set of facts `db` satisfies constraint c."""
    index = _as_index(db)
    if isinstance(c, FD):
        groups: dict[tuple, tuple] = {}
        for f in index.relation(c.relation):
            key = _project(f, c.determinant)
            val = _project(f, c.dependent)
            if groups.setdefault(key, val) != val:
                return False
        return True
    if isinstance(c, DC):
        return next(dc_images(c, index), None) is None
    if isinstance(c, (ID, LTGD)):
        return not unsupported_sources(c, index)
    raise TypeError(f"not a constraint: {c!r}")


def is_consistent(db, constraints: Iterable[Constraint]) -> bool:
    index = _as_index(db)
    return all(satisfies(index, c) for c in constraints)


# ---------------------------------------------------------------- conflicts


@dataclass(frozen=True)
class Conflict:
    """A set of facts jointly violating the constraint at index `witness`."""

    facts: frozenset[Fact]
    witness: int

    def sort_key(self):
        return (len(self.facts), sorted(self.facts), self.witness)


def _minimal(sets: Iterable[frozenset]) -> list[frozenset]:
    uniq = sorted(set(sets), key=lambda s: (len(s), sorted(s)))
    kept: list[frozenset] = []
    for s in uniq:
        if not any(k <= s for k in kept):
            kept.append(s)
    return kept


class SingletonConflictWarning(UserWarning):
    pass


def compute_conflicts(cdb: ConstrainedDatabase, strict_global: bool = False) -> list[Conflict]:
    """Conflicts of the FD/DC constraints of cdb; TGD-like constraints are ignored.

    A conflict is subset-minimal among the violation sets of its own
    constraint. Equal fact sets found for several constraints are reported
    once, with the lowest constraint index as witness. With `strict_global`,
    only sets minimal across all constraints are kept.
    """
    index = FactIndex(cdb.facts)
    found: dict[frozenset, int] = {}
    for i, c in enumerate(cdb.constraints):
        if isinstance(c, FD):
            dcs = normalize_fd_to_dc(c, cdb.schema)
        elif isinstance(c, DC):
            dcs = [c]
        else:
            continue
        images = [frozenset(img) for dc in dcs for img in dc_images(dc, index)]
        for s in _minimal(images):
            found.setdefault(s, i)
    sets = _minimal(found) if strict_global else list(found)
    out = sorted((Conflict(s, found[s]) for s in sets), key=Conflict.sort_key)
    for cf in out:
        if len(cf.facts) == 1:
            (f,) = cf.facts
            warnings.warn(f"fact {f} violates constraint {cf.witness} on its own", SingletonConflictWarning)
    return out


# ---------------------------------------------------------------- supports


@dataclass(frozen=True)
class SupportSet:
    facts: frozenset[Fact]


def _as_ltgd(c: LTGD | ID, schema: Schema) -> LTGD:
    return normalize_id_to_ltgd(c, schema) if isinstance(c, ID) else c


def compute_supports(
    cdb: ConstrainedDatabase, c: LTGD | ID, s: Fact, minimize: bool = False
) -> list[SupportSet]:
    """Images of the head under extensions of the body match on s.

    Raises ValueError if s is not a source fact of c.
    """
    ltgd = _as_ltgd(c, cdb.schema)
    b = match_atom(ltgd.body, s, {})
    if b is None or s not in cdb.facts:
        raise ValueError(f"{s} is not a source fact of {c}")
    sets = {frozenset(img) for _, img in _homs(ltgd.head, FactIndex(cdb.facts), b)}
    if minimize:
        sets = set(_minimal(sets))
    return [SupportSet(x) for x in sorted(sets, key=lambda x: (len(x), sorted(x)))]


def id_supporters(ind: ID, s: Fact, facts: Iterable[Fact]) -> list[Fact]:
    """Target facts agreeing with s on the ID's attributes, found by projection."""
    if s.relation != ind.source:
        raise ValueError(f"{s} is not a source fact of {ind}")
    want = _project(s, ind.source_attrs)
    return sorted(
        t for t in facts if t.relation == ind.target and _project(t, ind.target_attrs) == want
    )
