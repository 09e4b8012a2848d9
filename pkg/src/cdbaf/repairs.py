"""Subset repairs, computed directly or through argumentation.

`all_repairs` is the direct route. It never builds a framework:

* consistency with FDs/DCs is closed under subsets, so we enumerate the
  maximal sets M containing no conflict by include/exclude search;
* consistency with IDs/LTGDs is closed under unions, so each M has a
  largest subset consistent with them (its core), reached by repeatedly
  dropping source facts that lack a head match;
* the repairs are the subset-maximal cores.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import BudgetExceeded
from .framework import AuxArg, FactArg, Setaf, build_framework, preprocess
from .grounding import FactIndex, compute_conflicts, unsupported_sources
from .model import DENIAL_KINDS, ConstrainedDatabase, Fact
from .semantics import DEFAULT_MAX_ARGS, Semantics, extensions

DEFAULT_MAX_FACTS = 20
ROUTES = ("argumentation", "oracle")


@dataclass(frozen=True)
class RepairSet:
    repairs: tuple[frozenset[Fact], ...]

    @classmethod
    def of(cls, sets: Iterable[Iterable[Fact]]) -> "RepairSet":
        uniq = {frozenset(s) for s in sets}
        return cls(tuple(sorted(uniq, key=lambda s: sorted(s))))

    def __iter__(self) -> Iterator[frozenset[Fact]]:
        return iter(self.repairs)

    def __len__(self) -> int:
        return len(self.repairs)

    def __contains__(self, s: object) -> bool:
        return frozenset(s) in self.repairs  # type: ignore[arg-type]

    def as_set(self) -> set[frozenset[Fact]]:
        return set(self.repairs)


def _maximal_denial_consistent(facts: list[Fact], conflicts: list[frozenset[Fact]]) -> list[frozenset[Fact]]:
    """Maximal subsets of `facts` containing no conflict, by include/exclude search."""
    if not conflicts:
        return [frozenset(facts)]
    pos = {f: i for i, f in enumerate(facts)}
    masks = [sum(1 << pos[f] for f in c) for c in conflicts]
    # for every fact, the rest of each conflict it belongs to
    partners = [[m & ~(1 << i) for m in masks if m >> i & 1] for i in range(len(facts))]
    n = len(facts)
    full = (1 << n) - 1
    out = []

    def blocked(e: int, allowed: int) -> bool:
        return any(p & ~allowed == 0 for p in partners[e])

    def dfs(k: int, chosen: int, excluded: list[int]):
        if k == n:
            out.append(frozenset(facts[i] for i in range(n) if chosen >> i & 1))
            return
        if not blocked(k, chosen):
            dfs(k + 1, chosen | 1 << k, excluded)
        # f may only stay out if something still able to enter the set clashes with it;
        # once no fact is undecided this is exactly maximality
        ex = excluded + [k]
        allowed = chosen | (full & ~((1 << (k + 1)) - 1))
        if all(blocked(e, allowed) for e in ex):
            dfs(k + 1, chosen, ex)

    dfs(0, 0, [])
    return out


def tgd_core(facts: Iterable[Fact], tgds) -> frozenset[Fact]:
    """Largest subset satisfying every ID/LTGD."""
    current = set(facts)
    while True:
        bad = set()
        index = FactIndex(current)
        for c in tgds:
            bad.update(unsupported_sources(c, index))
        if not bad:
            return frozenset(current)
        current -= bad


def all_repairs(cdb: ConstrainedDatabase, max_facts: int | None = DEFAULT_MAX_FACTS) -> RepairSet:
    if max_facts is not None and len(cdb.facts) > max_facts:
        raise BudgetExceeded("repair enumeration", len(cdb.facts), max_facts)
    denials = [c for c in cdb.constraints if c.kind in DENIAL_KINDS]
    tgds = [c for c in cdb.constraints if c.kind not in DENIAL_KINDS]
    conflicts = [c.facts for c in _quiet_conflicts(cdb, strict_global=True)] if denials else []
    cores = {tgd_core(m, tgds) for m in _maximal_denial_consistent(sorted(cdb.facts), conflicts)}
    maximal = [c for c in cores if not any(c < d for d in cores)]
    return RepairSet.of(maximal)


def repairs_via_argumentation(
    cdb: ConstrainedDatabase,
    max_args: int | None = DEFAULT_MAX_ARGS,
    use_preprocess: bool = False,
    force_setaf: bool = False,
) -> RepairSet:
    """Preferred extensions of the translated framework, read back as fact sets."""
    setaf = build_framework(cdb, force_setaf=force_setaf)
    if use_preprocess:
        setaf, _ = preprocess(setaf)
    return RepairSet.of(_fact_sets(extensions(setaf, Semantics.PREF, max_args)))


def _fact_sets(exts) -> list[frozenset[Fact]]:
    out = []
    for e in exts:
        assert not any(isinstance(a, AuxArg) for a in e.arguments), "auxiliary argument accepted"
        out.append(frozenset(a.fact for a in e.arguments if isinstance(a, FactArg)))
    return out


def _route(route: str) -> str:
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")
    return route


def _repairs(cdb, route, max_args, max_facts) -> RepairSet:
    if _route(route) == "oracle":
        return all_repairs(cdb, max_facts)
    return repairs_via_argumentation(cdb, max_args)


def rep_nonempty(cdb, route="argumentation", max_args=DEFAULT_MAX_ARGS, max_facts=DEFAULT_MAX_FACTS) -> bool:
    """Whether some repair is non-empty."""
    return any(_repairs(cdb, route, max_args, max_facts))


def in_some_repair(cdb, fact: Fact, route="argumentation", max_args=DEFAULT_MAX_ARGS, max_facts=DEFAULT_MAX_FACTS) -> bool:
    return any(fact in r for r in _repairs(cdb, route, max_args, max_facts))


def in_all_repairs(cdb, fact: Fact, route="argumentation", max_args=DEFAULT_MAX_ARGS, max_facts=DEFAULT_MAX_FACTS) -> bool:
    return all(fact in r for r in _repairs(cdb, route, max_args, max_facts))


def exists_repair_of_size(cdb, k: int, route="argumentation", max_args=DEFAULT_MAX_ARGS, max_facts=DEFAULT_MAX_FACTS) -> bool:
    """Whether some repair has at least k facts."""
    return any(len(r) >= k for r in _repairs(cdb, route, max_args, max_facts))


# ---------------------------------------------------------------- equivalence report


@dataclass
class SemanticsCheck:
    name: str
    extensions: list[frozenset[Fact]]
    matches: bool
    required: bool

    @property
    def status(self) -> str:
        if self.matches:
            return "ok"
        return "MISMATCH" if self.required else "differs"


@dataclass
class EquivalenceReport:
    family: str
    profile: str
    facts: int
    arguments: int
    repairs: RepairSet
    checks: list[SemanticsCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.matches for c in self.checks if c.required)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "profile": self.profile,
            "facts": self.facts,
            "arguments": self.arguments,
            "ok": self.ok,
            "repairs": [sorted(map(str, r)) for r in self.repairs],
            "checks": [
                {
                    "name": c.name,
                    "required": c.required,
                    "status": c.status,
                    "extensions": [sorted(map(str, e)) for e in c.extensions],
                }
                for c in self.checks
            ],
        }


def check_equivalence(
    cdb: ConstrainedDatabase,
    max_args: int | None = DEFAULT_MAX_ARGS,
    max_facts: int | None = DEFAULT_MAX_FACTS,
) -> EquivalenceReport:
    """Compare the direct repairs with each semantics on the translated framework.

    Which rows must match depends on the constraint kinds: all of naive,
    preferred and stable for FD/DC-only input, preferred (plus uniqueness and
    the preprocessing survivors) for ID/LTGD-only input, preferred otherwise.
    """
    profile = cdb.profile
    family = profile.family
    repairs = all_repairs(cdb, max_facts)
    setaf = build_framework(cdb)
    target = repairs.as_set()
    report = EquivalenceReport(family, str(profile), len(cdb.facts), len(setaf.arguments), repairs)

    singletons = any(len(c.facts) == 1 for c in _quiet_conflicts(cdb))
    for sem in (Semantics.NAIVE, Semantics.PREF, Semantics.STAB):
        sets = _fact_sets(extensions(setaf, sem, max_args))
        if sem is Semantics.PREF:
            required = True
        elif family in ("denial", "none"):
            # a self-contradictory fact is unattacked by anything but itself,
            # so it blocks stability while leaving the repairs untouched
            required = not (sem is Semantics.STAB and singletons)
        else:
            required = False
        report.checks.append(SemanticsCheck(sem.value, sets, set(sets) == target, required))

    if family == "tgd":
        report.checks.append(SemanticsCheck("unique", [], len(repairs) == 1, True))
        reduced, _ = preprocess(setaf)
        survivors = frozenset(a.fact for a in reduced.arguments if isinstance(a, FactArg))
        report.checks.append(SemanticsCheck("preprocess", [survivors], {survivors} == target, True))
    return report


def _quiet_conflicts(cdb, strict_global: bool = False):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return compute_conflicts(cdb, strict_global)
