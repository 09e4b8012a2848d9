"""Extension semantics for SETAFs: conflict-free, naive, admissible, preferred, stable.

Sets of arguments are handled as bitmasks over the sorted argument list.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import BudgetExceeded
from .framework import Argument, Setaf, argument_key, sort_arguments


class Semantics(str, Enum):
    CF = "cf"
    NAIVE = "naive"
    ADM = "adm"
    PREF = "pref"
    STAB = "stab"

    @classmethod
    def parse(cls, name: "str | Semantics") -> "Semantics":
        if isinstance(name, Semantics):
            return name
        aliases = {
            "conflict-free": "cf", "conflict_free": "cf", "admissible": "adm",
            "preferred": "pref", "stable": "stab",
        }
        return cls(aliases.get(name, name))


BUDGETED = (Semantics.NAIVE, Semantics.PREF, Semantics.STAB)
DEFAULT_MAX_ARGS = 24


@dataclass(frozen=True)
class Extension:
    arguments: frozenset
    semantics: Semantics

    def sorted(self) -> list[Argument]:
        return sort_arguments(self.arguments)

    def key(self):
        return [argument_key(a) for a in self.sorted()]


class _Compiled:
    def __init__(self, setaf: Setaf):
        self.args = setaf.sorted_arguments()
        self.index = {a: i for i, a in enumerate(self.args)}
        self.n = len(self.args)
        self.full = (1 << self.n) - 1
        self.attacks: list[tuple[int, int]] = []
        self.involving: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        self.incoming: list[list[int]] = [[] for _ in range(self.n)]
        self.self_attacking = 0
        for att in setaf.attacks:
            src = 0
            for a in att.source:
                src |= 1 << self.index[a]
            t = self.index[att.target]
            pair = (src, t)
            self.attacks.append(pair)
            self.incoming[t].append(src)
            touched = src | (1 << t)
            for i in _bits(touched):
                self.involving[i].append(pair)
            if src == 1 << t:
                self.self_attacking |= 1 << t

    def mask(self, args: Iterable[Argument]) -> int:
        m = 0
        for a in args:
            m |= 1 << self.index[a]
        return m

    def unmask(self, m: int) -> frozenset:
        return frozenset(self.args[i] for i in _bits(m))

    def conflict_free(self, s: int) -> bool:
        for src, t in self.attacks:
            if src & s == src and (s >> t) & 1:
                return False
        return True

    def cf_with(self, s: int, i: int) -> bool:
        """Whether no attack within s | {i} involves i."""
        s2 = s | (1 << i)
        for src, t in self.involving[i]:
            if src & s2 == src and (s2 >> t) & 1:
                return False
        return True

    def attacked_by(self, s: int) -> int:
        out = 0
        for src, t in self.attacks:
            if src & s == src:
                out |= 1 << t
        return out

    def defends(self, s: int, i: int, hit: int | None = None) -> bool:
        if hit is None:
            hit = self.attacked_by(s)
        return all(src & hit for src in self.incoming[i])

    def admissible(self, s: int) -> bool:
        if not self.conflict_free(s):
            return False
        hit = self.attacked_by(s)
        return all(self.defends(s, i, hit) for i in _bits(s))

    def stable(self, s: int) -> bool:
        return self.conflict_free(s) and (self.attacked_by(s) | s) == self.full

    # -- enumeration

    def conflict_free_sets(self) -> list[int]:
        out = []

        def dfs(i: int, s: int):
            if i == self.n:
                out.append(s)
                return
            if not (self.self_attacking >> i) & 1 and self.cf_with(s, i):
                dfs(i + 1, s | (1 << i))
            dfs(i + 1, s)

        dfs(0, 0)
        return out

    def naive_sets(self) -> list[int]:
        cands = [i for i in range(self.n) if not (self.self_attacking >> i) & 1]
        rest = [0] * (len(cands) + 1)
        for k in range(len(cands) - 1, -1, -1):
            rest[k] = rest[k + 1] | (1 << cands[k])
        out = []

        def blocked_possible(s: int, k: int, excluded: list[int]) -> bool:
            # each excluded argument must still be able to clash with the final set
            allowed = s | rest[k]
            return all(not self.cf_with(allowed, e) for e in excluded)

        def dfs(k: int, s: int, excluded: list[int]):
            if k == len(cands):
                if all(not self.cf_with(s, e) for e in excluded):
                    out.append(s)
                return
            i = cands[k]
            if self.cf_with(s, i):
                dfs(k + 1, s | (1 << i), excluded)
            ex = excluded + [i]
            if blocked_possible(s, k + 1, ex):
                dfs(k + 1, s, ex)

        dfs(0, 0, [])
        return out

    def admissible_core(self, s: int) -> int:
        """Largest admissible subset of a conflict-free set s."""
        while True:
            hit = self.attacked_by(s)
            keep = s
            for i in _bits(s):
                if not self.defends(s, i, hit):
                    keep &= ~(1 << i)
            if keep == s:
                return s
            s = keep

    def preferred_sets(self) -> list[int]:
        # Every preferred extension lies inside some naive extension N and then
        # equals the admissible core of N; the maximal cores are exactly the
        # preferred extensions.
        cores = sorted({self.admissible_core(nv) for nv in self.naive_sets()}, key=_popcount, reverse=True)
        out: list[int] = []
        for c in cores:
            if not any(c & o == c for o in out):
                out.append(c)
        return out

    def stable_sets(self) -> list[int]:
        return [s for s in self.naive_sets() if (self.attacked_by(s) | s) == self.full]


def _bits(m: int):
    i = 0
    while m:
        if m & 1:
            yield i
        m >>= 1
        i += 1


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _compiled(setaf: Setaf) -> _Compiled:
    return _Compiled(setaf)


def _check_budget(setaf: Setaf, sem: Semantics, max_args: int | None):
    if sem in BUDGETED and max_args is not None and len(setaf.arguments) > max_args:
        raise BudgetExceeded(f"{sem.value} extensions", len(setaf.arguments), max_args)


def extensions(setaf: Setaf, semantics, max_args: int | None = DEFAULT_MAX_ARGS) -> list[Extension]:
    """All σ-extensions, ordered canonically by their sorted argument keys."""
    sem = Semantics.parse(semantics)
    _check_budget(setaf, sem, max_args)
    c = _compiled(setaf)
    if sem is Semantics.CF:
        masks = c.conflict_free_sets()
    elif sem is Semantics.ADM:
        masks = [s for s in c.conflict_free_sets() if c.admissible(s)]
    elif sem is Semantics.NAIVE:
        masks = c.naive_sets()
    elif sem is Semantics.PREF:
        masks = c.preferred_sets()
    else:
        masks = c.stable_sets()
    exts = [Extension(c.unmask(m), sem) for m in masks]
    return sorted(exts, key=Extension.key)


def is_conflict_free(setaf: Setaf, s: Iterable[Argument]) -> bool:
    c = _compiled(setaf)
    return c.conflict_free(c.mask(s))


def defends(setaf: Setaf, s: Iterable[Argument], a: Argument) -> bool:
    c = _compiled(setaf)
    return c.defends(c.mask(s), c.index[a])


def is_admissible(setaf: Setaf, s: Iterable[Argument]) -> bool:
    c = _compiled(setaf)
    return c.admissible(c.mask(s))


def is_stable(setaf: Setaf, s: Iterable[Argument]) -> bool:
    c = _compiled(setaf)
    return c.stable(c.mask(s))


def credulous(setaf: Setaf, semantics, a: Argument, max_args: int | None = DEFAULT_MAX_ARGS) -> bool:
    return any(a in e.arguments for e in extensions(setaf, semantics, max_args))


def skeptical(setaf: Setaf, semantics, a: Argument, max_args: int | None = DEFAULT_MAX_ARGS) -> bool:
    """True when a is in every extension (vacuously true if there are none)."""
    return all(a in e.arguments for e in extensions(setaf, semantics, max_args))


def exists_nonempty(setaf: Setaf, semantics, max_args: int | None = DEFAULT_MAX_ARGS) -> bool:
    return any(e.arguments for e in extensions(setaf, semantics, max_args))
