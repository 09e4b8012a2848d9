"""Brute-force reference implementations, written straight from the definitions.

Nothing here calls into cdbaf.grounding, cdbaf.semantics or cdbaf.repairs, so
agreement with those modules is evidence rather than a tautology.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable

from cdbaf.framework import Attack, NamedArg, Setaf
from cdbaf.model import DC, FD, ID, LTGD, Constant, Fact


# ---------------------------------------------------------------- constraints


def _unify(atom, fact, env):
    if atom.relation != fact.relation or len(atom.terms) != len(fact.values):
        return None
    env = dict(env)
    for t, v in zip(atom.terms, fact.values):
        if isinstance(t, Constant):
            if t.value != v:
                return None
        elif env.setdefault(t.name, v) != v:
            return None
    return env


def _val(t, env):
    return t.value if isinstance(t, Constant) else env[t.name]


def _all_images(atoms, facts, env=None):
    """Every (assignment, image) over the full product of facts."""
    facts = list(facts)
    for combo in itertools.product(facts, repeat=len(atoms)):
        e = dict(env or {})
        for a, f in zip(atoms, combo):
            e = _unify(a, f, e)
            if e is None:
                break
        else:
            yield e, combo


def violated(facts: Iterable[Fact], c) -> bool:
    facts = list(facts)
    if isinstance(c, FD):
        rows = [f for f in facts if f.relation == c.relation]
        for s, t in itertools.product(rows, rows):
            if all(s.values[p - 1] == t.values[p - 1] for p in c.determinant) and any(
                s.values[p - 1] != t.values[p - 1] for p in c.dependent
            ):
                return True
        return False
    if isinstance(c, ID):
        for s in facts:
            if s.relation != c.source:
                continue
            want = [s.values[p - 1] for p in c.source_attrs]
            if not any(
                t.relation == c.target and [t.values[p - 1] for p in c.target_attrs] == want
                for t in facts
            ):
                return True
        return False
    if isinstance(c, DC):
        for env, _ in _all_images(c.body, facts):
            ok = True
            for cmp in c.comparisons:
                eq = _val(cmp.left, env) == _val(cmp.right, env)
                if eq != (cmp.op == "="):
                    ok = False
            if ok:
                return True
        return False
    if isinstance(c, LTGD):
        for s in facts:
            env = _unify(c.body, s, {})
            if env is None:
                continue
            if next(_all_images(c.head, facts, env), None) is None:
                return True
        return False
    raise TypeError(c)


def consistent(facts, constraints) -> bool:
    facts = list(facts)
    return not any(violated(facts, c) for c in constraints)


def subsets(items):
    items = sorted(items, key=str)
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


def brute_repairs(cdb) -> set[frozenset]:
    """⊆-maximal consistent subsets over all 2^n subsets."""
    good = [s for s in subsets(cdb.facts) if consistent(s, cdb.constraints)]
    return {s for s in good if not any(s < t for t in good)}


def brute_conflicts(cdb, per_constraint: bool = True) -> set[frozenset]:
    """Minimal violating sets of the FD/DC constraints."""
    found = set()
    denials = [c for c in cdb.constraints if isinstance(c, (FD, DC))]
    all_subsets = list(subsets(cdb.facts))
    for c in denials:
        bad = [s for s in all_subsets if violated(s, c)]
        found |= {s for s in bad if not any(t < s for t in bad)}
    if per_constraint:
        return found
    return {s for s in found if not any(t < s for t in found)}


# ---------------------------------------------------------------- semantics


def _cf(setaf: Setaf, s: frozenset) -> bool:
    return not any(att.source <= s and att.target in s for att in setaf.attacks)


def _attacked(setaf: Setaf, s: frozenset) -> set:
    return {att.target for att in setaf.attacks if att.source <= s}


def _adm(setaf: Setaf, s: frozenset) -> bool:
    if not _cf(setaf, s):
        return False
    hit = _attacked(setaf, s)
    return all(att.source & hit for att in setaf.attacks if att.target in s)


def brute_extensions(setaf: Setaf, sem: str) -> set[frozenset]:
    everything = list(subsets(setaf.arguments))
    cf = [s for s in everything if _cf(setaf, s)]
    if sem == "cf":
        return set(cf)
    if sem == "naive":
        return {s for s in cf if not any(s < t for t in cf)}
    adm = [s for s in cf if _adm(setaf, s)]
    if sem == "adm":
        return set(adm)
    if sem == "pref":
        return {s for s in adm if not any(s < t for t in adm)}
    if sem == "stab":
        return {s for s in cf if _attacked(setaf, s) | s == set(setaf.arguments)}
    raise ValueError(sem)


def random_setaf(rng: random.Random, max_args: int = 8) -> Setaf:
    n = rng.randint(0, max_args)
    args = [NamedArg(f"a{i}") for i in range(n)]
    attacks = set()
    if args:
        for _ in range(rng.randint(0, 2 * n)):
            k = rng.choice((1, 1, 1, 2, 2, 3))
            src = frozenset(rng.sample(args, min(k, n)))
            attacks.add(Attack(src, rng.choice(args)))
    return Setaf(args, attacks)


# ---------------------------------------------------------------- formulas


def sat_by_truth_table(phi) -> bool:
    vs = list(phi.variables)
    for bits in itertools.product((False, True), repeat=len(vs)):
        env = dict(zip(vs, bits))
        if all(any(env[v] == pos for v, pos in c) for c in phi.clauses):
            return True
    return False


def qbf_by_truth_table(qbf) -> bool:
    ys, zs = list(qbf.universals), list(qbf.existentials)
    for ybits in itertools.product((False, True), repeat=len(ys)):
        env = dict(zip(ys, ybits))
        ok = False
        for zbits in itertools.product((False, True), repeat=len(zs)):
            env.update(zip(zs, zbits))
            if all(any(env[v] == pos for v, pos in c) for c in qbf.matrix.clauses):
                ok = True
                break
        if not ok:
            return False
    return True


def random_cnf(rng: random.Random, max_vars: int = 6, max_clauses: int = 6, width: int = 3):
    from cdbaf.reductions import CnfFormula

    nv = rng.randint(1, max_vars)
    names = [f"x{i}" for i in range(1, nv + 1)]
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        k = rng.randint(1, min(width, nv))
        clauses.append(tuple((v, rng.random() < 0.5) for v in rng.sample(names, k)))
    used = sorted({v for c in clauses for v, _ in c}, key=names.index)
    return CnfFormula(tuple(used), tuple(clauses))


def random_qbf(rng: random.Random, max_y: int = 3, max_z: int = 3, max_clauses: int = 5):
    from cdbaf.reductions import CnfFormula, QbfFormula

    ys = [f"y{i}" for i in range(1, rng.randint(1, max_y) + 1)]
    zs = [f"z{i}" for i in range(1, rng.randint(0, max_z) + 1)]
    pool = ys + zs
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        k = rng.randint(1, min(3, len(pool)))
        clauses.append(tuple((v, rng.random() < 0.5) for v in rng.sample(pool, k)))
    used = {v for c in clauses for v, _ in c}
    uy = tuple(v for v in ys if v in used)
    uz = tuple(v for v in zs if v in used)
    return QbfFormula(uy, uz, CnfFormula(uy + uz, tuple(clauses)))
