import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdbaf.errors import BudgetExceeded
from cdbaf.framework import Attack, NamedArg, Setaf
from cdbaf.semantics import (
    Semantics,
    credulous,
    defends,
    exists_nonempty,
    extensions,
    is_admissible,
    is_conflict_free,
    is_stable,
    skeptical,
)

import oracles

a, b, c, d, e = (NamedArg(x) for x in "abcde")


def _names(exts):
    return {frozenset(x.name for x in ext.arguments) for ext in exts}


def _sets(*groups):
    return {frozenset(g) for g in groups}


@pytest.fixture
def four_cycle_af():
    return Setaf({a, b, c, d}, {Attack({a}, b), Attack({b}, a), Attack({b}, c), Attack({c}, d)})


@pytest.fixture
def collective():
    return Setaf({a, b, c, d, e}, {Attack({a, b}, d), Attack({b, c}, e), Attack({e}, a)})


def test_plain_af_extension_table(four_cycle_af):
    af = four_cycle_af
    assert _names(extensions(af, "naive")) == _sets("ac", "ad", "bd")
    # the empty set is admissible too
    assert _names(extensions(af, "adm")) == _sets("a", "ac", "b", "bd", "")
    assert _names(extensions(af, "pref")) == _sets("ac", "bd")
    assert _names(extensions(af, "stab")) == _sets("ac", "bd")


def test_collective_attack_example(collective):
    s = {a, b, c}
    assert is_conflict_free(collective, s)
    assert is_admissible(collective, s)
    assert is_stable(collective, s)
    assert frozenset(s) in {x.arguments for x in extensions(collective, "pref")}
    assert defends(collective, {b, c}, a)
    assert not defends(collective, {a}, a)


def test_self_attacker_never_accepted():
    s = Setaf({a, b}, {Attack({a}, a), Attack({a}, b)})
    assert _names(extensions(s, "naive")) == _sets("b")
    assert _names(extensions(s, "pref")) == _sets("")
    assert _names(extensions(s, "stab")) == set()
    assert not credulous(s, "pref", a)
    assert skeptical(s, "stab", a)  # vacuous: no stable extensions
    assert not exists_nonempty(s, "pref")


def test_budget():
    big = Setaf({NamedArg(f"x{i}") for i in range(30)}, set())
    with pytest.raises(BudgetExceeded):
        extensions(big, "pref")
    assert len(extensions(big, "pref", max_args=None)) == 1
    small = Setaf({NamedArg(f"x{i}") for i in range(25)}, set())
    with pytest.raises(BudgetExceeded):
        extensions(small, Semantics.NAIVE)


def test_empty_framework():
    empty = Setaf(set(), set())
    for sem in Semantics:
        assert _names(extensions(empty, sem)) == {frozenset()}


def test_semantics_names():
    assert Semantics.parse("preferred") is Semantics.PREF
    with pytest.raises(ValueError):
        Semantics.parse("grounded")


def test_output_is_canonical(four_cycle_af):
    first = [sorted(x.name for x in e.arguments) for e in extensions(four_cycle_af, "naive")]
    assert first == [["a", "c"], ["a", "d"], ["b", "d"]]


@given(st.integers(0, 1_000_000))
@settings(max_examples=150, deadline=None)
def test_engine_matches_subset_filter(seed):
    setaf = oracles.random_setaf(random.Random(seed), max_args=7)
    for sem in ("cf", "naive", "adm", "pref", "stab"):
        got = {x.arguments for x in extensions(setaf, sem)}
        assert got == oracles.brute_extensions(setaf, sem), sem


@given(st.integers(0, 1_000_000))
@settings(max_examples=100, deadline=None)
def test_semantics_inclusions(seed):
    setaf = oracles.random_setaf(random.Random(seed), max_args=7)
    naive = {x.arguments for x in extensions(setaf, "naive")}
    pref = {x.arguments for x in extensions(setaf, "pref")}
    stab = {x.arguments for x in extensions(setaf, "stab")}
    adm = {x.arguments for x in extensions(setaf, "adm")}
    assert stab <= pref <= adm
    assert stab <= naive
    assert pref  # preferred extensions always exist
