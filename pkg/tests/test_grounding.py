import itertools
import random
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdbaf.grounding import (
    SingletonConflictWarning,
    compute_conflicts,
    compute_supports,
    enumerate_homomorphisms,
    id_supporters,
    satisfies,
    source_facts,
)
from cdbaf.model import (
    DC,
    ID,
    Atom,
    Comparison,
    ConstrainedDatabase,
    Database,
    Fact,
    Schema,
    Variable,
    normalize_fd_to_dc,
    normalize_id_to_ltgd,
)
from cdbaf.parser import parse_instance
from cdbaf.reductions import profile_from_string, random_instance
from cdbaf.repairs import in_all_repairs

import oracles


def _named(doc, sets):
    inv = {f: k for k, f in doc.labels.items()}
    return {frozenset(inv[f] for f in s) for s in sets}


def test_order_example_conflicts(corpus):
    doc = corpus("orders.cdb")
    got = _named(doc, [c.facts for c in compute_conflicts(doc.cdb)])
    assert got == {frozenset({"t1", "t4"}), frozenset({"t1", "t3", "s1", "s2"})}


def test_running_example_conflicts(corpus):
    doc = corpus("running.cdb")
    got = _named(doc, [c.facts for c in compute_conflicts(doc.cdb)])
    assert got == {frozenset({"e3", "d2"})}


def test_project_example_supports(corpus):
    doc = corpus("projects.cdb")
    cdb, lab = doc.cdb, doc.labels
    lav1, lav2 = cdb.constraints

    def sup(c, name):
        return _named(doc, [s.facts for s in compute_supports(cdb, c, lab[name])])

    assert sup(lav1, "s1") == {frozenset({"t1", "u1"})}
    assert sup(lav1, "s2") == set()
    assert sup(lav1, "s3") == {frozenset({"t2", "u2"})}
    assert sup(lav2, "t1") == {frozenset({"s1", "u1"})}
    assert sup(lav2, "t2") == {frozenset({"s3", "u2"})}
    with pytest.raises(ValueError):
        compute_supports(cdb, lav1, lab["t1"])


def test_homomorphisms_are_sorted_and_respect_fixed():
    cdb = parse_instance("R(a,b). R(b,c). R(c,a).")
    X, Y, Z = Variable("X"), Variable("Y"), Variable("Z")
    atoms = [Atom("R", (X, Y)), Atom("R", (Y, Z))]
    homs = enumerate_homomorphisms(atoms, cdb.database)
    assert homs == [
        {"X": "a", "Y": "b", "Z": "c"},
        {"X": "b", "Y": "c", "Z": "a"},
        {"X": "c", "Y": "a", "Z": "b"},
    ]
    assert enumerate_homomorphisms(atoms, cdb.database, {"X": "b"}) == [homs[1]]
    assert enumerate_homomorphisms([], cdb.database) == [{}]


def test_singleton_conflicts_warn():
    cdb = parse_instance("R(a,b). R(a,a). dc: ! R(X,Y), X != Y.")
    with pytest.warns(SingletonConflictWarning):
        cfs = compute_conflicts(cdb)
    assert [set(c.facts) for c in cfs] == [{Fact("R", ("a", "b"))}]


def test_conflict_witness_is_lowest_constraint_index():
    cdb = parse_instance("R(a,b). R(a,c).\nfd: R: [1] -> [2].\ndc: ! R(X,Y), R(X,Z), Y != Z.")
    (c,) = compute_conflicts(cdb)
    assert c.witness == 0


def test_per_constraint_minimality_versus_global():
    # {a,b} violates the first DC, {a,b,c} is minimal only for the second
    cdb = parse_instance(
        "R(a). S(b). T(c).\n"
        "dc: ! R(X), S(Y).\n"
        "dc: ! R(X), S(Y), T(Z)."
    )
    literal = {c.facts for c in compute_conflicts(cdb)}
    strict = {c.facts for c in compute_conflicts(cdb, strict_global=True)}
    assert len(literal) == 2 and len(strict) == 1
    assert literal == oracles.brute_conflicts(cdb)
    assert strict == oracles.brute_conflicts(cdb, per_constraint=False)
    # T(c) sits in a per-constraint conflict yet belongs to every repair
    t = Fact("T", ("c",))
    assert in_all_repairs(cdb, t) and in_all_repairs(cdb, t, route="oracle")


# ---------------------------------------------------------------- properties


PROFILES = ["fd", "id", "dc", "lav", "fd+dc", "id+lav", "fd+id+dc+lav"]


@given(st.integers(0, 100_000), st.sampled_from(PROFILES), st.integers(1, 6))
@settings(max_examples=150, deadline=None)
def test_satisfies_matches_brute_force(seed, prof, size):
    cdb = random_instance(seed, profile_from_string(prof), size)
    facts = sorted(cdb.facts)
    rng = random.Random(seed)
    for _ in range(4):
        sub = [f for f in facts if rng.random() < 0.6]
        for c in cdb.constraints:
            assert satisfies(sub, c) == (not oracles.violated(sub, c)), (c, sub)


@given(st.integers(0, 100_000), st.sampled_from(["fd", "dc", "fd+dc"]), st.integers(1, 7))
@settings(max_examples=120, deadline=None)
def test_conflicts_match_brute_force(seed, prof, size):
    cdb = random_instance(seed, profile_from_string(prof), size)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        got = {c.facts for c in compute_conflicts(cdb)}
        strict = {c.facts for c in compute_conflicts(cdb, strict_global=True)}
    assert got == oracles.brute_conflicts(cdb)
    assert strict == oracles.brute_conflicts(cdb, per_constraint=False)


@given(st.integers(0, 100_000), st.integers(1, 7))
@settings(max_examples=100, deadline=None)
def test_fd_and_its_dcs_have_the_same_violations(seed, size):
    cdb = random_instance(seed, profile_from_string("fd"), size)
    for fd in cdb.constraints:
        dcs = normalize_fd_to_dc(fd, cdb.schema)
        for r in range(3):
            for sub in itertools.combinations(sorted(cdb.facts), r):
                assert satisfies(sub, fd) == all(satisfies(sub, d) for d in dcs)


def _three_relation_id_instance(seed):
    rng = random.Random(seed)
    rels = {"A": rng.randint(1, 3), "B": rng.randint(1, 3), "C": rng.randint(1, 3)}
    facts = {
        Fact(r, tuple(rng.choice("xyz") for _ in range(rels[r])))
        for _ in range(8)
        for r in [rng.choice(list(rels))]
    }
    src, tgt = rng.sample(list(rels), 2)
    k = rng.randint(1, min(rels[src], rels[tgt]))
    ind = ID(src, tuple(rng.sample(range(1, rels[src] + 1), k)), tgt, tuple(rng.sample(range(1, rels[tgt] + 1), k)))
    return ConstrainedDatabase(Database(Schema(rels), frozenset(facts)), (ind,))


@pytest.mark.parametrize("seed", range(60))
def test_id_supports_direct_equals_ltgd_route(seed):
    cdb = _three_relation_id_instance(seed)
    (ind,) = cdb.constraints
    ltgd = normalize_id_to_ltgd(ind, cdb.schema)
    assert source_facts(ind, cdb.database) == source_facts(ltgd, cdb.database)
    for s in source_facts(ind, cdb.database):
        direct = {frozenset([t]) for t in id_supporters(ind, s, cdb.facts)}
        via = {sp.facts for sp in compute_supports(cdb, ind, s)}
        assert direct == via
    assert satisfies(cdb.facts, ind) == satisfies(cdb.facts, ltgd)


def test_dc_with_equality_and_constants():
    cdb = parse_instance('R(a,b). R(b,b). dc: ! R(X,Y), X = Y, Y = b.')
    (c,) = cdb.constraints
    assert not satisfies(cdb.facts, c)
    assert satisfies([Fact("R", ("a", "b"))], c)
    # X != X never holds
    d = DC((Atom("R", (Variable("X"), Variable("Y"))),), (Comparison(Variable("X"), "!=", Variable("X")),))
    assert satisfies(cdb.facts, d)
