import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdbaf.model import DC, FD, ID, LTGD, ConstrainedDatabase, Database, Fact, Schema
from cdbaf.parser import SourceError, parse_document, parse_instance, serialize_instance
from cdbaf.reductions import profile_from_string, random_instance


def test_running_example_parses(corpus):
    doc = corpus("running.cdb")
    assert len(doc.cdb.facts) == 6
    assert doc.labels["e1"] == Fact("E", ("E1", "D1", "Paderborn"))
    kinds = [c.kind for c in doc.cdb.constraints]
    assert kinds == ["dc", "lav"]
    assert doc.cdb.schema.attributes["E"] == ("emp", "dept", "loc")


def test_attribute_names_resolve_to_positions(corpus):
    cdb = corpus("supervisors_fd.cdb").cdb
    assert cdb.constraints == (FD("T", (1,), (3,)), FD("T", (2,), (4,)))
    cdb = corpus("supervisors_id.cdb").cdb
    assert cdb.constraints == (ID("T", (2,), "T", (1,)), ID("T", (4,), "T", (3,)))


def test_round_trip_of_table_instance(corpus):
    doc = corpus("supervisors_fd.cdb")
    text = serialize_instance(doc.cdb, doc.labels)
    again = parse_document(text)
    assert again.cdb == doc.cdb
    assert dict(again.labels) == dict(doc.labels)
    assert serialize_instance(again.cdb, again.labels) == text


@pytest.mark.parametrize(
    "src, kind, line, col",
    [
        ("R(a).\nR(a,b).", "ArityMismatch", 2, 1),
        ("fd: S: [1] -> [2].", "UnknownRelation", 1, 5),
        ("rel R/2.\nfd: R: [1] -> [3].", "ArityMismatch", 2, 16),
        ("dc: ! R(X), X != Y.", "UnsafeVariable", 1, 18),
        ("@a R(x).\n@a R(y).", "DuplicateLabel", 2, 2),
        ("R(X).", "Syntax", 1, 3),
        ("R(a)", "Syntax", 1, 5),
        ('R("abc).', "Syntax", 1, 3),
        ("lav: R(X), S(X) -> T(X).", "Syntax", 1, 10),
        ("R(a). §", "Syntax", 1, 7),
        ("rel R/2.\nrel R/3.", "ArityMismatch", 2, 5),
        ("id: R[1] <= S[1,2].\nR(a). S(a,b).", "ArityMismatch", 1, 13),
        ("rel R(a,b).\nfd: R: [c] -> [a].", "Syntax", 2, 9),
    ],
)
def test_errors_are_located(src, kind, line, col):
    with pytest.raises(SourceError) as info:
        parse_instance(src)
    err = info.value
    assert (err.kind, err.line, err.column) == (kind, line, col), str(err)


def test_comments_and_quoted_escapes():
    cdb = parse_instance('% header\nR("a\\"b", 7). % trailing\nR(x, "tab\\there").')
    assert Fact("R", ('a"b', "7")) in cdb.facts
    assert Fact("R", ("x", "tab\there")) in cdb.facts


def test_empty_input():
    cdb = parse_instance("")
    assert not cdb.facts and not cdb.constraints


def test_constants_inside_constraints():
    cdb = parse_instance('R(a,b).\ndc: ! R(X, "b"), X = a.\nlav: R(X, Y) -> S(Y, c).\nS(b,c).')
    dc, lav = cdb.constraints
    assert isinstance(dc, DC) and isinstance(lav, LTGD)
    assert serialize_instance(parse_instance(serialize_instance(cdb))) == serialize_instance(cdb)


def test_rel_can_name_a_relation():
    cdb = parse_instance("rel(a). fd(b).")
    assert {f.relation for f in cdb.facts} == {"rel", "fd"}


# ---------------------------------------------------------------- properties

values = st.text(alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\n\r"), max_size=6)
facts = st.lists(
    st.tuples(st.sampled_from(["R", "S"]), st.lists(values, min_size=2, max_size=2)), max_size=6
)


@given(facts)
def test_round_trip_arbitrary_constants(rows):
    fs = frozenset(Fact(r, tuple(v)) for r, v in rows)
    cdb = ConstrainedDatabase(Database(Schema({"R": 2, "S": 2}), fs), (FD("R", (1,), (2,)),))
    assert parse_instance(serialize_instance(cdb)) == cdb


@given(st.integers(0, 10_000), st.sampled_from(["fd", "id", "dc", "lav", "fd+id+dc+lav"]))
@settings(max_examples=60)
def test_round_trip_random_instances(seed, prof):
    cdb = random_instance(seed, profile_from_string(prof), 5)
    text = serialize_instance(cdb)
    assert parse_instance(text) == cdb


@given(st.text(alphabet=string.printable + "→§é", max_size=60))
@settings(max_examples=300)
def test_parser_is_total(text):
    # every input either parses or raises exactly one SourceError
    try:
        parse_instance(text)
    except SourceError as exc:
        assert exc.line >= 1 and exc.column >= 1
        assert exc.kind in {"Syntax", "UnknownRelation", "ArityMismatch", "UnsafeVariable", "DuplicateLabel"}


grammar_bits = st.sampled_from(
    ["R", "S", "(", ")", "[", "]", ",", ".", ":", "!", "!=", "=", "->", "<=", "X", "a", '"q"',
     "1", "2", "fd", "id", "dc", "lav", "rel", "/", "@", "l", " "]
)


@given(st.lists(grammar_bits, max_size=30))
@settings(max_examples=400)
def test_parser_is_total_on_token_soup(parts):
    try:
        parse_instance(" ".join(parts))
    except SourceError:
        pass
