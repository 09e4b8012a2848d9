import pytest

from cdbaf.model import (
    DC,
    FD,
    ID,
    LTGD,
    Atom,
    Comparison,
    ConstrainedDatabase,
    Constant,
    Database,
    Fact,
    Schema,
    Variable,
    classify,
    format_constant,
    normalize_fd_to_dc,
    normalize_id_to_ltgd,
)

X, Y, Z = Variable("X"), Variable("Y"), Variable("Z")


def test_fact_printing_quotes_only_when_needed():
    assert str(Fact("R", ("a", "12", "Paderborn", 'x"y'))) == 'R(a,12,"Paderborn","x\\"y")'
    assert format_constant("") == '""'
    assert format_constant("a b") == '"a b"'


def test_active_domain():
    db = Database.from_facts([Fact("R", ("a", "b")), Fact("S", ("b",))])
    assert db.active_domain == {"a", "b"}
    assert db.schema.arity("R") == 2


def test_database_rejects_wrong_arity():
    with pytest.raises(ValueError):
        Database(Schema({"R": 2}), [Fact("R", ("a",))])


def test_dc_requires_safe_comparisons():
    with pytest.raises(ValueError, match="unsafe"):
        DC((Atom("R", (X,)),), (Comparison(X, "!=", Y),))
    with pytest.raises(ValueError):
        DC((), ())


def test_id_shape_checks():
    with pytest.raises(ValueError):
        ID("R", (1, 2), "S", (1,))
    with pytest.raises(ValueError, match="repeated"):
        ID("R", (1, 2), "S", (1, 1))
    with pytest.raises(ValueError):
        FD("R", (), (1,))
    with pytest.raises(ValueError):
        FD("R", (0,), (1,))


def test_constraint_positions_checked_against_schema():
    db = Database(Schema({"R": 2}), [])
    with pytest.raises(ValueError, match="out of range"):
        ConstrainedDatabase(db, (FD("R", (1,), (3,)),))
    with pytest.raises(ValueError, match="undeclared"):
        ConstrainedDatabase(db, (ID("R", (1,), "S", (1,)),))


def test_classify_keeps_fd_and_dc_apart():
    fd = FD("R", (1,), (2,))
    dc = DC((Atom("R", (X, Y)),), ())
    p = classify([fd])
    assert p.has_fd and not p.has_dc
    assert p.family == "denial"
    p = classify([fd, ID("R", (1,), "R", (2,))])
    assert (p.has_fd, p.has_id, p.has_dc, p.has_ltgd) == (True, True, False, False)
    assert p.family == "mixed"
    assert classify([dc]).family == "denial"
    assert classify([]).family == "none"
    assert str(classify([fd, dc])) == "fd+dc"


def test_fd_normalization_builds_one_dc_per_dependent():
    schema = Schema({"T": 4})
    dcs = normalize_fd_to_dc(FD("T", (1,), (3, 4)), schema)
    assert len(dcs) == 2
    first = dcs[0]
    assert first.body[0].terms[0] == first.body[1].terms[0]
    assert first.comparisons == (Comparison(Variable("X3"), "!=", Variable("Y3")),)


def test_id_normalization():
    schema = Schema({"E": 2, "D": 3})
    ltgd = normalize_id_to_ltgd(ID("E", (2,), "D", (1,)), schema)
    assert str(ltgd) == "lav: E(X1,X2) -> D(X2,Y2,Y3)."
    assert ltgd.existential_variables() == (Variable("Y2"), Variable("Y3"))


def test_ltgd_needs_a_head():
    with pytest.raises(ValueError):
        LTGD(Atom("R", (X,)), ())


def test_variable_names_must_parse_back():
    with pytest.raises(ValueError):
        Variable("x")
    assert str(Constant("X")) == '"X"'


def test_schema_equality_and_hash():
    a = Schema({"R": 1, "S": 2})
    b = Schema({"S": 2, "R": 1})
    assert a == b and hash(a) == hash(b)
    assert a.names == ("R", "S")
