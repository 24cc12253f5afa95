"""Move checking: built-in suites, random embeddings, the naive contact rule."""

import pytest

from ctkit import gct
from ctkit import tangle as tg
from ctkit.symcalc import RatFun, parse_ratfun
from ctkit.verify import (DefectRecord, Equal, MoveInstance, MoveReport,
                          NaiveExtensionReport, UnitRatio, VerifyError,
                          _monomial_unit, builtin_moves, builtin_suite,
                          check_move, constrained_naive_rule,
                          embedded_instance, naive_h_constraints,
                          naive_h_rule, suite_passed)

P1 = RatFun.var("p1")


# -- built-in suites ---------------------------------------------------


def test_gamma_move_list():
    moves = builtin_moves("gamma")
    assert [m.name for m in moves] == ["R1+", "R1-", "R2", "R3"]
    assert moves[0].expected == UnitRatio(1)
    assert moves[1].expected == UnitRatio(-1)
    assert all(isinstance(m.expected, Equal) for m in moves[2:])


def test_dgamma_move_list():
    names = [m.name for m in builtin_moves("dgamma")]
    assert names == ["R2", "R3",
                     "R4a+", "R4a-", "R4b+", "R4b-",
                     "R4c+", "R4c-", "R4d+", "R4d-",
                     "HPassThrough", "R1+", "R1-"]


def test_unknown_engine():
    with pytest.raises(VerifyError):
        builtin_moves("jones")


def test_gamma_suite():
    reports = builtin_suite("gamma")
    assert suite_passed(reports)
    by_name = {r.move: r for r in reports}
    assert by_name["R2"].outcome == "equal"
    assert by_name["R3"].outcome == "equal"
    assert by_name["R1+"].outcome == "unit t^1"
    assert by_name["R1+"].ratio == "t"
    assert by_name["R1-"].outcome == "unit t^-1"
    assert parse_ratfun(by_name["R1-"].ratio) == parse_ratfun("1/t")


def test_dgamma_suite():
    reports = builtin_suite("dgamma")
    assert suite_passed(reports)
    by_name = {r.move: r for r in reports}
    for name in ("R2", "R3", "HPassThrough",
                 "R4a+", "R4a-", "R4b+", "R4b-",
                 "R4c+", "R4c-", "R4d+", "R4d-"):
        assert by_name[name].outcome == "equal", name
    # the curl moves are recorded, not required: a doubled curl leaves a
    # visible state change behind
    for name in ("R1+", "R1-"):
        rep = by_name[name]
        assert rep.expected == "record"
        assert rep.outcome == "differs"
        assert rep.passed
        assert rep.matrix_diff


def test_report_dict_shape():
    rep = check_move(builtin_moves("gamma")[0], "gamma")
    d = rep.to_dict()
    assert d["move"] == "R1+" and d["passed"] is True
    assert d["ratio"] == "t"
    assert "matrix_diff" not in d and "error" not in d


def test_check_move_failure_modes():
    # an equality expectation is not satisfied by a unit ratio
    rep = check_move(MoveInstance("bogus", "X[1,2] // m[1,2>3]", "S[3]",
                                  Equal()), "gamma")
    assert rep.outcome == "unit t^1" and not rep.passed
    # the wrong unit fails too
    rep = check_move(MoveInstance("bogus", "X[1,2] // m[1,2>3]", "S[3]",
                                  UnitRatio(2)), "gamma")
    assert not rep.passed
    # broken input is caught into the report
    rep = check_move(MoveInstance("broken", "X[1,2] //", "S[3]", Equal()),
                     "gamma")
    assert rep.outcome == "error" and not rep.passed
    assert "TangleSyntaxError" in rep.error


def test_monomial_unit():
    assert _monomial_unit(parse_ratfun("t")) == 1
    assert _monomial_unit(parse_ratfun("t^-3")) == -3
    assert _monomial_unit(parse_ratfun("1")) == 0
    assert _monomial_unit(parse_ratfun("2*t")) is None
    assert _monomial_unit(parse_ratfun("h1*t")) is None
    assert _monomial_unit(parse_ratfun("t + 1")) is None


# -- random embeddings -------------------------------------------------


def test_embedded_instance_names_and_determinism():
    r2 = builtin_moves("gamma")[2]
    inst = embedded_instance(r2, 2, 0)
    assert inst.name == "R2@2/0"
    assert inst == embedded_instance(r2, 2, 0)
    assert inst.lhs != embedded_instance(r2, 2, 1).lhs
    # the spliced sides are valid normal-form texts
    assert tg.canonical_text(tg.parse_expr(inst.lhs)) == inst.lhs


def _seeds_for(engine, want):
    # the plain engine has no contact rule, so its ambient diagrams must
    # be all-clasp; the doubled engine takes any ambient
    out = []
    for seed in range(100):
        d = gct.random_diagram(2, seed)
        if engine == "dgamma" or all(c.sign for c in d.contacts):
            out.append(seed)
        if len(out) == want:
            return out
    raise AssertionError("no usable seeds")


@pytest.mark.parametrize("engine", ["gamma", "dgamma"])
def test_embedded_moves_stay_exact(engine):
    for seed in _seeds_for(engine, 3):
        for m in builtin_moves(engine):
            if not isinstance(m.expected, Equal):
                continue
            rep = check_move(embedded_instance(m, 2, seed), engine)
            assert rep.outcome == "equal", (m.name, seed, rep)


def test_embedded_rejects_unit_moves():
    with pytest.raises(VerifyError):
        embedded_instance(builtin_moves("gamma")[0])


# -- the undetermined-coefficient contact rule -------------------------


def test_naive_rule_states():
    atom = tg.HVertex("9", 1, 2)
    state = naive_h_rule(atom)
    assert state.omega == RatFun.var("p0")
    assert state.entry(1, 2) == RatFun.var("p2")
    forced = constrained_naive_rule(atom)
    assert forced.entry(1, 1) == P1
    assert forced.entry(1, 2) == 1 - P1
    assert forced.entry(2, 1) == 1 - P1
    assert forced.entry(2, 2) == P1


def test_naive_constraints_report():
    rep = naive_h_constraints()
    assert isinstance(rep, NaiveExtensionReport)
    assert rep.free == ("p0", "p1")
    assert rep.conditions > 0
    assert parse_ratfun(rep.relations["p2"]) == 1 - P1
    assert parse_ratfun(rep.relations["p3"]) == 1 - P1
    assert parse_ratfun(rep.relations["p4"]) == P1
    assert rep.matches_cited
    assert rep.sufficient
    assert parse_ratfun(rep.pinched_omega) == RatFun.var("p0") * P1
    assert rep.pinched_ok
    assert rep.sp_blind
    assert rep.ok
    d = rep.to_dict()
    assert d["ok"] is True and d["free"] == ["p0", "p1"]


def test_suite_passed_logic():
    good = MoveReport("m", "gamma", "equal", "equal", True)
    bad = MoveReport("m", "gamma", "equal", "differs", False)
    assert suite_passed([good, good])
    assert not suite_passed([good, bad])
    assert suite_passed([])
