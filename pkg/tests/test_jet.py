import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistsym import (
    ZERO,
    JetContext,
    JetError,
    OdeSystem,
    SolvedSystem,
    TruncationError,
    add,
    diff,
    equal_numeric,
    mul,
    parse_expression,
    substitute,
    sym,
)
from twistsym.jet import index_successor, indices_of_order
from twistsym.fuzz import rand_poly


def test_naming_convention():
    c1 = JetContext(1, 1, 3)
    assert c1.x_name(0) == "x" and c1.u_name(0) == "u" and c1.u_name(0, (3,)) == "u_[3]"
    c2 = JetContext(3, 2, 3)
    assert c2.x_name(1) == "x2" and c2.u_name(0, (2, 0, 1)) == "u1_[2,0,1]"
    assert c2.canonical_name("u1_[0,0,0]") == "u1"
    assert c2.coordinate("u2_[1,1,0]") == ("u", 1, (1, 1, 0))
    assert c2.coordinate("y") is None


def test_context_invariants():
    with pytest.raises(JetError):
        JetContext(0, 1, 1)
    with pytest.raises(JetError):
        JetContext(1, 1, 1, ("exp",))
    with pytest.raises(JetError):
        JetContext(1, 1, 1, ("u",))
    c = JetContext(2, 2, 2)
    assert len(c.coordinates()) == 2 + 2 * (1 + 2 + 3)


def test_index_successor_examples():
    assert index_successor((0, 0), 0) == (1, 0)
    assert index_successor((2, 1), 1) == (2, 2)
    assert list(indices_of_order(2, 2)) == [(2, 0), (1, 1), (0, 2)]


def test_total_derivative_examples(ode):
    P = lambda t: parse_expression(t, ode)  # noqa: E731
    assert ode.D(P("u")) == P("u_[1]")
    assert ode.D(P("7")) == ZERO
    got = ode.D(P("x*u_[1]"))
    assert got == P("u_[1] + x*u_[2]")
    # diff-chain oracle: d/dx + sum u_(k+1) d/du_(k)
    e = P("x*u_[1]")
    chain = add(diff(e, "x"), *(mul(sym(f"u_[{k + 1}]"), diff(e, "u" if k == 0 else f"u_[{k}]")) for k in range(2)))
    assert equal_numeric(got, chain)


def test_truncation_error(ode):
    with pytest.raises(TruncationError, match="truncation order"):
        ode.D(parse_expression("u_[3]", ode))


NAMES2 = ["x1", "x2", "u1", "u2", "u1_[1,0]", "u1_[0,1]", "u2_[1,0]", "u2_[0,1]"]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_total_derivatives_commute_and_are_derivations(seed):
    rng = random.Random(seed)
    c = JetContext(2, 2, 3)
    e = rand_poly(NAMES2, rng, 3, 4)
    f = rand_poly(NAMES2, rng, 2, 3)
    assert equal_numeric(c.D(c.D(e, 0), 1), c.D(c.D(e, 1), 0))
    assert equal_numeric(c.D(mul(e, f), 0), add(mul(c.D(e, 0), f), mul(e, c.D(f, 0))))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_section_substitution_intertwines(seed):
    rng = random.Random(seed)
    c = JetContext(2, 1, 3)
    f = [rand_poly(["x1", "x2"], rng, 3, 4)]
    e = rand_poly(["x1", "x2", "u", "u_[1,0]", "u_[0,1]"], rng, 2, 4)
    bind = c.section_bindings(f, 3)
    for i, xi in enumerate(("x1", "x2")):
        assert equal_numeric(substitute(c.D(e, i), bind), diff(substitute(e, bind), xi))


def test_ode_system_solved_form(ode):
    P = lambda t: parse_expression(t, ode)  # noqa: E731
    s = OdeSystem(ode, (P("u_[1]^2"),), (2,))
    assert s.order == 2
    assert substitute(s.equations()[0], {"u_[2]": P("u_[1]^2")}) == ZERO
    with pytest.raises(JetError, match="not in solved form"):
        OdeSystem(ode, (P("u_[2]"),), (2,))


def test_solved_system_restriction_closes_under_derivatives():
    c = JetContext(2, 1, 3)
    P = lambda t: parse_expression(t, c)  # noqa: E731
    S = SolvedSystem(c, ((0, (2, 0), P("u_[0,2]")),))  # wave equation
    assert S.restrict(P("u_[3,0]")) == P("u_[1,2]")
    with pytest.raises(JetError, match="not normal"):
        SolvedSystem(c, ((0, (1, 0), P("u_[2,0]")),))
