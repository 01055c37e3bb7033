import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from twistsym import (
    ZERO,
    InvolutionError,
    JetContext,
    ReconstructionError,
    VectorField,
    check_involution,
    commutator,
    equal_numeric,
    evolutionary_rep,
    fields_equal,
    parse_expression,
    reconstruct_liepoint,
    verify_prolong_commutator,
)
from twistsym.fuzz import rand_liepoint_field
from sym_oracle import agree, to_sympy


def F(ctx, xi, phi):
    P = lambda t: parse_expression(t, ctx)  # noqa: E731
    return VectorField(ctx, [P(t) for t in xi], [P(t) for t in phi])


C11 = JetContext(1, 1, 2)
C12 = JetContext(1, 2, 2)


def test_liepoint_flag():
    assert F(C11, ["x"], ["u"]).is_liepoint
    Y = F(C11, ["0"], ["u_[1]"])
    assert not Y.is_liepoint and Y.is_vertical and Y.order == 1


def test_evolutionary_rep_examples():
    assert evolutionary_rep(F(C11, ["0"], ["1"])).phi[0] == parse_expression("1", C11)
    Q = evolutionary_rep(F(C12, ["1"], ["0", "0"]))
    assert [str(q) for q in Q.phi] == ["-u1_[1]", "-u2_[1]"]
    Q = evolutionary_rep(F(C11, ["x"], ["u"]))
    assert equal_numeric(Q.phi[0], parse_expression("u - x*u_[1]", C11))


def test_reconstruct_examples():
    Q = VectorField.vertical(C11, [parse_expression("u - x*u_[1]", C11)])
    X = reconstruct_liepoint(Q)
    assert fields_equal(X, F(C11, ["x"], ["u"]))
    X = reconstruct_liepoint(VectorField.vertical(C11, [parse_expression("1", C11)]))
    assert fields_equal(X, F(C11, ["0"], ["1"]))
    bad = VectorField.vertical(C12, [parse_expression("-u1_[1]", C12), parse_expression("-2*u2_[1]", C12)])
    with pytest.raises(ReconstructionError, match="inconsistent reconstruction"):
        reconstruct_liepoint(bad)
    with pytest.raises(ReconstructionError, match="not affine"):
        reconstruct_liepoint(VectorField.vertical(C11, [parse_expression("u_[1]^2", C11)]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_reconstruct_inverts_evolutionary_rep(seed):
    X = rand_liepoint_field(JetContext(2, 2, 2), random.Random(seed))
    assert fields_equal(reconstruct_liepoint(evolutionary_rep(X)), X)


def test_commutator_examples():
    dx, du = F(C11, ["1"], ["0"]), F(C11, ["0"], ["1"])
    assert all(c == ZERO for c in commutator(dx, du).coefficients)
    xdx = F(C11, ["x"], ["0"])
    assert fields_equal(commutator(xdx, dx), F(C11, ["-1"], ["0"]))
    X = F(C11, ["x*u"], ["u^2"])
    assert all(c == ZERO for c in commutator(X, X).coefficients)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_commutator_against_sympy(seed):
    rng = random.Random(seed)
    X, Y = rand_liepoint_field(C11, rng), rand_liepoint_field(C11, rng)
    x, u = sp.symbols("x u0_0")
    xs = [to_sympy(c) for c in X.coefficients]
    ys = [to_sympy(c) for c in Y.coefficients]
    vec = lambda c, f: c[0] * sp.diff(f, x) + c[1] * sp.diff(f, u)  # noqa: E731
    ref = [vec(xs, ys[k]) - vec(ys, xs[k]) for k in range(2)]
    Z = commutator(X, Y)
    for k in range(2):
        assert agree(Z.coefficients[k], ref[k], 1, 0, rng)


def test_verify_prolong_commutator_examples():
    assert verify_prolong_commutator(F(C11, ["1"], ["0"]), F(C11, ["0"], ["1"]), 2)
    assert verify_prolong_commutator(F(C11, ["x"], ["0"]), F(C11, ["0"], ["u"]), 2)
    assert verify_prolong_commutator(F(C11, ["u"], ["0"]), F(C11, ["0"], ["x"]), 1)


def test_involution_examples():
    s = check_involution([F(C12, ["0"], ["1", "0"]), F(C12, ["0"], ["0", "1"])])
    assert s.constant and all(c == ZERO for fs in s.structure.values() for c in fs)
    s = check_involution([F(C11, ["1"], ["0"]), F(C11, ["x"], ["0"])])
    assert s.verify()
    assert [str(c) for c in s.structure[(0, 1)]] == ["1", "0"]
    with pytest.raises(InvolutionError, match="not in involution"):
        check_involution([F(C11, ["0"], ["1"]), F(C11, ["u"], ["x"])])
    with pytest.raises(InvolutionError, match="fields dependent"):
        check_involution([F(C11, ["1"], ["0"]), F(C11, ["2"], ["0"]), F(C11, ["0"], ["1"])])


def test_involution_with_function_coefficients():
    # [d_x, (1 + x^2) d_u] = 2x/(1 + x^2) times the second field: f depends on x
    C = JetContext(1, 1, 2)
    s = check_involution([F(C, ["1"], ["0"]), F(C, ["0"], ["1 + x^2"])])
    assert not s.constant and s.verify()
