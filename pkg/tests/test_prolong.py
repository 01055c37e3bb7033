import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from twistsym import (
    ONE,
    ZERO,
    CompatibilityError,
    JetContext,
    JetError,
    MatrixExpr,
    NotApplicable,
    VectorField,
    check_involution,
    check_maurer_cartan,
    commutator_identity_report,
    equal_numeric,
    involution_system,
    mu_difference,
    parse_expression,
    prolong,
    prolong_chi,
    prolong_lambda,
    prolong_mu,
    prolong_sigma,
    sigma_involution_condition,
    tables_equal,
)
from twistsym.fuzz import rand_liepoint_field, rand_matrix, rand_poly, rand_vertical_field
from sym_oracle import agree, jet_symbols, lambda_prolongation, standard_prolongation, to_sympy


def P(ctx, t):
    return parse_expression(t, ctx)


def F(ctx, xi, phi):
    return VectorField(ctx, [P(ctx, t) for t in xi], [P(ctx, t) for t in phi])


C1 = JetContext(1, 1, 3, ("c",))
C2 = JetContext(1, 2, 3)


def psi_text(Y):
    return {k: str(v) for k, v in Y.psi.items()}


# -- standard ---------------------------------------------------------------------------


def test_standard_examples():
    Y = prolong(F(C1, ["0"], ["1"]), 3)
    assert all(Y.coefficient(0, k) == ZERO for k in (1, 2, 3))
    Y = prolong(F(C1, ["x"], ["u"]), 2)
    assert Y.coefficient(0, 1) == ZERO
    assert Y.coefficient(0, 2) == P(C1, "-u_[2]")
    Y = prolong(F(C2, ["1"], ["0", "0"]), 3)
    assert all(v == ZERO for v in Y.psi.values())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_standard_matches_closed_form(seed):
    rng = random.Random(seed)
    ctx = JetContext(1, 2, 3)
    X = rand_liepoint_field(ctx, rng)
    Y = prolong(X, 3)
    x, us = jet_symbols(2, 3)
    ref = standard_prolongation(to_sympy(X.xi[0]), [to_sympy(p) for p in X.phi], 3, x, us)
    for (a, k), v in ref.items():
        assert agree(Y.coefficient(a, k), v, 2, 3, rng)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_lambda_matches_closed_form(seed):
    rng = random.Random(seed)
    ctx = JetContext(1, 1, 3)
    X = rand_liepoint_field(ctx, rng)
    lam = rand_poly(ctx.coordinates(1), rng, 2, 3)
    Y = prolong_lambda(X, lam, 3)
    x, us = jet_symbols(1, 3)
    ref = lambda_prolongation(to_sympy(X.xi[0]), [to_sympy(X.phi[0])], to_sympy(lam), 3, x, us)
    for (a, k), v in ref.items():
        assert agree(Y.coefficient(a, k), v, 1, 3, rng)


def test_multi_index_paths_agree():
    ctx = JetContext(2, 1, 3)
    X = F(ctx, ["x1*u", "x2^2"], ["u^2 + x1*x2"])
    Y = prolong(X, 3)
    assert Y.path_check.holds and Y.path_check.checked > 0


# -- lambda ------------------------------------------------------------------------------


def test_lambda_examples():
    X = F(C1, ["x"], ["u"])
    assert tables_equal(prolong_lambda(X, ZERO, 3), prolong(X, 3))
    Y = prolong_lambda(F(C1, ["0"], ["1"]), P(C1, "c"), 2)
    assert [str(Y.coefficient(0, k)) for k in (1, 2)] == ["c", "c^2"]
    Y = prolong_lambda(F(C1, ["0"], ["1"]), P(C1, "u_[1]"), 1)
    assert Y.coefficient(0, 1) == P(C1, "u_[1]")
    with pytest.raises(JetError, match="J"):
        prolong_lambda(F(C1, ["0"], ["1"]), P(C1, "u_[2]"), 1)


# -- mu ----------------------------------------------------------------------------------


def test_mu_examples():
    X = F(C2, ["0"], ["0", "1"])
    L = MatrixExpr.of([[0, 1], [0, 0]])
    Y = prolong_mu(X, [L], 1)
    assert (Y.coefficient(0, 1), Y.coefficient(1, 1)) == (ONE, ZERO)
    X = F(C2, ["x"], ["u2", "x*u1"])
    assert tables_equal(prolong_mu(X, [MatrixExpr.zeros(2)], 3), prolong(X, 3))


def test_mu_requires_compatibility():
    ctx = JetContext(2, 2, 2)
    bad = [MatrixExpr.zeros(2), MatrixExpr.scalar(ctx.x(0), 2)]
    with pytest.raises(CompatibilityError):
        prolong_mu(VectorField.vertical(ctx, [ONE, ZERO]), bad, 2)
    Y = prolong_mu(VectorField.vertical(ctx, [ONE, ZERO]), bad, 2, skip_compat=True)
    assert Y.n == 2


def test_maurer_cartan_examples():
    ctx1 = JetContext(1, 2, 2)
    assert check_maurer_cartan(ctx1, [rand_matrix(ctx1.coordinates(1), random.Random(0), 2)])
    ctx = JetContext(2, 2, 2)
    Cm = MatrixExpr.of([[1, 2], [3, 4]])
    assert check_maurer_cartan(ctx, [Cm, Cm])
    rep = check_maurer_cartan(ctx, [MatrixExpr.zeros(2), MatrixExpr.scalar(ctx.x(0), 2)])
    assert not rep
    R = rep.residuals[(0, 1)]
    assert equal_numeric(R[0, 0], ONE) and equal_numeric(R[1, 1], ONE)
    assert equal_numeric(R[0, 1], ZERO) and equal_numeric(R[1, 0], ZERO)


# -- sigma / chi ----------------------------------------------------------------------------


def test_sigma_examples():
    X1, X2 = F(C2, ["0"], ["1", "0"]), F(C2, ["0"], ["0", "1"])
    Ys = prolong_sigma([X1, X2], MatrixExpr.of([[0, 1], [0, 0]]), 1)
    assert (Ys[0].coefficient(0, 1), Ys[0].coefficient(1, 1)) == (ZERO, ONE)
    assert (Ys[1].coefficient(0, 1), Ys[1].coefficient(1, 1)) == (ZERO, ZERO)
    Ys = prolong_sigma([X1, X2], MatrixExpr.zeros(2), 3)
    assert tables_equal(Ys[0], prolong(X1, 3)) and tables_equal(Ys[1], prolong(X2, 3))
    X = F(C2, ["x^2"], ["u1*u2", "x"])
    lam = P(C2, "x*u1_[1] + u2")
    assert tables_equal(prolong_sigma([X], MatrixExpr.of([[lam]]), 3)[0], prolong_lambda(X, lam, 3))


def test_chi_examples():
    Q1 = VectorField.vertical(C2, [P(C2, "u1*x"), P(C2, "u2^2")])
    Q2 = VectorField.vertical(C2, [P(C2, "1"), P(C2, "u1_[1]")])
    Lam = MatrixExpr.of([[P(C2, "x"), 1], [0, P(C2, "u1")]])
    S = MatrixExpr.of([[0, P(C2, "x")], [1, 0]])
    Z = MatrixExpr.zeros(2)
    for Yc, Q in zip(prolong_chi([Q1, Q2], Z, Z, 3), (Q1, Q2)):
        assert tables_equal(Yc, prolong(Q, 3))
    for Yc, Q in zip(prolong_chi([Q1, Q2], Lam, Z, 3), (Q1, Q2)):
        assert tables_equal(Yc, prolong_mu(Q, [Lam], 3))
    lam = P(C2, "x + u2")
    rho = MatrixExpr.scalar(lam, 2) + S
    for a, b in zip(prolong_chi([Q1, Q2], MatrixExpr.scalar(lam, 2), S, 3), prolong_sigma([Q1, Q2], rho, 3)):
        assert tables_equal(a, b)
    with pytest.raises(JetError, match="vertical"):
        prolong_chi([F(C2, ["1"], ["0", "0"])], Z, MatrixExpr.zeros(1), 2)


# -- mu difference ---------------------------------------------------------------------------


def test_mu_difference_examples():
    Q = VectorField.vertical(C1, [P(C1, "x*u^2")])
    d = mu_difference(Q, [MatrixExpr.zeros(1)], 3)
    assert d and all(v == ZERO for v in d.table.values())
    lam = P(C1, "c*x + u")
    d = mu_difference(Q, [MatrixExpr.of([[lam]])], 3)
    assert d
    assert d.table[(0, (0,))] == ZERO
    assert equal_numeric(d.table[(0, (1,))], P(C1, "(c*x + u)*x*u^2"))
    assert d.vanishes_on_invariant_sections()


# -- commutator identities ------------------------------------------------------------------


def test_identity_examples():
    V = VectorField.vertical(C1, [P(C1, "u^2 + x")])
    assert commutator_identity_report([prolong(V, 3)])
    Y = prolong_lambda(F(C1, ["0"], ["1"]), P(C1, "c"), 3)
    rep = commutator_identity_report([Y])
    assert rep and rep.identity == "LAcomm"
    X1, X2 = F(C2, ["0"], ["1", "0"]), F(C2, ["0"], ["0", "1"])
    rep = commutator_identity_report(prolong_sigma([X1, X2], MatrixExpr.of([[0, 1], [0, 0]]), 3))
    assert rep and rep.identity == "commsig"


def test_identity_detects_wrong_tag():
    # a lambda table labelled with a different lambda must fail the identity
    Y = prolong_lambda(F(C1, ["x"], ["u"]), P(C1, "u"), 3)
    from twistsym.prolong import Lambda

    Y.twist = Lambda(P(C1, "2*u"))
    assert not commutator_identity_report([Y])


def test_identity_refuses_nonscalar_mu():
    Y = prolong_mu(VectorField.vertical(C2, [ONE, ZERO]), [MatrixExpr.of([[0, 1], [0, 0]])], 2)
    with pytest.raises(NotApplicable, match="not applicable"):
        commutator_identity_report([Y])


# -- sigma involution condition ------------------------------------------------------------------


def test_sigma_involution_condition_examples():
    X1, X2 = F(C2, ["0"], ["1", "0"]), F(C2, ["0"], ["0", "1"])
    sysm = check_involution([X1, X2])
    assert sigma_involution_condition(sysm, MatrixExpr.of([[1, 2], [3, 4]]), 2)
    assert sigma_involution_condition(sysm, MatrixExpr.of([[P(C2, "x"), 0], [1, P(C2, "x^2")]]), 2)
    rep = sigma_involution_condition(sysm, MatrixExpr.of([[0, P(C2, "u1")], [0, 0]]), 2)
    # C_12^c = Y_1(sigma_2^c) - Y_2(sigma_1^c) = -Y_2(u1) = 0 for c = 2
    assert rep.sufficient.holds and rep.direct.holds
    rep2 = sigma_involution_condition(sysm, MatrixExpr.of([[0, 0], [P(C2, "u1"), 0]]), 2)
    # C_12^1 = Y_1(sigma_21) = 1: the sufficient condition fails and the
    # prolonged fields no longer commute
    assert not rep2.sufficient.holds and not rep2.direct.holds
