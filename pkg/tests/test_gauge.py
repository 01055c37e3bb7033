import math
import random

import numpy as np
import pytest

from twistsym import (
    ONE,
    ZERO,
    GaugeError,
    JetContext,
    MatrixExpr,
    VectorField,
    beta_from_lambda_quadrature,
    check_maurer_cartan,
    equal_numeric,
    lambda_from_beta,
    mu_from_A,
    parse_expression,
    prolong,
    prolong_lambda,
    rescaled_lambda,
    sigma_from_Gamma,
    tables_equal,
    verify_chi_diagram,
    verify_gauge_lambda,
    verify_gauge_mu,
    verify_gauge_sigma,
)
from twistsym.fuzz import rand_liepoint_field, rand_nonsingular, rand_nowhere_zero, rand_vertical_field
from twistsym.gauge import check_nowhere_zero

C1 = JetContext(1, 1, 3)
C2 = JetContext(1, 2, 3)


def P(ctx, t):
    return parse_expression(t, ctx)


def M(ctx, rows):
    return MatrixExpr.of([[P(ctx, t) for t in r] for r in rows])


def test_lambda_from_beta_examples():
    assert lambda_from_beta(C1, ONE) == ZERO
    assert lambda_from_beta(C1, P(C1, "x")) == P(C1, "1/x")
    assert equal_numeric(lambda_from_beta(C1, P(C1, "exp(u)")), P(C1, "u_[1]"))
    assert equal_numeric(lambda_from_beta(C1, P(C1, "x"), "inverse"), P(C1, "-1/x"))
    with pytest.raises(Exception):
        lambda_from_beta(C1, P(C1, "u_[1]"))


def test_mu_from_A_examples():
    assert all(v == ZERO for v in mu_from_A(C2, MatrixExpr.identity(2))[0].entries())
    (L,) = mu_from_A(C2, M(C2, [["x", "0"], ["0", "1"]]))
    assert equal_numeric(L[0, 0], P(C2, "1/x")) and L[1, 1] == ZERO and L[0, 1] == ZERO


@pytest.mark.parametrize("seed", range(8))
def test_mu_from_A_is_flat(seed):
    ctx = JetContext(2, 2, 2)
    A = rand_nonsingular(ctx.coordinates(0), random.Random(seed), 2)
    for d in ("forward", "inverse"):
        assert check_maurer_cartan(ctx, mu_from_A(ctx, A, d, None))


def test_sigma_from_Gamma_examples():
    assert all(v == ZERO for v in sigma_from_Gamma(C2, MatrixExpr.identity(2)).entries())
    S = sigma_from_Gamma(C2, M(C2, [["1", "x"], ["0", "1"]]))
    assert [str(v) for v in S.entries()] == ["0", "1", "0", "0"]
    assert all(v == ZERO for v in sigma_from_Gamma(C2, M(C2, [["2", "3"], ["1", "5"]])).entries())


def test_rescaled_lambda_identity():
    X = VectorField(C1, [P(C1, "x*u")], [P(C1, "u^2")])
    lam, f = P(C1, "x + u_[1]"), P(C1, "2 + u^2")
    lhs = prolong_lambda(X, lam, 3).scale(f)
    rhs = prolong_lambda(X.scale(f), rescaled_lambda(C1, lam, f), 3)
    assert tables_equal(lhs, rhs)


def test_verify_gauge_lambda_examples():
    X = VectorField(C1, [P(C1, "x")], [P(C1, "u")])
    assert verify_gauge_lambda(X, ONE, 2)
    assert verify_gauge_lambda(X, P(C1, "x"), 2)
    rep = verify_gauge_lambda(VectorField(C1, [ZERO], [ONE]), P(C1, "exp(u)"), 2)
    assert rep and rep.twist["lambda"] == "u_[1]"
    for d in ("forward", "inverse"):
        assert verify_gauge_lambda(X, P(C1, "exp(x*u)"), 3, d)


def test_verify_gauge_mu_examples():
    Q = VectorField.vertical(C2, [P(C2, "u1"), P(C2, "u2")])
    assert verify_gauge_mu(Q, MatrixExpr.identity(2), 2)
    assert verify_gauge_mu(Q, M(C2, [["1", "x"], ["0", "1"]]), 2)
    g = P(C2, "2 + x^2")
    assert verify_gauge_mu(Q, MatrixExpr.scalar(g, 2), 2)
    # scalar A reduces to the lambda gauge componentwise
    Q1 = VectorField.vertical(C1, [P(C1, "u*x")])
    assert verify_gauge_lambda(Q1, P(C1, "2 + x^2"), 2)
    with pytest.raises(Exception, match="vertical"):
        verify_gauge_mu(VectorField(C2, [ONE], [ZERO, ZERO]), MatrixExpr.identity(2), 2)


def test_verify_gauge_sigma_examples():
    X1 = VectorField.vertical(C2, [ONE, ZERO])
    X2 = VectorField.vertical(C2, [ZERO, ONE])
    assert verify_gauge_sigma([X1, X2], MatrixExpr.identity(2), 2)
    G = M(C2, [["1", "x"], ["0", "1"]])
    for d in ("forward", "inverse"):
        assert verify_gauge_sigma([X1, X2], G, 2, d)


def test_gauge_distribution_degenerate():
    X1 = VectorField.vertical(C2, [P(C2, "x"), ONE])
    X2 = VectorField.vertical(C2, [P(C2, "2*x"), P(C2, "2")])
    with pytest.raises(GaugeError, match="degenerate"):
        verify_gauge_sigma([X1, X2], MatrixExpr.identity(2), 1)


def test_chi_diagram_composes_edges():
    Q1 = VectorField.vertical(C2, [P(C2, "u1*x"), P(C2, "u2")])
    Q2 = VectorField.vertical(C2, [ONE, P(C2, "x")])
    A = M(C2, [["1", "x"], ["0", "2"]])
    B = M(C2, [["1", "0"], ["u1", "1"]])
    assert verify_chi_diagram([Q1, Q2], A, B, 2)
    # the two edges separately
    assert verify_gauge_mu(Q1, A, 2, "inverse")


def test_nowhere_zero_checks():
    assert check_nowhere_zero(P(C1, "2 + x^2")) > 0
    with pytest.raises(GaugeError):
        check_nowhere_zero(ZERO)


def test_quadrature_examples():
    grid, beta = beta_from_lambda_quadrature(C1, ZERO, 0.0, 1.0)
    assert np.allclose(beta, 1.0)
    grid, beta = beta_from_lambda_quadrature(C1, P(C1, "1/x"), 1.0, math.e)
    assert beta[-1] / beta[0] == pytest.approx(math.e, rel=1e-9)
    with pytest.raises(GaugeError, match="nonlocal gauge factor"):
        beta_from_lambda_quadrature(C1, P(C1, "u_[1]"), 0.0, 1.0)


@pytest.mark.parametrize("seed", range(6))
def test_fuzzed_lambda_gauge(seed):
    rng = random.Random(seed)
    X = rand_liepoint_field(C1, rng)
    beta = rand_nowhere_zero(C1.coordinates(0), rng)
    assert verify_gauge_lambda(X, beta, 3, rng.choice(("forward", "inverse")))
