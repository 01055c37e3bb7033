"""Seeded random generators for property tests, acceptance runs and benchmarks.

Everything takes a ``random.Random`` so a run is reproducible from its seed.
Gauge generators produce factors that are nowhere zero (or nowhere
singular) on the whole space, not just on the sampling box.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .expr import FUNCTIONS, ONE, ZERO, Expr, add, const, div, exp, func, mul, neg, power, sub, sym
from .fields import VectorField
from .jet import JetContext
from .matrix import MatrixExpr


def rand_coeff(rng: random.Random, lo: int = -3, hi: int = 3, nonzero: bool = True) -> Fraction:
    c = rng.randint(lo, hi)
    while nonzero and c == 0:
        c = rng.randint(lo, hi)
    if rng.random() < 0.2:
        c = Fraction(c, rng.randint(2, 4))
    return Fraction(c)


def rand_poly(names: Sequence[str], rng: random.Random, degree: int = 2, terms: int = 3) -> Expr:
    """Sum of ``terms`` monomials of degree <= ``degree`` with small coefficients."""
    out = []
    for _ in range(terms):
        k = rng.randint(0, degree)
        out.append(mul(const(rand_coeff(rng)), *(sym(rng.choice(names)) for _ in range(k))))
    return add(*out)


def base_names(ctx: JetContext) -> list[str]:
    return ctx.coordinates(0)


def rand_liepoint_field(ctx: JetContext, rng: random.Random, degree: int = 2, terms: int = 3) -> VectorField:
    names = base_names(ctx)
    xi = [rand_poly(names, rng, degree, terms) for _ in range(ctx.q)]
    phi = [rand_poly(names, rng, degree, terms) for _ in range(ctx.p)]
    return VectorField(ctx, xi, phi)


def rand_vertical_field(
    ctx: JetContext, rng: random.Random, degree: int = 2, order: int = 0, terms: int = 3
) -> VectorField:
    names = ctx.coordinates(order)
    return VectorField.vertical(ctx, [rand_poly(names, rng, degree, terms) for _ in range(ctx.p)])


def rand_matrix(
    names: Sequence[str], rng: random.Random, n: int, m: int | None = None, degree: int = 1, terms: int = 2
) -> MatrixExpr:
    m = n if m is None else m
    return MatrixExpr.of([[rand_poly(names, rng, degree, terms) for _ in range(m)] for _ in range(n)])


def rand_nowhere_zero(names: Sequence[str], rng: random.Random, degree: int = 1) -> Expr:
    """A factor that never vanishes: c + s^2, or exp of a polynomial, with a sign."""
    sign = rng.choice((1, -1))
    if rng.random() < 0.5:
        s = rand_poly(names, rng, degree, 2)
        return mul(sign, add(rng.randint(1, 3), power(s, 2)))
    return mul(sign, exp(rand_poly(names, rng, degree, 2)))


def rand_nonsingular(names: Sequence[str], rng: random.Random, n: int, degree: int = 1) -> MatrixExpr:
    """L U with L unit lower triangular and U upper triangular with nowhere-zero diagonal."""
    L = [[ONE if i == j else (rand_poly(names, rng, degree, 2) if j < i else ZERO) for j in range(n)] for i in range(n)]
    U = [
        [rand_nowhere_zero(names, rng, degree) if i == j else (rand_poly(names, rng, degree, 2) if j > i else ZERO) for j in range(n)]
        for i in range(n)
    ]
    return MatrixExpr.of(L) @ MatrixExpr.of(U)


def rand_constant_invertible(rng: random.Random, n: int) -> MatrixExpr:
    """Integer matrix with determinant +-1 or a small nonzero integer."""
    while True:
        rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        M = MatrixExpr.of(rows)
        d = M.det()
        if d != ZERO:
            return M


def rand_expr(names: Sequence[str], rng: random.Random, depth: int = 3) -> Expr:
    """Random expression tree over the full grammar, for parser round trips."""
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.4:
            return const(rand_coeff(rng, -9, 9, nonzero=False))
        return sym(rng.choice(names))
    k = rng.randrange(7)
    a = rand_expr(names, rng, depth - 1)
    if k == 0:
        return add(a, rand_expr(names, rng, depth - 1))
    if k == 1:
        return sub(a, rand_expr(names, rng, depth - 1))
    if k == 2:
        return mul(a, rand_expr(names, rng, depth - 1))
    if k == 3:
        b = rand_expr(names, rng, depth - 1)
        return a if b == ZERO else div(a, b)
    if k == 4:
        if a == ZERO:
            return a
        return power(a, rng.choice((2, 3, -1, -2, Fraction(1, 2))))
    if k == 5:
        return neg(a)
    return func(rng.choice(FUNCTIONS), a)


def lambda_symmetric_ode(ctx: JetContext, rng: random.Random, lam: Expr | None = None):
    """(F, lam) with u_xx = F lambda-symmetric for d/du.

    With lam depending on x only, zeta = u_x - lam u is an invariant of the
    lambda-prolonged d/du and D_x zeta = G(x, zeta) is a symmetric equation:
    u_xx = lam' u + lam u_x + G(x, u_x - lam u).
    """
    x, u, u1 = ctx.x(), ctx.u(), ctx.u(0, 1)
    if lam is None:
        lam = rand_poly([ctx.x_name(0)], rng, 1, 2)
    zeta = sub(u1, mul(lam, u))
    G = add(*(mul(rand_poly([ctx.x_name(0)], rng, 1, 1), power(zeta, k)) for k in range(rng.randint(1, 3))))
    F = add(mul(ctx.D(lam), u), mul(lam, u1), G)
    return F, lam
