"""Gauge maps between twisted and standard prolongations.

Conventions (checked by the verify_* functions, in both directions):

* scalar, forward:   beta * X_lambda^(n) = (beta X)^(n)      with lambda = D_x beta / beta
* scalar, inverse:   gamma * W^(n) = (gamma W)_lambda^(n)    with lambda = -D_x gamma / gamma
* vector index, forward: A * Q_mu^(n) = (A Q)^(n)            with Lambda_i = A^-1 D_i A
* vector index, inverse: A * W^(n) = (A W)_mu^(n)            with Lambda_i = -(D_i A) A^-1
* module index, forward: Gamma * Y = prolongations of Gamma X with sigma = Gamma^-1 D_x Gamma
* module index, inverse: Gamma * W^(n) = sigma-prolongations of Gamma W
                                                             with sigma = -(D_x Gamma) Gamma^-1
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .expr import Expr, add, as_expr, div, mul, neg, sub, to_text
from .fields import (
    InvolutionSystem,
    ProlongedField,
    VectorField,
    tables_equal,
    transform_fields,
)
from .jet import JetContext, JetError
from .matrix import MatrixExpr, as_matrix
from .numeric import (
    DEFAULT,
    EqualityConfig,
    Program,
    SingularOnBox,
    Verdict,
    evaluate_on_box,
)
from .prolong import check_maurer_cartan, prolong, prolong_chi, prolong_lambda, prolong_mu, prolong_sigma

FORWARD = "forward"
INVERSE = "inverse"


class GaugeError(ValueError):
    pass


def _check_direction(direction: str):
    if direction not in (FORWARD, INVERSE):
        raise ValueError(f"direction must be {FORWARD!r} or {INVERSE!r}")


def _on_M(ctx: JetContext, exprs, what: str):
    for e in exprs:
        if ctx.order_of(e) > 0:
            raise GaugeError(f"{what} must be a function on M, got {to_text(e)}")


def check_nowhere_zero(e: Expr, cfg: EqualityConfig = DEFAULT, what: str = "gauge factor") -> float:
    """Nowhere-zero check at the oracle sample points.

    Samples inside the pole neighbourhood of 1/e are resampled like any
    other pole; the check fails only when that is impossible.  Returns
    min |e| over the accepted samples.
    """
    e = as_expr(e)
    try:
        _, _, vals = evaluate_on_box([e, div(1, e)], cfg)
    except (SingularOnBox, ZeroDivisionError) as exc:
        raise GaugeError(f"{what} vanishes on the sampling box") from exc
    return float(np.min(np.abs(vals[:, 0])))


def check_nonsingular(A: MatrixExpr, cfg: EqualityConfig = DEFAULT, what: str = "gauge matrix") -> float:
    if not A.is_square:
        raise GaugeError(f"{what} must be square")
    return check_nowhere_zero(A.det(), cfg, f"determinant of {what}")


# -- construction ------------------------------------------------------------------------


def lambda_from_beta(ctx: JetContext, beta, direction: str = FORWARD) -> Expr:
    """lambda = D_x beta / beta (forward) or -D_x gamma / gamma (inverse)."""
    _check_direction(direction)
    if ctx.q != 1:
        raise JetError("scalar gauge needs a single independent variable")
    beta = as_expr(beta)
    _on_M(ctx, [beta], "beta")
    lam = div(ctx.D(beta), beta)
    return lam if direction == FORWARD else neg(lam)


def mu_from_A(ctx: JetContext, A, direction: str = FORWARD, cfg: EqualityConfig | None = DEFAULT) -> list:
    """Lambda_i = A^-1 D_i A (forward) or -(D_i A) A^-1 (inverse).

    When ``cfg`` is given the result is self-checked for flatness.
    """
    _check_direction(direction)
    A = as_matrix(A)
    if A.shape != (ctx.p, ctx.p):
        raise JetError(f"A must be {ctx.p}x{ctx.p}")
    _on_M(ctx, A.entries(), "A")
    Ainv = A.inverse()
    Lams = []
    for i in range(ctx.q):
        DA = A.total_derivative(ctx, i)
        Lams.append(Ainv @ DA if direction == FORWARD else -(DA @ Ainv))
    if cfg is not None:
        mc = check_maurer_cartan(ctx, Lams, cfg)
        if not mc:  # pragma: no cover - pure gauges are flat
            raise GaugeError("pure-gauge Lambda failed the Maurer-Cartan self-check")
    return Lams


def sigma_from_Gamma(ctx: JetContext, Gamma, direction: str = FORWARD) -> MatrixExpr:
    """sigma = Gamma^-1 D_x Gamma (forward) or -(D_x Gamma) Gamma^-1 (inverse)."""
    _check_direction(direction)
    if ctx.q != 1:
        raise JetError("module gauge needs a single independent variable")
    G = as_matrix(Gamma)
    _on_M(ctx, G.entries(), "Gamma")
    DG = G.total_derivative(ctx, 0)
    return G.inverse() @ DG if direction == FORWARD else -(DG @ G.inverse())


def rescaled_lambda(ctx: JetContext, lam, f) -> Expr:
    """lambda - D_x f / f for f on M: f * X_lambda^(n) = (f X)_{lambda - D_x f/f}^(n)."""
    f = as_expr(f)
    _on_M(ctx, [f], "f")
    return sub(as_expr(lam), div(ctx.D(f), f))


# -- verification ---------------------------------------------------------------------------


@dataclass
class GaugeReport:
    holds: bool
    verdict: Verdict
    twist: dict
    min_gauge: float = 0.0

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "worst_abs": self.verdict.worst_abs,
            "checked": self.verdict.checked,
            "failures": [f[0] for f in self.verdict.failures],
            "twist": self.twist,
        }


def _scaled_vertical(Y: ProlongedField, A: MatrixExpr) -> ProlongedField:
    """Apply A on the vector index of a prolonged vertical field."""
    psi = {}
    p = Y.ctx.p
    for (a, J) in Y.psi:
        if a == 0:
            col = A.apply([Y.psi[(b, J)] for b in range(p)])
            for b in range(p):
                psi[(b, J)] = col[b]
    return ProlongedField(Y.ctx, Y.xi, psi, Y.n, Y.twist)


def _module_combine(Ys: Sequence[ProlongedField], G: MatrixExpr) -> list[ProlongedField]:
    r = len(Ys)
    out = []
    for al in range(r):
        xi = tuple(add(*(mul(G[al, be], Ys[be].xi[i]) for be in range(r))) for i in range(len(Ys[0].xi)))
        psi = {k: add(*(mul(G[al, be], Ys[be].psi[k]) for be in range(r))) for k in Ys[0].psi}
        out.append(ProlongedField(Ys[0].ctx, xi, psi, Ys[0].n, Ys[0].twist))
    return out


def verify_gauge_lambda(
    X: VectorField, beta, n: int, direction: str = FORWARD, cfg: EqualityConfig = DEFAULT
) -> GaugeReport:
    _check_direction(direction)
    ctx = X.ctx
    beta = as_expr(beta)
    m = check_nowhere_zero(beta, cfg, "beta")
    lam = lambda_from_beta(ctx, beta, direction)
    if direction == FORWARD:
        lhs = prolong_lambda(X, lam, n).scale(beta)
        rhs = prolong(X.scale(beta), n)
    else:
        lhs = prolong(X, n).scale(beta)
        rhs = prolong_lambda(X.scale(beta), lam, n)
    v = tables_equal(lhs, rhs, cfg)
    return GaugeReport(v.holds, v, {"lambda": to_text(lam)}, m)


def verify_gauge_mu(
    Qf: VectorField, A, n: int, direction: str = FORWARD, cfg: EqualityConfig = DEFAULT
) -> GaugeReport:
    """A (Q_mu^(n)) = (A Q)^(n) for vertical Q, or the inverse statement."""
    _check_direction(direction)
    if not Qf.is_vertical:
        raise JetError("mu gauge equivalence holds for vertical (evolutionary) fields only")
    A = as_matrix(A)
    m = check_nonsingular(A, cfg, "A")
    ctx = Qf.ctx
    Lams = mu_from_A(ctx, A, direction, None)
    AQ = VectorField.vertical(ctx, A.apply(list(Qf.phi)))
    if direction == FORWARD:
        lhs = _scaled_vertical(prolong_mu(Qf, Lams, n, skip_compat=True, cfg=None), A)
        rhs = prolong(AQ, n, verify_paths=None)
    else:
        lhs = _scaled_vertical(prolong(Qf, n, verify_paths=None), A)
        rhs = prolong_mu(AQ, Lams, n, skip_compat=True, cfg=None)
    v = tables_equal(lhs, rhs, cfg)
    return GaugeReport(v.holds, v, {"Lambda": [L.to_rows_text() for L in Lams]}, m)


def _distribution_check(Ys, Zs, cfg: EqualityConfig) -> Verdict:
    """Pointwise equality of span{Y_alpha} and span{Z_alpha} on J^n M."""
    comps = [c for Y in list(Ys) + list(Zs) for _, c in Y.components()]
    symbols = Ys[0].ctx.coordinates(Ys[0].ctx.n) + list(Ys[0].ctx.params)
    prog = Program(comps, symbols)
    rng = np.random.default_rng(cfg.seed + 1)
    pts = rng.uniform(-cfg.half_width, cfg.half_width, size=(cfg.samples, len(symbols)))
    vals, bad = prog.run(pts, cfg.backend)
    vals = vals[~bad]
    r = len(Ys)
    m = len(comps) // (2 * r)
    v = Verdict(True, checked=len(vals))
    for row in vals:
        Ym = row[: r * m].reshape(r, m)
        Zm = row[r * m :].reshape(r, m)
        tol = 1e-8 * max(1.0, np.abs(row).max())
        ry = np.linalg.matrix_rank(Ym, tol)
        rz = np.linalg.matrix_rank(Zm, tol)
        rj = np.linalg.matrix_rank(np.vstack([Ym, Zm]), tol)
        if ry < r or rz < r:
            raise GaugeError("distribution rank degenerate at sample")
        if not (ry == rz == rj):
            v.holds = False
            v.failures.append(("distribution", f"ranks {ry}, {rz}, joint {rj}"))
    return v


def verify_gauge_sigma(
    system, Gamma, n: int, direction: str = FORWARD, cfg: EqualityConfig = DEFAULT
) -> GaugeReport:
    """Gamma * (sigma-prolonged X) = standard prolongations of Gamma X, plus
    equality of the generated distributions; or the inverse statement."""
    _check_direction(direction)
    fields = list(system.fields) if isinstance(system, InvolutionSystem) else list(system)
    G = as_matrix(Gamma)
    m = check_nonsingular(G, cfg, "Gamma")
    ctx = fields[0].ctx
    sigma = sigma_from_Gamma(ctx, G, direction)
    GX = transform_fields(fields, G)
    if direction == FORWARD:
        Ys = prolong_sigma(fields, sigma, n)
        lhs = _module_combine(Ys, G)
        rhs = [prolong(W, n) for W in GX]
        span_a, span_b = Ys, rhs
    else:
        Zs = [prolong(W, n) for W in fields]
        lhs = _module_combine(Zs, G)
        rhs = prolong_sigma(GX, sigma, n)
        span_a, span_b = Zs, rhs
    v = Verdict(True)
    for L, R in zip(lhs, rhs):
        v = v.merge(tables_equal(L, R, cfg))
    v = v.merge(_distribution_check(span_a, span_b, cfg))
    return GaugeReport(v.holds, v, {"sigma": sigma.to_rows_text()}, m)


def verify_chi_diagram(
    fields: Sequence[VectorField], A, B, n: int, cfg: EqualityConfig = DEFAULT
) -> GaugeReport:
    """A B (W^(n)) is the chi-prolongation of A B W, with
    Lambda = -(D_x A) A^-1 on the vector index and sigma = -(D_x B) B^-1 on
    the module index."""
    fields = list(fields)
    ctx = fields[0].ctx
    A, B = as_matrix(A), as_matrix(B)
    m = min(check_nonsingular(A, cfg, "A"), check_nonsingular(B, cfg, "B"))
    Lam = mu_from_A(ctx, A, INVERSE, None)[0]
    sigma = sigma_from_Gamma(ctx, B, INVERSE)
    Zs = [prolong(W, n) for W in fields]
    lhs = [_scaled_vertical(Z, A) for Z in _module_combine(Zs, B)]
    P = [VectorField.vertical(ctx, A.apply(list(W.phi))) for W in transform_fields(fields, B)]
    rhs = prolong_chi(P, Lam, sigma, n)
    v = Verdict(True)
    for L, R in zip(lhs, rhs):
        v = v.merge(tables_equal(L, R, cfg))
    return GaugeReport(v.holds, v, {"Lambda": Lam.to_rows_text(), "sigma": sigma.to_rows_text()}, m)


def beta_from_lambda_quadrature(
    ctx: JetContext, lam, x0: float, x1: float, points: int = 11, tol: float = 1e-10
) -> tuple[np.ndarray, np.ndarray]:
    """beta(x) = exp(int_x0^x lambda dx) on a uniform grid, normalised to beta(x0) = 1.

    Only for lambda depending on the independent variable alone; otherwise
    the gauge factor is nonlocal and is refused.
    """
    lam = as_expr(lam)
    xname = ctx.x_name(0)
    if ctx.q != 1:
        raise JetError("quadrature gauge needs a single independent variable")
    if lam.free_symbols - {xname}:
        raise GaugeError("nonlocal gauge factor - not representable")
    prog = Program([lam], [xname])

    def f(t):
        vals, bad = prog.run(np.array([[t]]))
        if bad[0]:
            raise GaugeError(f"lambda singular at x = {t}")
        return float(vals[0, 0])

    grid = np.linspace(x0, x1, points)
    out = np.empty(points)
    acc = 0.0
    out[0] = 1.0
    for k in range(1, points):
        val, _ = integrate.quad(f, grid[k - 1], grid[k], epsabs=tol, epsrel=tol)
        acc += val
        out[k] = np.exp(acc)
    return grid, out
