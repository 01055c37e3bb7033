"""Symmetry checks, invariants by differentiation and order reduction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .expr import ONE, ZERO, Expr, add, as_expr, diff, div, expand, mul, power, sub, substitute, sym, to_text
from .fields import ProlongedField, VectorField, evolutionary_rep
from .jet import JetContext, JetError, OdeSystem, SolvedSystem
from .numeric import DEFAULT, EqualityConfig, Program, Verdict, equal_numeric, evaluate_on_box, is_zero
from .prolong import Chi, Lambda, Mu, Sigma, Standard, _scalar_of


class ReductionError(ValueError):
    def __init__(self, message: str, certificate: dict | None = None):
        super().__init__(message)
        self.certificate = certificate or {}


class IBDPError(ValueError):
    pass


def _as_solved(system) -> SolvedSystem:
    if isinstance(system, SolvedSystem):
        return system
    if isinstance(system, OdeSystem):
        return system.as_solved()
    raise TypeError("expected an OdeSystem or SolvedSystem")


def _as_list(Y) -> list[ProlongedField]:
    return [Y] if isinstance(Y, ProlongedField) else list(Y)


# -- symmetry ---------------------------------------------------------------------------


@dataclass
class SymmetryVerdict:
    holds: bool
    residuals: list  # per field, per equation
    worst_abs: float
    strong: bool
    verdict: Verdict | None = None

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "strong": self.strong,
            "worst_abs": self.worst_abs,
            "residuals": [[to_text(expand(r)) for r in rs] for rs in self.residuals],
        }


def check_symmetry(system, Y, cfg: EqualityConfig = DEFAULT, strong: bool = False) -> SymmetryVerdict:
    """[Y(Delta^a)] restricted to the solution manifold must vanish.

    With ``strong`` the restriction is skipped.
    """
    S = _as_solved(system)
    fields = _as_list(Y)
    residuals = []
    verdict = Verdict(True)
    for k, Yk in enumerate(fields):
        if Yk.n < S.order:
            raise JetError(f"prolongation order {Yk.n} below equation order {S.order}")
        rs = []
        for a, eq in enumerate(S.equations()):
            r = Yk.apply(eq)
            if not strong:
                r = S.restrict(r)
            rs.append(r)
        residuals.append(rs)
        verdict = verdict.merge(
            Verdict.from_pairs(((f"Y{k + 1}(Delta{a + 1})", r, ZERO) for a, r in enumerate(rs)), cfg)
        )
    return SymmetryVerdict(verdict.holds, residuals, verdict.worst_abs, strong, verdict)


def check_strong_symmetry(system, Y, cfg: EqualityConfig = DEFAULT) -> SymmetryVerdict:
    return check_symmetry(system, Y, cfg, strong=True)


# -- IBDP -----------------------------------------------------------------------------------


def ibdp_eligible(Y: ProlongedField, cfg: EqualityConfig = DEFAULT) -> bool:
    t = Y.twist
    if t is None or isinstance(t, (Standard, Lambda, Sigma)):
        return True
    if isinstance(t, Mu):
        return t.scalar_part(cfg) is not None
    if isinstance(t, Chi):
        return _scalar_of(t.Lam, cfg) is not None
    return False


def _check_invariant(Ys, e, cfg, what):
    for k, Y in enumerate(Ys):
        if Y.ctx.order_of(e) > Y.n:
            raise JetError(f"prolongation order {Y.n} too low to act on {what}")
        if not is_zero(Y.apply(e), cfg):
            raise IBDPError(f"inputs not invariant: Y{k + 1}({what}) != 0")


def ibdp_next(Y, eta, zeta, cfg: EqualityConfig = DEFAULT, direction: int = 0) -> Expr:
    """zeta' = D_i zeta / D_i eta, checked to be a common invariant again."""
    Ys = _as_list(Y)
    for Yk in Ys:
        if not ibdp_eligible(Yk, cfg):
            raise IBDPError(f"twist not IBDP-eligible: {Yk.twist}")
    eta, zeta = as_expr(eta), as_expr(zeta)
    _check_invariant(Ys, eta, cfg, "eta")
    _check_invariant(Ys, zeta, cfg, "zeta")
    ctx = Ys[0].ctx
    ctx = ctx.at_least(max(ctx.order_of(eta), ctx.order_of(zeta)) + 1)
    Deta = ctx.D(eta, direction)
    if is_zero(Deta, cfg):
        raise IBDPError("degenerate invariant pair: D eta vanishes")
    nxt = ctx.D(zeta, direction) if Deta == ONE else div(ctx.D(zeta, direction), Deta)
    _check_invariant(Ys, nxt, cfg, "the extension")
    return nxt


@dataclass
class InvariantChain:
    """eta of order 0 and levels[k] = (zeta^1_(k), ..., zeta^m_(k)) of order k + 1."""

    fields: list
    eta: Expr
    levels: list = field(default_factory=list)

    def __post_init__(self):
        self.fields = _as_list(self.fields)
        self.eta = as_expr(self.eta)
        self.levels = [[as_expr(z) for z in lvl] for lvl in self.levels]

    @property
    def top_order(self) -> int:
        return len(self.levels)

    def extend(self, order: int, cfg: EqualityConfig = DEFAULT) -> "InvariantChain":
        """Extend by IBDP until the invariants reach the given order."""
        while len(self.levels) < order:
            self.levels.append([ibdp_next(self.fields, self.eta, z, cfg) for z in self.levels[-1]])
        return self

    def to_dict(self) -> dict:
        return {"eta": to_text(self.eta), "levels": [[to_text(z) for z in lvl] for lvl in self.levels]}


# -- invariant search ------------------------------------------------------------------------------


@dataclass
class FirstInvariants:
    eta: Expr | None
    zetas: list
    candidates: list
    notes: list = field(default_factory=list)

    def chain(self, fields) -> InvariantChain:
        if self.eta is None or not self.zetas:
            raise ReductionError("no complete set of first invariants")
        return InvariantChain(fields, self.eta, [list(self.zetas)])

    def to_dict(self) -> dict:
        return {
            "eta": to_text(self.eta) if self.eta is not None else None,
            "zetas": [to_text(z) for z in self.zetas],
            "candidates": [to_text(c) for c in self.candidates],
            "notes": list(self.notes),
        }


def _monomials(names: Sequence[str], degree: int) -> list[Expr]:
    out = []
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(names, d):
            out.append(mul(*(sym(s) for s in combo)))
    return out


def _rref(A: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    A = A.copy()
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = r + int(np.argmax(np.abs(A[r:, c])))
        if abs(A[piv, c]) <= tol:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] /= A[r, c]
        for k in range(rows):
            if k != r:
                A[k] -= A[k, c] * A[r]
        r += 1
    return A[:r]


def _rational_expr(coeffs: Sequence[float], basis: Sequence[Expr], max_den: int = 1000) -> Expr:
    terms = []
    for c, m in zip(coeffs, basis):
        f = Fraction(float(c)).limit_denominator(max_den)
        if f != 0:
            terms.append(mul(f, m))
    return add(*terms)


def _jacobian_rank(exprs, wrt, symbols, pts, tol=1e-7) -> int:
    J = [diff(e, v) for e in exprs for v in wrt]
    prog = Program(J, symbols)
    vals, bad = prog.run(pts)
    ranks = []
    for row in vals[~bad]:
        M = row.reshape(len(exprs), len(wrt))
        ranks.append(np.linalg.matrix_rank(M, tol * max(1.0, np.abs(M).max())))
    return int(np.median(ranks)) if ranks else 0


def find_first_invariants(
    Y, degree: int = 1, param_degree: int = 1, cfg: EqualityConfig = DEFAULT
) -> FirstInvariants:
    """Common invariants of order <= 1 within a polynomial ansatz.

    Monomials of degree 1..``degree`` in the jet coordinates of order <= 1,
    optionally multiplied by parameter monomials up to ``param_degree``.
    The numeric kernel is normalised by reduced row echelon form in
    monomial order, rationalised and confirmed by the oracle.
    """
    Ys = _as_list(Y)
    ctx = Ys[0].ctx
    if ctx.q != 1:
        raise JetError("first-invariant search is implemented for ODEs")
    coords = ctx.coordinates(1)
    basis = _monomials(coords, degree)
    if ctx.params:
        pm = [ONE] + _monomials(list(ctx.params), param_degree)
        basis = [mul(p, m) for p in pm for m in basis]
    rows = [Yk.apply(m) for Yk in Ys for m in basis]
    symbols = coords + list(ctx.params)
    cfg_k = EqualityConfig(
        samples=max(cfg.samples, 2 * len(basis)), half_width=cfg.half_width, seed=cfg.seed, backend=cfg.backend
    )
    _, pts, vals = evaluate_on_box(rows, cfg_k, symbols)
    nb = len(basis)
    A = vals.reshape(len(pts) * len(Ys), nb) if len(Ys) == 1 else np.vstack(
        [vals[:, k * nb : (k + 1) * nb] for k in range(len(Ys))]
    )
    scale = np.maximum(1.0, np.abs(A).max(axis=1, keepdims=True))
    _, s, vt = np.linalg.svd(A / scale)
    tol = 1e-9 * max(1.0, s[0])
    rank = int(np.sum(s > tol))
    null = vt[rank:]
    notes = []
    if null.shape[0] == 0:
        return FirstInvariants(None, [], [], ["no invariants in ansatz"])
    cands = []
    for vec in _rref(null):
        e = _rational_expr(vec, basis)
        if e == ZERO:
            continue
        if all(is_zero(Yk.apply(e), cfg) for Yk in Ys):
            cands.append(e)
        else:
            notes.append(f"kernel vector {to_text(e)} failed confirmation")
    # greedy functionally independent selection, order-0 first
    pts2 = pts[: min(len(pts), 40)]
    eta, zetas, chosen = None, [], []
    for e in sorted(cands, key=lambda c: ctx.order_of(c)):
        trial = chosen + [e]
        if _jacobian_rank(trial, coords, symbols, pts2) == len(trial):
            chosen = trial
            if ctx.order_of(e) == 0 and eta is None:
                eta = e
            elif ctx.order_of(e) == 1:
                zetas.append(e)
    if not chosen:
        notes.append("no invariants in ansatz")
    return FirstInvariants(eta, zetas, cands, notes)


# -- reductions ---------------------------------------------------------------------------


@dataclass
class ReducedSystem:
    system: OdeSystem
    metadata: dict

    def to_dict(self) -> dict:
        return {
            "equations": [
                f"{self.system.ctx.u_name(a, (k,))} = {to_text(F)}"
                for a, (F, k) in enumerate(zip(self.system.rhs, self.system.orders))
            ],
            "metadata": self.metadata,
        }


def reduce_adapted(system: OdeSystem, v: int = 0, cfg: EqualityConfig = DEFAULT) -> ReducedSystem:
    """Pass to w = v_(1) when the equations depend on v only through derivatives."""
    ctx = system.ctx
    vname = ctx.u_name(v)
    for a, F in enumerate(system.rhs):
        if vname in F.free_symbols and not is_zero(diff(F, vname), cfg):
            raise ReductionError(f"equation {a + 1} depends on {vname} - coordinates not adapted")
    nv = system.orders[v]
    if nv < 2:
        raise ReductionError("nothing to reduce: the adapted variable appears at order 1")
    shift = {ctx.u_name(v, (k,)): sym(ctx.u_name(v, (k - 1,))) for k in range(1, system.order + 1)}
    shift[vname] = ZERO
    rhs = tuple(substitute(F, shift) for F in system.rhs)
    orders = tuple(k - 1 if a == v else k for a, k in enumerate(system.orders))
    reduced = OdeSystem(ctx.with_order(max(orders)), rhs, orders)
    meta = {
        "variable": f"w = {ctx.u_name(v, (1,))}",
        "quadrature": f"{vname} = integral of w d{ctx.x_name(0)} + C",
    }
    return ReducedSystem(reduced, meta)


def reduce_by_invariants(
    system: OdeSystem,
    chain: InvariantChain,
    degree: int = 3,
    param_degree: int = 1,
    cfg: EqualityConfig = DEFAULT,
) -> ReducedSystem:
    """Rewrite Delta in the invariants (eta; zeta, ..., zeta_(n-1)).

    Each restricted zeta^a_(n-1) must be a function G^a of eta and the
    lower zetas; this is certified by a Jacobian rank test and G^a is then
    found by a bounded-degree least-squares fit and confirmed by the
    oracle.  The reduced system uses x for eta and u^a_[k] for
    zeta^a_(k).
    """
    n = system.order
    sv = check_symmetry(system, chain.fields, cfg)
    if not sv:
        raise ReductionError("symmetry check failed", {"residuals": sv.to_dict()["residuals"]})
    chain.extend(n, cfg)
    S = system.as_solved()
    p = len(chain.levels[0])
    ctx = system.ctx
    if ctx.p != p:
        notes = [f"chain has {p} first-order invariants for {ctx.p} dependent variables"]
    else:
        notes = []
    lower = [z for lvl in chain.levels[: n - 1] for z in lvl]
    targets = [S.restrict(z) for z in chain.levels[n - 1]]
    coords = ctx.coordinates(n - 1)
    symbols = coords + list(ctx.params)
    rng = np.random.default_rng(cfg.seed)
    cfg_pts = EqualityConfig(samples=max(cfg.samples, 60), half_width=cfg.half_width, seed=cfg.seed)
    _, pts, _ = evaluate_on_box([chain.eta] + lower + targets, cfg_pts, symbols, rng)
    base_rank = _jacobian_rank([chain.eta] + lower, coords, symbols, pts)
    certificate = {"base_rank": base_rank, "ranks": []}
    for t in targets:
        certificate["ranks"].append(_jacobian_rank([chain.eta] + lower + [t], coords, symbols, pts))
    dependent = all(r == base_rank for r in certificate["ranks"])
    certificate["dependent"] = dependent
    certificate["notes"] = notes
    if not dependent:
        raise ReductionError("not expressible in chain: functional dependence fails", certificate)

    # ansatz in new variables y = eta, z^a_(k) = zeta^a_(k)
    red_ctx = JetContext(1, p, max(n - 1, 1), ctx.params)
    new_vars = [red_ctx.x_name(0)] + [red_ctx.u_name(a, (k,)) for k in range(n - 1) for a in range(p)]
    old_vals = [chain.eta] + lower
    basis_new = [ONE] + _monomials(new_vars, degree)
    if ctx.params:
        pm = [ONE] + _monomials(list(ctx.params), param_degree)
        basis_new = [mul(q, m) for q in pm for m in basis_new]
    bind = dict(zip(new_vars, old_vals))
    basis_old = [substitute(m, bind) for m in basis_new]
    prog = Program(basis_old + targets, symbols)
    vals, bad = prog.run(pts)
    vals = vals[~bad]
    nb = len(basis_new)
    Amat, Bmat = vals[:, :nb], vals[:, nb:]
    rhs = []
    for a, t in enumerate(targets):
        c, *_ = np.linalg.lstsq(Amat, Bmat[:, a], rcond=None)
        G = _rational_expr(c, basis_new)
        if not equal_numeric(substitute(G, bind), t, cfg):
            certificate["failed_component"] = a + 1
            raise ReductionError("not expressible in chain at ansatz degree", certificate)
        rhs.append(G)
    reduced = OdeSystem(red_ctx, tuple(rhs), (n - 1,) * p)
    meta = {
        "eta": to_text(chain.eta),
        "auxiliary": [f"{red_ctx.u_name(a)} = {to_text(z)}" for a, z in enumerate(chain.levels[0])],
        "certificate": certificate,
    }
    return ReducedSystem(reduced, meta)


# -- invariant solutions ----------------------------------------------------------------------------


@dataclass
class InvariantSolutionVerdict:
    invariant: bool
    solution: bool
    invariance: Verdict
    equations: Verdict

    @property
    def holds(self) -> bool:
        return self.invariant and self.solution

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {"invariant": self.invariant, "solution": self.solution}


def invariant_solution_check(
    system, fields: Sequence[VectorField], f: Sequence, cfg: EqualityConfig = DEFAULT
) -> InvariantSolutionVerdict:
    """Is u = f(x) a solution of Delta that is invariant under every field?"""
    S = _as_solved(system)
    ctx = S.ctx
    bind = ctx.section_bindings(list(f), S.order)
    inv_pairs = []
    for k, X in enumerate(fields):
        Q = evolutionary_rep(X)
        for a, Qa in enumerate(Q.phi):
            inv_pairs.append((f"Q{a + 1} of X{k + 1}", substitute(Qa, bind), ZERO))
    invariance = Verdict.from_pairs(inv_pairs, cfg)
    equations = Verdict.from_pairs(
        ((f"Delta{a + 1}", substitute(eq, bind), ZERO) for a, eq in enumerate(S.equations())), cfg
    )
    return InvariantSolutionVerdict(invariance.holds, equations.holds, invariance, equations)
