"""Standard and twisted prolongations of vector fields.

Each twist has its own recursion, written out as in the defining formula,
so that the reductions between twists (Mu(0) = Standard, Chi(lambda I,
sigma) = Sigma(lambda I + sigma), ...) are checked between independent
code paths rather than assumed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .expr import ONE, ZERO, Expr, add, as_expr, expand, mul, neg, sub, substitute, sym, to_text
from .fields import InvolutionSystem, ProlongedField, VectorField, prolonged_commutator
from .jet import JetContext, JetError, index_successor, indices_of_order
from .matrix import MatrixExpr, as_matrix
from .numeric import DEFAULT, EqualityConfig, Verdict, equal_numeric, is_zero


class CompatibilityError(ValueError):
    """The mu twist fails the Maurer-Cartan (zero-curvature) condition."""


class NotApplicable(ValueError):
    pass


# -- twist specifications ---------------------------------------------------


@dataclass(frozen=True)
class Standard:
    def __str__(self):
        return "standard"


@dataclass(frozen=True)
class Lambda:
    lam: Expr

    def __str__(self):
        return f"lambda({to_text(self.lam)})"


@dataclass(frozen=True)
class Mu:
    Lams: tuple  # q matrices p x p

    def __str__(self):
        return "mu(" + ", ".join(str(L) for L in self.Lams) + ")"

    def scalar_part(self, cfg: EqualityConfig = DEFAULT):
        """lambda_i if every Lambda_i is lambda_i * I (oracle-checked), else None."""
        out = []
        for L in self.Lams:
            lam = _scalar_of(L, cfg)
            if lam is None:
                return None
            out.append(lam)
        return out


@dataclass(frozen=True)
class Sigma:
    sigma: MatrixExpr

    def __str__(self):
        return f"sigma({self.sigma})"


@dataclass(frozen=True)
class Chi:
    Lam: MatrixExpr
    sigma: MatrixExpr

    def __str__(self):
        return f"chi({self.Lam}, {self.sigma})"


def _scalar_of(L: MatrixExpr, cfg: EqualityConfig = DEFAULT):
    n, m = L.shape
    if n != m:
        return None
    for i in range(n):
        for j in range(m):
            if i != j and not is_zero(L[i, j], cfg):
                return None
            if i == j and i > 0 and not equal_numeric(L[i, i], L[0, 0], cfg):
                return None
    return L[0, 0]


def _check_j1(ctx: JetContext, exprs, what: str):
    for e in exprs:
        if ctx.order_of(e) > 1:
            raise JetError(f"{what} must live on J^1 M (order <= 1), got {to_text(e)}")


def _prolong_ctx(ctx: JetContext, X_order: int, n: int) -> JetContext:
    return ctx.at_least(n + X_order)


def _path_predecessor(J: tuple) -> tuple[tuple, int]:
    """Parent of J on the canonical path: drop one unit in the last nonzero direction."""
    i = max(d for d, j in enumerate(J) if j > 0)
    P = list(J)
    P[i] -= 1
    return tuple(P), i


# -- standard ------------------------------------------------------------------


def _standard_step(ctx, X: VectorField, psi, J, i):
    """psi^a_{J,i} = D_i psi^a_J - u^a_{J,k} D_i xi^k."""
    Dxi = [ctx.D(X.xi[k], i) for k in range(ctx.q)]
    out = []
    for a in range(ctx.p):
        terms = [ctx.D(psi[(a, J)], i)]
        for k in range(ctx.q):
            if Dxi[k] != ZERO:
                terms.append(neg(mul(ctx.u(a, index_successor(J, k)), Dxi[k])))
        out.append(add(*terms))
    return out


def _recursive_table(ctx, X: VectorField, n: int, step, cfg: EqualityConfig | None):
    psi = {(a, ctx.zero_index()): X.phi[a] for a in range(ctx.p)}
    for k in range(1, n + 1):
        for J in indices_of_order(ctx.q, k):
            P, i = _path_predecessor(J)
            for a, v in enumerate(step(ctx, X, psi, P, i)):
                psi[(a, J)] = v
    check = None
    if cfg is not None and ctx.q > 1:
        pairs = []
        for k in range(2, n + 1):
            for J in indices_of_order(ctx.q, k):
                _, i0 = _path_predecessor(J)
                for i in range(ctx.q):
                    if J[i] == 0 or i == i0:
                        continue
                    P = list(J)
                    P[i] -= 1
                    alt = step(ctx, X, psi, tuple(P), i)
                    for a in range(ctx.p):
                        pairs.append((f"{ctx.u_name(a, J)} via x{i + 1}", psi[(a, J)], alt[a]))
        check = Verdict.from_pairs(pairs, cfg)
    return psi, check


def prolong(X: VectorField, n: int, verify_paths: EqualityConfig | None = DEFAULT) -> ProlongedField:
    """Standard prolongation X^(n).

    For several independent variables the table is built along a fixed
    path and the remaining recursion paths are oracle-checked unless
    ``verify_paths`` is None; the outcome is stored in ``path_check``.
    """
    ctx = _prolong_ctx(X.ctx, X.order, n)
    psi, check = _recursive_table(ctx, X, n, _standard_step, verify_paths)
    Y = ProlongedField(ctx, X.xi, psi, n, Standard(), X)
    Y.path_check = check
    return Y


# -- lambda ------------------------------------------------------------------------


def prolong_lambda(X: VectorField, lam, n: int) -> ProlongedField:
    """psi_(k+1) = (D_x + lambda) psi_(k) - u_(k+1) (D_x + lambda) xi."""
    ctx = X.ctx
    if ctx.q != 1:
        raise JetError("lambda-prolongation needs a single independent variable")
    lam = as_expr(lam)
    _check_j1(ctx, [lam], "lambda")
    ctx = _prolong_ctx(ctx, X.order, n)
    xi = X.xi[0]
    Dxi_l = add(ctx.D(xi), mul(lam, xi))
    psi = {(a, (0,)): X.phi[a] for a in range(ctx.p)}
    for k in range(n):
        for a in range(ctx.p):
            prev = psi[(a, (k,))]
            psi[(a, (k + 1,))] = sub(add(ctx.D(prev), mul(lam, prev)), mul(ctx.u(a, k + 1), Dxi_l))
    return ProlongedField(ctx, X.xi, psi, n, Lambda(lam), X)


# -- mu ---------------------------------------------------------------------------


def _mu_step_factory(Lams):
    def step(ctx, X, psi, J, i):
        """psi^a_{J,i} = (d^a_b D_i + L^a_b) psi^b_J - u^b_{J,k} (d^a_b D_i + L^a_b) xi^k."""
        L = Lams[i]
        out = []
        for a in range(ctx.p):
            terms = [ctx.D(psi[(a, J)], i)]
            for b in range(ctx.p):
                if L[a, b] != ZERO:
                    terms.append(mul(L[a, b], psi[(b, J)]))
            for k in range(ctx.q):
                Dxk = ctx.D(X.xi[k], i)
                if Dxk != ZERO:
                    terms.append(neg(mul(ctx.u(a, index_successor(J, k)), Dxk)))
                for b in range(ctx.p):
                    if L[a, b] != ZERO and X.xi[k] != ZERO:
                        terms.append(neg(mul(ctx.u(b, index_successor(J, k)), L[a, b], X.xi[k])))
            out.append(add(*terms))
        return out

    return step


@dataclass
class MaurerCartanReport:
    holds: bool
    residuals: dict = field(default_factory=dict)  # (i, j) -> MatrixExpr
    worst_abs: float = 0.0
    verdict: Verdict | None = None

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "worst_abs": self.worst_abs,
            "residuals": {
                f"{i + 1},{j + 1}": R.to_rows_text() for (i, j), R in self.residuals.items()
            },
        }


def check_maurer_cartan(ctx: JetContext, Lams: Sequence, cfg: EqualityConfig = DEFAULT) -> MaurerCartanReport:
    """D_i L_j - D_j L_i + [L_i, L_j] = 0 for all i < j."""
    Lams = [as_matrix(L) for L in Lams]
    if len(Lams) != ctx.q:
        raise JetError(f"need {ctx.q} matrices, got {len(Lams)}")
    for L in Lams:
        if L.shape != (ctx.p, ctx.p):
            raise JetError(f"each matrix must be {ctx.p}x{ctx.p}")
        _check_j1(ctx, L.entries(), "Lambda")
    if ctx.q == 1:
        return MaurerCartanReport(True, {}, 0.0, Verdict(True, notes=["single matrix: no condition"]))
    c2 = ctx.at_least(2)
    verdict = Verdict(True)
    residuals = {}
    for i in range(ctx.q):
        for j in range(i + 1, ctx.q):
            # compared as D_i L_j + L_i L_j = D_j L_i + L_j L_i so the tolerance
            # scales with the size of the terms rather than with zero
            lhs = Lams[j].total_derivative(c2, i) + Lams[i] @ Lams[j]
            rhs = Lams[i].total_derivative(c2, j) + Lams[j] @ Lams[i]
            residuals[(i, j)] = lhs - rhs
            verdict = verdict.merge(
                Verdict.from_pairs(
                    (
                        (f"R{i + 1}{j + 1}[{a + 1},{b + 1}]", lhs[a, b], rhs[a, b])
                        for a in range(ctx.p)
                        for b in range(ctx.p)
                    ),
                    cfg,
                )
            )
    return MaurerCartanReport(verdict.holds, residuals, verdict.worst_abs, verdict)


def prolong_mu(
    X: VectorField,
    Lams: Sequence,
    n: int,
    skip_compat: bool = False,
    cfg: EqualityConfig = DEFAULT,
) -> ProlongedField:
    """mu-prolongation with mu = Lambda_i dx^i.

    The recursion acts on psi^b_J; the path check for several independent
    variables is stored in ``path_check``.
    """
    ctx = X.ctx
    Lams = tuple(as_matrix(L) for L in Lams)
    if not skip_compat:
        mc = check_maurer_cartan(ctx, Lams, cfg)
        if not mc:
            raise CompatibilityError("Maurer-Cartan condition fails for the given Lambda")
    elif len(Lams) != ctx.q or any(L.shape != (ctx.p, ctx.p) for L in Lams):
        raise JetError(f"need {ctx.q} matrices of shape {ctx.p}x{ctx.p}")
    for L in Lams:
        _check_j1(ctx, L.entries(), "Lambda")
    ctx = _prolong_ctx(ctx, X.order, n)
    psi, check = _recursive_table(ctx, X, n, _mu_step_factory(Lams), cfg)
    Y = ProlongedField(ctx, X.xi, psi, n, Mu(Lams), X)
    Y.path_check = check
    return Y


# -- sigma ---------------------------------------------------------------------------


def _fields_of(system) -> list[VectorField]:
    return list(system.fields) if isinstance(system, InvolutionSystem) else list(system)


def prolong_sigma(system, sigma, n: int) -> list[ProlongedField]:
    """Joint recursion
    psi^a_{alpha,(k+1)} = (D_x psi^a_{alpha,(k)} - u^a_(k+1) D_x xi_alpha)
                          + sigma_alpha^beta (psi^a_{beta,(k)} - u^a_(k+1) xi_beta).
    """
    fields = _fields_of(system)
    r = len(fields)
    sigma = as_matrix(sigma)
    ctx = fields[0].ctx
    if ctx.q != 1:
        raise JetError("sigma-prolongation needs a single independent variable")
    if sigma.shape != (r, r):
        raise JetError(f"sigma must be {r}x{r}")
    _check_j1(ctx, sigma.entries(), "sigma")
    order = max(X.order for X in fields)
    ctx = _prolong_ctx(ctx.at_least(max(X.ctx.n for X in fields)), order, n)
    xi = [X.xi[0] for X in fields]
    Dxi = [ctx.D(v) for v in xi]
    psi = [{(a, (0,)): X.phi[a] for a in range(ctx.p)} for X in fields]
    for k in range(n):
        for al in range(r):
            for a in range(ctx.p):
                uk1 = ctx.u(a, k + 1)
                terms = [ctx.D(psi[al][(a, (k,))]), neg(mul(uk1, Dxi[al]))]
                for be in range(r):
                    s = sigma[al, be]
                    if s != ZERO:
                        terms.append(mul(s, sub(psi[be][(a, (k,))], mul(uk1, xi[be]))))
                psi[al][(a, (k + 1,))] = add(*terms)
    tag = Sigma(sigma)
    return [ProlongedField(ctx, fields[al].xi, psi[al], n, tag, fields[al]) for al in range(r)]


# -- chi -------------------------------------------------------------------------------


def prolong_chi(fields: Sequence[VectorField], Lam, sigma, n: int) -> list[ProlongedField]:
    """Psi^a_{alpha,(k+1)} = D_x Psi^a_{alpha,(k)} + Lambda^a_b Psi^b_{alpha,(k)}
    + sigma_alpha^beta Psi^a_{beta,(k)}, for vertical fields."""
    fields = _fields_of(fields)
    r = len(fields)
    Lam, sigma = as_matrix(Lam), as_matrix(sigma)
    ctx = fields[0].ctx
    if ctx.q != 1:
        raise JetError("chi-prolongation needs a single independent variable")
    for X in fields:
        if not X.is_vertical:
            raise JetError("chi-prolongation is defined for vertical fields only")
    if Lam.shape != (ctx.p, ctx.p) or sigma.shape != (r, r):
        raise JetError(f"need Lambda {ctx.p}x{ctx.p} and sigma {r}x{r}")
    _check_j1(ctx, Lam.entries() + sigma.entries(), "chi twist")
    order = max(X.order for X in fields)
    ctx = _prolong_ctx(ctx.at_least(max(X.ctx.n for X in fields)), order, n)
    psi = [{(a, (0,)): X.phi[a] for a in range(ctx.p)} for X in fields]
    for k in range(n):
        for al in range(r):
            for a in range(ctx.p):
                terms = [ctx.D(psi[al][(a, (k,))])]
                for b in range(ctx.p):
                    if Lam[a, b] != ZERO:
                        terms.append(mul(Lam[a, b], psi[al][(b, (k,))]))
                for be in range(r):
                    if sigma[al, be] != ZERO:
                        terms.append(mul(sigma[al, be], psi[be][(a, (k,))]))
                psi[al][(a, (k + 1,))] = add(*terms)
    tag = Chi(Lam, sigma)
    return [ProlongedField(ctx, fields[al].xi, psi[al], n, tag, fields[al]) for al in range(r)]


# -- mu difference term -------------------------------------------------------------


@dataclass
class MuDifference:
    """F^a_J with Psi = Phi + F; ``formal`` keeps D_J Q^b as placeholder symbols."""

    table: dict
    formal: dict
    placeholders: dict  # placeholder name -> D_J Q^b
    verdict: Verdict

    def __bool__(self):
        return self.verdict.holds

    def vanishes_on_invariant_sections(self, cfg: EqualityConfig = DEFAULT) -> Verdict:
        """F with every D_J Q^b set to zero must vanish identically."""
        kill = {s: ZERO for s in self.placeholders}
        return Verdict.from_pairs(
            ((str(k), substitute(v, kill), ZERO) for k, v in self.formal.items()), cfg
        )


def _placeholder(b: int, J: tuple) -> str:
    return "Q" + str(b + 1) + "J" + "j".join(str(j) for j in J)


def mu_difference(Qf: VectorField, Lams: Sequence, n: int, cfg: EqualityConfig = DEFAULT) -> MuDifference:
    """F_{J,i} = (D_i + Lambda_i) F_J + Lambda_i D_J Q with F_0 = 0.

    The formal table is linear in placeholders for D_J Q^b.  Because the
    placeholders are not jet coordinates, D_i of a formal entry is computed
    with D_i(placeholder_{b,J}) = placeholder_{b,J+i}.
    """
    if not Qf.is_vertical:
        raise JetError("mu_difference expects a vertical field")
    ctx = Qf.ctx
    Lams = tuple(as_matrix(L) for L in Lams)
    if len(Lams) != ctx.q:
        raise JetError(f"need {ctx.q} matrices")
    ctx = _prolong_ctx(ctx, Qf.order, n)
    p, q = ctx.p, ctx.q
    # D_J Q^b along the canonical path
    DQ = {(b, ctx.zero_index()): Qf.phi[b] for b in range(p)}
    for k in range(1, n + 1):
        for J in indices_of_order(q, k):
            P, i = _path_predecessor(J)
            for b in range(p):
                DQ[(b, J)] = ctx.D(DQ[(b, P)], i)
    ph = {(b, J): _placeholder(b, J) for (b, J) in DQ}
    ctx_ph = ctx.with_params(ctx.params + tuple(ph.values()))

    def D_formal(e, i):
        base = ctx_ph.D(e, i)
        extra = []
        from .expr import diff

        for (b, J), name in ph.items():
            d = diff(e, name)
            if d != ZERO:
                nxt = ph.get((b, index_successor(J, i)))
                if nxt is None:
                    raise JetError("placeholder order exceeded")
                extra.append(mul(d, sym(nxt)))
        return add(base, *extra)

    formal = {(a, ctx.zero_index()): ZERO for a in range(p)}
    for k in range(1, n + 1):
        for J in indices_of_order(q, k):
            P, i = _path_predecessor(J)
            L = Lams[i]
            for a in range(p):
                terms = [D_formal(formal[(a, P)], i)]
                for b in range(p):
                    if L[a, b] != ZERO:
                        terms.append(mul(L[a, b], formal[(b, P)]))
                        terms.append(mul(L[a, b], sym(ph[(b, P)])))
                formal[(a, J)] = add(*terms)
    binding = {name: DQ[key] for key, name in ph.items()}
    table = {key: substitute(v, binding) for key, v in formal.items()}

    Psi = prolong_mu(Qf, Lams, n, skip_compat=True, cfg=None)
    Phi = prolong(Qf, n, verify_paths=None)
    pairs = [
        (ctx.u_name(a, J), Psi.psi[(a, J)], add(Phi.psi[(a, J)], table[(a, J)]))
        for (a, J) in table
    ]
    verdict = Verdict.from_pairs(pairs, cfg)
    return MuDifference(table, formal, binding, verdict)


# -- commutator identities -----------------------------------------------------------


def random_test_function(ctx: JetContext, order: int, rng: random.Random, terms: int = 4) -> Expr:
    """A random polynomial of degree <= 2 in the coordinates of order <= ``order``."""
    names = ctx.coordinates(order)
    out = []
    for _ in range(terms):
        c = rng.randint(-3, 3) or 1
        k = rng.randint(1, 2)
        out.append(mul(c, *(sym(rng.choice(names)) for _ in range(k))))
    return add(*out)


@dataclass
class IdentityReport:
    identity: str
    verdicts: list  # one Verdict per field

    @property
    def holds(self) -> bool:
        return all(self.verdicts)

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "holds": self.holds,
            "per_field": [
                {"holds": v.holds, "worst_abs": v.worst_abs, "failures": [f[0] for f in v.failures]}
                for v in self.verdicts
            ],
        }


def _bracket_with_D(ctx: JetContext, Y: ProlongedField, f: Expr, i: int) -> Expr:
    """[Y, D_i] f = Y(D_i f) - D_i(Y f)."""
    return sub(Y.apply(ctx.D(f, i)), ctx.D(Y.apply(f), i))


def commutator_identity_report(
    prolonged: Sequence[ProlongedField], basket: int = 10, cfg: EqualityConfig = DEFAULT
) -> IdentityReport:
    """Check the commutator characterization matching the fields' twist tag.

    Standard, Lambda and scalar Mu use [Y, D_i] = l_i Y - (l_i xi^k + D_i xi^k) D_k;
    Sigma uses [Y_a, D_x] = s_a^b Y_b - (D_x xi_a + s_a^b xi_b) D_x;
    Chi with Lambda = l I uses [Q_a, D_x] = rho_a^b Q_b, rho = l I + sigma.
    """
    prolonged = list(prolonged)
    if not prolonged:
        return IdentityReport("none", [])
    tag = prolonged[0].twist
    n = prolonged[0].n
    if n < 1:
        raise JetError("identities need prolongation order >= 1")
    base = prolonged[0].ctx
    extra = max(base.order_of(c) for Y in prolonged for _, c in Y.components())
    ctx = base.at_least(max(n, extra) + 2)
    rng = random.Random(cfg.seed)
    tests = [random_test_function(ctx, n - 1, rng) for _ in range(basket)]

    if isinstance(tag, (Sigma, Chi)):
        r = len(prolonged)
        if isinstance(tag, Sigma):
            S = tag.sigma
            name = "commsig"
        else:
            lam = _scalar_of(tag.Lam, cfg)
            if lam is None:
                raise NotApplicable("identity not applicable: chi twist with non-scalar Lambda")
            S = MatrixExpr.scalar(lam, r) + tag.sigma
            name = "chisomm"
        if S.shape != (r, r):
            raise NotApplicable("identity not applicable: field set does not match the twist")
        verdicts = []
        for al, Y in enumerate(prolonged):
            shift = add(ctx.D(Y.xi[0]), *(mul(S[al, be], prolonged[be].xi[0]) for be in range(r)))
            pairs = []
            for t, f in enumerate(tests):
                lhs = _bracket_with_D(ctx, Y, f, 0)
                rhs = add(
                    *(mul(S[al, be], prolonged[be].apply(f)) for be in range(r)),
                    neg(mul(shift, ctx.D(f))),
                )
                pairs.append((f"f{t + 1}", lhs, rhs))
            verdicts.append(Verdict.from_pairs(pairs, cfg))
        return IdentityReport(name, verdicts)

    q = ctx.q
    if isinstance(tag, Standard) or tag is None:
        lams = [ZERO] * q
    elif isinstance(tag, Lambda):
        lams = [tag.lam]
    elif isinstance(tag, Mu):
        lams = tag.scalar_part(cfg)
        if lams is None:
            raise NotApplicable("identity not applicable: mu twist with non-scalar Lambda")
    else:  # pragma: no cover
        raise NotApplicable(f"identity not applicable for twist {tag}")
    verdicts = []
    for Y in prolonged:
        pairs = []
        for t, f in enumerate(tests):
            for i in range(q):
                lhs = _bracket_with_D(ctx, Y, f, i)
                rhs = [mul(lams[i], Y.apply(f))]
                for k in range(q):
                    c = add(mul(lams[i], Y.xi[k]), ctx.D(Y.xi[k], i))
                    rhs.append(neg(mul(c, ctx.D(f, k))))
                pairs.append((f"f{t + 1},D{i + 1}", lhs, add(*rhs)))
        verdicts.append(Verdict.from_pairs(pairs, cfg))
    return IdentityReport("LAcomm", verdicts)


# -- sigma involution condition -------------------------------------------------------


@dataclass
class InvolutionConditionReport:
    sufficient: Verdict
    contracted: Verdict
    direct: Verdict
    residuals: dict  # (alpha, beta, gamma) -> Expr

    @property
    def holds(self) -> bool:
        return self.sufficient.holds

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {
            "sufficient": self.sufficient.holds,
            "contracted": self.contracted.holds,
            "prolonged_brackets_close": self.direct.holds,
            "residuals": {f"{a + 1},{b + 1},{c + 1}": to_text(expand(v)) for (a, b, c), v in self.residuals.items()},
        }


def sigma_involution_condition(
    system: InvolutionSystem, sigma, n: int, cfg: EqualityConfig = DEFAULT
) -> InvolutionConditionReport:
    """Evaluate the conditions under which the sigma-prolonged fields keep the
    structure functions of the X_alpha.

    ``sufficient`` is the uncontracted condition, ``contracted`` its
    contraction with phi^a_gamma; ``direct`` compares [Y_a, Y_b] with
    f_ab^c Y_c on J^n M.  The three are reported side by side.
    """
    sigma = as_matrix(sigma)
    Ys = prolong_sigma(system, sigma, max(n, 1))
    r = system.r
    ctx = Ys[0].ctx.at_least(2)
    f = system.f
    C = {}
    for al in range(r):
        for be in range(al + 1, r):
            for ga in range(r):
                t = [sub(Ys[al].apply(sigma[be, ga]), Ys[be].apply(sigma[al, ga])), ctx.D(f(al, be, ga))]
                for et in range(r):
                    t.append(mul(sigma[al, et], f(et, be, ga)))
                    t.append(neg(mul(sigma[be, et], f(et, al, ga))))
                    t.append(neg(mul(f(al, be, et), sigma[et, ga])))
                C[(al, be, ga)] = add(*t)
    sufficient = Verdict.from_pairs(((f"C{k}", v, ZERO) for k, v in C.items()), cfg)
    phis = [X.phi for X in system.fields]
    contracted_pairs = []
    for al in range(r):
        for be in range(al + 1, r):
            for a in range(ctx.p):
                s = add(*(mul(C[(al, be, ga)], phis[ga][a]) for ga in range(r)))
                contracted_pairs.append((f"({al + 1},{be + 1}) a={a + 1}", s, ZERO))
    contracted = Verdict.from_pairs(contracted_pairs, cfg)
    direct_pairs = []
    for al in range(r):
        for be in range(al + 1, r):
            lhs = prolonged_commutator(Ys[al], Ys[be])
            for name, _ in Ys[al].components():
                rhs = add(*(mul(f(al, be, ga), dict(Ys[ga].components())[name]) for ga in range(r)))
                direct_pairs.append((f"[Y{al + 1},Y{be + 1}] {name}", lhs[name], rhs))
    direct = Verdict.from_pairs(direct_pairs, cfg)
    return InvolutionConditionReport(sufficient, contracted, direct, C)
