"""Vector fields on M and J^n M, evolutionary representatives and brackets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .expr import ZERO, Expr, add, as_expr, diff, mul, neg, sub, substitute, to_text
from .jet import JetContext, JetError, indices_of_order
from .matrix import MatrixExpr
from .numeric import (
    DEFAULT,
    EqualityConfig,
    SingularOnBox,
    Verdict,
    equal_numeric,
    evaluate_on_box,
    is_zero,
)


class ReconstructionError(ValueError):
    pass


class InvolutionError(ValueError):
    pass


@dataclass(frozen=True)
class VectorField:
    """X = xi^i d/dx^i + phi^a d/du^a.

    Lie-point when no coefficient involves a derivative coordinate;
    otherwise generalized of the order of its highest derivative.
    """

    ctx: JetContext
    xi: tuple
    phi: tuple
    name: str = ""

    def __post_init__(self):
        xi = tuple(as_expr(v) for v in self.xi)
        phi = tuple(as_expr(v) for v in self.phi)
        if len(xi) != self.ctx.q or len(phi) != self.ctx.p:
            raise JetError(f"need {self.ctx.q} xi and {self.ctx.p} phi coefficients")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "phi", phi)
        order = max((self.ctx.order_of(c) for c in xi + phi), default=0)
        object.__setattr__(self, "ctx", self.ctx.at_least(order + 1))

    @classmethod
    def vertical(cls, ctx: JetContext, phi: Sequence, name: str = "") -> "VectorField":
        return cls(ctx, (ZERO,) * ctx.q, tuple(phi), name)

    @property
    def coefficients(self) -> tuple:
        return self.xi + self.phi

    @property
    def order(self) -> int:
        return max(self.ctx.order_of(c) for c in self.coefficients)

    @property
    def is_liepoint(self) -> bool:
        return self.order == 0

    @property
    def is_vertical(self) -> bool:
        return all(c == ZERO for c in self.xi)

    def component_names(self) -> list[str]:
        return [self.ctx.x_name(i) for i in range(self.ctx.q)] + [
            self.ctx.u_name(a) for a in range(self.ctx.p)
        ]

    def act(self, f) -> Expr:
        """Action on a function; uses the standard prolongation when f has derivatives."""
        f = as_expr(f)
        k = self.ctx.order_of(f)
        if k == 0:
            terms = [mul(c, diff(f, s)) for c, s in zip(self.coefficients, self.component_names())]
            return add(*terms)
        from .prolong import prolong

        return prolong(self, k).apply(f)

    def scale(self, g) -> "VectorField":
        g = as_expr(g)
        return VectorField(
            self.ctx, tuple(mul(g, c) for c in self.xi), tuple(mul(g, c) for c in self.phi), self.name
        )

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(
            self.ctx.at_least(other.ctx.n),
            tuple(add(a, b) for a, b in zip(self.xi, other.xi)),
            tuple(add(a, b) for a, b in zip(self.phi, other.phi)),
        )

    def __str__(self):
        parts = []
        for c, s in zip(self.coefficients, self.component_names()):
            if c != ZERO:
                parts.append(f"({to_text(c)})*d/d{s}")
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {"xi": [to_text(c) for c in self.xi], "phi": [to_text(c) for c in self.phi]}


def combine(fields: Sequence[VectorField], coeffs: Sequence) -> VectorField:
    """sum_alpha c_alpha X_alpha with function coefficients."""
    out = fields[0].scale(coeffs[0])
    for X, c in zip(fields[1:], coeffs[1:]):
        out = out + X.scale(c)
    return out


def transform_fields(fields: Sequence[VectorField], G: MatrixExpr) -> list[VectorField]:
    """Module-index gauge: W_alpha = G_alpha^beta X_beta."""
    r = len(fields)
    if G.shape != (r, r):
        raise JetError(f"gauge matrix must be {r}x{r}")
    return [combine(fields, [G[a, b] for b in range(r)]) for a in range(r)]


@dataclass
class ProlongedField:
    """X^(n) = xi^i d_i + psi^a_J d_a^J, with the twist that produced it."""

    ctx: JetContext
    xi: tuple
    psi: dict  # (a, J) -> Expr
    n: int
    twist: object = None
    source: VectorField | None = None
    path_check: object = None

    def coefficient(self, a: int, J) -> Expr:
        if isinstance(J, int):
            J = (J,)
        return self.psi[(a, tuple(J))]

    def table(self) -> list[tuple[int, tuple, Expr]]:
        out = []
        for k in range(self.n + 1):
            for a in range(self.ctx.p):
                for J in indices_of_order(self.ctx.q, k):
                    out.append((a, J, self.psi[(a, J)]))
        return out

    def components(self) -> list[tuple[str, Expr]]:
        """(coordinate name, coefficient) in canonical coordinate order."""
        out = [(self.ctx.x_name(i), c) for i, c in enumerate(self.xi)]
        out += [(self.ctx.u_name(a, J), c) for a, J, c in self.table()]
        return out

    def apply(self, f) -> Expr:
        f = as_expr(f)
        k = self.ctx.order_of(f)
        if k > self.n:
            raise JetError(f"function of order {k} needs a prolongation of order >= {k}")
        terms = []
        for name, c in self.components():
            d = diff(f, name)
            if d != ZERO and c != ZERO:
                terms.append(mul(c, d))
        return add(*terms)

    def scale(self, g) -> "ProlongedField":
        g = as_expr(g)
        return ProlongedField(
            self.ctx,
            tuple(mul(g, c) for c in self.xi),
            {k: mul(g, v) for k, v in self.psi.items()},
            self.n,
            self.twist,
            None,
        )

    def to_dict(self) -> dict:
        return {
            "xi": [to_text(c) for c in self.xi],
            "psi": {self.ctx.u_name(a, J): to_text(c) for a, J, c in self.table()},
            "twist": str(self.twist) if self.twist is not None else "standard",
        }


def tables_equal(
    Y1: ProlongedField, Y2: ProlongedField, cfg: EqualityConfig = DEFAULT, upto: int | None = None
) -> Verdict:
    """Oracle comparison of two prolonged fields, coefficient by coefficient."""
    n = min(Y1.n, Y2.n) if upto is None else upto
    pairs = [(Y1.ctx.x_name(i), a, b) for i, (a, b) in enumerate(zip(Y1.xi, Y2.xi))]
    for a, J, c in Y1.table():
        if sum(J) <= n:
            pairs.append((Y1.ctx.u_name(a, J), c, Y2.psi[(a, J)]))
    return Verdict.from_pairs(pairs, cfg)


def evolutionary_rep(X: VectorField) -> VectorField:
    """Q^a = phi^a - u^a_i xi^i."""
    ctx = X.ctx
    Q = []
    for a in range(ctx.p):
        terms = [X.phi[a]]
        for i in range(ctx.q):
            terms.append(neg(mul(ctx.u(a, ctx.unit(i)), X.xi[i])))
        Q.append(add(*terms))
    return VectorField.vertical(ctx.at_least(X.order + 2), Q, X.name + "_v" if X.name else "")


def reconstruct_liepoint(Qf: VectorField, cfg: EqualityConfig = DEFAULT) -> VectorField:
    """Recover the Lie-point field with evolutionary representative Q.

    Affinity in first derivatives and derivative-freeness of the resulting
    coefficients are confirmed with the numeric oracle.
    """
    ctx = Qf.ctx
    if not Qf.is_vertical:
        raise ReconstructionError("input must be a vertical field")
    first = [ctx.u_name(b, ctx.unit(j)) for b in range(ctx.p) for j in range(ctx.q)]
    for Qa in Qf.phi:
        if ctx.order_of(Qa) > 1:
            raise ReconstructionError("not affine in u_i: higher derivatives present")
        for s, t in itertools.combinations_with_replacement(first, 2):
            if not is_zero(diff(diff(Qa, s), t), cfg):
                raise ReconstructionError("not affine in u_i")
    kill = {s: ZERO for s in first}
    xi = []
    for i in range(ctx.q):
        cands = [neg(diff(Qf.phi[a], ctx.u_name(a, ctx.unit(i)))) for a in range(ctx.p)]
        for a in range(1, ctx.p):
            rep = equal_numeric(cands[0], cands[a], cfg)
            if not rep.equal:
                raise ReconstructionError(
                    f"inconsistent reconstruction: xi^{i + 1} from component 1 is "
                    f"{to_text(cands[0])}, from component {a + 1} is {to_text(cands[a])}"
                )
        xi.append(substitute(cands[0], kill))
    phi = []
    for a in range(ctx.p):
        full = add(Qf.phi[a], *(mul(ctx.u(a, ctx.unit(i)), xi[i]) for i in range(ctx.q)))
        for s in first:
            if not is_zero(diff(full, s), cfg):
                raise ReconstructionError(
                    f"inconsistent reconstruction: phi^{a + 1} depends on {s}"
                )
        phi.append(substitute(full, kill))
    return VectorField(ctx, tuple(xi), tuple(phi), Qf.name)


def commutator(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y]^c = X(Y^c) - Y(X^c), coefficientwise."""
    if (X.ctx.q, X.ctx.p) != (Y.ctx.q, Y.ctx.p):
        raise JetError("fields live on different spaces")
    coeffs = [sub(X.act(b), Y.act(a)) for a, b in zip(X.coefficients, Y.coefficients)]
    q = X.ctx.q
    ctx = X.ctx.at_least(Y.ctx.n)
    return VectorField(ctx, tuple(coeffs[:q]), tuple(coeffs[q:]))


def fields_equal(X: VectorField, Y: VectorField, cfg: EqualityConfig = DEFAULT) -> Verdict:
    names = X.component_names()
    return Verdict.from_pairs(
        ((n, a, b) for n, a, b in zip(names, X.coefficients, Y.coefficients)), cfg
    )


def prolonged_commutator(Y1: ProlongedField, Y2: ProlongedField) -> dict:
    """Components of [Y1, Y2] along the coordinates of J^n M."""
    out = {}
    c1 = dict(Y1.components())
    for name, b in Y2.components():
        out[name] = sub(Y1.apply(b), Y2.apply(c1[name]))
    return out


def verify_prolong_commutator(
    X: VectorField, Y: VectorField, n: int, cfg: EqualityConfig = DEFAULT
) -> Verdict:
    """Oracle check of [X^(n), Y^(n)] = ([X, Y])^(n)."""
    from .prolong import prolong

    if not (X.is_liepoint and Y.is_liepoint):
        raise JetError("prolongation commutator check expects Lie-point fields")
    lhs = prolonged_commutator(prolong(X, n), prolong(Y, n))
    rhs = dict(prolong(commutator(X, Y), n).components())
    return Verdict.from_pairs(((k, lhs[k], rhs[k]) for k in rhs), cfg)


# -- involution systems ----------------------------------------------------


@dataclass
class InvolutionSystem:
    """Fields X_1..X_r with [X_a, X_b] = f_ab^c X_c.

    ``structure`` maps (a, b) with a < b to the tuple (f_ab^1..f_ab^r).
    """

    fields: list
    structure: dict = field(default_factory=dict)
    constant: bool = False
    numeric_only: bool = False

    @property
    def r(self) -> int:
        return len(self.fields)

    @property
    def ctx(self) -> JetContext:
        return self.fields[0].ctx

    def f(self, a: int, b: int, c: int) -> Expr:
        if a == b:
            return ZERO
        if a < b:
            return self.structure[(a, b)][c]
        return neg(self.structure[(b, a)][c])

    def verify(self, cfg: EqualityConfig = DEFAULT) -> Verdict:
        v = Verdict(True)
        for (a, b), fs in self.structure.items():
            lhs = commutator(self.fields[a], self.fields[b])
            rhs = combine(self.fields, list(fs))
            v = v.merge(fields_equal(lhs, rhs, cfg))
        return v

    def to_dict(self) -> dict:
        return {
            "fields": [X.to_dict() for X in self.fields],
            "structure": {
                f"{a + 1},{b + 1}": [to_text(c) for c in fs] for (a, b), fs in self.structure.items()
            },
            "constant": self.constant,
            "numeric_only": self.numeric_only,
        }


def _rationalize(v: float, max_den: int = 1000) -> Fraction:
    return Fraction(v).limit_denominator(max_den)


def check_involution(fields: Sequence[VectorField], cfg: EqualityConfig = DEFAULT) -> InvolutionSystem:
    """Find structure functions for a set of fields, or raise InvolutionError.

    First tries constant coefficients fitted jointly over all samples; then,
    for pointwise independent fields, solves Cramer's rule on a pivot minor
    and confirms the candidate with the oracle.  A pivot minor that is not
    bounded away from zero on the sampling box means the module is not
    regular there, reported as not in involution.
    """
    fields = list(fields)
    if not fields:
        raise InvolutionError("empty field set")
    ctx = fields[0].ctx
    for X in fields:
        if (X.ctx.q, X.ctx.p) != (ctx.q, ctx.p):
            raise InvolutionError("fields live on different spaces")
    r = len(fields)
    m = ctx.q + ctx.p
    if r > m:
        raise InvolutionError(f"fields dependent: {r} fields on a {m}-dimensional space")
    pairs = list(itertools.combinations(range(r), 2))
    brackets = {ab: commutator(fields[ab[0]], fields[ab[1]]) for ab in pairs}

    exprs = [c for X in fields for c in X.coefficients]
    for ab in pairs:
        exprs += list(brackets[ab].coefficients)
    _, pts, vals = evaluate_on_box(exprs, cfg)
    ns = pts.shape[0]
    F = vals[:, : r * m].reshape(ns, r, m)
    B = {ab: vals[:, r * m + k * m : r * m + (k + 1) * m] for k, ab in enumerate(pairs)}

    # constant structure coefficients
    const_struct = {}
    A = F.transpose(0, 2, 1).reshape(ns * m, r)
    for ab in pairs:
        b = B[ab].reshape(ns * m)
        c, *_ = np.linalg.lstsq(A, b, rcond=None)
        res = np.abs(A @ c - b)
        if not np.all(res <= 1e-8 * (1.0 + np.abs(b))):
            break
        fs = tuple(as_expr(_rationalize(v)) for v in c)
        if not fields_equal(brackets[ab], combine(fields, list(fs)), cfg):
            break
        const_struct[ab] = fs
    else:
        return InvolutionSystem(fields, const_struct, constant=True)

    # module case: fields must be pointwise independent
    sv = np.linalg.svd(F, compute_uv=False)
    if np.any(sv[:, -1] <= 1e-8 * np.maximum(sv[:, 0], 1.0)):
        raise InvolutionError("fields dependent: pointwise rank below the number of fields")
    best, best_min = None, -1.0
    for cols in itertools.combinations(range(m), r):
        d = np.abs(np.linalg.det(F[:, :, cols]))
        if d.min() > best_min:
            best, best_min = cols, float(d.min())
    dets = np.linalg.det(F[:, :, best])
    if best_min < 1e-3 or not (np.all(dets > 0) or np.all(dets < 0)):
        raise InvolutionError(
            "not in involution: brackets leave the span where the fields are regular on the box"
        )
    Mx = MatrixExpr.of([[fields[a].coefficients[c] for c in best] for a in range(r)])
    try:
        Minv = Mx.inverse()
    except ZeroDivisionError:  # pragma: no cover - excluded by the numeric test
        raise InvolutionError("fields dependent")
    structure = {}
    for ab in pairs:
        bvec = [brackets[ab].coefficients[c] for c in best]
        fs = tuple(Minv.transpose().apply(bvec))
        try:
            ok = fields_equal(brackets[ab], combine(fields, list(fs)), cfg)
        except SingularOnBox:
            ok = False
        if not ok:
            raise InvolutionError(
                f"not in involution: [X{ab[0] + 1}, X{ab[1] + 1}] is not in the span of the fields"
            )
        structure[ab] = fs
    return InvolutionSystem(fields, structure, constant=False)


def involution_system(fields: Sequence[VectorField], structure: Mapping | None = None) -> InvolutionSystem:
    """Build a system from given structure functions (zero when omitted)."""
    fields = list(fields)
    r = len(fields)
    st = {}
    for ab in itertools.combinations(range(r), 2):
        fs = (structure or {}).get(ab)
        st[ab] = tuple(as_expr(v) for v in fs) if fs is not None else (ZERO,) * r
    return InvolutionSystem(fields, st)
