"""Numeric evaluation and the randomized equality oracle.

Every identity in the library is ultimately checked here: two expressions
are sampled at random points of a box and compared within a mixed
absolute/relative tolerance.  Points that land on a pole or outside a
function's domain are resampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels as K
from .expr import ADD, CONST, FUNC, MUL, POW, SYM, Expr, as_expr


class SingularSamplePoint(ArithmeticError):
    """The expression is singular (pole or domain error) at the point."""


class SingularOnBox(ArithmeticError):
    """Too many singular resamples: the expression is singular on the box."""


class UnboundSymbol(KeyError):
    pass


@dataclass(frozen=True)
class EqualityConfig:
    samples: int = 25
    half_width: float = 2.0
    rtol: float = 1e-9
    atol: float = 1e-12
    seed: int = 0
    max_retries: int = 10
    backend: str | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("sample count must be at least 1")
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be positive")
        if self.half_width <= 0:
            raise ValueError("box half-width must be positive")

    def with_seed(self, seed: int) -> "EqualityConfig":
        return replace(self, seed=seed)


DEFAULT = EqualityConfig()


_FUNC_OPS = {
    "exp": K.OP_EXP,
    "log": K.OP_LOG,
    "sin": K.OP_SIN,
    "cos": K.OP_COS,
    "tan": K.OP_TAN,
    "sqrt": K.OP_SQRT,
}


class Program:
    """Straight-line compiled form of one or more expressions.

    Shared subtrees are compiled once.  For the expressions indexed by
    ``magnitudes`` an extra output follows the regular ones: the size of the
    terms the expression is built from.  Sums add the sizes of their terms,
    products multiply them and positive integer powers raise them; any other
    node contributes its absolute value.  This is the scale at which
    floating-point cancellation inside the expression happens.
    """

    def __init__(self, exprs: Sequence[Expr], symbols: Sequence[str] | None = None, magnitudes: Sequence[int] = ()):
        exprs = [as_expr(e) for e in exprs]
        if symbols is None:
            syms = set()
            for e in exprs:
                syms |= e.free_symbols
            symbols = sorted(syms)
        self.symbols = tuple(symbols)
        col = {s: i for i, s in enumerate(self.symbols)}
        ops, a0, a1, consts = [], [], [], []
        memo: dict[Expr, int] = {}
        cmemo: dict[float, int] = {}

        def emit(op, x=0, y=0):
            ops.append(op)
            a0.append(x)
            a1.append(y)
            return len(ops) - 1

        def cst(v: float):
            r = cmemo.get(v)
            if r is None:
                consts.append(v)
                r = cmemo[v] = emit(K.OP_CONST, len(consts) - 1)
            return r

        def go(e: Expr) -> int:
            r = memo.get(e)
            if r is not None:
                return r
            k = e.kind
            if k == CONST:
                r = cst(float(e.value))
            elif k == SYM:
                if e.value not in col:
                    raise UnboundSymbol(e.value)
                r = emit(K.OP_LOAD, col[e.value])
            elif k == ADD or k == MUL:
                op = K.OP_ADD if k == ADD else K.OP_MUL
                regs = [go(a) for a in e.args]
                r = regs[0]
                for q in regs[1:]:
                    r = emit(op, r, q)
            elif k == POW:
                b, x = e.args
                rb = go(b)
                if x.kind == CONST and x.value.denominator == 1:
                    r = emit(K.OP_IPOW, rb, int(x.value))
                else:
                    r = emit(K.OP_POW, rb, go(x))
            elif k == FUNC:
                r = emit(_FUNC_OPS[e.value], go(e.args[0]))
            else:  # pragma: no cover
                raise TypeError(k)
            memo[e] = r
            return r

        mmemo: dict[Expr, int] = {}

        def absval(r: int) -> int:
            return emit(K.OP_SQRT, emit(K.OP_IPOW, r, 2))

        def mag(e: Expr) -> int:
            r = mmemo.get(e)
            if r is not None:
                return r
            k = e.kind
            if k == CONST:
                r = cst(abs(float(e.value)))
            elif k == ADD or k == MUL:
                op = K.OP_ADD if k == ADD else K.OP_MUL
                regs = [mag(a) for a in e.args]
                r = regs[0]
                for q in regs[1:]:
                    r = emit(op, r, q)
            elif k == POW and e.args[1].kind == CONST and e.args[1].value > 0 and e.args[1].value.denominator == 1:
                r = emit(K.OP_IPOW, mag(e.args[0]), int(e.args[1].value))
            else:
                r = absval(go(e))
            mmemo[e] = r
            return r

        outs = [go(e) for e in exprs]
        outs += [mag(exprs[i]) for i in magnitudes]
        self.ops = np.asarray(ops, dtype=np.int64)
        self.a0 = np.asarray(a0, dtype=np.int64)
        self.a1 = np.asarray(a1, dtype=np.int64)
        self.consts = np.asarray(consts, dtype=np.float64)
        self.outputs = np.asarray(outs, dtype=np.int64)

    def __len__(self):
        return len(self.ops)

    def run(self, points: np.ndarray, backend: str | None = None):
        points = np.ascontiguousarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points.reshape(1, -1)
        if len(self.ops) == 0:
            return np.empty((points.shape[0], 0)), np.zeros(points.shape[0], bool)
        return K.run(self.ops, self.a0, self.a1, self.consts, points, self.outputs, backend)


def eval_numeric(e: Expr, point: Mapping[str, float], backend: str | None = None) -> float:
    """Evaluate ``e`` in IEEE double precision at ``point``.

    Raises :class:`UnboundSymbol` for a missing binding and
    :class:`SingularSamplePoint` on a pole or domain error.
    """
    e = as_expr(e)
    missing = e.free_symbols - set(point)
    if missing:
        raise UnboundSymbol(", ".join(sorted(missing)))
    prog = Program([e])
    vals, bad = prog.run(np.array([[float(point[s]) for s in prog.symbols]]), backend)
    if bad[0]:
        raise SingularSamplePoint(f"singular sample point for {e}")
    return float(vals[0, 0])


def sample_points(symbols: Sequence[str], cfg: EqualityConfig, rng) -> np.ndarray:
    return rng.uniform(-cfg.half_width, cfg.half_width, size=(cfg.samples, len(symbols)))


def evaluate_on_box(
    exprs: Sequence[Expr],
    cfg: EqualityConfig = DEFAULT,
    symbols: Sequence[str] | None = None,
    rng=None,
    magnitudes: Sequence[int] = (),
):
    """Evaluate ``exprs`` jointly at ``cfg.samples`` random non-singular points.

    Returns ``(symbols, points, values)``.
    """
    prog = Program(exprs, symbols, magnitudes)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    pts = sample_points(prog.symbols, cfg, rng)
    vals, bad = prog.run(pts, cfg.backend)
    tries = 0
    while bad.any():
        tries += 1
        if tries > cfg.max_retries:
            raise SingularOnBox(
                f"expression singular on box after {cfg.max_retries} resamples "
                f"({int(bad.sum())} of {cfg.samples} points)"
            )
        idx = np.flatnonzero(bad)
        pts[idx] = rng.uniform(-cfg.half_width, cfg.half_width, size=(len(idx), len(prog.symbols)))
        v2, b2 = prog.run(pts[idx], cfg.backend)
        vals[idx] = v2
        bad[idx] = b2
    return prog.symbols, pts, vals


@dataclass
class EqualityReport:
    equal: bool
    samples: int
    worst_abs: float
    worst_rel: float
    worst_point: dict = field(default_factory=dict)
    worst_values: tuple = (0.0, 0.0)

    def __bool__(self):
        return self.equal

    def describe(self) -> str:
        pt = ", ".join(f"{k}={v:.6g}" for k, v in self.worst_point.items())
        verdict = "equal" if self.equal else "NOT equal"
        return (
            f"{verdict} on {self.samples} samples; worst |diff|={self.worst_abs:.3e} "
            f"at ({pt}) values {self.worst_values[0]:.6g} vs {self.worst_values[1]:.6g}"
        )


def equal_numeric(e1, e2, cfg: EqualityConfig = DEFAULT) -> EqualityReport:
    """Randomized numeric equality of two expressions on the sampling box.

    Samples agree when |e1 - e2| <= atol + rtol * scale, where the scale is
    the larger of the magnitudes of the two sides: the sizes of the terms
    they are built from (see :class:`Program`).  A cancelling sum compared
    with zero is therefore judged relative to its terms, not to zero.
    """
    e1, e2 = as_expr(e1), as_expr(e2)
    if e1 == e2:
        return EqualityReport(True, cfg.samples, 0.0, 0.0)
    symbols, pts, vals = evaluate_on_box([e1, e2], cfg, magnitudes=(0, 1))
    v1, v2 = vals[:, 0], vals[:, 1]
    diff = np.abs(v1 - v2)
    scale = np.maximum(np.maximum(np.abs(v1), np.abs(v2)), np.maximum(vals[:, 2], vals[:, 3]))
    ok = diff <= cfg.atol + cfg.rtol * scale
    # rank samples by how far they exceed the tolerance
    excess = diff - (cfg.atol + cfg.rtol * scale)
    w = int(np.argmax(excess))
    rel = float(diff[w] / scale[w]) if scale[w] > 0 else 0.0
    return EqualityReport(
        bool(ok.all()),
        cfg.samples,
        float(diff[w]),
        rel,
        {s: float(pts[w, i]) for i, s in enumerate(symbols)},
        (float(v1[w]), float(v2[w])),
    )


def is_zero(e, cfg: EqualityConfig = DEFAULT) -> EqualityReport:
    from .expr import ZERO

    return equal_numeric(e, ZERO, cfg)


@dataclass
class Verdict:
    """Outcome of an oracle-checked identity over several components."""

    holds: bool
    worst_abs: float = 0.0
    checked: int = 0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.holds

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple], cfg: EqualityConfig = DEFAULT) -> "Verdict":
        """Check ``(label, lhs, rhs)`` triples; all must agree."""
        v = cls(True)
        for label, lhs, rhs in pairs:
            rep = equal_numeric(lhs, rhs, cfg)
            v.checked += 1
            if math.isfinite(rep.worst_abs):
                v.worst_abs = max(v.worst_abs, rep.worst_abs)
            if not rep.equal:
                v.holds = False
                v.failures.append((label, rep.describe()))
        return v

    def merge(self, other: "Verdict") -> "Verdict":
        return Verdict(
            self.holds and other.holds,
            max(self.worst_abs, other.worst_abs),
            self.checked + other.checked,
            self.failures + other.failures,
            self.notes + other.notes,
        )


def numeric_matrix(exprs, points: np.ndarray, symbols: Sequence[str], backend=None):
    """Evaluate a flat list of expressions at given points (no resampling)."""
    prog = Program(list(exprs), symbols)
    return prog.run(points, backend)
