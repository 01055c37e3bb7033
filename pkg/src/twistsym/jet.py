"""Jet coordinates, multi-indices and total derivatives.

Coordinate names follow a fixed convention shared with the parser and all
output:

* independent variables ``x1 .. xq`` (``x`` when q = 1),
* dependent variables ``u1 .. up`` (``u`` when p = 1),
* derivative coordinates ``u1_[2,0,1]``; for q = 1 the index is a single
  integer, ``u_[3]``.

Contexts only interpret names; the expression kernel treats every
coordinate as a plain symbol.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .expr import FUNCTIONS, ONE, ZERO, Expr, as_expr, derivation, diff, sub, sym


class TruncationError(ValueError):
    """An operation needs jet coordinates beyond the context's order."""


class JetError(ValueError):
    pass


MultiIndex = tuple


def index_order(J: Sequence[int]) -> int:
    return sum(J)


def index_successor(J: Sequence[int], i: int) -> tuple:
    """Increment the ``i``-th entry (0-based direction) of a multi-index."""
    J = list(J)
    J[i] += 1
    return tuple(J)


def indices_of_order(q: int, k: int):
    """All multi-indices of length ``q`` and order ``k``, lexicographically descending."""
    if q == 1:
        yield (k,)
        return
    for j in range(k, -1, -1):
        for rest in indices_of_order(q - 1, k - j):
            yield (j,) + rest


_NAME_RE = re.compile(r"^(x|u)(\d*)(?:_\[([0-9,\s]*)\])?$")


@dataclass(frozen=True)
class JetContext:
    q: int
    p: int
    n: int
    params: tuple = field(default=())

    def __post_init__(self):
        if self.q < 1 or self.p < 1 or self.n < 1:
            raise JetError("need q >= 1, p >= 1, n >= 1")
        for name in self.params:
            if (
                _NAME_RE.match(name)
                or name in FUNCTIONS
                or not re.match(r"^[A-Za-z][A-Za-z0-9]*$", name)
            ):
                raise JetError(f"invalid parameter name {name!r}")
        object.__setattr__(self, "params", tuple(self.params))

    # -- naming ----------------------------------------------------------

    def x_name(self, i: int) -> str:
        return "x" if self.q == 1 else f"x{i + 1}"

    def u_name(self, a: int, J: Sequence[int] | None = None) -> str:
        base = "u" if self.p == 1 else f"u{a + 1}"
        if J is None or not any(J):
            return base
        return f"{base}_[{','.join(str(j) for j in J)}]"

    def x(self, i: int = 0) -> Expr:
        return sym(self.x_name(i))

    def u(self, a: int = 0, J=None) -> Expr:
        if isinstance(J, int):
            J = (J,)
        if J is not None and len(J) != self.q:
            raise JetError(f"multi-index {J} has wrong length for q={self.q}")
        return sym(self.u_name(a, J))

    def zero_index(self) -> tuple:
        return (0,) * self.q

    def unit(self, i: int) -> tuple:
        return index_successor(self.zero_index(), i)

    @property
    def xs(self) -> list[Expr]:
        return [self.x(i) for i in range(self.q)]

    def coordinate(self, name: str):
        """Classify a name: ``('x', i)``, ``('u', a, J)``, ``('param', name)`` or None."""
        return _classify(self.q, self.p, self.params, name)

    def is_coordinate(self, name: str) -> bool:
        return self.coordinate(name) is not None

    def canonical_name(self, name: str) -> str | None:
        c = self.coordinate(name)
        if c is None:
            return None
        if c[0] == "x":
            return self.x_name(c[1])
        if c[0] == "u":
            return self.u_name(c[1], c[2])
        return name

    def symbol_order(self, name: str) -> int:
        c = self.coordinate(name)
        if c is None:
            raise JetError(f"undeclared symbol {name!r}")
        return index_order(c[2]) if c[0] == "u" else 0

    def order_of(self, e: Expr) -> int:
        """Highest derivative order appearing in ``e`` (0 for functions on M)."""
        return max((self.symbol_order(s) for s in as_expr(e).free_symbols), default=0)

    def check_declared(self, e: Expr) -> None:
        for s in as_expr(e).free_symbols:
            if self.coordinate(s) is None:
                raise JetError(f"undeclared symbol {s!r}")
            if self.canonical_name(s) != s:
                raise JetError(f"non-canonical coordinate name {s!r}")
            if self.symbol_order(s) > self.n:
                raise TruncationError(f"coordinate {s} exceeds truncation order {self.n}")

    def with_order(self, n: int) -> "JetContext":
        return JetContext(self.q, self.p, n, self.params)

    def at_least(self, n: int) -> "JetContext":
        return self if self.n >= n else self.with_order(n)

    def with_params(self, params: Iterable[str]) -> "JetContext":
        return JetContext(self.q, self.p, self.n, tuple(params))

    def coordinates(self, max_order: int | None = None) -> list[str]:
        """All coordinate names up to ``max_order`` (default: n)."""
        k = self.n if max_order is None else max_order
        names = [self.x_name(i) for i in range(self.q)]
        for order in range(k + 1):
            for a in range(self.p):
                for J in indices_of_order(self.q, order):
                    names.append(self.u_name(a, J))
        return names

    def diff(self, e: Expr, v) -> Expr:
        name = v.value if isinstance(v, Expr) else v
        if self.coordinate(name) is None:
            from .expr import UndeclaredSymbolError

            raise UndeclaredSymbolError(f"undeclared symbol {name!r}")
        return diff(e, name)

    # -- total derivatives -------------------------------------------------

    def total_derivative(self, e, i: int = 0) -> Expr:
        """D_i e = d_i e + sum_{a,J} u^a_{J,i} de/du^a_J."""
        e = as_expr(e)
        k = self.order_of(e)
        if k >= self.n:
            raise TruncationError(
                f"total derivative of an order-{k} expression exceeds truncation order {self.n}"
            )
        return derivation(e, _total_rule(self.q, self.p, self.params, i))

    def D(self, e, i: int = 0) -> Expr:
        return self.total_derivative(e, i)

    def D_index(self, e, J: Sequence[int]) -> Expr:
        """Iterated total derivative D_J e (directions in ascending order)."""
        for i, j in enumerate(J):
            for _ in range(j):
                e = self.total_derivative(e, i)
        return as_expr(e)

    def section_bindings(self, f: Sequence, order: int | None = None) -> dict:
        """Bindings u^a_J -> d^J f^a for the prolonged graph of a section."""
        k = self.n if order is None else order
        xs = [self.x_name(i) for i in range(self.q)]
        out = {}
        for a, fa in enumerate(f):
            fa = as_expr(fa)
            bad = fa.free_symbols - set(xs) - set(self.params)
            if bad:
                raise JetError(f"section component depends on {sorted(bad)}")
            for order_ in range(k + 1):
                for J in indices_of_order(self.q, order_):
                    d = fa
                    for i, j in enumerate(J):
                        for _ in range(j):
                            d = diff(d, xs[i])
                    out[self.u_name(a, J)] = d
        return out


@lru_cache(maxsize=None)
def _parse_name(name: str):
    m = _NAME_RE.match(name)
    if not m:
        return None
    head, num, idx = m.groups()
    return head, num, idx


def _classify(q, p, params, name):
    if name in params:
        return ("param", name)
    parsed = _parse_name(name)
    if parsed is None:
        return None
    head, num, idx = parsed
    if head == "x":
        if idx is not None:
            return None
        if num == "":
            return ("x", 0) if q == 1 else None
        i = int(num)
        return ("x", i - 1) if 1 <= i <= q and num == str(i) else None
    if num == "":
        if p != 1:
            return None
        a = 0
    else:
        a = int(num) - 1
        if not (0 <= a < p) or num != str(a + 1):
            return None
    if idx is None:
        return ("u", a, (0,) * q)
    parts = [s.strip() for s in idx.split(",")]
    if len(parts) != q or not all(s.isdigit() for s in parts):
        return None
    return ("u", a, tuple(int(s) for s in parts))


@lru_cache(maxsize=None)
def _total_rule(q, p, params, i):
    cache = {}

    def rule(name):
        r = cache.get(name)
        if r is not None:
            return r
        c = _classify(q, p, params, name)
        if c is None:
            from .expr import UndeclaredSymbolError

            raise UndeclaredSymbolError(f"undeclared symbol {name!r}")
        if c[0] == "x":
            r = ONE if c[1] == i else ZERO
        elif c[0] == "param":
            r = ZERO
        else:
            ctx = JetContext(q, p, 1, params)
            r = ctx.u(c[1], index_successor(c[2], i))
        cache[name] = r
        return r

    return rule


@dataclass(frozen=True)
class OdeSystem:
    """Solved-form system u^a_(n_a) = F^a with F^a of order below n_a."""

    ctx: JetContext
    rhs: tuple
    orders: tuple

    def __post_init__(self):
        if self.ctx.q != 1:
            raise JetError("an ODE system needs exactly one independent variable")
        rhs = tuple(as_expr(f) for f in self.rhs)
        orders = tuple(self.orders) if not isinstance(self.orders, int) else (self.orders,) * len(rhs)
        if len(rhs) != self.ctx.p or len(orders) != len(rhs):
            raise JetError("need one right-hand side and one order per dependent variable")
        for a, (f, na) in enumerate(zip(rhs, orders)):
            if na < 1:
                raise JetError("equation orders must be positive")
            for s in f.free_symbols:
                c = self.ctx.coordinate(s)
                if c is None:
                    raise JetError(f"undeclared symbol {s!r}")
                if c[0] == "u" and c[2][0] >= orders[c[1]]:
                    raise JetError(
                        f"right-hand side of equation {a + 1} contains {s}: not in solved form"
                    )
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "ctx", self.ctx.at_least(max(orders)))

    @classmethod
    def single(cls, ctx: JetContext, order: int, rhs) -> "OdeSystem":
        return cls(ctx, tuple(rhs) if isinstance(rhs, (list, tuple)) else (rhs,), (order,) * ctx.p)

    @property
    def order(self) -> int:
        return max(self.orders)

    def leading(self, a: int) -> Expr:
        return self.ctx.u(a, (self.orders[a],))

    def equations(self) -> list[Expr]:
        """Delta^a = u^a_(n_a) - F^a."""
        return [sub(self.leading(a), f) for a, f in enumerate(self.rhs)]

    def as_solved(self) -> "SolvedSystem":
        return SolvedSystem(
            self.ctx,
            tuple((a, (self.orders[a],), f) for a, f in enumerate(self.rhs)),
        )


@dataclass(frozen=True)
class SolvedSystem:
    """Equations u^a_J = F, each solved for a distinct leading derivative.

    Principal derivatives are the leading ones and all their derivatives;
    the right-hand sides must not contain any of them.
    """

    ctx: JetContext
    equations_: tuple  # of (a, J, F)

    def __post_init__(self):
        eqs = tuple((a, tuple(J), as_expr(F)) for a, J, F in self.equations_)
        object.__setattr__(self, "equations_", eqs)
        for _, _, F in eqs:
            for s in F.free_symbols:
                if self.principal(s) is not None:
                    raise JetError(
                        f"system not normal: right-hand side contains principal derivative {s}"
                    )

    def principal(self, name: str):
        c = self.ctx.coordinate(name)
        if c is None or c[0] != "u":
            return None
        for k, (a, J, _) in enumerate(self.equations_):
            if c[1] == a and all(cj >= j for cj, j in zip(c[2], J)):
                return k, tuple(cj - j for cj, j in zip(c[2], J))
        return None

    @property
    def order(self) -> int:
        return max(index_order(J) for _, J, _ in self.equations_)

    def equations(self) -> list[Expr]:
        return [sub(self.ctx.u(a, J), F) for a, J, F in self.equations_]

    def restrict(self, e: Expr) -> Expr:
        """Restrict to the solution manifold: replace every principal derivative.

        A principal coordinate u^a_{J0+K} is replaced by D_K F computed with
        already-restricted lower derivatives.
        """
        from .expr import substitute

        cache: dict[str, Expr] = {}

        def value(name):
            r = cache.get(name)
            if r is not None:
                return r
            k, K = self.principal(name)
            a, J0, F = self.equations_[k]
            if not any(K):
                r = F
            else:
                i = max(d for d, kk in enumerate(K) if kk > 0)
                lower = self.ctx.u(a, tuple(j + kk - (1 if d == i else 0) for d, (j, kk) in enumerate(zip(J0, K))))
                prev = value(lower.value)
                ctx = self.ctx.at_least(self.ctx.order_of(prev) + 1)
                r = close(ctx.total_derivative(prev, i))
            cache[name] = r
            return r

        def close(expr):
            names = [s for s in expr.free_symbols if self.principal(s) is not None]
            if not names:
                return expr
            return substitute(expr, {s: value(s) for s in names})

        return close(as_expr(e))
