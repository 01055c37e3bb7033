"""Immutable expression trees with exact rational constants.

Nodes are canonicalized at construction: sums and products are flattened,
like terms and like factors are collected, constants are folded, and
children are sorted by a fixed total order.  Equality of two trees is
structural; equality of the functions they denote is decided elsewhere
(see :mod:`twistsym.numeric`).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Callable, Iterable, Mapping

CONST, SYM, POW, MUL, ADD, FUNC = range(6)

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sqrt")


class UndeclaredSymbolError(KeyError):
    pass


class Expr:
    __slots__ = ("kind", "value", "args", "_hash", "_key", "_free")

    def __init__(self, kind: int, value, args: tuple = ()):
        self.kind = kind
        self.value = value
        self.args = args
        self._hash = hash((kind, value, args))
        self._key = None
        self._free = None

    # -- structure -------------------------------------------------------

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction)):
                return self.kind == CONST and self.value == other
            return NotImplemented
        return (
            self._hash == other._hash
            and self.kind == other.kind
            and self.value == other.value
            and self.args == other.args
        )

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    @property
    def sort_key(self):
        k = self._key
        if k is None:
            if self.kind in (CONST, SYM):
                k = (self.kind, self.value)
            elif self.kind == FUNC:
                k = (FUNC, self.value, self.args[0].sort_key)
            else:
                k = (self.kind, len(self.args), tuple(a.sort_key for a in self.args))
            self._key = k
        return k

    @property
    def free_symbols(self) -> frozenset:
        f = self._free
        if f is None:
            if self.kind == SYM:
                f = frozenset((self.value,))
            elif self.kind == CONST:
                f = frozenset()
            else:
                f = frozenset().union(*(a.free_symbols for a in self.args))
            self._free = f
        return f

    @property
    def is_const(self) -> bool:
        return self.kind == CONST

    @property
    def is_zero(self) -> bool:
        return self.kind == CONST and self.value == 0

    @property
    def base(self) -> "Expr":
        return self.args[0] if self.kind == POW else self

    @property
    def exponent(self) -> "Expr":
        return self.args[1] if self.kind == POW else ONE

    # -- arithmetic sugar --------------------------------------------------

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), MINUS_ONE))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, MINUS_ONE))

    def __pow__(self, other):
        return power(self, as_expr(other))

    def __rpow__(self, other):
        return power(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pos__(self):
        return self

    def __repr__(self):
        return f"Expr({to_text(self)!r})"

    def __str__(self):
        return to_text(self)


def _raw(kind, value, args=()):
    return Expr(kind, value, tuple(args))


def const(q) -> Expr:
    if isinstance(q, Expr):
        if q.kind != CONST:
            raise TypeError("not a constant expression")
        return q
    if isinstance(q, float):
        raise TypeError("floating-point constants are not allowed in expression trees")
    if not isinstance(q, Rational):
        raise TypeError(f"cannot make a constant from {type(q).__name__}")
    return Expr(CONST, Fraction(q))


def sym(name: str) -> Expr:
    return Expr(SYM, name)


ZERO = const(0)
ONE = const(1)
MINUS_ONE = const(-1)
TWO = const(2)
HALF = const(Fraction(1, 2))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, str):
        return sym(x)
    return const(x)


# -- canonical constructors ------------------------------------------------


def _split_coeff(t: Expr):
    """Return (rational coefficient, remaining term) of a summand."""
    if t.kind == MUL and t.args[0].kind == CONST:
        rest = t.args[1:]
        if len(rest) == 1:
            return t.args[0].value, rest[0]
        return t.args[0].value, _raw(MUL, None, rest)
    return Fraction(1), t


def add(*terms) -> Expr:
    flat: list[Expr] = []
    for t in terms:
        t = as_expr(t)
        if t.kind == ADD:
            flat.extend(t.args)
        elif t.kind == MUL and len(t.args) == 2 and t.args[0].kind == CONST and t.args[1].kind == ADD:
            # c*(a + b) inside a sum is distributed so like terms can cancel
            flat.extend(mul(t.args[0], s) for s in t.args[1].args)
        else:
            flat.append(t)
    if len(flat) == 1:
        return flat[0]
    c0 = Fraction(0)
    coeffs: dict[Expr, Fraction] = {}
    for t in flat:
        if t.kind == CONST:
            c0 += t.value
            continue
        c, rest = _split_coeff(t)
        coeffs[rest] = coeffs.get(rest, 0) + c
    out = []
    for rest, c in coeffs.items():
        if c == 0:
            continue
        if c == 1:
            out.append(rest)
        elif rest.kind == MUL:
            out.append(_raw(MUL, None, (const(c),) + rest.args))
        else:
            out.append(_raw(MUL, None, (const(c), rest)))
    if c0 != 0:
        out.append(const(c0))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    out.sort(key=lambda e: e.sort_key)
    return _raw(ADD, None, out)


def mul(*factors) -> Expr:
    flat: list[Expr] = []
    for f in factors:
        f = as_expr(f)
        if f.kind == MUL:
            flat.extend(f.args)
        else:
            flat.append(f)
    if len(flat) == 1:
        return flat[0]
    coeff = Fraction(1)
    exps: dict[Expr, list] = {}
    order: list[Expr] = []
    for f in flat:
        if f.kind == CONST:
            coeff *= f.value
            continue
        b, e = (f.args[0], f.args[1]) if f.kind == POW else (f, ONE)
        if b not in exps:
            exps[b] = []
            order.append(b)
        exps[b].append(e)
    if coeff == 0:
        return ZERO
    out = []
    for b in order:
        es = exps[b]
        p = power(b, es[0] if len(es) == 1 else add(*es))
        if p.kind == CONST:
            coeff *= p.value
        elif p.kind == MUL:
            # only reachable for integer powers of constants times symbols
            for g in p.args:
                if g.kind == CONST:
                    coeff *= g.value
                else:
                    out.append(g)
        else:
            out.append(p)
    if coeff == 0:
        return ZERO
    if not out:
        return const(coeff)
    out.sort(key=lambda e: e.sort_key)
    if coeff != 1:
        out.insert(0, const(coeff))
    if len(out) == 1:
        return out[0]
    return _raw(MUL, None, out)


def _is_int(e: Expr) -> bool:
    return e.kind == CONST and e.value.denominator == 1


def power(b, e) -> Expr:
    b, e = as_expr(b), as_expr(e)
    if e.kind == CONST:
        if e.value == 0:
            return ONE
        if e.value == 1:
            return b
    if b.kind == CONST:
        if b.value == 1:
            return ONE
        if b.value == 0 and e.kind == CONST:
            if e.value < 0:
                raise ZeroDivisionError("zero raised to a negative power")
            return ZERO
        if _is_int(e):
            return const(b.value ** int(e.value))
    if _is_int(e):
        if b.kind == POW:
            return power(b.args[0], mul(b.args[1], e))
        if b.kind == MUL:
            return mul(*(power(f, e) for f in b.args))
    return _raw(POW, None, (b, e))


def neg(e) -> Expr:
    return mul(MINUS_ONE, e)


def sub(a, b) -> Expr:
    return add(a, neg(b))


def div(a, b) -> Expr:
    return mul(a, power(b, MINUS_ONE))


def func(name: str, arg) -> Expr:
    arg = as_expr(arg)
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    if arg.kind == CONST:
        v = arg.value
        if v == 0:
            if name in ("sin", "tan", "sqrt"):
                return ZERO
            if name in ("exp", "cos"):
                return ONE
        if name == "log" and v == 1:
            return ZERO
        if name == "sqrt" and v > 0:
            n, d = v.numerator, v.denominator
            rn, rd = _isqrt_exact(n), _isqrt_exact(d)
            if rn is not None and rd is not None:
                return const(Fraction(rn, rd))
    if name == "log" and arg.kind == FUNC and arg.value == "exp":
        return arg.args[0]
    return _raw(FUNC, name, (arg,))


def _isqrt_exact(n: int):
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


def exp(a):
    return func("exp", a)


def log(a):
    return func("log", a)


def sin(a):
    return func("sin", a)


def cos(a):
    return func("cos", a)


def tan(a):
    return func("tan", a)


def sqrt(a):
    return func("sqrt", a)


def rebuild(e: Expr, args: Iterable[Expr]) -> Expr:
    """Rebuild a node of the same kind from new children, canonicalizing."""
    args = tuple(args)
    if e.kind == ADD:
        return add(*args)
    if e.kind == MUL:
        return mul(*args)
    if e.kind == POW:
        return power(*args)
    if e.kind == FUNC:
        return func(e.value, args[0])
    return e


def canon(e: Expr) -> Expr:
    if e.kind in (CONST, SYM):
        return e
    return rebuild(e, (canon(a) for a in e.args))


simplify = canon
simplify.__doc__ = """Re-run the canonical rewrite set bottom-up.

Applies constant folding, 0/1 absorption, like-term collection over
sums, like-factor collection over products and power merging.  The
rewrite set is deliberately incomplete; callers decide equality with
the numeric oracle.
"""


def _distribute(factors) -> Expr:
    terms = [ONE]
    for f in factors:
        parts = f.args if f.kind == ADD else (f,)
        terms = [mul(t, p) for t in terms for p in parts]
    return add(*terms)


def expand(e: Expr) -> Expr:
    """Distribute products over sums and expand positive integer powers of sums."""
    memo: dict[Expr, Expr] = {}

    def go(e):
        r = memo.get(e)
        if r is not None:
            return r
        if e.kind in (CONST, SYM):
            r = e
        elif e.kind == ADD:
            r = add(*(go(a) for a in e.args))
        elif e.kind == MUL:
            r = _distribute([go(f) for f in e.args])
        elif e.kind == POW:
            b, x = go(e.args[0]), go(e.args[1])
            if b.kind == ADD and _is_int(x) and 1 < x.value <= 8:
                r = _distribute([b] * int(x.value))
            else:
                r = power(b, x)
        else:
            r = func(e.value, go(e.args[0]))
        memo[e] = r
        return r

    return go(e)


# -- calculus --------------------------------------------------------------


def derivation(e: Expr, rule: Callable[[str], Expr], memo: dict | None = None) -> Expr:
    """Apply the derivation fixed by its action ``rule`` on symbols.

    ``rule(name)`` returns the image of a symbol; the chain rule extends
    it to the whole tree.  Partial derivatives, total derivatives and the
    action of vector fields are all derivations of this form.
    """
    if memo is None:
        memo = {}

    def go(e):
        r = memo.get(e)
        if r is not None:
            return r
        k = e.kind
        if k == CONST:
            r = ZERO
        elif k == SYM:
            r = rule(e.value)
        elif k == ADD:
            r = add(*(go(a) for a in e.args))
        elif k == MUL:
            terms = []
            args = e.args
            for i, a in enumerate(args):
                da = go(a)
                if da.is_zero:
                    continue
                terms.append(mul(*args[:i], da, *args[i + 1 :]))
            r = add(*terms)
        elif k == POW:
            b, x = e.args
            db = go(b)
            dx = go(x) if x.free_symbols else ZERO
            terms = []
            if not db.is_zero:
                terms.append(mul(x, power(b, add(x, MINUS_ONE)), db))
            if not dx.is_zero:
                terms.append(mul(e, log(b), dx))
            r = add(*terms)
        else:
            a = e.args[0]
            da = go(a)
            if da.is_zero:
                r = ZERO
            else:
                r = mul(_func_derivative(e.value, a, e), da)
        memo[e] = r
        return r

    return go(e)


def _func_derivative(name: str, a: Expr, whole: Expr) -> Expr:
    if name == "exp":
        return whole
    if name == "log":
        return power(a, MINUS_ONE)
    if name == "sin":
        return cos(a)
    if name == "cos":
        return neg(sin(a))
    if name == "tan":
        return add(ONE, power(whole, TWO))
    if name == "sqrt":
        return mul(HALF, power(whole, MINUS_ONE))
    raise ValueError(name)


@lru_cache(maxsize=1 << 16)
def _diff(e: Expr, v: str) -> Expr:
    return derivation(e, lambda s: ONE if s == v else ZERO)


def diff(e: Expr, v, declared: Iterable[str] | None = None) -> Expr:
    """Partial derivative of ``e`` with respect to the symbol ``v``.

    When ``declared`` is given, ``v`` must belong to it.
    """
    name = v.value if isinstance(v, Expr) else v
    if isinstance(v, Expr) and v.kind != SYM:
        raise TypeError("can only differentiate with respect to a symbol")
    if declared is not None and name not in declared:
        raise UndeclaredSymbolError(f"undeclared symbol {name!r}")
    if name not in e.free_symbols:
        return ZERO
    return _diff(e, name)


def substitute(e: Expr, bindings: Mapping) -> Expr:
    """Simultaneous substitution of symbols; unbound symbols pass through."""
    b = {}
    for k, v in bindings.items():
        b[k.value if isinstance(k, Expr) else k] = as_expr(v)
    if not b:
        return e
    keys = frozenset(b)
    memo: dict[Expr, Expr] = {}

    def go(e):
        if not (e.free_symbols & keys):
            return e
        r = memo.get(e)
        if r is not None:
            return r
        if e.kind == SYM:
            r = b[e.value]
        else:
            r = rebuild(e, (go(a) for a in e.args))
        memo[e] = r
        return r

    return go(e)


def count_nodes(e: Expr) -> int:
    seen = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        stack.extend(n.args)
    return len(seen)


# -- printing --------------------------------------------------------------

_P_ADD, _P_MUL, _P_NEG, _P_POW, _P_ATOM = 1, 2, 3, 4, 5


def _const_text(q: Fraction) -> tuple[str, int]:
    if q.denominator == 1:
        return (str(q.numerator), _P_ATOM if q >= 0 else _P_NEG)
    if q < 0:
        return (f"-{-q.numerator}/{q.denominator}", _P_NEG)
    return (f"{q.numerator}/{q.denominator}", _P_MUL)


def _wrap(text_prec, min_prec):
    text, prec = text_prec
    return f"({text})" if prec < min_prec else text


def _text(e: Expr) -> tuple[str, int]:
    k = e.kind
    if k == CONST:
        return _const_text(e.value)
    if k == SYM:
        return (e.value, _P_ATOM)
    if k == FUNC:
        return (f"{e.value}({_text(e.args[0])[0]})", _P_ATOM)
    if k == POW and not (e.args[1].kind == CONST and e.args[1].value < 0):
        b, x = e.args
        bt = _wrap(_text(b), _P_ATOM)
        if x.kind == CONST and x.value.denominator == 1 and x.value > 0:
            xt = str(x.value)
        elif x.kind == SYM:
            xt = x.value
        else:
            xt = f"({_text(x)[0]})"
        return (f"{bt}^{xt}", _P_POW)
    if k == ADD:
        parts = []
        for i, t in enumerate(e.args):
            c, rest = _split_coeff(t)
            if c < 0:
                body = _wrap(_text(mul(const(-c), rest)), _P_MUL)
                parts.append(f"-{body}" if i == 0 else f" - {body}")
            else:
                body = _wrap(_text(t), _P_MUL)
                parts.append(body if i == 0 else f" + {body}")
        return ("".join(parts), _P_ADD)
    # product
    c, rest = _split_coeff(e)
    factors = rest.args if rest.kind == MUL else (rest,)
    num, den = [], []
    for f in factors:
        if f.kind == POW and f.args[1].kind == CONST and f.args[1].value < 0:
            den.append(power(f.args[0], const(-f.args[1].value)))
        else:
            num.append(f)
    sign = ""
    if c < 0:
        sign, c = "-", -c
    pieces = []
    if c != 1:
        pieces.append(_wrap(_const_text(c), _P_MUL))
    pieces.extend(_wrap(_text(f), _P_NEG) for f in num)
    if not pieces:
        pieces.append("1")
    text = "*".join(pieces)
    for d in den:
        text += "/" + _wrap(_text(d), _P_POW)
    return (sign + text, _P_NEG if sign else _P_MUL)


def to_text(e: Expr) -> str:
    """Render ``e`` in the expression grammar accepted by the parser."""
    return _text(e)[0]
