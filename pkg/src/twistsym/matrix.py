"""Small dense matrices with expression entries."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .expr import ONE, ZERO, Expr, add, as_expr, div, mul, neg, sub, to_text
from .numeric import DEFAULT, EqualityConfig, Verdict


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class MatrixExpr:
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(as_expr(v) for v in r) for r in self.rows)
        if not rows or any(len(r) != len(rows[0]) for r in rows) or not rows[0]:
            raise ShapeError("matrix must be rectangular and non-empty")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows: Sequence[Sequence]) -> "MatrixExpr":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "MatrixExpr":
        return cls.of([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "MatrixExpr":
        return cls.of([[ZERO] * (n if m is None else m) for _ in range(n)])

    @classmethod
    def diag(cls, entries: Sequence) -> "MatrixExpr":
        n = len(entries)
        return cls.of([[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, c, n: int) -> "MatrixExpr":
        return cls.diag([c] * n)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    def __getitem__(self, ij) -> Expr:
        i, j = ij
        return self.rows[i][j]

    def entries(self) -> list[Expr]:
        return [v for r in self.rows for v in r]

    def map(self, f: Callable[[Expr], Expr]) -> "MatrixExpr":
        return MatrixExpr(tuple(tuple(f(v) for v in r) for r in self.rows))

    def transpose(self) -> "MatrixExpr":
        n, m = self.shape
        return MatrixExpr.of([[self.rows[i][j] for i in range(n)] for j in range(m)])

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "MatrixExpr") -> "MatrixExpr":
        self._check_same(other)
        return MatrixExpr(
            tuple(tuple(add(a, b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        )

    def __sub__(self, other: "MatrixExpr") -> "MatrixExpr":
        self._check_same(other)
        return MatrixExpr(
            tuple(tuple(sub(a, b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        )

    def __neg__(self) -> "MatrixExpr":
        return self.map(neg)

    def scale(self, c) -> "MatrixExpr":
        c = as_expr(c)
        return self.map(lambda v: mul(c, v))

    def __matmul__(self, other: "MatrixExpr") -> "MatrixExpr":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        return MatrixExpr.of(
            [[add(*(mul(self.rows[i][l], other.rows[l][j]) for l in range(k))) for j in range(m)] for i in range(n)]
        )

    def apply(self, vec: Sequence) -> list[Expr]:
        """Matrix-vector product with a plain list of expressions."""
        n, m = self.shape
        if len(vec) != m:
            raise ShapeError(f"cannot apply {self.shape} matrix to vector of length {len(vec)}")
        return [add(*(mul(self.rows[i][j], vec[j]) for j in range(m))) for i in range(n)]

    def minor(self, i: int, j: int) -> "MatrixExpr":
        return MatrixExpr.of([[v for c, v in enumerate(r) if c != j] for k, r in enumerate(self.rows) if k != i])

    def det(self) -> Expr:
        if not self.is_square:
            raise ShapeError("determinant of a non-square matrix")
        n = self.shape[0]
        if n == 1:
            return self.rows[0][0]
        if n == 2:
            (a, b), (c, d) = self.rows
            return sub(mul(a, d), mul(b, c))
        terms = []
        for j in range(n):
            if self.rows[0][j] == ZERO:
                continue
            t = mul(self.rows[0][j], self.minor(0, j).det())
            terms.append(t if j % 2 == 0 else neg(t))
        return add(*terms)

    def adjugate(self) -> "MatrixExpr":
        n = self.shape[0]
        if n == 1:
            return MatrixExpr.of([[ONE]])
        cof = [
            [self.minor(j, i).det() if (i + j) % 2 == 0 else neg(self.minor(j, i).det()) for j in range(n)]
            for i in range(n)
        ]
        return MatrixExpr.of(cof)

    def inverse(self) -> "MatrixExpr":
        """Symbolic inverse via the adjugate; nonsingularity is the caller's concern."""
        d = self.det()
        if d == ZERO:
            raise ZeroDivisionError("matrix is structurally singular")
        return self.adjugate().map(lambda v: div(v, d))

    def commutator(self, other: "MatrixExpr") -> "MatrixExpr":
        return (self @ other) - (other @ self)

    def total_derivative(self, ctx, i: int = 0) -> "MatrixExpr":
        return self.map(lambda v: ctx.total_derivative(v, i))

    def free_symbols(self) -> frozenset:
        out = set()
        for v in self.entries():
            out |= v.free_symbols
        return frozenset(out)

    def to_rows_text(self) -> list[list[str]]:
        return [[to_text(v) for v in r] for r in self.rows]

    def __str__(self):
        return "[" + "; ".join(", ".join(r) for r in self.to_rows_text()) + "]"


def as_matrix(m) -> MatrixExpr:
    return m if isinstance(m, MatrixExpr) else MatrixExpr.of(m)


def matrix_equal(a: MatrixExpr, b: MatrixExpr, cfg: EqualityConfig = DEFAULT, label="M") -> Verdict:
    a._check_same(b)
    n, m = a.shape
    return Verdict.from_pairs(
        ((f"{label}[{i + 1},{j + 1}]", a[i, j], b[i, j]) for i in range(n) for j in range(m)), cfg
    )
