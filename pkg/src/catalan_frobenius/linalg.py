"""Small dense matrices over the exact scalar ring."""

from __future__ import annotations

from typing import Any, Callable, Iterable, Sequence

from .scalars import ExactScalar, Rational, as_scalar, format_scalar


class Matrix:
    """Immutable square-or-rectangular matrix with ExactScalar entries."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[Rational | ExactScalar]]) -> None:
        self.rows: tuple[tuple[ExactScalar, ...], ...] = tuple(tuple(as_scalar(x) for x in r) for r in rows)

    @classmethod
    def identity(cls, n: int = 2) -> Matrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int = 2, m: int | None = None) -> Matrix:
        return cls([[0] * (n if m is None else m) for _ in range(n)])

    @classmethod
    def diag(cls, entries: Sequence[Rational | ExactScalar]) -> Matrix:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij: tuple[int, int]) -> ExactScalar:
        return self.rows[ij[0]][ij[1]]

    def map(self, fn: Callable[[ExactScalar], Any]) -> Matrix:
        return Matrix([[fn(x) for x in r] for r in self.rows])

    def __add__(self, other: Matrix) -> Matrix:
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: Matrix) -> Matrix:
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> Matrix:
        return self.map(lambda x: -x)

    def __mul__(self, other: Matrix | Rational | ExactScalar) -> Matrix:
        if isinstance(other, Matrix):
            cols = list(zip(*other.rows))
            out = []
            for r in self.rows:
                row = []
                for c in cols:
                    acc = ExactScalar(0)
                    for a, b in zip(r, c):
                        if a and b:
                            acc = acc + a * b
                    row.append(acc)
                out.append(row)
            return Matrix(out)
        s = as_scalar(other)
        return self.map(lambda x: x * s)

    def __rmul__(self, other: Rational | ExactScalar) -> Matrix:
        s = as_scalar(other)
        return self.map(lambda x: s * x)

    def __pow__(self, n: int) -> Matrix:
        out = Matrix.identity(self.shape[0])
        for _ in range(n):
            out = out * self
        return out

    def T(self) -> Matrix:
        return Matrix(zip(*self.rows))

    def det2(self) -> ExactScalar:
        (a, b), (c, d) = self.rows
        return a * d - b * c

    def inverse(self) -> Matrix:
        if self.shape != (2, 2):
            raise ValueError("only 2x2 inversion is implemented")
        (a, b), (c, d) = self.rows
        det = self.det2()
        if det.is_zero():
            raise ZeroDivisionError("singular matrix")
        inv = det.inverse()
        return Matrix([[d * inv, -b * inv], [-c * inv, a * inv]])

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def to_strings(self) -> list[list[str]]:
        return [[format_scalar(x) for x in r] for r in self.rows]

    def __repr__(self) -> str:
        return f"Matrix({self.to_strings()})"


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a * b - b * a


ETA = Matrix([[0, 1], [1, 0]])
