"""Dense exact-rational matrices.

Small and deliberately simple: entries are :class:`fractions.Fraction`,
storage is a tuple of row tuples, and every operation returns a new matrix.
Sizes in this package stay below ~100 rows, so the cubic Gauss-Jordan solve
is fast enough.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, RankDeficient


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: silently turning 0.1 into 3602879701896397/2**55
    is never what a caller of an exact routine wants.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, float)) or isinstance(x, np.floating):
        raise TypeError(f"refusing inexact value {x!r}; pass an int, Fraction or 'p/q' string")
    if isinstance(x, (int, np.integer, Rational)):
        return Fraction(int(x)) if isinstance(x, np.integer) else Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational")


def frac_str(x: Fraction) -> str:
    """Render as ``"p/q"`` in lowest terms, or ``"n"`` for integers."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class RationalMatrix:
    __slots__ = ("_rows", "rows", "cols")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(as_fraction(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise DimensionMismatch("matrix must have at least one row and one column")
        width = len(data[0])
        if any(len(row) != width for row in data):
            raise DimensionMismatch("ragged rows")
        self._rows = data
        self.rows = len(data)
        self.cols = width

    # -- constructors -------------------------------------------------
    @classmethod
    def _wrap(cls, data: tuple) -> "RationalMatrix":
        m = cls.__new__(cls)
        m._rows = data
        m.rows = len(data)
        m.cols = len(data[0])
        return m

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._wrap(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def full(cls, rows: int, cols: int, value=0) -> "RationalMatrix":
        value = as_fraction(value)
        return cls._wrap(tuple((value,) * cols for _ in range(rows)))

    @classmethod
    def diagonal(cls, values: Sequence) -> "RationalMatrix":
        vals = [as_fraction(x) for x in values]
        n = len(vals)
        zero = Fraction(0)
        return cls._wrap(tuple(tuple(vals[i] if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def column(cls, values: Sequence) -> "RationalMatrix":
        return cls([[x] for x in values])

    # -- access -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self._rows)

    def tolist(self) -> list[list[Fraction]]:
        return [list(row) for row in self._rows]

    def to_strings(self) -> list[list[str]]:
        return [[frac_str(x) for x in row] for row in self._rows]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self._rows])

    def flat(self) -> list[Fraction]:
        if self.cols == 1:
            return [row[0] for row in self._rows]
        if self.rows == 1:
            return list(self._rows[0])
        raise DimensionMismatch(f"{self.shape} matrix is not a vector")

    def __iter__(self):
        return iter(self._rows)

    def __repr__(self) -> str:
        return f"RationalMatrix({self.to_strings()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    # -- arithmetic ---------------------------------------------------
    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix._wrap(tuple(zip(*self._rows)))

    def _check_same_shape(self, other: "RationalMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix._wrap(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows))
        )

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix._wrap(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows))
        )

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix._wrap(tuple(tuple(-a for a in r) for r in self._rows))

    def scale(self, c) -> "RationalMatrix":
        c = as_fraction(c)
        return RationalMatrix._wrap(tuple(tuple(c * a for a in r) for r in self._rows))

    __rmul__ = scale

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        other_cols = list(zip(*other._rows))
        out = []
        for row in self._rows:
            nz = [(k, a) for k, a in enumerate(row) if a]
            out.append(tuple(sum((a * col[k] for k, a in nz), Fraction(0)) for col in other_cols))
        return RationalMatrix._wrap(tuple(out))

    def trace(self) -> Fraction:
        if self.rows != self.cols:
            raise DimensionMismatch("trace of a non-square matrix")
        return sum((self._rows[i][i] for i in range(self.rows)), Fraction(0))

    def row_sums(self) -> list[Fraction]:
        return [sum(r, Fraction(0)) for r in self._rows]

    def col_sums(self) -> list[Fraction]:
        return [sum(c, Fraction(0)) for c in zip(*self._rows)]

    # -- solving ------------------------------------------------------
    def solve(self, rhs: "RationalMatrix") -> "RationalMatrix":
        """Return X with ``self @ X == rhs`` for square, nonsingular ``self``.

        Gauss-Jordan elimination on the augmented matrix. Over exact
        rationals any nonzero pivot is as good as another, so the pivot is
        the first nonzero entry at or below the diagonal.
        """
        n = self.rows
        if self.cols != n:
            raise DimensionMismatch("solve needs a square coefficient matrix")
        if rhs.rows != n:
            raise DimensionMismatch(f"rhs has {rhs.rows} rows, expected {n}")
        aug = [list(a) + list(b) for a, b in zip(self._rows, rhs._rows)]
        width = n + rhs.cols
        for c in range(n):
            pivot = next((i for i in range(c, n) if aug[i][c] != 0), None)
            if pivot is None:
                raise RankDeficient(f"matrix is singular (no pivot in column {c})")
            if pivot != c:
                aug[c], aug[pivot] = aug[pivot], aug[c]
            prow = aug[c]
            inv = 1 / prow[c]
            if inv != 1:
                prow = aug[c] = [x * inv for x in prow]
            for i in range(n):
                if i == c:
                    continue
                factor = aug[i][c]
                if factor:
                    row = aug[i]
                    aug[i] = [row[j] - factor * prow[j] if prow[j] else row[j] for j in range(width)]
        return RationalMatrix._wrap(tuple(tuple(row[n:]) for row in aug))

    def inverse(self) -> "RationalMatrix":
        return self.solve(RationalMatrix.identity(self.rows))

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == RationalMatrix.identity(self.rows)
