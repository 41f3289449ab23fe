"""Dense matrices of exact polynomials, with exact determinants.

Two determinant strategies:

* cofactor expansion with memoisation over column subsets -- best for the
  small (<= 6x6) symbolic matrices that dominate this project;
* fraction-free Bareiss elimination (exact single-step division) -- better
  for larger or numerically heavy matrices.

``det`` picks automatically; both agree exactly, which the test-suite
exploits as a cross-check.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Sequence, Tuple

from .poly import Polynomial, VarRegistry, exact_div


class PolyMatrix:
    """A rows x cols matrix of polynomials over a single registry."""

    __slots__ = ("registry", "rows", "cols", "entries")

    def __init__(self, registry: VarRegistry, entries: Sequence[Sequence[Polynomial]]):
        entries = [list(row) for row in entries]
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        for row in entries:
            if len(row) != cols:
                raise ValueError("ragged matrix")
            for p in row:
                if p.registry != registry:
                    raise ValueError("registry mismatch in matrix entry")
        object.__setattr__(self, "registry", registry)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("PolyMatrix is immutable")

    @staticmethod
    def from_rows(registry: VarRegistry, rows: Sequence[Sequence]) -> "PolyMatrix":
        """Build from ints / Fractions / Polynomials / strings."""
        from .parse import parse_poly

        out = []
        for row in rows:
            prow = []
            for x in row:
                if isinstance(x, Polynomial):
                    prow.append(x)
                elif isinstance(x, str):
                    prow.append(parse_poly(x, registry))
                else:
                    prow.append(Polynomial.const(registry, x))
            out.append(prow)
        return PolyMatrix(registry, out)

    @staticmethod
    def identity(registry: VarRegistry, n: int) -> "PolyMatrix":
        one = Polynomial.const(registry, 1)
        zero = Polynomial.zero(registry)
        return PolyMatrix(
            registry, [[one if i == j else zero for j in range(n)] for i in range(n)]
        )

    def __getitem__(self, ij: Tuple[int, int]) -> Polynomial:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (
            self.registry == other.registry
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.registry, tuple(tuple(r) for r in self.entries)))

    def __repr__(self) -> str:
        body = ",\n  ".join(
            "[" + ", ".join(repr(p) for p in row) + "]" for row in self.entries
        )
        return f"PolyMatrix([\n  {body}\n])"

    def __mul__(self, other):
        if isinstance(other, PolyMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch in matrix product")
            zero = Polynomial.zero(self.registry)
            out = []
            for i in range(self.rows):
                row = []
                for j in range(other.cols):
                    acc = zero
                    for k in range(self.cols):
                        acc = acc + self.entries[i][k] * other.entries[k][j]
                    row.append(acc)
                out.append(row)
            return PolyMatrix(self.registry, out)
        return PolyMatrix(
            self.registry, [[p * other for p in row] for row in self.entries]
        )

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch in matrix sum")
        return PolyMatrix(
            self.registry,
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
        )

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(
            self.registry,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def submatrix(
        self, rows: Sequence[int], cols: Sequence[int]
    ) -> "PolyMatrix":
        return PolyMatrix(
            self.registry, [[self.entries[i][j] for j in cols] for i in rows]
        )

    def map(self, fn: Callable[[Polynomial], Polynomial], registry=None) -> "PolyMatrix":
        registry = registry or self.registry
        return PolyMatrix(registry, [[fn(p) for p in row] for row in self.entries])

    def det(self, method: str = "auto") -> Polynomial:
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        if method == "auto":
            method = "cofactor" if self.rows <= 6 else "bareiss"
        if method == "cofactor":
            return self._det_cofactor()
        if method == "bareiss":
            return self._det_bareiss()
        raise ValueError(f"unknown determinant method {method!r}")

    def minor(self, rows: Sequence[int], cols: Sequence[int]) -> Polynomial:
        """Determinant of the (rows x cols) submatrix, indices in given order."""
        return self.submatrix(rows, cols).det()

    def _det_cofactor(self) -> Polynomial:
        n = self.rows
        if n == 0:
            return Polynomial.const(self.registry, 1)
        # dp over column subsets: expand along rows top-down; memo keyed by
        # the frozenset of still-available columns (row index is implied by
        # the subset size).
        memo: Dict[Tuple[int, ...], Polynomial] = {}
        zero = Polynomial.zero(self.registry)

        def rec(cols: Tuple[int, ...]) -> Polynomial:
            if not cols:
                return Polynomial.const(self.registry, 1)
            got = memo.get(cols)
            if got is not None:
                return got
            i = n - len(cols)
            acc = zero
            for pos, j in enumerate(cols):
                a = self.entries[i][j]
                if a.is_zero():
                    continue
                sub = rec(cols[:pos] + cols[pos + 1 :])
                term = a * sub
                acc = acc + term if pos % 2 == 0 else acc - term
            memo[cols] = acc
            return acc

        return rec(tuple(range(n)))

    def _det_bareiss(self) -> Polynomial:
        n = self.rows
        one = Polynomial.const(self.registry, 1)
        m = [list(row) for row in self.entries]
        sign = 1
        prev = one
        for k in range(n - 1):
            if m[k][k].is_zero():
                # pivot search
                for r in range(k + 1, n):
                    if not m[r][k].is_zero():
                        m[k], m[r] = m[r], m[k]
                        sign = -sign
                        break
                else:
                    return Polynomial.zero(self.registry)
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                    m[i][j] = num if prev == one else exact_div(num, prev)
                m[i][k] = Polynomial.zero(self.registry)
            prev = m[k][k]
        result = m[n - 1][n - 1] if n else one
        return result if sign == 1 else -result
