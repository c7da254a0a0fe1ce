"""Dense and sparse linear algebra kernels shared by the exact and float paths.

Exact elimination (echelon forms, null spaces, determinants) runs on sympy's
``DomainMatrix`` over ``QQ`` or over the algebraic field generated by the
radicals of a tower and, for complex entries, by ``i``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg
import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .exceptions import (
    DimensionMismatchError,
    ParameterMismatchError,
    RingMismatchError,
)
from .scalar import (
    ZERO,
    ComplexScalar,
    Tower,
    TowerScalar,
    common_tower,
    is_exact,
    is_zero,
)

SparseRow = dict[int, object]


def is_exact_array(a: np.ndarray) -> bool:
    """True for object arrays holding exact scalars."""
    return a.dtype == object


def exact_zeros(shape, complex_entries: bool = False) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    fill = ZERO if complex_entries else Fraction(0)
    out.fill(fill)
    return out


def exact_identity(n: int, complex_entries: bool = True) -> np.ndarray:
    out = exact_zeros((n, n), complex_entries)
    one = ComplexScalar(1, 0) if complex_entries else Fraction(1)
    for i in range(n):
        out[i, i] = one
    return out


def to_float_array(a: np.ndarray) -> np.ndarray:
    """Float (or complex) copy of an exact array; float arrays pass through."""
    if not is_exact_array(a):
        return a
    flat = a.ravel()
    if any(isinstance(x, ComplexScalar) for x in flat):
        return np.array([complex(x) for x in flat], dtype=complex).reshape(a.shape)
    return np.array([float(x) for x in flat], dtype=float).reshape(a.shape)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product; exact operands use a zero-skipping triple loop."""
    if a.shape[-1] != b.shape[0]:
        raise DimensionMismatchError(f"Cannot multiply {a.shape} by {b.shape}")
    if not is_exact_array(a) and not is_exact_array(b):
        return a @ b
    if not (is_exact_array(a) and is_exact_array(b)):
        return to_float_array(a) @ to_float_array(b)
    rows, inner = a.shape
    cols = b.shape[1]
    b_rows = [
        [(j, b[k, j]) for j in range(cols) if not is_zero(b[k, j])]
        for k in range(inner)
    ]
    complex_out = any(isinstance(x, ComplexScalar) for x in a.ravel()) or any(
        isinstance(x, ComplexScalar) for x in b.ravel()
    )
    out = exact_zeros((rows, cols), complex_out)
    for i in range(rows):
        acc: dict[int, object] = {}
        for k in range(inner):
            x = a[i, k]
            if is_zero(x):
                continue
            for j, y in b_rows[k]:
                term = x * y
                acc[j] = acc[j] + term if j in acc else term
        for j, v in acc.items():
            out[i, j] = v
    return out


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    if is_exact_array(a):
        out = np.empty((a.shape[1], a.shape[0]), dtype=object)
        for i in range(a.shape[0]):
            for j in range(a.shape[1]):
                out[j, i] = a[i, j].conjugate()
        return out
    return a.conj().T


def congruence(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """A W A^T, the action of A (x) A on a bilinear coefficient matrix."""
    return matmul(matmul(a, w), a.T.copy())


def _radicals(tower: Tower) -> list[tuple[int, sympy.Expr]]:
    """Irrational radicals a reduced scalar of ``tower`` can carry, by part index."""
    c = sympy.Rational(tower.c.numerator, tower.c.denominator)
    if tower.is_free:
        return [(1, sympy.sqrt(c)), (2, sympy.sqrt(1 - c))]
    if tower.sqrt_c is not None and tower.sqrt_complement is not None:
        return []
    if tower.sqrt_c is not None:
        return [(2, sympy.sqrt(1 - c))]
    return [(1, sympy.sqrt(c))]


def _qq(q: Fraction):
    return QQ(q.numerator, q.denominator)


def _fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class ExactField:
    """The sympy domain holding the scalars of one tower, optionally with i.

    Scalars enter through their rational coordinates on the monomials
    1, sqrt(c), sqrt(1-c), sqrt(c(1-c)) and their multiples by i; they come
    back by solving for those coordinates in the power basis of the field's
    primitive element.
    """

    def __init__(self, tower: Optional[Tower], imaginary: bool) -> None:
        self.tower = tower
        self.imaginary = imaginary
        radicals = _radicals(tower) if tower is not None else []
        extension = [g for _, g in radicals] + ([sympy.I] if imaginary else [])
        self.domain = QQ.algebraic_field(*extension) if extension else QQ
        one = self.domain.one
        real = [(0, one)] + [(idx, self.domain.from_sympy(g)) for idx, g in radicals]
        if len(radicals) == 2:
            real.append((3, real[1][1] * real[2][1]))
        # (component, part index, image): component 0 is the real part, 1 the imaginary
        self._monomials = [(0, idx, image) for idx, image in real]
        if imaginary:
            i = self.domain.from_sympy(sympy.I)
            self._monomials += [(1, idx, image * i) for idx, image in real]
        self.degree = len(self._monomials)
        powers = [self._coefficients(image) for _, _, image in self._monomials]
        shape = (self.degree, self.degree)
        self._solve = DomainMatrix(powers, shape, QQ).inv().to_list()

    def _coefficients(self, value) -> list:
        if self.domain == QQ:
            return [value]
        coeffs = list(value.to_list())
        return [QQ.zero] * (self.degree - len(coeffs)) + coeffs

    def _parts(self, x) -> tuple:
        if isinstance(x, TowerScalar):
            if self.tower is None or x.tower != self.tower:
                raise ParameterMismatchError(
                    f"Scalar over c={x.c} in the field of {self!r}"
                )
            return x.parts
        if isinstance(x, Fraction) or isinstance(x, int):
            return (Fraction(x), Fraction(0), Fraction(0), Fraction(0))
        raise RingMismatchError(f"Cannot place {x!r} in an exact field")

    def convert(self, x):
        """Domain element equal to the exact scalar ``x``."""
        if isinstance(x, ComplexScalar):
            components = (self._parts(x.re), self._parts(x.im))
            if not self.imaginary and any(components[1]):
                raise RingMismatchError(f"Complex scalar {x!r} in a real field")
        else:
            components = (self._parts(x), (0, 0, 0, 0))
        total = self.domain.zero
        for component, idx, image in self._monomials:
            q = components[component][idx]
            if q:
                total += self.domain.convert_from(_qq(q), QQ) * image
        return total

    def revert(self, value):
        """The exact scalar equal to the domain element ``value``."""
        coeffs = self._coefficients(value)
        parts = [[Fraction(0)] * 4, [Fraction(0)] * 4]
        for k, (component, idx, _) in enumerate(self._monomials):
            total = QQ.zero
            for j, a in enumerate(coeffs):
                if a:
                    total += a * self._solve[j][k]
            parts[component][idx] = _fraction(total)
        re, im = (self._real(p) for p in parts)
        return ComplexScalar(re, im) if self.imaginary else re

    def _real(self, parts: list[Fraction]):
        if self.tower is None:
            return parts[0]
        return TowerScalar(self.tower, *parts)

    def join(self, other: ExactField) -> ExactField:
        """Smallest field holding the scalars of both."""
        towers = (self.tower, other.tower)
        if None not in towers and self.tower != other.tower:
            raise ParameterMismatchError(
                f"Tower parameters differ: c={self.tower.c} and c={other.tower.c}"
            )
        tower = self.tower if self.tower is not None else other.tower
        return _field(tower, self.imaginary or other.imaginary)

    def __repr__(self) -> str:
        return f"ExactField({self.domain})"


@lru_cache(maxsize=None)
def _field(tower: Optional[Tower], imaginary: bool) -> ExactField:
    return ExactField(tower, imaginary)


def exact_field(values: Iterable) -> ExactField:
    """The field of the tower shared by ``values``, with i when any is non-real."""
    values = list(values)
    imaginary = any(
        isinstance(v, ComplexScalar) and not is_zero(v.im) for v in values
    )
    return _field(common_tower(values), imaginary)


def to_domain_matrix(
    rows: Sequence[SparseRow], size: int, field: Optional[ExactField] = None
) -> DomainMatrix:
    """Sparse ``DomainMatrix`` with one row per sparse vector."""
    if field is None:
        field = exact_field(v for row in rows for v in row.values())
    entries = {}
    for i, row in enumerate(rows):
        converted = {j: field.convert(v) for j, v in row.items() if not is_zero(v)}
        if converted:
            entries[i] = converted
    return DomainMatrix(entries, (len(rows), size), field.domain)


def from_domain_matrix(matrix: DomainMatrix, field: ExactField) -> list[SparseRow]:
    """Sparse rows of exact scalars; zero rows come back empty."""
    rep = matrix.to_sparse().rep
    return [
        {j: field.revert(v) for j, v in sorted(rep.get(i, {}).items()) if v}
        for i in range(matrix.shape[0])
    ]


def exact_det(a: np.ndarray):
    """Determinant over the exact field of the entries."""
    n = a.shape[0]
    field = exact_field(a.ravel())
    rows = [[field.convert(a[i, j]) for j in range(n)] for i in range(n)]
    return field.revert(DomainMatrix(rows, (n, n), field.domain).det())


def sparse_row(vector: Iterable) -> SparseRow:
    return {i: v for i, v in enumerate(vector) if not is_zero(v)}


def dense_row(row: SparseRow, size: int) -> np.ndarray:
    out = exact_zeros(size)
    for i, v in row.items():
        out[i] = v
    return out


def _nonzero_rows(rows: Iterable[SparseRow]) -> list[SparseRow]:
    cleaned = ({j: v for j, v in row.items() if not is_zero(v)} for row in rows)
    return [row for row in cleaned if row]


class EchelonForm:
    """Reduced row echelon basis of a span of exact sparse vectors."""

    def __init__(self, rows: Iterable[SparseRow], size: int) -> None:
        self.size = size
        rows = _nonzero_rows(rows)
        self.field = exact_field(v for row in rows for v in row.values())
        self.pivots: list[int] = []
        self.rows: list[SparseRow] = []
        self._matrices: dict[ExactField, DomainMatrix] = {}
        if rows:
            reduced, pivots = to_domain_matrix(rows, size, self.field).rref()
            self.pivots = list(pivots)
            matrix = reduced.to_sparse().extract(
                list(range(len(self.pivots))), list(range(size))
            )
            self.rows = from_domain_matrix(matrix, self.field)
            self._matrices[self.field] = matrix

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _matrix_in(self, field: ExactField) -> DomainMatrix:
        if field not in self._matrices:
            self._matrices[field] = to_domain_matrix(self.rows, self.size, field)
        return self._matrices[field]

    def reduce(self, vector: SparseRow) -> SparseRow:
        """Remainder of ``vector`` after clearing the pivot columns.

        Empty exactly when ``vector`` lies in the row space.
        """
        vector = {j: v for j, v in vector.items() if not is_zero(v)}
        if not vector or not self.pivots:
            return vector
        field = self.field.join(exact_field(vector.values()))
        v = to_domain_matrix([vector], self.size, field)
        coefficients = v.extract([0], self.pivots)
        rest = v - coefficients.matmul(self._matrix_in(field))
        return from_domain_matrix(rest, field)[0]


def exact_null_space(rows: Sequence[SparseRow], size: int) -> list[SparseRow]:
    """Basis of {x : row . x = 0 for every row}."""
    rows = _nonzero_rows(rows)
    if not rows:
        return [{i: Fraction(1)} for i in range(size)]
    field = exact_field(v for row in rows for v in row.values())
    kernel = to_domain_matrix(rows, size, field).nullspace()
    return [row for row in from_domain_matrix(kernel, field) if row]


def exact_rank(rows: Sequence[SparseRow], size: int) -> int:
    rows = _nonzero_rows(rows)
    return to_domain_matrix(rows, size).rank() if rows else 0


def float_null_space(matrix: np.ndarray, rtol: Optional[float] = None) -> np.ndarray:
    """Orthonormal null space, returned as rows."""
    if matrix.size == 0:
        return np.eye(matrix.shape[1])
    return scipy.linalg.null_space(matrix, rcond=rtol).T


def float_orth(rows: np.ndarray, rtol: Optional[float] = None) -> np.ndarray:
    """Orthonormal basis of a row span, returned as rows."""
    if rows.size == 0:
        return np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0))
    return scipy.linalg.orth(rows.T, rcond=rtol).T


def numerical_rank(matrix: np.ndarray, rtol: float) -> tuple[int, np.ndarray]:
    """Rank with singular values below ``rtol * max`` treated as zero."""
    if matrix.size == 0:
        return 0, np.zeros(0)
    values = scipy.linalg.svdvals(matrix)
    if values.size == 0 or values[0] == 0:
        return 0, values
    return int(np.sum(values > rtol * values[0])), values


def exact_vectors_equal(u: Iterable, v: Iterable) -> bool:
    return all(is_zero(x - y) for x, y in zip(u, v))


def any_exact(values: Iterable) -> bool:
    return any(is_exact(v) for v in values)
