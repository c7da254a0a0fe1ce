"""Matrix realizations of u(n) and su(n), twist matrices and subspace algebra."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
import scipy.linalg
from loguru import logger

from .enums import Algebra, BlockVariant, Mode
from .exceptions import DimensionMismatchError, RangeError, RingMismatchError
from .linalg import (
    EchelonForm,
    SparseRow,
    dagger,
    dense_row,
    exact_det,
    exact_identity,
    exact_null_space,
    exact_zeros,
    float_null_space,
    float_orth,
    from_domain_matrix,
    is_exact_array,
    matmul,
    sparse_row,
    to_domain_matrix,
    to_float_array,
)
from .scalar import (
    I,
    ONE,
    ComplexScalar,
    TowerScalar,
    get_tower,
    is_exact,
    is_zero,
    parse_rational,
    scalar_to_json,
)

Label = tuple


class BasisIndex:
    """Ordered basis of su(n) or u(n).

    Order: every X+_ij (i < j, lexicographic), then every X-_ij, then
    H_1 .. H_{n-1}, then the central element iI for u(n). Labels are
    1-based like the matrix units they are built from.
    """

    def __init__(self, n: int, algebra: Algebra = Algebra.SU) -> None:
        if n < 1:
            raise RangeError(f"n must be positive, got {n}")
        self.n = n
        self.algebra = algebra
        self.pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        labels: list[Label] = [("X+", i, j) for i, j in self.pairs]
        labels += [("X-", i, j) for i, j in self.pairs]
        labels += [("H", l) for l in range(1, n)]
        if algebra is Algebra.U:
            labels.append(("Z",))
        self.labels = labels
        self._position = {label: idx for idx, label in enumerate(labels)}

    @property
    def dim(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BasisIndex)
            and self.n == other.n
            and self.algebra is other.algebra
        )

    def __hash__(self) -> int:
        return hash((self.n, self.algebra))

    def __repr__(self) -> str:
        return f"BasisIndex(n={self.n}, algebra={self.algebra.value})"

    def position(self, label: Label) -> int:
        try:
            return self._position[label]
        except KeyError as exc:
            raise RangeError(f"{label} is not a basis label of {self!r}") from exc

    def plus(self, i: int, j: int) -> int:
        return self.position(("X+", min(i, j), max(i, j)))

    def minus(self, i: int, j: int) -> int:
        if i > j:
            raise RangeError(f"X-_{i}{j} is not a basis element; use -X-_{j}{i}")
        return self.position(("X-", i, j))

    def cartan(self, l: int) -> int:
        return self.position(("H", l))

    def center(self) -> int:
        return self.position(("Z",))

    def label_text(self, idx: int) -> str:
        label = self.labels[idx]
        return label[0] + "".join(f"_{x}" for x in label[1:])

    def unit(self, idx: int, mode: Mode = Mode.EXACT) -> np.ndarray:
        """Coordinate vector of the basis element at ``idx``."""
        if mode is Mode.EXACT:
            out = exact_zeros(self.dim)
            out[idx] = Fraction(1)
            return out
        out = np.zeros(self.dim)
        out[idx] = 1.0
        return out

    def matrix(self, idx: int, mode: Mode = Mode.EXACT) -> np.ndarray:
        """n x n matrix of the basis element at ``idx``."""
        n = self.n
        m = exact_zeros((n, n), complex_entries=True)
        label = self.labels[idx]
        if label[0] == "X+":
            _, i, j = label
            m[i - 1, j - 1] = I
            m[j - 1, i - 1] = I
        elif label[0] == "X-":
            _, i, j = label
            m[i - 1, j - 1] = ONE
            m[j - 1, i - 1] = -ONE
        elif label[0] == "H":
            l = label[1]
            m[l - 1, l - 1] = I
            m[n - 1, n - 1] = -I
        else:
            for k in range(n):
                m[k, k] = I
        return m if mode is Mode.EXACT else to_float_array(m)

    def element(self, idx: int, mode: Mode = Mode.EXACT) -> LieElement:
        return LieElement(self.matrix(idx, mode))

    def coordinates(self, x: Union[LieElement, np.ndarray]) -> np.ndarray:
        """Coordinates of an anti-Hermitian matrix in this basis.

        X+_ij carries Im M_ij and X-_ij carries Re M_ij. The diagonal
        M_kk = i t_k is solved against the Cartan generators: with
        z = (t_1 + ... + t_n) / n the central part, H_l carries t_l - z.
        """
        m = x.entries if isinstance(x, LieElement) else x
        if m.shape != (self.n, self.n):
            raise DimensionMismatchError(f"Expected {self.n}x{self.n}, got {m.shape}")
        exact = is_exact_array(m)
        out = exact_zeros(self.dim) if exact else np.zeros(self.dim)
        for i, j in self.pairs:
            z = m[i - 1, j - 1]
            out[self.plus(i, j)] = z.imag
            out[self.minus(i, j)] = z.real
        diag = [m[k, k].imag for k in range(self.n)]
        total = sum(diag[1:], diag[0])
        center = total / self.n
        for l in range(1, self.n):
            out[self.cartan(l)] = diag[l - 1] - center
        if self.algebra is Algebra.U:
            out[self.center()] = center
        return out

    def from_coordinates(self, coords: Sequence) -> LieElement:
        if isinstance(coords, np.ndarray):
            exact = is_exact_array(coords)
        else:
            exact = all(is_exact(v) for v in coords)
        mode = Mode.EXACT if exact else Mode.FLOAT
        n = self.n
        total = exact_zeros((n, n), True) if exact else np.zeros((n, n), dtype=complex)
        for idx, value in enumerate(coords):
            if is_zero(value):
                continue
            total = total + self.matrix(idx, mode) * value
        return LieElement(total)


@lru_cache(maxsize=None)
def basis_index(n: int, algebra: Algebra = Algebra.SU) -> BasisIndex:
    """Shared BasisIndex for (n, algebra)."""
    return BasisIndex(n, algebra)


class LieElement:
    """An n x n anti-Hermitian matrix, exact (object array) or complex128."""

    __slots__ = ("n", "entries")

    def __init__(self, entries: np.ndarray) -> None:
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(
                f"Lie elements are square, got {entries.shape}"
            )
        self.n = entries.shape[0]
        self.entries = entries

    @property
    def exact(self) -> bool:
        return is_exact_array(self.entries)

    def _check(self, other: LieElement) -> None:
        if self.n != other.n:
            raise DimensionMismatchError(f"n differs: {self.n} and {other.n}")

    def __add__(self, other: LieElement) -> LieElement:
        self._check(other)
        return LieElement(self.entries + other.entries)

    def __sub__(self, other: LieElement) -> LieElement:
        self._check(other)
        return LieElement(self.entries - other.entries)

    def __neg__(self) -> LieElement:
        return LieElement(-self.entries)

    def __mul__(self, scalar) -> LieElement:
        return LieElement(self.entries * scalar)

    __rmul__ = __mul__

    def trace(self):
        return sum(self.entries[k, k] for k in range(1, self.n)) + self.entries[0, 0]

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(is_zero(x, tol) for x in self.entries.ravel())

    def is_anti_hermitian(self, tol: float = 1e-12) -> bool:
        gap = self.entries + dagger(self.entries)
        return all(is_zero(x, tol) for x in gap.ravel())

    def to_float(self) -> LieElement:
        return LieElement(to_float_array(self.entries))

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        return f"LieElement(n={self.n}, {kind})"


class GroupElement:
    """A unitary n x n matrix; ``special`` marks elements of SU(n)."""

    __slots__ = ("n", "entries", "special")

    def __init__(self, entries: np.ndarray, special: bool = True) -> None:
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(
                f"Group elements are square, got {entries.shape}"
            )
        self.n = entries.shape[0]
        self.entries = entries
        self.special = special

    @classmethod
    def identity(cls, n: int, mode: Mode = Mode.EXACT) -> GroupElement:
        if mode is Mode.EXACT:
            return cls(exact_identity(n))
        return cls(np.eye(n, dtype=complex))

    @property
    def exact(self) -> bool:
        return is_exact_array(self.entries)

    def inverse(self) -> GroupElement:
        return GroupElement(dagger(self.entries), self.special)

    def __matmul__(self, other: GroupElement) -> GroupElement:
        if self.n != other.n:
            raise DimensionMismatchError(f"n differs: {self.n} and {other.n}")
        return GroupElement(
            matmul(self.entries, other.entries), self.special and other.special
        )

    def __pow__(self, exponent: int) -> GroupElement:
        base = self if exponent >= 0 else self.inverse()
        result = GroupElement.identity(self.n, Mode.EXACT if self.exact else Mode.FLOAT)
        for _ in range(abs(exponent)):
            result = result @ base
        return result

    def to_float(self) -> GroupElement:
        return GroupElement(to_float_array(self.entries), self.special)

    def determinant(self):
        if self.exact:
            return exact_det(self.entries)
        return complex(np.linalg.det(self.entries))

    def unitarity_residual(self) -> float:
        """Largest entry of |g g* - 1|; exactly 0.0 for exact unitary matrices."""
        product = matmul(self.entries, dagger(self.entries))
        if self.exact:
            gap = product - exact_identity(self.n)
            return max(abs(complex(x)) for x in gap.ravel())
        return float(np.max(np.abs(product - np.eye(self.n))))

    def to_json(self) -> dict:
        tag = "float"
        if self.exact:
            tag = "tower" if any(
                isinstance(x.re, TowerScalar) or isinstance(x.im, TowerScalar)
                for x in self.entries.ravel()
            ) else "rational"
        return {
            "ring": tag,
            "entries": [[scalar_to_json(x) for x in row] for row in self.entries],
        }

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        return f"GroupElement(n={self.n}, {kind})"


def bracket(x: LieElement, y: LieElement) -> LieElement:
    """Matrix commutator xy - yx."""
    if x.n != y.n:
        raise DimensionMismatchError(f"n differs: {x.n} and {y.n}")
    return LieElement(matmul(x.entries, y.entries) - matmul(y.entries, x.entries))


def adjoint(g: GroupElement, x: LieElement) -> LieElement:
    """Ad_g(x) = g x g^-1."""
    if g.n != x.n:
        raise DimensionMismatchError(f"n differs: {g.n} and {x.n}")
    return LieElement(matmul(matmul(g.entries, x.entries), dagger(g.entries)))


def adjoint_inverse(g: GroupElement, x: LieElement) -> LieElement:
    """Ad_{g^-1}(x) = g^-1 x g."""
    return adjoint(g.inverse(), x)


def adjoint_matrix(g: GroupElement, basis: BasisIndex) -> np.ndarray:
    """Matrix of Ad_g in ``basis`` coordinates (column j holds Ad_g b_j)."""
    if g.n != basis.n:
        raise DimensionMismatchError(f"n differs: {g.n} and {basis.n}")
    mode = Mode.EXACT if g.exact else Mode.FLOAT
    columns = [
        basis.coordinates(adjoint(g, basis.element(j, mode))) for j in range(basis.dim)
    ]
    return np.array(columns, dtype=object if g.exact else float).T.copy()


def ad_matrix(x: Union[LieElement, np.ndarray], basis: BasisIndex) -> np.ndarray:
    """Matrix of ad_x in ``basis`` coordinates; ``x`` may be given by coordinates."""
    if isinstance(x, np.ndarray) and x.ndim == 1:
        exact = is_exact_array(x)
        constants = structure_constants(basis.n, basis.algebra)
        n_dim = basis.dim
        if exact:
            out = exact_zeros((n_dim, n_dim))
            for i, xi in enumerate(x):
                if is_zero(xi):
                    continue
                for j in range(n_dim):
                    for k, v in constants.sparse(i, j).items():
                        out[k, j] = out[k, j] + xi * v
            return out
        return np.einsum("i,ijk->kj", x, constants.dense)
    mode = Mode.EXACT if x.exact else Mode.FLOAT
    columns = [
        basis.coordinates(bracket(x, basis.element(j, mode))) for j in range(basis.dim)
    ]
    return np.array(columns, dtype=object if x.exact else float).T.copy()


class StructureConstants:
    """Coordinates of [b_i, b_j] for a fixed basis, sparse and dense."""

    def __init__(self, basis: BasisIndex) -> None:
        self.basis = basis
        n_dim = basis.dim
        self._sparse: dict[tuple[int, int], SparseRow] = {}
        self.dense = np.zeros((n_dim, n_dim, n_dim))
        elements = [basis.element(i) for i in range(n_dim)]
        for i in range(n_dim):
            for j in range(i + 1, n_dim):
                row = sparse_row(basis.coordinates(bracket(elements[i], elements[j])))
                self._sparse[(i, j)] = row
                self._sparse[(j, i)] = {k: -v for k, v in row.items()}
                for k, v in row.items():
                    self.dense[i, j, k] = float(v)
                    self.dense[j, i, k] = -float(v)

    def sparse(self, i: int, j: int) -> SparseRow:
        return self._sparse.get((i, j), {})


@lru_cache(maxsize=None)
def structure_constants(n: int, algebra: Algebra = Algebra.SU) -> StructureConstants:
    logger.debug("Computing structure constants of {}({})", algebra.value, n)
    return StructureConstants(basis_index(n, algebra))


def bracket_coordinates(u: np.ndarray, v: np.ndarray, basis: BasisIndex) -> np.ndarray:
    """[u, v] computed directly on coordinate vectors."""
    constants = structure_constants(basis.n, basis.algebra)
    if is_exact_array(u) and is_exact_array(v):
        out = exact_zeros(basis.dim)
        for i, ui in enumerate(u):
            if is_zero(ui):
                continue
            for j, vj in enumerate(v):
                if is_zero(vj) or i == j:
                    continue
                coeff = ui * vj
                for k, c in constants.sparse(i, j).items():
                    out[k] = out[k] + coeff * c
        return out
    u, v = to_float_array(u), to_float_array(v)
    return np.einsum("i,j,ijk->k", u, v, constants.dense)


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    """Exact matrix unit e_ij (1-based)."""
    m = exact_zeros((n, n), complex_entries=True)
    m[i - 1, j - 1] = ONE
    return m


def x_plus(n: int, a: int, b: int) -> LieElement:
    """X+_ab = i(e_ab + e_ba) for any a != b; symmetric in a and b."""
    return LieElement((matrix_unit(n, a, b) + matrix_unit(n, b, a)) * I)


def x_minus(n: int, a: int, b: int) -> LieElement:
    """X-_ab = e_ab - e_ba for any a != b; X-_ba = -X-_ab."""
    return LieElement(matrix_unit(n, a, b) - matrix_unit(n, b, a))


def k_generator(n: int, i: int) -> LieElement:
    """K_i = i(e_ii - e_{n+1-i,n+1-i})."""
    return LieElement((matrix_unit(n, i, i) - matrix_unit(n, n + 1 - i, n + 1 - i)) * I)


def antidiagonal(n: int) -> GroupElement:
    """The anti-diagonal permutation matrix J with J_{i, n+1-i} = 1."""
    m = exact_zeros((n, n), complex_entries=True)
    for i in range(n):
        m[i, n - 1 - i] = ONE
    return GroupElement(m, special=False)


def build_sigma(c, m: int, n: int, sign_variant: bool = False) -> GroupElement:
    """The twist matrix sigma(c, m) over the tower of c.

    sqrt(c) on the first and last m diagonal entries, 1 in the middle block,
    and sqrt(1-c) (e_{n+1-i,i} - e_{i,n+1-i}) for i <= m. ``sign_variant``
    flips the sign of both off-diagonal blocks, which gives the inverse.

    Raises:
        RangeError: If m is outside 1..n//2 or c is outside [0, 1]
    """
    c = parse_rational(c)
    if not 0 <= c <= 1:
        raise RangeError(f"c must lie in [0, 1], got {c}")
    if not 1 <= m <= n // 2:
        raise RangeError(f"m must satisfy 1 <= m <= {n // 2}, got {m}")
    tower = get_tower(c)
    root_c = ComplexScalar(TowerScalar.sqrt_c(tower), 0)
    root_rest = ComplexScalar(TowerScalar.sqrt_complement(tower), 0)
    sign = -1 if sign_variant else 1
    out = exact_identity(n)
    for i in range(1, m + 1):
        k = n + 1 - i
        out[i - 1, i - 1] = root_c
        out[k - 1, k - 1] = root_c
        out[k - 1, i - 1] = root_rest * sign
        out[i - 1, k - 1] = -root_rest * sign
    return GroupElement(out)


def projective_twist(c, n: int) -> GroupElement:
    """Twist whose last column is (sqrt(c), 0, ..., 0, sqrt(1-c)).

    This is the sign variant of sigma(1 - c, 1); it realizes the projection
    [A] -> [sqrt(c) A^(1) + sqrt(1-c) A^(n)] as ``project(A sigma, 1)``.
    """
    c = parse_rational(c)
    return build_sigma(1 - c, 1, n, sign_variant=True)


class Subspace:
    """Span of coordinate vectors with exact or numerical membership.

    Exact subspaces keep a reduced row echelon basis of real exact scalars;
    float subspaces keep an orthonormal basis and compare residuals against
    a relative tolerance.
    """

    def __init__(
        self,
        ambient: int,
        vectors: Iterable = (),
        mode: Mode = Mode.EXACT,
        tol: float = 1e-9,
    ) -> None:
        self.ambient = ambient
        self.mode = mode
        self.tol = tol
        vectors = list(vectors)
        for v in vectors:
            if not isinstance(v, dict) and len(v) != ambient:
                raise DimensionMismatchError(
                    f"Vector of length {len(v)} in a {ambient}-dimensional space"
                )
        if mode is Mode.EXACT:
            self._echelon = EchelonForm(
                (v if isinstance(v, dict) else sparse_row(v) for v in vectors), ambient
            )
            self._pivots = self._echelon.pivots
            self._rows = self._echelon.rows
        else:
            rows = np.array(
                [to_float_array(np.asarray(v)) for v in vectors], dtype=float
            ).reshape(len(vectors), ambient)
            if len(vectors):
                self._basis = float_orth(rows, tol)
            else:
                self._basis = np.zeros((0, ambient))

    @property
    def exact(self) -> bool:
        return self.mode is Mode.EXACT

    @property
    def dim(self) -> int:
        return len(self._rows) if self.exact else self._basis.shape[0]

    def _check(self, other: Subspace) -> None:
        if self.ambient != other.ambient:
            raise DimensionMismatchError(
                f"Ambient dimensions differ: {self.ambient} and {other.ambient}"
            )
        if self.mode is not other.mode:
            raise RingMismatchError("Cannot combine exact and float subspaces")

    def basis(self) -> list[np.ndarray]:
        if self.exact:
            return [dense_row(row, self.ambient) for row in self._rows]
        return [row for row in self._basis]

    def sparse_basis(self) -> list[SparseRow]:
        if not self.exact:
            raise RingMismatchError("Sparse rows exist only for exact subspaces")
        return [dict(row) for row in self._rows]

    def basis_matrix(self) -> np.ndarray:
        if self.exact:
            if not self._rows:
                return exact_zeros((0, self.ambient))
            return np.array(self.basis(), dtype=object)
        return self._basis.copy()

    @property
    def pivots(self) -> list[int]:
        return list(self._pivots)

    def residual(self, vector) -> float:
        """Distance of ``vector`` from the span (relative in float mode)."""
        if self.exact:
            row = vector if isinstance(vector, dict) else sparse_row(vector)
            rest = self._echelon.reduce(row)
            return max((abs(float(v)) for v in rest.values()), default=0.0)
        v = to_float_array(np.asarray(vector))
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            return 0.0
        projected = self._basis.T @ (self._basis @ v) if self.dim else np.zeros_like(v)
        return float(np.linalg.norm(v - projected)) / norm

    def contains(self, vector) -> bool:
        if self.exact:
            row = vector if isinstance(vector, dict) else sparse_row(vector)
            return not self._echelon.reduce(row)
        return self.residual(vector) <= self.tol

    def annihilator(self) -> Subspace:
        """Covectors vanishing on the span, in the dual-basis pairing."""
        if self.exact:
            vectors = exact_null_space(self._rows, self.ambient)
        else:
            vectors = list(float_null_space(self._basis, self.tol))
        return Subspace(self.ambient, vectors, self.mode, self.tol)

    def intersection(self, other: Subspace) -> Subspace:
        """self ∩ other, as the part of self annihilated by other's annihilator."""
        self._check(other)
        ann = other.annihilator()
        if ann.dim == 0:
            return Subspace(self.ambient, self.basis(), self.mode, self.tol)
        if self.exact:
            if self.dim == 0:
                return Subspace(self.ambient, [], self.mode, self.tol)
            field = self._echelon.field.join(ann._echelon.field)
            mine = to_domain_matrix(self._rows, self.ambient, field)
            theirs = to_domain_matrix(ann._rows, self.ambient, field)
            system = theirs.matmul(mine.transpose())
            kernel = system.nullspace()
            if kernel.shape[0] == 0:
                return Subspace(self.ambient, [], self.mode, self.tol)
            vectors = from_domain_matrix(kernel.to_sparse().matmul(mine), field)
            return Subspace(self.ambient, vectors, self.mode, self.tol)
        if self.dim == 0:
            return Subspace(self.ambient, [], self.mode, self.tol)
        system = ann._basis @ self._basis.T
        vectors = list(float_null_space(system, self.tol) @ self._basis)
        return Subspace(self.ambient, vectors, self.mode, self.tol)

    def sum(self, other: Subspace) -> Subspace:
        self._check(other)
        return Subspace(self.ambient, self.basis() + other.basis(), self.mode, self.tol)

    def is_subspace_of(self, other: Subspace) -> bool:
        self._check(other)
        return all(other.contains(v) for v in self.basis())

    def same_as(self, other: Subspace) -> bool:
        """Equality of spans; exact spaces compare reduced echelon forms."""
        self._check(other)
        if self.dim != other.dim:
            return False
        if self.exact:
            if self._pivots != other._pivots:
                return False
            return all(
                set(a) == set(b) and all(is_zero(a[k] - b[k]) for k in a)
                for a, b in zip(self._rows, other._rows)
            )
        return self.is_subspace_of(other)

    def image(self, matrix: np.ndarray) -> Subspace:
        """Image of the span under a linear map given by its matrix."""
        vectors = [matmul(matrix, v.reshape(-1, 1)).ravel() for v in self.basis()]
        return Subspace(matrix.shape[0], vectors, self.mode, self.tol)

    def map_scalars(self, fn: Callable) -> Subspace:
        if not self.exact:
            raise RingMismatchError("Scalar maps apply to exact subspaces only")
        rows = [{k: fn(v) for k, v in row.items()} for row in self._rows]
        return Subspace(self.ambient, rows, self.mode, self.tol)

    def to_float(self, tol: Optional[float] = None) -> Subspace:
        if not self.exact:
            return self
        return Subspace(
            self.ambient,
            [to_float_array(v) for v in self.basis()],
            Mode.FLOAT,
            self.tol if tol is None else tol,
        )

    def to_json(self) -> dict:
        if self.exact:
            return {
                "ring": "exact",
                "pivots": self._pivots,
                "rows": [
                    [[k, scalar_to_json(v)] for k, v in sorted(row.items())]
                    for row in self._rows
                ],
            }
        return {"ring": "float", "rows": self._basis.tolist()}

    def __repr__(self) -> str:
        return (
            f"Subspace(dim={self.dim}, ambient={self.ambient}, mode={self.mode.value})"
        )


def subspace_intersection(a: Subspace, b: Subspace) -> Subspace:
    """Basis of a ∩ b; dim(a ∩ b) = dim a + dim b - dim(a + b)."""
    return a.intersection(b)


def is_subalgebra(h: Subspace, basis: BasisIndex) -> bool:
    """True when the span is closed under the bracket."""
    vectors = h.basis()
    for i, u in enumerate(vectors):
        for v in vectors[i + 1 :]:
            if not h.contains(bracket_coordinates(u, v, basis)):
                return False
    return True


def block_subspace(
    n: int, sizes: Sequence[int], algebra: Algebra, mode: Mode = Mode.EXACT
) -> Subspace:
    """Block-diagonal subalgebra for consecutive diagonal blocks of ``sizes``."""
    if sum(sizes) != n or any(s < 1 for s in sizes):
        raise RangeError(f"Block sizes {list(sizes)} do not partition {n}")
    basis = basis_index(n, algebra)
    block_of = []
    for block, size in enumerate(sizes):
        block_of += [block] * size
    labels = [
        label
        for label in basis.labels
        if label[0] in ("H", "Z") or block_of[label[1] - 1] == block_of[label[2] - 1]
    ]
    return Subspace(
        basis.dim, [basis.unit(basis.position(label), mode) for label in labels], mode
    )


def build_block_subalgebra(
    n: int, l: int, variant: BlockVariant, mode: Mode = Mode.EXACT
) -> Subspace:
    """s(u(l) x u(n-l)), u(l) x u(n-l) or the diagonal torus, as a Subspace.

    The su-block and torus variants live in su(n) coordinates, the u-block
    variant in u(n) coordinates.

    Raises:
        RangeError: If l is outside 1..n-1
    """
    if not 1 <= l <= n - 1:
        raise RangeError(f"l must satisfy 1 <= l <= {n - 1}, got {l}")
    if variant is BlockVariant.TORUS:
        return block_subspace(n, [1] * n, Algebra.SU, mode)
    algebra = Algebra.U if variant is BlockVariant.U_BLOCK else Algebra.SU
    return block_subspace(n, [l, n - l], algebra, mode)


def conjugate_subspace(g: GroupElement, h: Subspace, basis: BasisIndex) -> Subspace:
    """Ad_g(h)."""
    matrix = adjoint_matrix(g, basis)
    if not h.exact and g.exact:
        matrix = to_float_array(matrix)
    if h.exact and not g.exact:
        raise RingMismatchError("Conjugating an exact subspace by a float element")
    return h.image(matrix)


def child_seeds(seed: int, count: int) -> list[int]:
    """Independent integer seeds derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1)[0]) for child in children]


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary from the QR factorization of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = scipy.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def sample_group_element(n: int, seed: int, special: bool = True) -> GroupElement:
    """Seeded Haar-random unitary; normalized to determinant 1 when ``special``."""
    q = haar_unitary(n, np.random.default_rng(seed))
    if special:
        det = np.linalg.det(q)
        q = q * np.exp(-1j * np.angle(det) / n)
    return GroupElement(q, special)


def sample_block_group_element(
    sizes: Sequence[int], seed: int, special: bool = True
) -> GroupElement:
    """Block-diagonal unitary with independent Haar blocks."""
    rng = np.random.default_rng(seed)
    n = sum(sizes)
    out = np.zeros((n, n), dtype=complex)
    start = 0
    for size in sizes:
        out[start : start + size, start : start + size] = haar_unitary(size, rng)
        start += size
    if special:
        det = np.linalg.det(out)
        out[: sizes[0], : sizes[0]] *= np.exp(-1j * np.angle(det) / sizes[0])
    return GroupElement(out, special)


def sample_algebra_element(
    h: Subspace, basis: BasisIndex, rng: np.random.Generator, max_norm: float = 2.0
) -> LieElement:
    """Random element of ``h`` with Frobenius norm uniform in (0, max_norm]."""
    vectors = h.to_float().basis()
    if not vectors:
        return LieElement(np.zeros((basis.n, basis.n), dtype=complex))
    coeffs = rng.standard_normal(len(vectors))
    x = basis.from_coordinates(sum(c * v for c, v in zip(coeffs, vectors)))
    norm = np.linalg.norm(x.entries)
    if norm == 0:
        return x
    return x * (max_norm * rng.uniform(0.05, 1.0) / norm)


def exp_element(x: LieElement) -> GroupElement:
    """exp(x) in float arithmetic."""
    return GroupElement(scipy.linalg.expm(to_float_array(x.entries)))


def sample_subgroup_element(h: Subspace, basis: BasisIndex, seed: int) -> GroupElement:
    """exp of a random element of ``h`` (Frobenius norm at most 2)."""
    return exp_element(sample_algebra_element(h, basis, np.random.default_rng(seed)))
