"""Grassmannian quotients of SU(n): projected bivectors, leaves and Schubert cells.

A point of G_k^n is stored as the orthogonal projector P onto a k-plane.
The quotient maps send g to the span of the last k columns of g (or of g σ
for the twisted quotient), so P = g Q g* with Q the projector onto the
last k coordinates. Tangent vectors at P are read in the real coordinates
(Re vec P, Im vec P) with row-major vec.
"""

from __future__ import annotations

import csv
import hashlib
from functools import lru_cache
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

import networkx as nx
import numpy as np
import scipy.linalg
from loguru import logger
from pydantic import BaseModel, ConfigDict, model_validator

from .enums import Algebra, BlockVariant, Mode
from .exceptions import DimensionMismatchError, PreconditionError, RangeError
from .lie import (
    BasisIndex,
    GroupElement,
    Subspace,
    antidiagonal,
    basis_index,
    build_block_subalgebra,
    build_sigma,
    child_seeds,
    conjugate_subspace,
    matrix_unit,
    projective_twist,
    sample_block_group_element,
    sample_group_element,
)
from .linalg import numerical_rank, to_float_array
from .poisson import GROUP_TOLERANCE, BivectorField, check_covariance
from .reports import CheckReport, start_clock
from .scalar import ComplexScalar, I, get_tower, parse_rational, retower_scalar

RANK_TOLERANCE = 1e-7
RANK_FLOOR = 1e-12
POINT_TOLERANCE = 1e-10


class GrassPoint:
    """A k-plane in C^n held as its Hermitian idempotent projector."""

    __slots__ = ("n", "k", "matrix")

    def __init__(self, matrix: np.ndarray, k: int) -> None:
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"Projectors are square, got {matrix.shape}")
        self.n = matrix.shape[0]
        if not 0 <= k <= self.n:
            raise RangeError(f"k must satisfy 0 <= k <= {self.n}, got {k}")
        self.k = k
        self.matrix = np.asarray(matrix, dtype=complex)

    def residuals(self) -> dict[str, float]:
        p = self.matrix
        return {
            "hermitian": float(np.max(np.abs(p - p.conj().T))),
            "idempotent": float(np.max(np.abs(p @ p - p))),
            "trace": abs(complex(np.trace(p)) - self.k),
        }

    def is_valid(self, tol: float = POINT_TOLERANCE) -> bool:
        return max(self.residuals().values()) <= tol

    def frame(self) -> np.ndarray:
        """Orthonormal n x k matrix whose columns span the plane."""
        _, vectors = np.linalg.eigh(self.matrix)
        return vectors[:, self.n - self.k :]

    def vector(self) -> np.ndarray:
        return realify(self.matrix)

    def point_hash(self) -> str:
        rounded = np.round(self.vector(), 8) + 0.0
        return hashlib.sha256(rounded.tobytes()).hexdigest()[:12]

    def __repr__(self) -> str:
        return f"GrassPoint(n={self.n}, k={self.k})"


def realify(m: np.ndarray) -> np.ndarray:
    """(Re vec M, Im vec M) for a complex matrix, row-major."""
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


def realify_operator(op: np.ndarray) -> np.ndarray:
    """The real 2d x 2d matrix of a complex-linear map of C^d."""
    return np.block([[op.real, -op.imag], [op.imag, op.real]])


def last_block_projector(n: int, k: int) -> np.ndarray:
    if not 1 <= k <= n - 1:
        raise RangeError(f"k must satisfy 1 <= k <= {n - 1}, got {k}")
    q = np.zeros((n, n), dtype=complex)
    q[n - k :, n - k :] = np.eye(k)
    return q


def _entries(g: GroupElement) -> np.ndarray:
    return to_float_array(g.entries).astype(complex)


def project(g: GroupElement, k: int) -> GrassPoint:
    """The span of the last k columns of g, as g Q g*."""
    a = _entries(g)
    return GrassPoint(a @ last_block_projector(g.n, k) @ a.conj().T, k)


def project_twisted(g: GroupElement, k: int, sigma: GroupElement) -> GrassPoint:
    """project(g σ, k)."""
    return project(g @ sigma, k)


@lru_cache(maxsize=None)
def _basis_stack(basis: BasisIndex) -> np.ndarray:
    matrices = [basis.matrix(j, Mode.FLOAT) for j in range(basis.dim)]
    return np.array(matrices, dtype=complex)


def orbit_matrix(a: np.ndarray, base: np.ndarray, basis: BasisIndex) -> np.ndarray:
    """2n² x N matrix whose column j is realify(a (b_j B - B b_j) a*)."""
    mats = _basis_stack(basis)
    moved = a @ (mats @ base - base @ mats) @ a.conj().T
    size = basis.dim
    return np.concatenate(
        [moved.real.reshape(size, -1), moved.imag.reshape(size, -1)], axis=1
    ).T


class GrassmannAction:
    """Left action of SU(n) on G_k^n through g ↦ g B g*, B = σ Q σ*.

    With σ = e this is the standard quotient by the stabilizer of the last k
    coordinates; otherwise the quotient by its σ-conjugate.
    """

    def __init__(
        self,
        n: int,
        k: int,
        sigma: Optional[GroupElement] = None,
        algebra: Algebra = Algebra.SU,
    ) -> None:
        self.n = n
        self.k = k
        self.basis = basis_index(n, algebra)
        base = last_block_projector(n, k)
        if sigma is not None:
            s = _entries(sigma)
            base = s @ base @ s.conj().T
        self.sigma = sigma
        self.base = base

    def point(self, g: GroupElement) -> np.ndarray:
        a = _entries(g)
        return a @ self.base @ a.conj().T

    def grass_point(self, g: GroupElement) -> GrassPoint:
        return GrassPoint(self.point(g), self.k)

    def push_matrix(self, k: GroupElement) -> np.ndarray:
        a = _entries(k)
        return realify_operator(np.kron(a, a.conj()))

    def orbit_differential(self, k: GroupElement, point: np.ndarray) -> np.ndarray:
        return orbit_matrix(_entries(k), point, self.basis)

    def differential(self, g: GroupElement) -> np.ndarray:
        """Image of left-invariant directions at g in the point's coordinates."""
        return orbit_matrix(_entries(g), self.base, self.basis)

    def tau(self, f: BivectorField) -> Callable[[GroupElement], np.ndarray]:
        """The pushed-forward bivector x = [g] ↦ D_g f̃(g) D_gᵀ."""

        def pushed(g: GroupElement) -> np.ndarray:
            w = to_float_array(f.at(g.to_float()).matrix)
            d = self.differential(g)
            return d @ w @ d.T

        return pushed


def projected_bivector(
    g: GroupElement, f: BivectorField, k: int, sigma: Optional[GroupElement] = None
) -> np.ndarray:
    """Matrix of the pushed-forward bivector at the image of g.

    The quotient is the standard one for ``sigma`` None, otherwise the twisted
    quotient g ↦ [g σ].
    """
    return GrassmannAction(f.n, k, sigma, f.basis.algebra).tau(f)(g)


def bivector_rank(
    matrix: np.ndarray, rtol: float = RANK_TOLERANCE
) -> tuple[int, np.ndarray]:
    """Numerical rank; rank 0 when the largest singular value is below RANK_FLOOR."""
    rank, values = numerical_rank(matrix, rtol)
    if values.size and values[0] <= RANK_FLOOR:
        return 0, values
    return rank, values


def leaf_spectrum(
    g: GroupElement,
    f: BivectorField,
    k: int,
    sigma: Optional[GroupElement] = None,
    rtol: float = RANK_TOLERANCE,
) -> tuple[int, np.ndarray]:
    return bivector_rank(projected_bivector(g, f, k, sigma), rtol)


def leaf_rank(
    g: GroupElement,
    f: BivectorField,
    k: int,
    sigma: Optional[GroupElement] = None,
    rtol: float = RANK_TOLERANCE,
) -> int:
    """Dimension of the symplectic leaf through the image of g."""
    rank, values = leaf_spectrum(g, f, k, sigma, rtol)
    if rank and rank < len(values) and values[rank] > 1e-3 * rtol * values[0]:
        logger.warning(
            "Borderline rank {} at n={} k={}: gap {:.3e} / {:.3e}",
            rank, g.n, k, values[rank - 1], values[rank],
        )
    return rank


def leaf_residual(point: GrassPoint, k: int, c) -> float:
    """|Z_1|² + … + |Z_k|² - c/(1-c) (|Z_{k+1}|² + … + |Z_n|²) for a unit Z spanning P.

    Raises:
        PreconditionError: If c = 1 or the point is not a line
    """
    c = parse_rational(c)
    if c == 1:
        raise PreconditionError("The leaf equation is undefined at c = 1")
    if point.k != 1:
        raise PreconditionError(f"Leaf equations are stated for lines, got k={point.k}")
    if not 1 <= k <= point.n - 1:
        raise RangeError(f"k must satisfy 1 <= k <= {point.n - 1}, got {k}")
    z = point.frame()[:, 0]
    weights = np.abs(z) ** 2
    return float(np.sum(weights[:k]) - float(c / (1 - c)) * np.sum(weights[k:]))


def embed_sphere(v: Sequence[complex], c) -> GrassPoint:
    """[√(1-c), √c v_1, …, √c v_{n-1}] for a unit vector v.

    Raises:
        PreconditionError: If v is not a unit vector
        RangeError: If c is not strictly between 0 and 1
    """
    c = parse_rational(c)
    if not 0 < c < 1:
        raise RangeError(f"c must lie strictly between 0 and 1, got {c}")
    v = np.asarray(v, dtype=complex)
    if abs(np.linalg.norm(v) - 1.0) > POINT_TOLERANCE:
        raise PreconditionError(
            f"Expected a unit vector, got norm {np.linalg.norm(v):.6g}"
        )
    z = np.concatenate([[np.sqrt(float(1 - c))], np.sqrt(float(c)) * v])
    return GrassPoint(np.outer(z, z.conj()), 1)


class SchubertSymbol(BaseModel):
    """[a_1, …, a_k] with 0 ≤ a_1 ≤ … ≤ a_k ≤ n - k."""

    model_config = ConfigDict(frozen=True)

    n: int
    parts: tuple[int, ...]

    @model_validator(mode="after")
    def _check_range(self) -> SchubertSymbol:
        k = len(self.parts)
        if not 1 <= k <= self.n - 1:
            raise ValueError(f"A symbol of G_k^{self.n} needs 1 <= k <= {self.n - 1}")
        if any(a < 0 or a > self.n - k for a in self.parts):
            raise ValueError(
                f"Entries of {list(self.parts)} must lie in 0..{self.n - k}"
            )
        if any(a > b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError(f"{list(self.parts)} is not non-decreasing")
        return self

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def cell_dim(self) -> int:
        """Complex dimension of the open cell."""
        return sum(self.parts)

    def __str__(self) -> str:
        return "[" + ",".join(str(a) for a in self.parts) + "]"


def schubert_symbols(n: int, k: int) -> Iterator[SchubertSymbol]:
    for parts in combinations_with_replacement(range(n - k + 1), k):
        yield SchubertSymbol(n=n, parts=parts)


def intersection_dims(point: GrassPoint, tol: float = RANK_TOLERANCE) -> list[int]:
    """dim(X ∩ V_d) for d = 0..n, with V_d the span of the last d basis vectors."""
    frame = point.frame()
    out = []
    for d in range(point.n + 1):
        head = frame[: point.n - d]
        rank = int(np.sum(scipy.linalg.svdvals(head) > tol)) if head.size else 0
        out.append(point.k - rank)
    return out


def schubert_membership(
    point: GrassPoint, symbol: SchubertSymbol, rtol: float = RANK_TOLERANCE
) -> bool:
    """dim(X ∩ V_{a_i + i}) ≥ i for every i."""
    if (symbol.n, symbol.k) != (point.n, point.k):
        raise RangeError(
            f"{symbol} is a symbol of G_{symbol.k}^{symbol.n}, "
            f"not of G_{point.k}^{point.n}"
        )
    dims = intersection_dims(point, rtol)
    return all(dims[a + i] >= i for i, a in enumerate(symbol.parts, start=1))


def standard_image_symbol(l: int, k: int, n: int) -> SchubertSymbol:
    """The closed cell containing the image of K_l."""
    if not 1 <= l <= n - 1:
        raise RangeError(f"l must satisfy 1 <= l <= {n - 1}, got {l}")
    if not 1 <= k <= n - 1:
        raise RangeError(f"k must satisfy 1 <= k <= {n - 1}, got {k}")
    if l < k:
        parts = (0,) * l + (n - k,) * (k - l)
    elif l == k:
        parts = (0,) * k
    else:
        parts = (l - k,) * k
    return SchubertSymbol(n=n, parts=parts)


def standard_image_point(l: int, k: int, n: int, seed: int) -> GrassPoint:
    """project(g, k) for a random g in K_l.

    The U(l) block of K_l acts on the last l coordinates.
    """
    return project(sample_block_group_element((n - l, l), seed), k)


def bruhat_leq(s: SchubertSymbol, t: SchubertSymbol) -> bool:
    if (s.n, s.k) != (t.n, t.k):
        raise DimensionMismatchError(f"{s} and {t} belong to different Grassmannians")
    return all(a <= b for a, b in zip(s.parts, t.parts))


def bruhat_poset(n: int, k: int) -> nx.DiGraph:
    """Symbols of G_k^n with an edge s -> t whenever t covers s."""
    graph = nx.DiGraph()
    symbols = list(schubert_symbols(n, k))
    for s in symbols:
        graph.add_node(s, label=str(s), cell_dim=s.cell_dim)
    for s in symbols:
        for t in symbols:
            if t.cell_dim == s.cell_dim + 1 and bruhat_leq(s, t):
                graph.add_edge(s, t)
    return graph


def check_bruhat_monotonicity(
    n: int, k: int, samples: int = 5, seed: int = 0, rtol: float = RANK_TOLERANCE
) -> CheckReport:
    """Membership in a cell implies membership in every larger cell."""
    started = start_clock()
    seeds = iter(child_seeds(seed, samples * n))
    points = [project(sample_group_element(n, next(seeds)), k) for _ in range(samples)]
    for l in range(1, n):
        points += [
            standard_image_point(l, k, n, next(seeds)) for _ in range(samples - 1)
        ]
    poset = bruhat_poset(n, k)
    symbols = list(poset.nodes)
    violations = 0
    for point in points:
        member = {s: schubert_membership(point, s, rtol) for s in symbols}
        violations += sum(
            1
            for s in symbols
            for t in nx.descendants(poset, s)
            if member[s] and not member[t]
        )
        violations += 0 if member[symbols[-1]] else 1
    return CheckReport.from_residual(
        "bruhat-monotonicity",
        violations,
        0.0,
        started=started,
        mode=Mode.FLOAT,
        n=n,
        m_or_k=k,
        samples=len(points),
        details={
            "symbols": len(symbols),
            "covering_relations": poset.number_of_edges(),
            "rtol": rtol,
        },
    )


def check_standard_images(
    n: int, k: int, samples: int = 50, seed: int = 0, rtol: float = RANK_TOLERANCE
) -> CheckReport:
    """Sampled images of K_l lie in the cell of standard_image_symbol(l, k, n)."""
    started = start_clock()
    failures: dict[str, int] = {}
    symbols = {}
    seeds = child_seeds(seed, n - 1)
    for l in range(1, n):
        symbol = standard_image_symbol(l, k, n)
        symbols[str(l)] = str(symbol)
        misses = sum(
            1
            for child in child_seeds(seeds[l - 1], samples)
            if not schubert_membership(
                standard_image_point(l, k, n, child), symbol, rtol
            )
        )
        if misses:
            failures[str(l)] = misses
    return CheckReport.from_residual(
        "schubert-standard-image",
        sum(failures.values()),
        0.0,
        started=started,
        mode=Mode.FLOAT,
        n=n,
        m_or_k=k,
        samples=samples * (n - 1),
        details={"symbols": symbols, "failures": failures, "rtol": rtol},
    )


def check_leaf_equation(
    n: int,
    c,
    k: int = 1,
    samples: int = 100,
    seed: int = 0,
    tolerance: float = POINT_TOLERANCE,
) -> CheckReport:
    """Images of K_k under the projective twist satisfy the leaf equation.

    Also evaluates embed_sphere images against the equation with c and 1-c
    exchanged, and reports (without judging) the residual at random points.
    """
    started = start_clock()
    c = parse_rational(c)
    sigma = projective_twist(c, n).to_float()
    seeds = child_seeds(seed, 3 * samples)
    rng = np.random.default_rng(seeds[-1])
    worst = 0.0
    for child in seeds[:samples]:
        g = sample_block_group_element((k, n - k), child)
        worst = max(worst, abs(leaf_residual(project_twisted(g, 1, sigma), k, c)))
    sphere = 0.0
    for _ in range(samples):
        v = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
        point = embed_sphere(v / np.linalg.norm(v), c)
        sphere = max(sphere, abs(leaf_residual(point, 1, 1 - c)))
    off_image = [
        abs(leaf_residual(project(sample_group_element(n, child), 1), k, c))
        for child in seeds[samples : 2 * samples]
    ]
    return CheckReport.from_residual(
        "leaf-equation",
        max(worst, sphere),
        tolerance,
        started=started,
        mode=Mode.FLOAT,
        n=n,
        m_or_k=k,
        c=str(c),
        samples=samples,
        details={
            "image_residual": worst,
            "sphere_residual": sphere,
            "off_image_median": float(np.median(off_image)),
        },
    )


def _torus_element(n: int, rng: np.random.Generator) -> GroupElement:
    angles = rng.uniform(0, 2 * np.pi, n)
    angles[-1] = -np.sum(angles[:-1])
    return GroupElement(np.diag(np.exp(1j * angles)))


def check_torus_leaves(
    n: int, k: int, c, samples: int = 20, seed: int = 0, rtol: float = RANK_TOLERANCE
) -> CheckReport:
    """Torus images are 0-dimensional leaves; generic leaves have even positive rank."""
    started = start_clock()
    c = parse_rational(c)
    sigma = build_sigma(c, k, n)
    f = BivectorField.standard(n, mode=Mode.FLOAT)
    seeds = child_seeds(seed, samples + 1)
    rng = np.random.default_rng(seeds[-1])
    torus_ranks = [
        leaf_rank(_torus_element(n, rng), f, k, sigma, rtol) for _ in range(samples)
    ]
    generic_ranks = [
        leaf_rank(sample_group_element(n, child), f, k, sigma, rtol)
        for child in seeds[:samples]
    ]
    bad = sum(1 for rank in torus_ranks if rank) + sum(
        1 for rank in generic_ranks if rank <= 0 or rank % 2
    )
    return CheckReport.from_residual(
        "torus-leaves",
        bad,
        0.0,
        started=started,
        mode=Mode.FLOAT,
        n=n,
        m_or_k=k,
        c=str(c),
        samples=2 * samples,
        details={
            "torus_ranks": sorted(set(torus_ranks)),
            "generic_ranks": sorted(set(generic_ranks)),
            "rtol": rtol,
        },
    )


def check_generic_leaf(
    n: int, k: int, samples: int = 20, seed: int = 0, rtol: float = RANK_TOLERANCE
) -> CheckReport:
    """The most frequent leaf rank of the standard quotient is that of the open cell."""
    started = start_clock()
    f = BivectorField.standard(n, mode=Mode.FLOAT)
    ranks = [
        leaf_rank(sample_group_element(n, child), f, k, rtol=rtol)
        for child in child_seeds(seed, samples)
    ]
    values, counts = np.unique(ranks, return_counts=True)
    majority = int(values[np.argmax(counts)])
    expected = 2 * k * (n - k)
    return CheckReport.from_residual(
        "generic-leaf",
        abs(majority - expected),
        0.0,
        started=started,
        mode=Mode.FLOAT,
        n=n,
        m_or_k=k,
        samples=samples,
        details={"majority_rank": majority, "expected": expected, "rtol": rtol},
    )


def check_quotient_descent(
    n: int,
    k: int,
    c,
    samples: int = 20,
    seed: int = 0,
    tolerance: float = GROUP_TOLERANCE,
) -> CheckReport:
    """The pushed-forward bivector and leaf rank agree at g and g s.

    s ranges over the stabilizer of the base point.
    """
    started = start_clock()
    c = parse_rational(c)
    sigma = build_sigma(c, k, n).to_float()
    f = BivectorField.standard(n, mode=Mode.FLOAT)
    action = GrassmannAction(n, k, sigma)
    tau = action.tau(f)
    seeds = child_seeds(seed, 2 * samples)
    worst = 0.0
    rank_changes = 0
    for i in range(samples):
        g = sample_group_element(n, seeds[2 * i])
        block = sample_block_group_element((n - k, k), seeds[2 * i + 1])
        s = sigma @ block @ sigma.inverse()
        here, there = tau(g), tau(g @ s)
        scale = max(1.0, float(np.max(np.abs(here))))
        worst = max(worst, float(np.max(np.abs(here - there))) / scale)
        if bivector_rank(here)[0] != bivector_rank(there)[0]:
            rank_changes += 1
    return CheckReport.from_residual(
        "quotient-descent",
        worst if not rank_changes else float("inf"),
        tolerance,
        started=started,
        mode=Mode.FLOAT,
        n=n,
        m_or_k=k,
        c=str(c),
        samples=samples,
        details={"rank_changes": rank_changes, "max_bivector_gap": worst},
    )


def check_poisson_diffeo(
    n: int,
    k: int,
    c,
    samples: int = 30,
    seed: int = 0,
    tolerance: float = GROUP_TOLERANCE,
) -> CheckReport:
    """(G/H, p_* π_σ) and (G/H_σ, (p_σ)_* π) match through [g]_H ↦ [g σ^-1]_{H_σ}.

    π_σ is the translated structure g ↦ Ad_{σ^-1} π̃(g σ^-1). A structure
    translated by a different twist serves as a negative control.
    """
    started = start_clock()
    c = parse_rational(c)
    sigma = build_sigma(c, k, n).to_float()
    other = build_sigma(c / 2, k, n).to_float()
    standard = BivectorField.standard(n, mode=Mode.FLOAT)
    left_action = GrassmannAction(n, k)
    right_action = GrassmannAction(n, k, sigma)
    translated = left_action.tau(BivectorField.translated(standard, sigma))
    control = left_action.tau(BivectorField.translated(standard, other))
    untwisted = right_action.tau(standard)
    worst, control_gap, point_gap = 0.0, 0.0, 0.0
    for child in child_seeds(seed, samples):
        g = sample_group_element(n, child)
        moved = g @ sigma.inverse()
        point_gap = max(
            point_gap,
            float(np.max(np.abs(left_action.point(g) - right_action.point(moved)))),
        )
        expected = untwisted(moved)
        scale = max(1.0, float(np.max(np.abs(expected))))
        worst = max(worst, float(np.max(np.abs(translated(g) - expected))) / scale)
        gap = float(np.max(np.abs(control(g) - expected))) / scale
        control_gap = max(control_gap, gap)
    separated = control_gap > 1e3 * tolerance
    flags = [] if separated else ["negative control did not separate"]
    return CheckReport.from_residual(
        "poisson-diffeo",
        max(worst, point_gap),
        tolerance,
        started=started,
        mode=Mode.FLOAT,
        n=n,
        m_or_k=k,
        c=str(c),
        samples=samples,
        details={
            "bivector_gap": worst,
            "point_gap": point_gap,
            "control_gap": control_gap,
        },
        flags=flags,
    )


def check_grassmann_covariance(
    n: int,
    k: int,
    c,
    samples: int = 50,
    seed: int = 0,
    tolerance: float = GROUP_TOLERANCE,
) -> CheckReport:
    """The twisted quotient's pushed bivector is covariant for the left action."""
    c = parse_rational(c)
    sigma = build_sigma(c, k, n).to_float()
    f = BivectorField.standard(n, mode=Mode.FLOAT)
    action = GrassmannAction(n, k, sigma)
    report = check_covariance(
        f, action, action.tau(f), samples, seed, tolerance, label=k
    )
    size = 2 * n * n

    def zero_field(g: GroupElement) -> np.ndarray:
        return np.zeros((size, size))

    control = check_covariance(
        f, action, zero_field, min(samples, 5), seed, tolerance, label=k
    )
    flags = [] if not control.passed else ["zero field passed the covariance test"]
    return report.model_copy(
        update={
            "c": str(c),
            "details": {**report.details, "zero_field_residual": control.max_residual},
            "flags": report.flags + flags,
        }
    )


def _k_block(n: int, l: int) -> Subspace:
    return build_block_subalgebra(n, l, BlockVariant.SU_BLOCK)


def expected_codimension(n: int, k: int, l: int) -> int:
    if l < k:
        return l * l
    if l > n - k:
        return (n - l) ** 2
    return k * k


def four_block_subspace(n: int, k: int, l: int) -> Subspace:
    """Traceless diag(A, B11, B22, J A J).

    A acts on indices 1..k and its mirror copy on the last k indices.
    """
    basis = basis_index(n, Algebra.SU)

    def bar(i: int) -> int:
        return n + 1 - i

    def mirror(i: int, j: int) -> np.ndarray:
        return matrix_unit(n, i, j) + matrix_unit(n, bar(i), bar(j))

    elements = []
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            elements.append((mirror(i, j) + mirror(j, i)) * I)
            elements.append(mirror(i, j) - mirror(j, i))
    for lo, hi in ((k + 1, l), (l + 1, n - k)):
        for i in range(lo, hi + 1):
            for j in range(i + 1, hi + 1):
                elements.append((matrix_unit(n, i, j) + matrix_unit(n, j, i)) * I)
                elements.append(matrix_unit(n, i, j) - matrix_unit(n, j, i))
    diagonal = [mirror(i, i) for i in range(1, k + 1)]
    diagonal += [matrix_unit(n, i, i) for i in range(k + 1, n - k + 1)]
    weights = [2] * k + [1] * (n - 2 * k)
    anchor, anchor_weight = diagonal[-1], weights[-1]
    for d, w in zip(diagonal[:-1], weights[:-1]):
        balanced = d * ComplexScalar(anchor_weight, 0) - anchor * ComplexScalar(w, 0)
        elements.append(balanced * I)
    return Subspace(basis.dim, [basis.coordinates(m) for m in elements], Mode.EXACT)


def torus_intersection_dim(n: int, k: int, c) -> int:
    """dim(𝔱 ∩ Ad_{σ(c,k)} 𝔨_k); n - k - 1 for 0 < c < 1."""
    basis = basis_index(n, Algebra.SU)
    torus = build_block_subalgebra(n, 1, BlockVariant.TORUS)
    moved = conjugate_subspace(build_sigma(c, k, n), _k_block(n, k), basis)
    return torus.intersection(moved).dim


def check_dimension_claims(n: int, k: int, l: int, c) -> CheckReport:
    """dim 𝔨_l - dim(𝔨_l ∩ Ad_σ 𝔨_k) against dim G_k^n minus the expected codimension.

    For k = 1 the image dimension is also compared with 2n - 3; for l = k
    with the real dimension of the Stiefel manifold V_k(C^{n-k}); for
    k < l < n - k the intersection is compared with the four-block algebra.
    """
    started = start_clock()
    c = parse_rational(c)
    basis = basis_index(n, Algebra.SU)
    sigma = build_sigma(c, k, n)
    k_l = _k_block(n, l)
    meet = k_l.intersection(conjugate_subspace(sigma, _k_block(n, k), basis))
    image = k_l.dim - meet.dim
    grassmannian = 2 * k * (n - k)
    codimension = expected_codimension(n, k, l)
    mismatches = {"codimension": grassmannian - image != codimension}
    details: dict = {
        "l": l,
        "image_dim": image,
        "intersection_dim": meet.dim,
        "expected_codimension": codimension,
    }
    if k == 1:
        mismatches["projective"] = image != 2 * n - 3
    if l == k:
        stiefel = k * (2 * (n - k) - k)
        details["stiefel_dim"] = stiefel
        mismatches["stiefel"] = image != stiefel
    if k < l < n - k:
        mismatches["block_structure"] = not meet.same_as(four_block_subspace(n, k, l))
    if 0 < c < 1:
        torus_dim = torus_intersection_dim(n, k, c)
        details["torus_intersection_dim"] = torus_dim
        mismatches["torus"] = torus_dim != n - k - 1
    details["mismatches"] = sorted(name for name, bad in mismatches.items() if bad)
    return CheckReport.from_residual(
        "dimensions",
        sum(mismatches.values()),
        0.0,
        started=started,
        n=n,
        m_or_k=k,
        c=str(c),
        details=details,
    )


def check_symmetry_lemma(n: int, k: int, l: int, c) -> CheckReport:
    """𝔨_l ∩ Ad_{σ(c,k)} 𝔨_k against 𝔨_{n-l} ∩ Ad_{σ(1-c,k)} 𝔨_k.

    The right side is moved onto the tower of c. The two sides correspond
    under conjugation by the antidiagonal permutation J; literal equality is
    recorded in the details.
    """
    started = start_clock()
    c = parse_rational(c)
    basis = basis_index(n, Algebra.SU)
    tower = get_tower(c)
    k_k = _k_block(n, k)
    left = _k_block(n, l).intersection(
        conjugate_subspace(build_sigma(c, k, n), k_k, basis)
    )
    right = _k_block(n, n - l).intersection(
        conjugate_subspace(build_sigma(1 - c, k, n), k_k, basis)
    )
    right = right.map_scalars(lambda v: retower_scalar(v, tower))
    flipped = conjugate_subspace(antidiagonal(n), left, basis)
    matched = flipped.same_as(right) and left.dim == right.dim
    literal = left.same_as(right)
    logger.debug(
        "symmetry n={} k={} l={} c={}: J-matched={} literal={}",
        n, k, l, c, matched, literal,
    )
    return CheckReport.from_residual(
        "symmetry",
        0 if matched else 1,
        0.0,
        started=started,
        n=n,
        m_or_k=k,
        c=str(c),
        details={"l": l, "dim": left.dim, "literal_equality": literal},
    )


class LeafSample(BaseModel):
    seed: int
    n: int
    k: int
    c: str
    point_hash: str
    rank: int
    min_singular: float


def survey_leaves(
    n: int, k: int, c, samples: int = 200, seed: int = 0
) -> list[LeafSample]:
    """Leaf ranks of the twisted quotient at seeded random points."""
    c = parse_rational(c)
    sigma = build_sigma(c, k, n).to_float()
    f = BivectorField.standard(n, mode=Mode.FLOAT)
    rows = []
    for child in child_seeds(seed, samples):
        g = sample_group_element(n, child)
        rank, values = leaf_spectrum(g, f, k, sigma)
        rows.append(
            LeafSample(
                seed=child,
                n=n,
                k=k,
                c=str(c),
                point_hash=project_twisted(g, k, sigma).point_hash(),
                rank=rank,
                min_singular=float(values[rank - 1]) if rank else 0.0,
            )
        )
    return rows


def write_leaf_csv(rows: Sequence[LeafSample], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(LeafSample.model_fields))
        writer.writeheader()
        for row in rows:
            writer.writerow(row.model_dump())
    return path
