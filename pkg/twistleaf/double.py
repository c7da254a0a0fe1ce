"""The double g ⊕ g*, its bracket, the dressing action and Lagrangian subalgebras."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator

import numpy as np
from loguru import logger

from .enums import Algebra, BlockVariant, Condition, FieldKind, Mode
from .exceptions import DimensionMismatchError, PreconditionError
from .lie import (
    BasisIndex,
    GroupElement,
    Subspace,
    adjoint_matrix,
    ad_matrix,
    basis_index,
    bracket_coordinates,
    build_block_subalgebra,
    build_sigma,
    conjugate_subspace,
)
from .linalg import exact_zeros, is_exact_array, matmul, to_float_array
from .poisson import BivectorField, check_coisotropy
from .reports import CheckReport, start_clock
from .scalar import TowerScalar, get_tower, inverse, is_zero, parse_rational
from .wedge import Wedge2, ad2, build_r, cobracket


def _zeros(size: int, exact: bool) -> np.ndarray:
    return exact_zeros(size) if exact else np.zeros(size)


def _matching(*arrays: np.ndarray) -> list[np.ndarray]:
    """Bring coordinate arrays to a common ring (exact only if all are)."""
    if all(is_exact_array(a) for a in arrays):
        return list(arrays)
    return [to_float_array(a) for a in arrays]


class DoubleElement:
    """A pair (x, β) with x in g and β in g*, both in basis coordinates."""

    __slots__ = ("x", "beta")

    def __init__(self, x: np.ndarray, beta: np.ndarray) -> None:
        if len(x) != len(beta):
            raise DimensionMismatchError(
                f"x has {len(x)} coordinates but beta has {len(beta)}"
            )
        self.x, self.beta = _matching(np.asarray(x), np.asarray(beta))

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> DoubleElement:
        half = len(vector) // 2
        return cls(vector[:half], vector[half:])

    @property
    def exact(self) -> bool:
        return is_exact_array(self.x)

    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.beta])

    def __add__(self, other: DoubleElement) -> DoubleElement:
        return DoubleElement(self.x + other.x, self.beta + other.beta)

    def __sub__(self, other: DoubleElement) -> DoubleElement:
        return DoubleElement(self.x - other.x, self.beta - other.beta)

    def __mul__(self, scalar) -> DoubleElement:
        return DoubleElement(self.x * scalar, self.beta * scalar)

    __rmul__ = __mul__

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(is_zero(v, tol) for v in self.vector())

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        return f"DoubleElement(dim={len(self.x)}, {kind})"


def pairing(u: DoubleElement, v: DoubleElement):
    """⟨(x, β), (y, γ)⟩ = β(y) + γ(x)."""
    a, b, c, d = _matching(u.x, u.beta, v.x, v.beta)
    total = None
    for left, right in ((b, c), (d, a)):
        for p, q in zip(left, right):
            if is_zero(p) or is_zero(q):
                continue
            total = p * q if total is None else total + p * q
    if total is None:
        return Fraction(0) if is_exact_array(a) else 0.0
    return total


class DrinfeldDouble:
    """g ⊕ g* for the Lie bialgebra (g, δ_r).

    The cobracket is stored as one sparse antisymmetric matrix D_i = δ(b_i)
    per basis vector, so [β, γ]*_i = βᵀ D_i γ and ad*_β y = Σ_k y_k D_k β.
    ``sign`` multiplies the four mixed coadjoint terms of the bracket.
    """

    def __init__(self, r: Wedge2, sign: int = 1) -> None:
        self.r = r
        self.basis: BasisIndex = r.basis
        self.sign = sign
        mode = r.mode
        self._delta = [
            list(cobracket(self.basis.unit(i, mode), r).terms())
            for i in range(self.basis.dim)
        ]

    @property
    def dim(self) -> int:
        return self.basis.dim

    def dual_bracket(self, beta: np.ndarray, gamma: np.ndarray) -> np.ndarray:
        """[β, γ]* with ⟨[β, γ]*, x⟩ = ⟨β ⊗ γ, δ(x)⟩."""
        beta, gamma = _matching(beta, gamma)
        out = _zeros(self.dim, is_exact_array(beta))
        for i, terms in enumerate(self._delta):
            total = None
            for p, q, value in terms:
                cross = beta[p] * gamma[q] - beta[q] * gamma[p]
                if is_zero(cross):
                    continue
                term = value * cross
                total = term if total is None else total + term
            if total is not None:
                out[i] = total
        return out

    def coadjoint_of_covector(self, beta: np.ndarray, y: np.ndarray) -> np.ndarray:
        """ad*_β y in g, defined by ⟨α, ad*_β y⟩ = -⟨[β, α]*, y⟩."""
        beta, y = _matching(beta, y)
        out = _zeros(self.dim, is_exact_array(beta))
        for k, yk in enumerate(y):
            if is_zero(yk):
                continue
            for p, q, value in self._delta[k]:
                if not is_zero(beta[q]):
                    out[p] = out[p] + yk * value * beta[q]
                if not is_zero(beta[p]):
                    out[q] = out[q] - yk * value * beta[p]
        return out

    def coadjoint_of_vector(self, x: np.ndarray, gamma: np.ndarray) -> np.ndarray:
        """ad*_x γ = -γ ∘ ad_x, i.e. -ad_xᵀ γ in coordinates."""
        x, gamma = _matching(x, gamma)
        ad = ad_matrix(x, self.basis)
        return -matmul(ad.T.copy(), gamma.reshape(-1, 1)).ravel()

    def bracket(self, u: DoubleElement, v: DoubleElement) -> DoubleElement:
        """[x + β, y + γ] = [x, y] + [β, γ]* + s(ad*_β y - ad*_γ x + ad*_x γ - ad*_y β).

        s is the sign of the mixed terms.
        """
        x, beta, y, gamma = _matching(u.x, u.beta, v.x, v.beta)
        algebra_part = bracket_coordinates(x, y, self.basis)
        algebra_part = algebra_part + (
            self.coadjoint_of_covector(beta, y) - self.coadjoint_of_covector(gamma, x)
        ) * self.sign
        dual_part = self.dual_bracket(beta, gamma) + (
            self.coadjoint_of_vector(x, gamma) - self.coadjoint_of_vector(y, beta)
        ) * self.sign
        return DoubleElement(algebra_part, dual_part)

    def invariance_defect(self, u: DoubleElement, v: DoubleElement, w: DoubleElement):
        """⟨[u, v], w⟩ + ⟨v, [u, w]⟩; zero for an invariant pairing."""
        return pairing(self.bracket(u, v), w) + pairing(v, self.bracket(u, w))

    def basis_elements(self, mode: Mode = Mode.EXACT) -> list[DoubleElement]:
        zero = _zeros(self.dim, mode is Mode.EXACT)
        units = [self.basis.unit(i, mode) for i in range(self.dim)]
        return [DoubleElement(e, zero.copy()) for e in units] + [
            DoubleElement(zero.copy(), e) for e in units
        ]


def mixed_defects(double: DrinfeldDouble, tol: float = 1e-12) -> Iterator[tuple]:
    """Basis triples (a, b, c) with ⟨[e_a, e^b], e_c⟩ + ⟨e^b, [e_a, e_c]⟩ != 0.

    With the canonical pairing the two terms are the e^c coordinate of
    [e_a, e^b] and the e_b coordinate of [e_a, e_c].
    """
    elements = double.basis_elements(double.r.mode)
    dim = double.dim
    for a in range(dim):
        u = elements[a]
        with_dual = [double.bracket(u, elements[dim + b]) for b in range(dim)]
        with_algebra = [double.bracket(u, elements[c]) for c in range(dim)]
        for b in range(dim):
            for c in range(dim):
                defect = with_dual[b].beta[c] + with_algebra[c].x[b]
                if not is_zero(defect, tol):
                    yield a, b, c


def select_double(r: Wedge2) -> DrinfeldDouble:
    """The sign convention of the mixed terms for which the pairing is invariant.

    Both candidates are tested on every basis triple (e_a, e^b, e_c); the
    first one with no defect is returned.
    """
    for sign in (1, -1):
        double = DrinfeldDouble(r, sign)
        if not any(mixed_defects(double)):
            logger.debug("double bracket sign {} selected", sign)
            return double
    raise PreconditionError("No sign convention makes the canonical pairing invariant")


def dual_bracket(beta: np.ndarray, gamma: np.ndarray, r: Wedge2) -> np.ndarray:
    return DrinfeldDouble(r).dual_bracket(beta, gamma)


def double_bracket(u: DoubleElement, v: DoubleElement, r: Wedge2) -> DoubleElement:
    return select_double(r).bracket(u, v)


def _right_trivialized(f: BivectorField, g: GroupElement) -> Wedge2:
    """Ad_g π̃(g) = Ad_g r - r for a multiplicative field."""
    return ad2(g, f.at(g))


def double_action(g: GroupElement, u: DoubleElement, f: BivectorField) -> DoubleElement:
    """g·(x, α) = (Ad_g x + π̂(g)(β', -), β') with β' = Ad*_g α = α ∘ Ad_{g^-1}.

    π̂(g) = Ad_g r - r is contracted with β' in its first slot.

    Raises:
        PreconditionError: If ``f`` is not multiplicative
    """
    if f.kind is not FieldKind.MULTIPLICATIVE:
        raise PreconditionError("The dressing action needs a multiplicative structure")
    basis = f.basis
    x, alpha = u.x, u.beta
    if not g.exact:
        x, alpha = to_float_array(x), to_float_array(alpha)
    ad_g = adjoint_matrix(g, basis)
    ad_g_inv = adjoint_matrix(g.inverse(), basis)
    beta = matmul(ad_g_inv.T.copy(), alpha.reshape(-1, 1)).ravel()
    w = _right_trivialized(f, g).matrix
    moved = matmul(ad_g, x.reshape(-1, 1)).ravel()
    contraction = matmul(w.T.copy(), beta.reshape(-1, 1)).ravel()
    return DoubleElement(moved + contraction, beta)


class LagrangianSubalgebra:
    """A subspace of g ⊕ g* in stacked (x, β) coordinates."""

    def __init__(self, space: Subspace, double: DrinfeldDouble) -> None:
        if space.ambient != 2 * double.dim:
            raise DimensionMismatchError(
                f"Expected a subspace of dimension-{2 * double.dim} space, "
                f"got {space.ambient}"
            )
        self.space = space
        self.double = double
        self.slot = "first"

    @property
    def dim(self) -> int:
        return self.space.dim

    def elements(self) -> list[DoubleElement]:
        return [DoubleElement.from_vector(v) for v in self.space.basis()]

    def isotropy_residual(self) -> float:
        elements = self.elements()
        worst = 0.0
        for i, u in enumerate(elements):
            for v in elements[i:]:
                worst = max(worst, abs(float(pairing(u, v))))
        return worst

    def closure_residual(self) -> float:
        """Largest distance of a bracket of basis elements from the span."""
        worst = 0.0
        for u, v in combinations(self.elements(), 2):
            worst = max(worst, self.space.residual(self.double.bracket(u, v).vector()))
        return worst

    def same_as(self, other: LagrangianSubalgebra) -> bool:
        return self.space.same_as(other.space)

    def to_json(self) -> dict:
        return self.space.to_json()


def _pair_vectors(
    xs: Iterable[np.ndarray], betas: Iterable[np.ndarray], size: int, exact: bool
) -> list[np.ndarray]:
    zero = _zeros(size, exact)
    out = [np.concatenate([x, zero]) for x in xs]
    for x, beta in betas:
        out.append(np.concatenate([x, beta]))
    return out


def _graph(
    h: Subspace, w: np.ndarray, slot: str
) -> list[tuple[np.ndarray, np.ndarray]]:
    """(W(β), β) for β spanning h^⊥."""
    contraction = w.T.copy() if slot == "first" else w
    out = []
    for beta in h.annihilator().basis():
        out.append((matmul(contraction, beta.reshape(-1, 1)).ravel(), beta))
    return out


def split_lagrangian(h: Subspace, double: DrinfeldDouble) -> LagrangianSubalgebra:
    """h ⊕ h^⊥."""
    zero = _zeros(double.dim, h.exact)
    vectors = _pair_vectors(h.basis(), [(zero, b) for b in h.annihilator().basis()],
                            double.dim, h.exact)
    return LagrangianSubalgebra(Subspace(2 * double.dim, vectors, h.mode), double)


def lagrangian_by_action(
    h: Subspace, sigma: GroupElement, double: DrinfeldDouble
) -> LagrangianSubalgebra:
    """σ^-1 · (Ad_σ h ⊕ (Ad_σ h)^⊥) under the dressing action."""
    f = BivectorField.multiplicative(double.r)
    split = split_lagrangian(conjugate_subspace(sigma, h, double.basis), double)
    sigma_inv = sigma.inverse()
    vectors = [double_action(sigma_inv, u, f).vector() for u in split.elements()]
    return LagrangianSubalgebra(Subspace(2 * double.dim, vectors, h.mode), double)


def lagrangian_of_quotient(
    h: Subspace, sigma: GroupElement, r: Wedge2, check: bool = True
) -> LagrangianSubalgebra:
    """h ⊕ {(W(β), β) : β ∈ h^⊥} with W = Ad_σ r - r.

    β is contracted into the first slot of W. When that subspace differs
    from the one obtained by moving the split Lagrangian of Ad_σ h with σ^-1,
    the second slot is used instead and recorded on the result.

    Raises:
        PreconditionError: If Ad_σ h fails the infinitesimal coisotropy test
    """
    basis = r.basis
    if check:
        moved = conjugate_subspace(sigma, h, basis)
        report = check_coisotropy(BivectorField.multiplicative(r), moved, Condition.C4)
        if not report.passed:
            raise PreconditionError(
                f"Ad_sigma h is not coisotropic (residual {report.max_residual:.3e})"
            )
    double = select_double(r)
    w = (ad2(sigma, r) - r).matrix
    result = None
    reference = lagrangian_by_action(h, sigma, double)
    for slot in ("first", "second"):
        vectors = _pair_vectors(h.basis(), _graph(h, w, slot), double.dim, h.exact)
        space = Subspace(2 * double.dim, vectors, h.mode)
        candidate = LagrangianSubalgebra(space, double)
        candidate.slot = slot
        if candidate.same_as(reference):
            return candidate
        if result is None:
            result = candidate
    logger.warning(
        "Neither contraction slot reproduces the dressing-action construction"
    )
    return result


def _quotient_subalgebra(n: int, m: int, mode: Mode = Mode.EXACT) -> Subspace:
    return build_block_subalgebra(n, m, BlockVariant.SU_BLOCK, mode)


def check_lagrangian(n: int, m: int, c) -> CheckReport:
    """Dimension, isotropy, closure and the dressing cross-check, all exact."""
    started = start_clock()
    c = parse_rational(c)
    r = build_r(n, Algebra.SU)
    h = _quotient_subalgebra(n, m)
    sigma = build_sigma(c, m, n)
    lagrangian = lagrangian_of_quotient(h, sigma, r)
    reference = lagrangian_by_action(h, sigma, lagrangian.double)
    parts = {
        "dimension_gap": abs(lagrangian.dim - r.basis.dim),
        "isotropy": lagrangian.isotropy_residual(),
        "closure": lagrangian.closure_residual(),
        "cross_check": 0 if lagrangian.same_as(reference) else 1,
    }
    flags = [] if get_tower(c).is_free else ["non-free tower"]
    return CheckReport.from_residual(
        "lagrangian",
        max(parts.values()),
        0.0,
        started=started,
        n=n,
        m_or_k=m,
        c=str(c),
        details={
            "parts": parts,
            "dimension": lagrangian.dim,
            "contraction_slot": lagrangian.slot,
            "bracket_sign": lagrangian.double.sign,
        },
        flags=flags,
    )


def hperp_generator_families(
    n: int, m: int, c, reading: int = 1
) -> dict[str, list[np.ndarray]]:
    """The four listed generator families of (Ad_σ h)^⊥, as su(n) covectors.

    ``reading`` = +1 takes the upper sign of every ± / ∓ for the x_+ duals
    and the lower one for the x_- duals; -1 swaps the two readings.
    """
    c = parse_rational(c)
    basis = basis_index(n, Algebra.SU)
    tower = get_tower(c)
    root_c = TowerScalar.sqrt_c(tower)
    root_rest = TowerScalar.sqrt_complement(tower)
    product = TowerScalar.sqrt_product(tower)
    ratio = (2 * c - 1) * inverse(product) if not product.is_zero() else Fraction(0)

    def dual(kind: int, a: int, b: int) -> np.ndarray:
        out = exact_zeros(basis.dim)
        if kind > 0:
            out[basis.plus(a, b)] = Fraction(1)
        elif a < b:
            out[basis.minus(a, b)] = Fraction(1)
        else:
            out[basis.minus(b, a)] = Fraction(-1)
        return out

    def cartan(l: int) -> np.ndarray:
        out = exact_zeros(basis.dim)
        out[basis.cartan(l)] = Fraction(1)
        return out

    def bar(i: int) -> int:
        return n + 1 - i

    families: dict[str, list[np.ndarray]] = {
        name: [] for name in ("outer", "cross", "middle", "antidiagonal")
    }
    for kind in (1, -1):
        upper = kind * reading
        for i, j in combinations(range(1, m + 1), 2):
            families["outer"].append(
                dual(kind, i, j) * (-upper)
                + dual(kind, bar(j), bar(i))
                - dual(kind, j, bar(i)) * ratio
            )
            families["cross"].append(
                dual(kind, i, bar(j)) + dual(kind, j, bar(i)) * (-upper)
            )
        for i in range(1, m + 1):
            for p in range(1, n - 2 * m + 1):
                families["middle"].append(
                    dual(kind, i, m + p) * root_c
                    + dual(kind, m + p, bar(i)) * (root_rest * upper)
                )
    for i in range(1, m + 1):
        families["antidiagonal"].append(dual(-1, i, bar(i)))
        total = cartan(i) + cartan(n - i)
        for j in range(n - i + 1, n + 1):
            total = total + dual(1, bar(j), j) * ratio
        families["antidiagonal"].append(total)
    return families


def _score(vectors: list[np.ndarray], annihilator: Subspace) -> int:
    return sum(1 for v in vectors if annihilator.contains(v))


def check_hperp_generators(n: int, m: int, c) -> CheckReport:
    """(Ad_σ h)^⊥ is a subalgebra of g*; the listed generators are scored against it.

    The report passes when the directly computed annihilator is closed under
    the dual bracket. Each generator family is scored under both sign
    readings and against both Ad_σ h and Ad_{σ^-1} h; mismatches are flagged
    rather than failed.
    """
    started = start_clock()
    c = parse_rational(c)
    basis = basis_index(n, Algebra.SU)
    r = build_r(n, Algebra.SU)
    h = build_block_subalgebra(n, n - m, BlockVariant.SU_BLOCK)
    sigma = build_sigma(c, m, n)
    targets = {
        "conjugate": conjugate_subspace(sigma, h, basis).annihilator(),
        "inverse_conjugate": (
            conjugate_subspace(sigma.inverse(), h, basis).annihilator()
        ),
    }
    double = DrinfeldDouble(r)
    hperp = targets["conjugate"]
    vectors = hperp.basis()
    closure = 0.0
    for i, beta in enumerate(vectors):
        for gamma in vectors[i + 1 :]:
            closure = max(closure, hperp.residual(double.dual_bracket(beta, gamma)))
    scores: dict[str, dict[str, int]] = {}
    sizes: dict[str, int] = {}
    members_in: list[np.ndarray] = []
    for reading in (1, -1):
        label = "upper" if reading > 0 else "lower"
        for name, members in hperp_generator_families(n, m, c, reading).items():
            sizes[name] = len(members)
            for target, ann in targets.items():
                scores.setdefault(name, {})[f"{label}/{target}"] = _score(members, ann)
            members_in += [v for v in members if hperp.contains(v)]
    spanned = Subspace(basis.dim, members_in).dim
    flags = []
    for name, keyed in scores.items():
        if max(keyed.values(), default=0) < sizes[name]:
            flags.append(f"family {name} not fully in the annihilator")
    if spanned < hperp.dim:
        flags.append(f"listed generators span {spanned} of {hperp.dim}")
    return CheckReport.from_residual(
        "hperp",
        closure,
        0.0,
        started=started,
        n=n,
        m_or_k=m,
        c=str(c),
        details={
            "annihilator_dim": hperp.dim,
            "expected_dim": basis.dim - h.dim,
            "scores": scores,
            "family_sizes": sizes,
            "spanned_by_members": spanned,
        },
        flags=flags,
    )
