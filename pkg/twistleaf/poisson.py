"""Left-trivialized bivector fields on U(n)/SU(n) and the identities they satisfy."""

from __future__ import annotations

from typing import Callable, Optional, Protocol, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel

from .enums import Algebra, BlockVariant, Condition, FieldKind, Mode
from .exceptions import DimensionMismatchError, PreconditionError, RangeError
from .lie import (
    BasisIndex,
    GroupElement,
    Subspace,
    basis_index,
    build_block_subalgebra,
    build_sigma,
    child_seeds,
    conjugate_subspace,
    is_subalgebra,
    sample_group_element,
    sample_subgroup_element,
)
from .linalg import to_float_array
from .reports import CheckReport, elapsed_millis, start_clock
from .scalar import parse_rational
from .wedge import (
    Wedge2,
    WedgeSubspace,
    ad2,
    ad_derivation,
    build_r,
    cobracket,
    h_wedge_g,
)

ALGEBRA_TOLERANCE = 1e-9
GROUP_TOLERANCE = 1e-8


class BivectorField:
    """A bivector field on the group given by its left trivialization g -> ∧²g.

    Three closed forms are supported:

    * multiplicative: π̃(g) = r - Ad_{g^-1} r
    * affine: ρ̃(g) = π̃(g) + X0
    * translated: ρ̃_σ(g) = Ad_{σ^-1}(base(g σ^-1))
    """

    def __init__(
        self,
        kind: FieldKind,
        r: Wedge2,
        offset: Optional[Wedge2] = None,
        base: Optional[BivectorField] = None,
        sigma: Optional[GroupElement] = None,
    ) -> None:
        self.kind = kind
        self._r = r
        self.offset = offset
        self.base = base
        self.sigma = sigma
        self._float_r: Optional[Wedge2] = None

    @classmethod
    def multiplicative(cls, r: Wedge2) -> BivectorField:
        return cls(FieldKind.MULTIPLICATIVE, r)

    @classmethod
    def affine(cls, r: Wedge2, offset: Wedge2) -> BivectorField:
        if offset.basis != r.basis:
            raise DimensionMismatchError(f"Bases differ: {offset.basis} and {r.basis}")
        return cls(FieldKind.AFFINE, r, offset=offset)

    @classmethod
    def translated(cls, base: BivectorField, sigma: GroupElement) -> BivectorField:
        if sigma.n != base.basis.n:
            raise DimensionMismatchError(f"n differs: {sigma.n} and {base.basis.n}")
        return cls(FieldKind.TRANSLATED, base.r, base=base, sigma=sigma)

    @classmethod
    def standard(
        cls, n: int, algebra: Algebra = Algebra.SU, mode: Mode = Mode.EXACT
    ) -> BivectorField:
        """The standard multiplicative structure L_g r - R_g r."""
        return cls.multiplicative(build_r(n, algebra, mode))

    @property
    def r(self) -> Wedge2:
        """r of the underlying multiplicative structure."""
        return self._r

    @property
    def basis(self) -> BasisIndex:
        return self._r.basis

    @property
    def n(self) -> int:
        return self._r.basis.n

    @property
    def exact(self) -> bool:
        if self.kind is FieldKind.TRANSLATED:
            return self.base.exact and self.sigma.exact
        if self.kind is FieldKind.AFFINE:
            return self._r.exact and self.offset.exact
        return self._r.exact

    def _r_for(self, g: GroupElement) -> Wedge2:
        if g.exact or not self._r.exact:
            return self._r
        if self._float_r is None:
            self._float_r = self._r.to_float()
        return self._float_r

    def at(self, g: GroupElement) -> Wedge2:
        """The left-trivialized value at ``g``."""
        if g.n != self.n:
            raise DimensionMismatchError(f"n differs: {g.n} and {self.n}")
        if self.kind is FieldKind.MULTIPLICATIVE:
            r = self._r_for(g)
            return r - ad2(g.inverse(), r)
        if self.kind is FieldKind.AFFINE:
            r = self._r_for(g)
            return r - ad2(g.inverse(), r) + self.offset
        sigma_inv = self.sigma.inverse()
        return ad2(sigma_inv, self.base.at(g @ sigma_inv))

    def at_identity(self) -> Wedge2:
        mode = Mode.EXACT if self.exact else Mode.FLOAT
        return self.at(GroupElement.identity(self.n, mode))

    def multiplicative_part(self, g: GroupElement) -> Wedge2:
        """ρ̃(g) - ρ̃(e); equal to r - Ad_{g^-1} r for every affine field."""
        return self.at(g) - self.at_identity()

    def __repr__(self) -> str:
        return f"BivectorField({self.kind.value}, n={self.n})"


def eval_trivialized(f: BivectorField, g: GroupElement) -> Wedge2:
    """Left-trivialized value of ``f`` at ``g``."""
    return f.at(g)


def _special(f: BivectorField) -> bool:
    return f.basis.algebra is Algebra.SU


def _sampled_pairs(f: BivectorField, samples: int, seed: int):
    seeds = child_seeds(seed, 2 * samples)
    special = _special(f)
    for i in range(samples):
        yield (
            sample_group_element(f.n, seeds[2 * i], special),
            sample_group_element(f.n, seeds[2 * i + 1], special),
        )


def _float_report(
    claim: str,
    f: BivectorField,
    residual: float,
    tolerance: float,
    started: float,
    samples: int,
    **fields,
) -> CheckReport:
    return CheckReport.from_residual(
        claim,
        residual,
        tolerance,
        started=started,
        mode=Mode.FLOAT,
        n=f.n,
        samples=samples,
        **fields,
    )


def check_multiplicative(
    f: BivectorField,
    samples: int = 100,
    seed: int = 0,
    tolerance: float = ALGEBRA_TOLERANCE,
) -> CheckReport:
    """π̃(gh) - Ad_{h^-1} π̃(g) - π̃(h) over sampled pairs."""
    started = start_clock()
    worst = 0.0
    for g, h in _sampled_pairs(f, samples, seed):
        defect = f.at(g @ h) - ad2(h.inverse(), f.at(g)) - f.at(h)
        worst = max(worst, defect.max_abs())
    logger.debug("multiplicative {} residual={}", f, worst)
    return _float_report(
        "multiplicative", f, worst, tolerance, started, samples,
        details={"kind": f.kind.value, "seed": seed},
    )


def check_affine(
    f: BivectorField,
    samples: int = 100,
    seed: int = 0,
    tolerance: float = ALGEBRA_TOLERANCE,
) -> CheckReport:
    """ρ̃(gh) - Ad_{h^-1} ρ̃(g) - ρ̃(h) + Ad_{h^-1} ρ̃(e) over sampled pairs."""
    started = start_clock()
    at_e = f.at_identity().to_float()
    worst = 0.0
    for g, h in _sampled_pairs(f, samples, seed):
        h_inv = h.inverse()
        defect = f.at(g @ h) - ad2(h_inv, f.at(g)) - f.at(h) + ad2(h_inv, at_e)
        worst = max(worst, defect.max_abs())
    logger.debug("affine {} residual={}", f, worst)
    return _float_report(
        "affine", f, worst, tolerance, started, samples,
        details={"kind": f.kind.value, "seed": seed},
    )


def check_lemma1_invariant(
    f: BivectorField,
    sigma: GroupElement,
    samples: int = 100,
    seed: int = 0,
    tolerance: float = ALGEBRA_TOLERANCE,
    exact_powers: int = 3,
) -> CheckReport:
    """The σ-translate of an affine field has the same multiplicative part.

    Compares T(g) - T(e) with f(g) - f(e) for T the translate of ``f`` by
    ``sigma``. Sampled points are Haar random; when ``f`` and ``sigma`` are
    exact, the powers σ^p for |p| <= ``exact_powers`` are compared exactly.
    """
    started = start_clock()
    translated = BivectorField.translated(f, sigma)
    t_e = translated.at_identity()
    f_e = f.at_identity()
    exact_residual = 0.0
    spot_points = 0
    if f.exact and sigma.exact:
        for p in range(-exact_powers, exact_powers + 1):
            g = sigma**p
            gap = (translated.at(g) - t_e) - (f.at(g) - f_e)
            exact_residual = max(exact_residual, gap.max_abs())
            spot_points += 1
    t_e, f_e = t_e.to_float(), f_e.to_float()
    float_residual = 0.0
    special = _special(f)
    for s in child_seeds(seed, samples):
        g = sample_group_element(f.n, s, special)
        gap = (translated.at(g) - t_e) - (f.at(g) - f_e)
        float_residual = max(float_residual, gap.max_abs())
    passed = exact_residual == 0.0 and float_residual <= tolerance
    return CheckReport(
        claim="translation-invariant",
        mode=Mode.FLOAT,
        n=f.n,
        samples=samples + spot_points,
        max_residual=max(exact_residual, float_residual),
        passed=passed,
        tolerance=tolerance,
        millis=elapsed_millis(started),
        details={
            "kind": f.kind.value,
            "exact_points": spot_points,
            "exact_residual": exact_residual,
            "float_residual": float_residual,
        },
    )


def check_affine_covariance(
    f: BivectorField,
    samples: int = 50,
    seed: int = 0,
    multiplicative: Optional[BivectorField] = None,
    tolerance: float = ALGEBRA_TOLERANCE,
) -> CheckReport:
    """Covariance of an affine field for the left action of (G, π) on itself.

    With π̃ the multiplicative part (by default ρ̃ - ρ̃(e)), the residual is
    ρ̃(gh) - Ad_{h^-1} π̃(g) - ρ̃(h). The remainder ρ̃ - π̃ must be constant,
    i.e. a left-invariant field; its variation is recorded in the details.
    """
    started = start_clock()
    if multiplicative is None:
        at_e = f.at_identity().to_float()

        def part(g: GroupElement) -> Wedge2:
            return f.at(g) - at_e
    else:
        part = multiplicative.at
    identity = GroupElement.identity(f.n, Mode.FLOAT)
    invariant_e = f.at_identity().to_float() - part(identity)
    worst = 0.0
    drift = 0.0
    for g, h in _sampled_pairs(f, samples, seed):
        defect = f.at(g @ h) - ad2(h.inverse(), part(g)) - f.at(h)
        worst = max(worst, defect.max_abs())
        drift = max(drift, (f.at(g) - part(g) - invariant_e).max_abs())
    return _float_report(
        "affine-covariance", f, worst, tolerance, started, samples,
        details={
            "kind": f.kind.value,
            "invariant_part_drift": drift,
            "invariant_part_constant": drift <= tolerance,
        },
    )


class AffinePrecondition(BaseModel):
    """Conditions under which the pointwise and coset forms of coisotropy agree."""

    ad_invariant: bool  # ad_x ρ̃(e) ∈ h∧g for every x in h
    offset_member: bool  # ρ̃(e) ∈ h∧g

    @property
    def equivalent(self) -> bool:
        """c1 and c2 agree whenever ρ̃(e) itself lies in h∧g."""
        return self.offset_member


def affine_precondition(
    f: BivectorField, h: Subspace, tolerance: float = ALGEBRA_TOLERANCE
) -> AffinePrecondition:
    space = h_wedge_g(h, f.basis)
    at_e = f.at_identity()
    return AffinePrecondition(
        ad_invariant=all(
            space.contains(ad_derivation(x, at_e), tolerance) for x in h.basis()
        ),
        offset_member=space.contains(at_e, tolerance),
    )


def _parse_condition(condition: Union[Condition, str]) -> Condition:
    if isinstance(condition, Condition):
        return condition
    try:
        return Condition(str(condition).lower())
    except ValueError as exc:
        labels = ", ".join(c.value for c in Condition)
        raise RangeError(
            f"Unknown coisotropy condition {condition!r}; use one of {labels}"
        ) from exc


def infinitesimal_defect(f: BivectorField, x: np.ndarray) -> Wedge2:
    """δ(x) + ad_x ρ̃(e), the derivative of ρ̃(h) - Ad_{h^-1} ρ̃(e) along x."""
    return cobracket(x, f.r) + ad_derivation(x, f.at_identity())


def _coisotropy_residuals(
    f: BivectorField,
    h: Subspace,
    condition: Condition,
    space: WedgeSubspace,
    samples: int,
    seed: int,
) -> list[float]:
    basis = f.basis
    if condition is Condition.C4:
        return [space.residual(infinitesimal_defect(f, x)) for x in h.basis()]
    seeds = child_seeds(seed, 3 * samples)
    identity = GroupElement.identity(f.n, Mode.FLOAT)
    special = _special(f)
    in_h = [identity] + [
        sample_subgroup_element(h, basis, seeds[i]) for i in range(samples)
    ]
    others = [identity] + [
        sample_subgroup_element(h, basis, seeds[samples + i]) for i in range(samples)
    ]
    anywhere = [identity] + [
        sample_group_element(f.n, seeds[2 * samples + i], special)
        for i in range(samples)
    ]
    at_e = f.at_identity().to_float()
    residuals = []
    for idx, hh in enumerate(in_h):
        if condition is Condition.C1:
            value = f.at(hh)
        elif condition is Condition.C2:
            value = f.at(hh) - ad2(hh.inverse(), at_e)
        elif condition is Condition.C3:
            k = others[idx]
            value = f.at(k @ hh) - ad2(hh.inverse(), f.at(k))
        else:
            g = anywhere[idx]
            value = f.at(g @ hh) - ad2(hh.inverse(), f.at(g))
        residuals.append(space.residual(value))
    return residuals


def check_coisotropy(
    f: BivectorField,
    h: Subspace,
    condition: Union[Condition, str],
    samples: int = 20,
    seed: int = 0,
    tolerance: Optional[float] = None,
) -> CheckReport:
    """Membership of the coisotropy condition's left-trivialized tensor in h∧g.

    c1: ρ̃(h); c2: ρ̃(h) - Ad_{h^-1} ρ̃(e); c3: ρ̃(kh) - Ad_{h^-1} ρ̃(k) with
    h, k in H; c5: ρ̃(gh) - Ad_{h^-1} ρ̃(g) with g anywhere; c4: δ(x) +
    ad_x ρ̃(e) for basis vectors x of h. c4 is exact when ``f`` and ``h``
    are; the others sample H through exponentials of h.

    Raises:
        RangeError: If the condition label is unknown
    """
    started = start_clock()
    condition = _parse_condition(condition)
    if h.ambient != f.basis.dim:
        raise DimensionMismatchError(
            f"Subspace of dimension {h.ambient} "
            f"for an algebra of dimension {f.basis.dim}"
        )
    space = h_wedge_g(h, f.basis)
    residuals = _coisotropy_residuals(f, h, condition, space, samples, seed)
    exact = condition is Condition.C4 and f.exact and h.exact
    if exact:
        tol = 0.0
    elif tolerance is not None:
        tol = tolerance
    else:
        tol = ALGEBRA_TOLERANCE if condition is Condition.C4 else GROUP_TOLERANCE
    worst = max(residuals, default=0.0)
    logger.debug(
        "coisotropy {} on dim h={} residual={}", condition.value, h.dim, worst
    )
    return CheckReport.from_residual(
        f"coisotropy-{condition.value}",
        worst,
        tol,
        started=started,
        mode=Mode.EXACT if exact else Mode.FLOAT,
        n=f.n,
        samples=len(residuals),
        details={"kind": f.kind.value, "h_dim": h.dim, "condition": condition.value},
    )


def check_equivalence_chain(
    f: BivectorField,
    h: Subspace,
    samples: int = 10,
    seed: int = 0,
    tolerance: Optional[float] = None,
) -> CheckReport:
    """Verdicts of c2, c3 and c5 agree; c1 joins them when ρ̃(e) ∈ h∧g.

    The residual counts disagreements among conditions that are required
    to agree. A c1 disagreement without the precondition is only flagged.
    """
    started = start_clock()
    verdicts = {
        condition.value: check_coisotropy(
            f, h, condition, samples, seed, tolerance
        ).passed
        for condition in (Condition.C1, Condition.C2, Condition.C3, Condition.C5)
    }
    precondition = affine_precondition(f, h)
    chain = {verdicts["c2"], verdicts["c3"], verdicts["c5"]}
    disagreements = len(chain) - 1
    flags = []
    if verdicts["c1"] != verdicts["c2"]:
        if precondition.equivalent:
            disagreements += 1
        else:
            flags.append("c1 diverges from c2 without rho(e) in h^g")
    return CheckReport.from_residual(
        "coisotropy-equivalence",
        disagreements,
        0.0,
        started=started,
        mode=Mode.FLOAT,
        n=f.n,
        samples=samples,
        details={
            "verdicts": verdicts,
            "precondition": precondition.model_dump(),
            "membership_tolerance": tolerance,
        },
        flags=flags,
    )


def check_theorem3(
    h: Subspace,
    sigma: GroupElement,
    samples: int = 20,
    seed: int = 0,
    algebra: Algebra = Algebra.SU,
    tolerance: float = GROUP_TOLERANCE,
    label: Optional[int] = None,
) -> CheckReport:
    """Ad_σ H is π-coisotropic exactly when H is π_σ-coisotropic.

    For matched samples g in G and h in H the two coset conditions are

    * H under π_σ: π̃_σ(g h) - Ad_{h^-1} π̃_σ(g) ∈ h∧g
    * Ad_σ H under π: π̃(g' k) - Ad_{k^-1} π̃(g') ∈ Ad_σ h ∧ g

    with g' = g σ^-1 and k = σ h σ^-1. The report passes when the two
    verdicts agree; its residual is the number of disagreeing samples.

    Raises:
        PreconditionError: If h is not closed under the bracket
    """
    started = start_clock()
    n = sigma.n
    basis = basis_index(n, algebra)
    if not is_subalgebra(h, basis):
        raise PreconditionError("Theorem 3 needs a Lie subalgebra h")
    pi = BivectorField.standard(n, algebra)
    sigma_f = sigma.to_float()
    translated = BivectorField.translated(pi, sigma_f)
    h_float = h.to_float()
    moved = conjugate_subspace(sigma_f, h_float, basis)
    space_h = h_wedge_g(h_float, basis)
    space_moved = h_wedge_g(moved, basis)
    seeds = child_seeds(seed, 2 * samples)
    special = algebra is Algebra.SU
    sigma_inv = sigma_f.inverse()
    disagreements = 0
    worst_star = 0.0
    worst_starstar = 0.0
    for i in range(samples):
        g = sample_group_element(n, seeds[2 * i], special)
        hh = sample_subgroup_element(h_float, basis, seeds[2 * i + 1])
        starstar = space_h.residual(
            translated.at(g @ hh) - ad2(hh.inverse(), translated.at(g))
        )
        g_moved = g @ sigma_inv
        k = sigma_f @ hh @ sigma_inv
        star = space_moved.residual(
            pi.at(g_moved @ k) - ad2(k.inverse(), pi.at(g_moved))
        )
        worst_star = max(worst_star, star)
        worst_starstar = max(worst_starstar, starstar)
        if (star <= tolerance) != (starstar <= tolerance):
            disagreements += 1
    return CheckReport(
        claim="theorem3",
        mode=Mode.FLOAT,
        n=n,
        m_or_k=label,
        samples=samples,
        max_residual=float(disagreements),
        passed=disagreements == 0,
        tolerance=0.0,
        millis=elapsed_millis(started),
        details={
            "conjugate_coisotropic": worst_star <= tolerance,
            "translated_coisotropic": worst_starstar <= tolerance,
            "max_conjugate_residual": worst_star,
            "max_translated_residual": worst_starstar,
            "membership_tolerance": tolerance,
        },
    )


class HomogeneousAction(Protocol):
    """A left action of G on a matrix-realized manifold M."""

    def point(self, g: GroupElement) -> np.ndarray: ...

    def push_matrix(self, k: GroupElement) -> np.ndarray: ...

    def orbit_differential(self, k: GroupElement, point: np.ndarray) -> np.ndarray: ...


def check_covariance(
    f: BivectorField,
    action: HomogeneousAction,
    tau: Callable[[GroupElement], np.ndarray],
    samples: int = 50,
    seed: int = 0,
    tolerance: float = GROUP_TOLERANCE,
    label: Optional[int] = None,
) -> CheckReport:
    """τ(k·x) = (k)_* τ(x) + (μ_x)_* π(k) at sampled k in G and points x = [g].

    ``tau`` maps a representative g of x to the matrix of τ(x) in the
    realified coordinates used by ``action``; ``f`` must be multiplicative.
    """
    started = start_clock()
    if f.kind is not FieldKind.MULTIPLICATIVE:
        raise PreconditionError("Covariance is stated for a multiplicative structure")
    worst = 0.0
    for g, k in _sampled_pairs(f, samples, seed):
        point = action.point(g)
        push = action.push_matrix(k)
        orbit = action.orbit_differential(k, point)
        pi_k = to_float_array(f.at(k).matrix)
        expected = push @ tau(g) @ push.T + orbit @ pi_k @ orbit.T
        actual = tau(k @ g)
        scale = max(1.0, float(np.max(np.abs(expected))))
        worst = max(worst, float(np.max(np.abs(actual - expected))) / scale)
    return _float_report(
        "covariance", f, worst, tolerance, started, samples, m_or_k=label,
        details={"seed": seed},
    )


def check_intersection_coisotropic(n: int, k: int, l: int, c) -> CheckReport:
    """𝔨_l ∩ Ad_{σ(c,k)} 𝔨_k passes the infinitesimal condition exactly.

    𝔨_l is a Poisson–Lie subalgebra and Ad_σ 𝔨_k is coisotropic, so their
    intersection is coisotropic for the standard structure on SU(n).
    """
    started = start_clock()
    c = parse_rational(c)
    basis = basis_index(n, Algebra.SU)
    k_l = build_block_subalgebra(n, l, BlockVariant.SU_BLOCK)
    moved = conjugate_subspace(
        build_sigma(c, k, n), build_block_subalgebra(n, k, BlockVariant.SU_BLOCK), basis
    )
    meet = k_l.intersection(moved)
    report = check_coisotropy(BivectorField.standard(n), meet, Condition.C4)
    return report.model_copy(
        update={
            "claim": "intersection-coisotropic",
            "m_or_k": k,
            "c": str(c),
            "millis": elapsed_millis(started),
            "details": {**report.details, "l": l, "intersection_dim": meet.dim},
        }
    )

