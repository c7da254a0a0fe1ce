"""Tests for bivector fields, coisotropy and the twisting theorem."""

import unittest
from fractions import Fraction
from unittest.mock import patch

import numpy as np

from twistleaf.enums import Algebra, BlockVariant, Condition, FieldKind, Mode
from twistleaf.exceptions import DimensionMismatchError, PreconditionError, RangeError
from twistleaf.lie import (
    Subspace,
    antidiagonal,
    basis_index,
    build_block_subalgebra,
    build_sigma,
    conjugate_subspace,
    sample_group_element,
)
from twistleaf.poisson import (
    BivectorField,
    affine_precondition,
    check_affine,
    check_affine_covariance,
    check_coisotropy,
    check_covariance,
    check_equivalence_chain,
    check_intersection_coisotropic,
    check_lemma1_invariant,
    check_multiplicative,
    check_theorem3,
)
from twistleaf.wedge import ad2, build_r, cobracket


class TestBivectorField(unittest.TestCase):
    """Test the three closed forms of left-trivialized fields."""

    def test_multiplicative_vanishes_at_identity(self):
        """Test π̃(e) = 0."""
        f = BivectorField.standard(3)
        assert f.at_identity().is_zero()
        assert f.kind is FieldKind.MULTIPLICATIVE

    def test_exact_multiplicativity(self):
        """Test π̃(gh) = Ad_{h^-1} π̃(g) + π̃(h) on exact elements."""
        f = BivectorField.standard(2)
        g = build_sigma("1/3", 1, 2)
        h = g @ g
        gap = f.at(g @ h) - ad2(h.inverse(), f.at(g)) - f.at(h)
        assert gap.is_zero()

    def test_flip_doubles_r(self):
        """Test π̃(J) = 2r since Ad_J r = -r."""
        f = BivectorField.standard(2, Algebra.U)
        flip = antidiagonal(2)
        assert (f.at(flip) - f.r * Fraction(2)).is_zero()

    def test_affine_offset(self):
        """Test that an affine field takes its offset at the identity."""
        r = build_r(3)
        offset = r * Fraction(1, 3)
        f = BivectorField.affine(r, offset)
        assert (f.at_identity() - offset).is_zero()
        assert f.exact

    def test_affine_basis_mismatch(self):
        """Test that the offset must live over the same algebra."""
        with self.assertRaises(DimensionMismatchError):
            BivectorField.affine(build_r(3), build_r(2))

    def test_translated_field(self):
        """Test ρ_σ(g) = π̃(g) + Ad_{σ^-1} r - r."""
        f = BivectorField.standard(2)
        sigma = build_sigma("2/5", 1, 2)
        translated = BivectorField.translated(f, sigma)
        expected = ad2(sigma.inverse(), f.r) - f.r
        assert (translated.at_identity() - expected).is_zero()
        g = sigma @ sigma
        assert (translated.multiplicative_part(g) - f.at(g)).is_zero()

    def test_translated_size_mismatch(self):
        """Test that σ must match n."""
        with self.assertRaises(DimensionMismatchError):
            BivectorField.translated(
                BivectorField.standard(2), build_sigma("1/3", 1, 3)
            )

    def test_float_evaluation_of_exact_field(self):
        """Test that an exact field evaluates at float elements."""
        f = BivectorField.standard(3)
        value = f.at(sample_group_element(3, 5))
        assert value.mode is Mode.FLOAT
        assert value.is_antisymmetric()


class TestSampledIdentities(unittest.TestCase):
    """Test the sampled group identities."""

    def test_multiplicative(self):
        """Test the multiplicativity identity at random pairs."""
        report = check_multiplicative(BivectorField.standard(3), samples=5, seed=1)
        assert report.passed
        assert report.max_residual < 1e-9

    def test_affine_with_any_offset(self):
        """Test that adding a constant keeps the affine identity."""
        r = build_r(3)
        f = BivectorField.affine(r, r * Fraction(3, 7))
        assert check_affine(f, samples=5, seed=2).passed

    def test_translated_is_affine(self):
        """Test that a σ-translate satisfies the affine identity."""
        sigma = build_sigma("1/3", 1, 3)
        f = BivectorField.translated(BivectorField.standard(3), sigma)
        assert check_affine(f, samples=5, seed=3).passed

    def test_translation_invariant(self):
        """Test that translation keeps the multiplicative part on powers of σ."""
        report = check_lemma1_invariant(
            BivectorField.standard(2), build_sigma("1/3", 1, 2), samples=5, seed=4
        )
        assert report.passed
        assert report.details["exact_points"] == 7
        assert report.details["exact_residual"] == 0.0

    def test_affine_covariance(self):
        """Test covariance of translated fields for the multiplicative action."""
        standard = BivectorField.standard(3)
        translated = BivectorField.translated(standard, build_sigma("1/3", 1, 3))
        report = check_affine_covariance(
            translated, samples=5, seed=5, multiplicative=standard
        )
        assert report.passed
        assert report.details["invariant_part_constant"]


class TestCoisotropy(unittest.TestCase):
    """Test the coisotropy conditions."""

    def setUp(self):
        self.f = BivectorField.standard(3)
        self.basis = basis_index(3)
        self.k = build_block_subalgebra(3, 1, BlockVariant.SU_BLOCK)

    def test_poisson_subgroup_c4_exact(self):
        """Test the infinitesimal condition on a block subalgebra, exactly."""
        report = check_coisotropy(self.f, self.k, Condition.C4)
        assert report.passed
        assert report.mode is Mode.EXACT
        assert report.max_residual == 0.0

    def test_twisted_block_c4_exact(self):
        """Test that Ad_σ s(u(n-m) x u(m)) is coisotropic."""
        h = build_block_subalgebra(3, 2, BlockVariant.SU_BLOCK)
        moved = conjugate_subspace(build_sigma("1/3", 1, 3), h, self.basis)
        assert check_coisotropy(self.f, moved, "c4").passed

    def test_random_rotation_fails(self):
        """Test that a generic conjugate of the block is not coisotropic."""
        f = BivectorField.standard(3, mode=Mode.FLOAT)
        g = sample_group_element(3, 9)
        moved = conjugate_subspace(g, self.k.to_float(), self.basis)
        report = check_coisotropy(f, moved, "C4")
        assert not report.passed
        assert report.mode is Mode.FLOAT

    def test_group_conditions(self):
        """Test the sampled conditions on a Poisson subgroup."""
        for condition in ("c1", "c2", "c3", "c5"):
            report = check_coisotropy(self.f, self.k, condition, samples=4, seed=6)
            assert report.passed, condition
            assert report.claim == f"coisotropy-{condition}"

    def test_unknown_condition(self):
        """Test that an unknown label is a range error."""
        with self.assertRaises(RangeError):
            check_coisotropy(self.f, self.k, "c9")

    def test_subspace_size_mismatch(self):
        """Test that h must live in the field's algebra."""
        with self.assertRaises(DimensionMismatchError):
            check_coisotropy(self.f, Subspace(3, []), Condition.C1)

    def test_equivalence_chain(self):
        """Test that c1, c2, c3 and c5 agree on a Poisson subgroup."""
        report = check_equivalence_chain(self.f, self.k, samples=4, seed=7)
        assert report.passed
        assert set(report.details["verdicts"]) == {"c1", "c2", "c3", "c5"}

    def test_precondition(self):
        """Test the offset-membership precondition."""
        assert affine_precondition(self.f, self.k).equivalent
        r = build_r(3)
        offset = BivectorField.affine(r, r)
        assert not affine_precondition(offset, self.k).offset_member

    def test_intersection_coisotropic(self):
        """Test 𝔨_l ∩ Ad_σ 𝔨_k for a few (k, l)."""
        for k, l in ((1, 1), (1, 2), (2, 1)):
            report = check_intersection_coisotropic(4, k, l, "1/3")
            assert report.passed, (k, l)
            assert report.claim == "intersection-coisotropic"
            assert report.details["l"] == l

    def test_c4_uses_cobracket(self):
        """Test that c4 evaluates the cobracket once per basis vector of h."""
        with patch("twistleaf.poisson.cobracket", wraps=cobracket) as spy:
            check_coisotropy(self.f, self.k, Condition.C4)
        assert spy.call_count == self.k.dim


class TestTheorem3(unittest.TestCase):
    """Test the equivalence of the two coisotropy verdicts."""

    def test_twist_matches(self):
        """Test that both sides pass for σ(c, m)."""
        h = build_block_subalgebra(3, 1, BlockVariant.SU_BLOCK)
        report = check_theorem3(h, build_sigma("1/3", 1, 3), samples=4, seed=8, label=1)
        assert report.passed
        assert report.details["conjugate_coisotropic"]
        assert report.details["translated_coisotropic"]
        assert report.m_or_k == 1

    def test_random_twist_agrees(self):
        """Test that the verdicts agree for a random σ."""
        h = build_block_subalgebra(3, 1, BlockVariant.SU_BLOCK)
        report = check_theorem3(h, sample_group_element(3, 10), samples=4, seed=8)
        assert report.passed
        assert not report.details["conjugate_coisotropic"]

    def test_needs_subalgebra(self):
        """Test that a non-closed subspace is rejected."""
        basis = basis_index(3)
        units = [basis.unit(basis.plus(1, 2)), basis.unit(basis.minus(1, 3))]
        line_pair = Subspace(basis.dim, units)
        with self.assertRaises(PreconditionError):
            check_theorem3(line_pair, build_sigma("1/3", 1, 3))


class TestCovariance(unittest.TestCase):
    """Test the generic covariance check."""

    def test_requires_multiplicative(self):
        """Test that affine fields are rejected."""
        r = build_r(2)
        f = BivectorField.affine(r, r)
        with self.assertRaises(PreconditionError):
            check_covariance(f, action=None, tau=lambda g: np.zeros((1, 1)))

    def test_identity_field_is_covariant_on_a_point(self):
        """Test covariance on the trivial action of SU(n) on a point."""

        class PointAction:
            def point(self, g):
                return np.zeros((1, 1))

            def push_matrix(self, k):
                return np.eye(1)

            def orbit_differential(self, k, point):
                return np.zeros((1, 3))

        f = BivectorField.standard(2, mode=Mode.FLOAT)
        report = check_covariance(
            f, PointAction(), lambda g: np.zeros((1, 1)), samples=3
        )
        assert report.passed
        assert report.claim == "covariance"


if __name__ == "__main__":
    unittest.main()
