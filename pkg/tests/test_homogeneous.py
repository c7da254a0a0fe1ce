"""Tests for Grassmannian quotients, leaves and Schubert cells."""

import csv
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from twistleaf.enums import Mode
from twistleaf.exceptions import DimensionMismatchError, PreconditionError, RangeError
from twistleaf.homogeneous import (
    GrassmannAction,
    GrassPoint,
    SchubertSymbol,
    bruhat_leq,
    bruhat_poset,
    check_bruhat_monotonicity,
    check_dimension_claims,
    check_generic_leaf,
    check_grassmann_covariance,
    check_leaf_equation,
    check_poisson_diffeo,
    check_quotient_descent,
    check_standard_images,
    check_symmetry_lemma,
    check_torus_leaves,
    embed_sphere,
    expected_codimension,
    intersection_dims,
    last_block_projector,
    leaf_rank,
    leaf_residual,
    project,
    realify,
    realify_operator,
    schubert_membership,
    schubert_symbols,
    standard_image_point,
    standard_image_symbol,
    survey_leaves,
    torus_intersection_dim,
    write_leaf_csv,
)
from twistleaf.lie import GroupElement, sample_group_element
from twistleaf.poisson import BivectorField


class TestGrassPoint(unittest.TestCase):
    """Test projectors and their frames."""

    def test_identity_projects_to_last_coordinates(self):
        """Test that e maps to the span of the last k basis vectors."""
        point = project(GroupElement.identity(4), 2)
        assert point.is_valid()
        np.testing.assert_allclose(point.matrix, last_block_projector(4, 2))
        frame = point.frame()
        assert frame.shape == (4, 2)
        np.testing.assert_allclose(np.abs(frame[:2]), 0, atol=1e-12)

    def test_random_point_is_projector(self):
        """Test hermiticity, idempotence and trace at a random point."""
        point = project(sample_group_element(4, 2), 1)
        residuals = point.residuals()
        assert max(residuals.values()) < 1e-10

    def test_point_hash_is_stable(self):
        """Test that equal points hash equally."""
        g = sample_group_element(3, 5)
        assert project(g, 1).point_hash() == project(g, 1).point_hash()

    def test_bad_shapes(self):
        """Test that non-square matrices and bad k are rejected."""
        with self.assertRaises(DimensionMismatchError):
            GrassPoint(np.zeros((2, 3)), 1)
        with self.assertRaises(RangeError):
            GrassPoint(np.eye(3), 4)
        with self.assertRaises(RangeError):
            last_block_projector(3, 3)

    def test_realify_operator(self):
        """Test realify(A v) = realify_operator(A) realify(v)."""
        rng = np.random.default_rng(0)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        np.testing.assert_allclose(realify(a @ v), realify_operator(a) @ realify(v))


class TestLeafEquations(unittest.TestCase):
    """Test the quadric leaf equations of CP^{n-1}."""

    def test_sphere_embedding_lies_on_leaf(self):
        """Test that the embedded sphere satisfies the equation with 1 - c."""
        v = np.array([1.0, 1.0j, -1.0]) / np.sqrt(3)
        point = embed_sphere(v, "1/3")
        self.assertAlmostEqual(leaf_residual(point, 1, "2/3"), 0.0, places=12)

    def test_sphere_needs_unit_vector(self):
        """Test that non-unit vectors and c outside (0, 1) are rejected."""
        with self.assertRaises(PreconditionError):
            embed_sphere([1.0, 1.0], "1/3")
        with self.assertRaises(RangeError):
            embed_sphere([1.0, 0.0], 0)

    def test_leaf_residual_errors(self):
        """Test the preconditions of the leaf equation."""
        line = project(GroupElement.identity(3), 1)
        with self.assertRaises(PreconditionError):
            leaf_residual(line, 1, 1)
        with self.assertRaises(PreconditionError):
            leaf_residual(project(GroupElement.identity(3), 2), 1, "1/3")
        with self.assertRaises(RangeError):
            leaf_residual(line, 3, "1/3")

    def test_leaf_equation_check(self):
        """Test images of K_k under the projective twist."""
        for k in (1, 2):
            report = check_leaf_equation(3, "1/3", k=k, samples=10, seed=1)
            assert report.passed, report.details
            assert report.details["off_image_median"] > 0


class TestSchubertCells(unittest.TestCase):
    """Test symbols, the Bruhat order and cell membership."""

    def test_symbol_validation(self):
        """Test that symbols outside the box or decreasing are rejected."""
        SchubertSymbol(n=4, parts=(0, 2))
        for parts in ((2, 1), (0, 3), (0, 0, 0, 0)):
            with self.assertRaises(ValidationError):
                SchubertSymbol(n=4, parts=parts)

    def test_symbol_count(self):
        """Test that there are C(n, k) symbols."""
        assert len(list(schubert_symbols(5, 2))) == 10
        assert len(list(schubert_symbols(4, 1))) == 4

    def test_poset(self):
        """Test the covering relations of G_2^4."""
        poset = bruhat_poset(4, 2)
        assert poset.number_of_nodes() == 6
        assert poset.number_of_edges() == 6

    def test_bruhat_leq_mismatch(self):
        """Test that symbols of different Grassmannians do not compare."""
        with self.assertRaises(DimensionMismatchError):
            bruhat_leq(
                SchubertSymbol(n=4, parts=(0,)), SchubertSymbol(n=4, parts=(0, 0))
            )

    def test_standard_symbols(self):
        """Test the cell of the image of K_l for l below, at and above k."""
        assert standard_image_symbol(1, 2, 4).parts == (0, 2)
        assert standard_image_symbol(2, 2, 4).parts == (0, 0)
        assert standard_image_symbol(3, 2, 4).parts == (1, 1)

    def test_identity_in_smallest_cell(self):
        """Test that the base point lies in [0, ..., 0]."""
        for k in (1, 2, 3):
            point = project(GroupElement.identity(4), k)
            assert intersection_dims(point) == [min(k, d) for d in range(5)]
            assert schubert_membership(point, SchubertSymbol(n=4, parts=(0,) * k))

    def test_membership_mismatch(self):
        """Test that a symbol of another Grassmannian is rejected."""
        point = standard_image_point(1, 1, 4, 3)
        with self.assertRaises(RangeError):
            schubert_membership(point, SchubertSymbol(n=4, parts=(0, 0)))

    def test_monotonicity(self):
        """Test that membership propagates up the Bruhat order."""
        report = check_bruhat_monotonicity(4, 2, samples=3, seed=2)
        assert report.passed
        assert report.details["covering_relations"] == 6

    def test_standard_images(self):
        """Test sampled images of K_l against their cells."""
        report = check_standard_images(4, 2, samples=5, seed=3)
        assert report.passed, report.details["failures"]


class TestLeaves(unittest.TestCase):
    """Test leaf ranks of the projected bivectors."""

    def test_base_point_is_a_leaf(self):
        """Test that the image of e is a zero-dimensional leaf."""
        f = BivectorField.standard(3, mode=Mode.FLOAT)
        assert leaf_rank(GroupElement.identity(3, Mode.FLOAT), f, 1) == 0

    def test_generic_leaf(self):
        """Test that the generic leaf of CP^2 is open."""
        report = check_generic_leaf(3, 1, samples=6, seed=4)
        assert report.passed
        assert report.details["majority_rank"] == 4

    def test_torus_leaves(self):
        """Test torus points and generic points of the twisted quotient."""
        report = check_torus_leaves(3, 1, "1/3", samples=4, seed=5)
        assert report.passed, report.details
        assert report.details["torus_ranks"] == [0]

    def test_descent(self):
        """Test that the pushed bivector does not depend on the representative."""
        assert check_quotient_descent(3, 1, "1/3", samples=4, seed=6).passed

    def test_poisson_diffeo(self):
        """Test the matching of the two twisted quotients."""
        report = check_poisson_diffeo(3, 1, "1/3", samples=4, seed=7)
        assert report.passed
        assert report.flags == []

    def test_covariance(self):
        """Test covariance of the twisted quotient with a zero-field control."""
        report = check_grassmann_covariance(3, 1, "1/3", samples=4, seed=8)
        assert report.passed
        assert report.details["zero_field_residual"] > 0

    def test_action_matches_projection(self):
        """Test that the untwisted action agrees with project."""
        g = sample_group_element(3, 9)
        action = GrassmannAction(3, 1)
        np.testing.assert_allclose(action.point(g), project(g, 1).matrix, atol=1e-12)

    def test_survey_and_csv(self):
        """Test the leaf survey rows and their CSV export."""
        rows = survey_leaves(3, 1, "1/3", samples=3, seed=10)
        assert len(rows) == 3
        assert all(row.rank % 2 == 0 for row in rows)
        with tempfile.TemporaryDirectory() as tmp:
            path = write_leaf_csv(rows, Path(tmp) / "leaves" / "survey.csv")
            with path.open(encoding="utf-8") as handle:
                read = list(csv.DictReader(handle))
        assert len(read) == 3
        assert read[0]["c"] == "1/3"
        assert int(read[0]["rank"]) == rows[0].rank


class TestDimensionClaims(unittest.TestCase):
    """Test image dimensions of K_l in the twisted quotient."""

    def test_expected_codimension(self):
        """Test the three regimes of the codimension."""
        assert expected_codimension(5, 1, 1) == 1
        assert expected_codimension(5, 2, 4) == 1
        assert expected_codimension(6, 2, 3) == 4

    def test_claims(self):
        """Test the exact dimension claims for projective spaces."""
        for n, k, l in ((4, 1, 1), (5, 1, 2)):
            report = check_dimension_claims(n, k, l, "1/3")
            assert report.passed, report.details["mismatches"]

    def test_torus_intersection(self):
        """Test dim(t ∩ Ad_σ k_k) = n - k - 1."""
        assert torus_intersection_dim(4, 1, "1/3") == 2
        assert torus_intersection_dim(4, 2, "1/3") == 1

    def test_symmetry_lemma(self):
        """Test the l <-> n - l symmetry up to the flip J."""
        report = check_symmetry_lemma(4, 1, 1, "1/3")
        assert report.passed
        assert report.details["l"] == 1

    @pytest.mark.slow
    def test_claims_sweep(self):
        """Test the dimension claims and the symmetry for n in 4..6."""
        for n in (4, 5, 6):
            for k in range(1, n // 2 + 1):
                for l in range(1, n):
                    for c in ("1/3", "1/2"):
                        with self.subTest(n=n, k=k, l=l, c=c):
                            report = check_dimension_claims(n, k, l, c)
                            assert report.passed, report.details["mismatches"]
                            assert check_symmetry_lemma(n, k, l, c).passed


if __name__ == "__main__":
    unittest.main()
