"""Tests for exact scalars over the quadratic tower."""

import unittest
from fractions import Fraction

import numpy as np
import pytest

from twistleaf.exceptions import ParameterMismatchError, RangeError
from twistleaf.scalar import (
    I,
    ComplexScalar,
    Tower,
    TowerScalar,
    get_tower,
    is_exact,
    is_zero,
    parse_rational,
    ring_tag,
    scalar_to_json,
    tower_is_zero,
)


class TestParseRational(unittest.TestCase):
    """Test rational literal parsing."""

    def test_fraction_literals(self):
        """Test that p/q literals parse to reduced fractions."""
        assert parse_rational("1/3") == Fraction(1, 3)
        assert parse_rational(" -10/14 ") == Fraction(-5, 7)
        assert parse_rational("2") == Fraction(2)
        assert parse_rational(Fraction(2, 5)) == Fraction(2, 5)

    def test_rejects_decimals_and_garbage(self):
        """Test that decimals, zero denominators and words are range errors."""
        for text in ("0.5", "1e-3", "1/0", "abc", ""):
            with self.assertRaises(RangeError):
                parse_rational(text)

    def test_rejects_booleans(self):
        """Test that a bool is not mistaken for an integer."""
        with self.assertRaises(RangeError):
            parse_rational(True)


class TestTower(unittest.TestCase):
    """Test tower construction and freeness."""

    def test_free_tower(self):
        """Test that c = 1/3 gives four independent radicals."""
        assert Tower(Fraction(1, 3)).is_free

    def test_non_free_towers(self):
        """Test the three ways a tower can degenerate."""
        assert not Tower(Fraction(1, 2)).is_free  # c(1-c) = 1/4
        assert not Tower(Fraction(1, 4)).is_free  # c = 1/4
        assert not Tower(Fraction(3, 4)).is_free  # 1-c = 1/4

    def test_out_of_range(self):
        """Test that c outside [0, 1] is rejected."""
        with self.assertRaises(RangeError):
            Tower(2)
        with self.assertRaises(RangeError):
            Tower(Fraction(-1, 3))

    def test_shared_instances(self):
        """Test that get_tower caches by parameter."""
        assert get_tower(Fraction(1, 3)) is get_tower(Fraction(1, 3))
        assert get_tower(Fraction(1, 3)).complement() == Tower(Fraction(2, 3))


class TestTowerScalar(unittest.TestCase):
    """Test arithmetic in Q(sqrt(c), sqrt(1-c))."""

    def setUp(self):
        self.tower = get_tower(Fraction(1, 3))
        self.root_c = TowerScalar.sqrt_c(self.tower)
        self.root_rest = TowerScalar.sqrt_complement(self.tower)

    def test_squares_of_radicals(self):
        """Test that the radicals square to c and 1 - c."""
        assert self.root_c * self.root_c == Fraction(1, 3)
        assert self.root_rest * self.root_rest == Fraction(2, 3)
        assert (self.root_c * self.root_c).is_rational

    def test_product_radical(self):
        """Test sqrt(c) sqrt(1-c) = sqrt(c(1-c))."""
        assert self.root_c * self.root_rest == TowerScalar.sqrt_product(self.tower)

    def test_unit_circle_identity(self):
        """Test c + (1 - c) = 1 through the radicals."""
        total = self.root_c**2 + self.root_rest**2
        assert total == 1

    def test_inverse(self):
        """Test that a generic element times its inverse is one."""
        x = TowerScalar(self.tower, 1, 2, -1, 3)
        assert x * x.inverse() == 1
        assert x / x == 1
        assert 1 / x == x.inverse()
        assert x ** -2 * x ** 2 == 1

    def test_norm_is_rational_and_nonzero(self):
        """Test that the formal norm of a nonzero element is a nonzero rational."""
        x = TowerScalar(self.tower, 1, 1, 0, 0)
        norm = x.norm()
        assert isinstance(norm, Fraction)
        assert norm != 0

    def test_zero_inverse_raises(self):
        """Test that inverting zero raises ZeroDivisionError."""
        with self.assertRaises(ZeroDivisionError):
            TowerScalar(self.tower).inverse()

    def test_mixed_parameters_raise(self):
        """Test that scalars of different towers do not combine."""
        other = TowerScalar.sqrt_c(Fraction(2, 5))
        with self.assertRaises(ParameterMismatchError):
            _ = self.root_c + other
        assert self.root_c != other

    def test_rational_coercion(self):
        """Test arithmetic with plain fractions and integers."""
        x = self.root_c + 1
        assert x - self.root_c == 1
        assert 2 * x == x + x
        assert 1 - x == -self.root_c

    def test_float_value(self):
        """Test the float evaluation of a radical."""
        self.assertAlmostEqual(float(self.root_c), (1 / 3) ** 0.5, places=14)
        product = float(self.root_c * self.root_rest)
        self.assertAlmostEqual(product, (2 / 9) ** 0.5, places=14)

    def test_high_precision_evaluation(self):
        """Test that evaluate agrees with the float value."""
        value = TowerScalar(self.tower, 1, 1, 1, 1)
        self.assertAlmostEqual(float(value.evaluate()), float(value), places=12)

    def test_retower(self):
        """Test that moving to 1 - c swaps the two radicals."""
        moved = self.root_c.retower(Fraction(2, 3))
        assert moved == TowerScalar.sqrt_complement(Fraction(2, 3))
        self.assertAlmostEqual(float(moved), float(self.root_c), places=14)

    def test_retower_rejects_unrelated_tower(self):
        """Test that only c and 1 - c share a field."""
        with self.assertRaises(ParameterMismatchError):
            self.root_c.retower(Fraction(1, 5))


class TestNonFreeTower(unittest.TestCase):
    """Test canonical reduction on degenerate towers."""

    def test_half_identifies_radicals(self):
        """Test that sqrt(c) and sqrt(1-c) coincide at c = 1/2."""
        tower = get_tower(Fraction(1, 2))
        difference = TowerScalar.sqrt_c(tower) - TowerScalar.sqrt_complement(tower)
        assert difference.is_zero()
        assert tower_is_zero(difference)
        assert TowerScalar.sqrt_product(tower) == Fraction(1, 2)

    def test_rational_square_root(self):
        """Test that sqrt(c) is rational at c = 1/4."""
        assert TowerScalar.sqrt_c(Fraction(1, 4)) == Fraction(1, 2)

    def test_numeric_zero_agrees(self):
        """Test the high-precision zero test on a reduced zero."""
        tower = get_tower(Fraction(1, 2))
        x = TowerScalar.sqrt_c(tower) * TowerScalar.sqrt_c(tower) - Fraction(1, 2)
        assert x.numeric_is_zero()


class TestComplexScalar(unittest.TestCase):
    """Test exact complex numbers."""

    def test_imaginary_unit(self):
        """Test i * i = -1."""
        assert I * I == -1
        assert (I * I).is_zero() is False

    def test_conjugate_and_modulus(self):
        """Test conjugation and |z|^2."""
        z = ComplexScalar(3, 4)
        assert z.conjugate() == ComplexScalar(3, -4)
        assert z.abs2() == 25
        assert z * z.inverse() == 1

    def test_tower_entries(self):
        """Test complex numbers with tower-valued parts."""
        root = TowerScalar.sqrt_c(Fraction(1, 3))
        z = ComplexScalar(root, root)
        assert z.abs2() == Fraction(2, 3)
        self.assertAlmostEqual(abs(complex(z)) ** 2, 2 / 3, places=14)


class TestScalarHelpers(unittest.TestCase):
    """Test the dispatching helpers."""

    def test_is_zero_tolerance(self):
        """Test that the tolerance applies to floats only."""
        assert is_zero(1e-13, 1e-12)
        assert not is_zero(1e-11, 1e-12)
        assert is_zero(Fraction(0))

    def test_is_exact(self):
        """Test exactness detection."""
        assert is_exact(Fraction(1, 2))
        assert is_exact(ComplexScalar(1, 0))
        assert not is_exact(0.5)

    def test_json_rendering(self):
        """Test ring tags and JSON forms."""
        root = TowerScalar.sqrt_c(Fraction(1, 3))
        assert scalar_to_json(Fraction(1, 3)) == "1/3"
        assert scalar_to_json(root) == {"c": "1/3", "parts": ["0", "1", "0", "0"]}
        assert scalar_to_json(0.25) == 0.25
        assert ring_tag(root) == "tower"
        assert ring_tag(root * root) == "rational"
        assert ring_tag(1.0) == "float"


def _random_scalar(rng, tower):
    numerators = rng.integers(-9, 10, size=4)
    denominators = rng.integers(1, 7, size=4)
    parts = [Fraction(int(a), int(b)) for a, b in zip(numerators, denominators)]
    if not any(parts):
        parts[0] = Fraction(1)
    return TowerScalar(tower, *parts)


def _random_free_towers(rng, count):
    towers = []
    while len(towers) < count:
        q = int(rng.integers(3, 60))
        tower = get_tower(Fraction(int(rng.integers(1, q)), q))
        if tower.is_free:
            towers.append(tower)
    return towers


@pytest.mark.usefixtures("seeded")
class TestRingAxioms(unittest.TestCase):
    """Test the field operations on random exact elements."""

    def test_random_triples(self):
        """Test associativity, commutativity and distributivity on 1000 triples."""
        rng = np.random.default_rng(self.seed)
        towers = [get_tower(Fraction(c)) for c in ("1/3", "2/5", "1/2", "1/4")]
        for i in range(1000):
            tower = towers[i % len(towers)]
            x, y, z = (_random_scalar(rng, tower) for _ in range(3))
            assert (x * y) * z - x * (y * z) == 0
            assert (x + y) + z == x + (y + z)
            assert x * (y + z) - (x * y + x * z) == 0
            assert x * y == y * x and x + y == y + x

    def test_exact_and_float_zero_agree(self):
        """Test that the exact zero test matches float evaluation on 100 random c."""
        rng = np.random.default_rng(self.seed)
        for tower in _random_free_towers(rng, 100):
            x = _random_scalar(rng, tower)
            y = _random_scalar(rng, tower)
            assert not tower_is_zero(x)
            assert abs(float(x)) > 1e-12
            zero = (x + y) * (x - y) - (x * x - y * y)
            assert tower_is_zero(zero)
            fx, fy = float(x), float(y)
            assert abs((fx + fy) * (fx - fy) - (fx * fx - fy * fy)) < 1e-12
            assert tower_is_zero(x * x.inverse() - 1)
            self.assertAlmostEqual(float(x * y), fx * fy, places=9)


if __name__ == "__main__":
    unittest.main()
