"""Exact scalars over Q and the tower Q(sqrt(c), sqrt(1-c)), plus float helpers."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC
from typing import Optional, Union

import mpmath
from loguru import logger

from .exceptions import ParameterMismatchError, RangeError

Rational = Fraction
RationalLike = Union[int, Fraction]


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Parse a rational literal such as ``"1/3"``, ``"2"`` or ``"-5/7"``.

    Args:
        text: String literal, int or Fraction

    Returns:
        The value in canonical reduced form

    Raises:
        RangeError: If the literal is not a finite rational number
    """
    if isinstance(text, (int, Fraction)) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise RangeError(f"Cannot parse rational from {text!r}")
    literal = text.strip()
    if not literal or "." in literal or "e" in literal.lower():
        raise RangeError(f"Rational literals must look like 'p/q', got {text!r}")
    try:
        return Fraction(literal)
    except (ValueError, ZeroDivisionError) as exc:
        raise RangeError(f"Invalid rational literal {text!r}: {exc}") from exc


def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    """Return the rational square root of ``q`` or None if it is irrational."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


class Tower:
    """The field Q(sqrt(c), sqrt(1-c)) for a rational 0 <= c <= 1.

    When c, 1-c or c(1-c) is a rational square the four-element basis
    {1, sqrt(c), sqrt(1-c), sqrt(c(1-c))} is dependent; such towers are
    "non-free" and every scalar is kept in a reduced canonical form.
    """

    __slots__ = ("c", "sqrt_c", "sqrt_complement", "sqrt_product")

    def __init__(self, c: RationalLike) -> None:
        c = Fraction(c)
        if not 0 <= c <= 1:
            raise RangeError(f"Tower parameter must satisfy 0 <= c <= 1, got {c}")
        self.c = c
        self.sqrt_c = rational_sqrt(c)
        self.sqrt_complement = rational_sqrt(1 - c)
        self.sqrt_product = rational_sqrt(c * (1 - c))

    @property
    def is_free(self) -> bool:
        """True when the four basis radicals are linearly independent over Q."""
        return (
            self.sqrt_c is None
            and self.sqrt_complement is None
            and self.sqrt_product is None
        )

    def complement(self) -> Tower:
        """The tower of 1 - c: the same field with the radicals swapped."""
        return get_tower(1 - self.c)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Tower) and self.c == other.c

    def __hash__(self) -> int:
        return hash(("tower", self.c))

    def __repr__(self) -> str:
        return f"Tower({self.c})"


@lru_cache(maxsize=None)
def get_tower(c: RationalLike) -> Tower:
    """Shared Tower instance for ``c``."""
    tower = Tower(c)
    if not tower.is_free:
        logger.debug("Tower c={} is non-free; scalars are reduced", tower.c)
    return tower


def _reduce(tower: Tower, a, b, d, e) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    if tower.is_free:
        return a, b, d, e
    sc, s1, sp = tower.sqrt_c, tower.sqrt_complement, tower.sqrt_product
    if sc is not None and s1 is not None:
        zero = Fraction(0)
        return a + b * sc + d * s1 + e * sc * s1, zero, zero, zero
    if sc is not None:
        # sqrt(c(1-c)) = sc * sqrt(1-c)
        return a + b * sc, Fraction(0), d + e * sc, Fraction(0)
    if s1 is not None:
        return a + d * s1, b + e * s1, Fraction(0), Fraction(0)
    # c(1-c) = sp^2, so sqrt(1-c) = (sp / c) sqrt(c)
    return a + e * sp, b + d * sp / tower.c, Fraction(0), Fraction(0)


def _formal_mul(c: Fraction, x: tuple, y: tuple) -> tuple:
    a1, b1, d1, e1 = x
    a2, b2, d2, e2 = y
    cc = 1 - c
    return (
        a1 * a2 + b1 * b2 * c + d1 * d2 * cc + e1 * e2 * c * cc,
        a1 * b2 + b1 * a2 + (d1 * e2 + e1 * d2) * cc,
        a1 * d2 + d1 * a2 + (b1 * e2 + e1 * b2) * c,
        a1 * e2 + e1 * a2 + b1 * d2 + d1 * b2,
    )


class TowerScalar:
    """Element a + b*sqrt(c) + d*sqrt(1-c) + e*sqrt(c(1-c)) with rational a, b, d, e."""

    __slots__ = ("tower", "a", "b", "d", "e")

    def __init__(
        self,
        tower: Union[Tower, RationalLike],
        a: RationalLike = 0,
        b: RationalLike = 0,
        d: RationalLike = 0,
        e: RationalLike = 0,
    ) -> None:
        if not isinstance(tower, Tower):
            tower = get_tower(tower)
        self.tower = tower
        self.a, self.b, self.d, self.e = _reduce(
            tower, Fraction(a), Fraction(b), Fraction(d), Fraction(e)
        )

    @classmethod
    def _raw(cls, tower: Tower, parts: tuple) -> TowerScalar:
        obj = cls.__new__(cls)
        obj.tower = tower
        obj.a, obj.b, obj.d, obj.e = _reduce(tower, *parts)
        return obj

    @classmethod
    def _rational(cls, tower: Tower, a: RationalLike) -> TowerScalar:
        zero = Fraction(0)
        return cls._raw(tower, (Fraction(a), zero, zero, zero))

    @classmethod
    def sqrt_c(cls, tower: Union[Tower, RationalLike]) -> TowerScalar:
        return cls(tower, 0, 1)

    @classmethod
    def sqrt_complement(cls, tower: Union[Tower, RationalLike]) -> TowerScalar:
        return cls(tower, 0, 0, 1)

    @classmethod
    def sqrt_product(cls, tower: Union[Tower, RationalLike]) -> TowerScalar:
        return cls(tower, 0, 0, 0, 1)

    @property
    def c(self) -> Fraction:
        return self.tower.c

    @property
    def parts(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.d, self.e)

    @property
    def is_rational(self) -> bool:
        return self.b == 0 and self.d == 0 and self.e == 0

    def _coerce(self, other) -> Optional[TowerScalar]:
        if isinstance(other, TowerScalar):
            if other.tower != self.tower:
                raise ParameterMismatchError(
                    f"Tower parameters differ: c={self.c} and c={other.c}"
                )
            return other
        if isinstance(other, _RationalABC):
            return TowerScalar._rational(self.tower, other)
        return None

    def __add__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return TowerScalar._raw(
            self.tower, tuple(p + q for p, q in zip(self.parts, y.parts))
        )

    __radd__ = __add__

    def __neg__(self) -> TowerScalar:
        return TowerScalar._raw(self.tower, tuple(-p for p in self.parts))

    def __pos__(self) -> TowerScalar:
        return self

    def __sub__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return TowerScalar._raw(
            self.tower, tuple(p - q for p, q in zip(self.parts, y.parts))
        )

    def __rsub__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return y - self

    def __mul__(self, other):
        if isinstance(other, _RationalABC):
            q = Fraction(other)
            return TowerScalar._raw(self.tower, tuple(p * q for p in self.parts))
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return TowerScalar._raw(self.tower, _formal_mul(self.c, self.parts, y.parts))

    __rmul__ = __mul__

    def galois_conjugates(self) -> tuple[tuple, tuple, tuple]:
        """Formal images under the three nontrivial sign changes of the radicals."""
        a, b, d, e = self.parts
        return (a, -b, d, -e), (a, b, -d, -e), (a, -b, -d, e)

    def norm(self) -> Fraction:
        """Product of the four formal conjugates; a rational, zero only for zero."""
        c = self.c
        s1, s2, s3 = self.galois_conjugates()
        partial = _formal_mul(c, _formal_mul(c, s1, s2), s3)
        full = _formal_mul(c, self.parts, partial)
        return full[0]

    def inverse(self) -> TowerScalar:
        """Multiplicative inverse by rationalizing with the formal norm form.

        Raises:
            ZeroDivisionError: If the scalar is zero
        """
        if self.is_zero():
            raise ZeroDivisionError("Inverse of a zero tower scalar")
        if self.is_rational:
            return TowerScalar._rational(self.tower, 1 / self.a)
        c = self.c
        s1, s2, s3 = self.galois_conjugates()
        partial = _formal_mul(c, _formal_mul(c, s1, s2), s3)
        n = _formal_mul(c, self.parts, partial)[0]
        return TowerScalar._raw(self.tower, tuple(p / n for p in partial))

    def __truediv__(self, other):
        if isinstance(other, _RationalABC):
            if other == 0:
                raise ZeroDivisionError("Division of a tower scalar by zero")
            q = Fraction(other)
            return TowerScalar._raw(self.tower, tuple(p / q for p in self.parts))
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return self * y.inverse()

    def __rtruediv__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return y * self.inverse()

    def __pow__(self, exponent: int) -> TowerScalar:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = TowerScalar._rational(self.tower, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.d == 0 and self.e == 0

    def conjugate(self) -> TowerScalar:
        """Complex conjugation; tower scalars are real."""
        return self

    def retower(self, target: Union[Tower, RationalLike]) -> TowerScalar:
        """Rewrite this scalar over ``target``.

        The towers of c and 1 - c are the same field: sqrt(c) and sqrt(1-c)
        trade places while sqrt(c(1-c)) is shared.

        Raises:
            ParameterMismatchError: If ``target`` is neither c nor 1 - c
        """
        if not isinstance(target, Tower):
            target = get_tower(target)
        if target == self.tower:
            return self
        if target.c != 1 - self.c:
            raise ParameterMismatchError(
                f"Cannot move a scalar from c={self.c} to c={target.c}"
            )
        return TowerScalar(target, self.a, self.d, self.b, self.e)

    def __float__(self) -> float:
        c = float(self.c)
        return (
            float(self.a)
            + float(self.b) * math.sqrt(c)
            + float(self.d) * math.sqrt(1.0 - c)
            + float(self.e) * math.sqrt(c * (1.0 - c))
        )

    def evaluate(self, prec: int = 200) -> mpmath.mpf:
        """Evaluate with ``prec`` bits of working precision."""
        with mpmath.workprec(prec):
            c = mpmath.mpf(self.c.numerator) / self.c.denominator
            one = mpmath.mpf(1)

            def q(x: Fraction) -> mpmath.mpf:
                return mpmath.mpf(x.numerator) / x.denominator

            return (
                q(self.a)
                + q(self.b) * mpmath.sqrt(c)
                + q(self.d) * mpmath.sqrt(one - c)
                + q(self.e) * mpmath.sqrt(c * (one - c))
            )

    def numeric_is_zero(self, prec: int = 200, threshold: float = 1e-40) -> bool:
        """Zero test by high-precision evaluation; cross-checks non-free towers."""
        return abs(self.evaluate(prec)) < threshold

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TowerScalar) and other.tower != self.tower:
            return False
        try:
            y = self._coerce(other)
        except ParameterMismatchError:
            return False
        if y is None:
            return NotImplemented
        return self.parts == y.parts

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(self.a)
        return hash((self.c, self.parts))

    def __repr__(self) -> str:
        return f"TowerScalar(c={self.c}, {self.a}, {self.b}, {self.d}, {self.e})"

    def __str__(self) -> str:
        terms = []
        for coeff, symbol in zip(self.parts, ("", "√c", "√(1-c)", "√(c(1-c))")):
            if coeff:
                terms.append(f"{coeff}{symbol}" if symbol else f"{coeff}")
        return " + ".join(terms) if terms else "0"


def tower_mul(x: TowerScalar, y: TowerScalar) -> TowerScalar:
    """Exact product of two tower scalars over the same parameter."""
    if x.tower != y.tower:
        raise ParameterMismatchError(f"Tower parameters differ: c={x.c} and c={y.c}")
    return x * y


def tower_is_zero(x: TowerScalar) -> bool:
    """Exact zero test; cross-checked numerically on non-free towers."""
    exact = x.is_zero()
    if not x.tower.is_free and exact != x.numeric_is_zero():
        logger.warning("Exact and 200-bit zero tests disagree for {!r}", x)
    return exact


RealScalar = Union[Fraction, TowerScalar, float]


class ComplexScalar:
    """Complex number re + i*im with exact real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RealScalar = 0, im: RealScalar = 0) -> None:
        self.re = Fraction(re) if isinstance(re, int) else re
        self.im = Fraction(im) if isinstance(im, int) else im

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    @staticmethod
    def _coerce(other) -> Optional[ComplexScalar]:
        if isinstance(other, ComplexScalar):
            return other
        if isinstance(other, (_RationalABC, TowerScalar)):
            return ComplexScalar(other, Fraction(0))
        return None

    def __add__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return ComplexScalar(self.re + y.re, self.im + y.im)

    __radd__ = __add__

    def __sub__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return ComplexScalar(self.re - y.re, self.im - y.im)

    def __rsub__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return y - self

    def __neg__(self) -> ComplexScalar:
        return ComplexScalar(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, (_RationalABC, TowerScalar)):
            return ComplexScalar(self.re * other, self.im * other)
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return ComplexScalar(
            self.re * y.re - self.im * y.im, self.re * y.im + self.im * y.re
        )

    __rmul__ = __mul__

    def abs2(self):
        """|z|^2 as an exact real scalar."""
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> ComplexScalar:
        return ComplexScalar(self.re, -self.im)

    def inverse(self) -> ComplexScalar:
        norm = self.abs2()
        if is_zero(norm):
            raise ZeroDivisionError("Inverse of a zero complex scalar")
        inv = inverse(norm)
        return ComplexScalar(self.re * inv, -self.im * inv)

    def __truediv__(self, other):
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return self * y.inverse()

    def is_zero(self) -> bool:
        return is_zero(self.re) and is_zero(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __eq__(self, other: object) -> bool:
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return (self - y).is_zero()

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        return f"ComplexScalar({self.re!r}, {self.im!r})"


I = ComplexScalar(0, 1)
ONE = ComplexScalar(1, 0)
ZERO = ComplexScalar(0, 0)


def is_zero(x, tol: float = 0.0) -> bool:
    """Zero test across the scalar kinds; ``tol`` only applies to floats."""
    if isinstance(x, (TowerScalar, ComplexScalar)):
        return x.is_zero()
    if isinstance(x, _RationalABC):
        return x == 0
    return abs(x) <= tol


def is_exact(x) -> bool:
    if isinstance(x, ComplexScalar):
        return is_exact(x.re) and is_exact(x.im)
    return isinstance(x, (_RationalABC, TowerScalar))


def inverse(x):
    """Multiplicative inverse of any supported scalar."""
    if isinstance(x, (TowerScalar, ComplexScalar)):
        return x.inverse()
    if isinstance(x, _RationalABC):
        return 1 / Fraction(x)
    return 1.0 / x


def to_float(x) -> float:
    return float(x)


def to_complex(x) -> complex:
    if isinstance(x, ComplexScalar):
        return complex(x)
    return complex(float(x)) if is_exact(x) else complex(x)


def common_tower(values) -> Optional[Tower]:
    """The tower shared by the scalars in ``values``, or None if all are rational."""
    found: Optional[Tower] = None
    for v in values:
        parts = (v.re, v.im) if isinstance(v, ComplexScalar) else (v,)
        for p in parts:
            if isinstance(p, TowerScalar):
                if found is None:
                    found = p.tower
                elif found != p.tower:
                    raise ParameterMismatchError(
                        f"Tower parameters differ: c={found.c} and c={p.c}"
                    )
    return found


def retower_scalar(x, target: Tower):
    """Move ``x`` (rational, tower or complex) onto the tower ``target``."""
    if isinstance(x, ComplexScalar):
        return ComplexScalar(retower_scalar(x.re, target), retower_scalar(x.im, target))
    if isinstance(x, TowerScalar):
        return x.retower(target)
    return x


def ring_tag(x) -> str:
    """Ring name used in JSON output: ``rational``, ``tower`` or ``float``."""
    if isinstance(x, ComplexScalar):
        tags = {ring_tag(x.re), ring_tag(x.im)}
        return "tower" if "tower" in tags else tags.pop()
    if isinstance(x, TowerScalar):
        return "rational" if x.is_rational else "tower"
    if isinstance(x, _RationalABC):
        return "rational"
    return "float"


def scalar_to_json(x):
    """JSON-safe rendering: ``"p/q"``, a tower quadruple, or a float."""
    if isinstance(x, ComplexScalar):
        return {"re": scalar_to_json(x.re), "im": scalar_to_json(x.im)}
    if isinstance(x, TowerScalar):
        if x.is_rational:
            return str(x.a)
        return {"c": str(x.c), "parts": [str(p) for p in x.parts]}
    if isinstance(x, _RationalABC):
        return str(Fraction(x))
    if isinstance(x, complex):
        return {"re": float(x.real), "im": float(x.imag)}
    return float(x)
