"""Enums used throughout the twistleaf package."""

from enum import Enum


class Mode(Enum):
    """Arithmetic used by a computation."""

    EXACT = "exact"  # Fractions and tower scalars, zero tolerance
    FLOAT = "float"  # complex128 with relative tolerances


class Algebra(Enum):
    """Ambient Lie algebra of a basis."""

    SU = "su"  # traceless anti-Hermitian, dimension n^2 - 1
    U = "u"  # anti-Hermitian, dimension n^2


class BlockVariant(Enum):
    """Shape of a block-diagonal subalgebra."""

    SU_BLOCK = "su-block"  # s(u(l) x u(n-l))
    U_BLOCK = "u-block"  # u(l) x u(n-l), lives in u(n)
    TORUS = "torus"  # diagonal Cartan subalgebra of su(n)


class FieldKind(Enum):
    """Closed forms of left-trivialized bivector fields."""

    MULTIPLICATIVE = "multiplicative"  # r - Ad_{g^-1} r
    AFFINE = "affine"  # multiplicative + constant X0
    TRANSLATED = "translated"  # Ad_{s^-1}(base(g s^-1))


class Condition(Enum):
    """Coisotropy conditions, labelled as in the literature."""

    C1 = "c1"  # rho(h) in h^g
    C2 = "c2"  # rho(h) - Ad_{h^-1} rho(e) in h^g
    C3 = "c3"  # rho(kh) - Ad_{h^-1} rho(k) in h^g, h, k in H
    C4 = "c4"  # infinitesimal: delta(x) + ad_x rho(e) in h^g
    C5 = "c5"  # rho(gh) - Ad_{h^-1} rho(g) in h^g, g in G


class OutputFormat(Enum):
    """Report formats written by the command line."""

    JSON = "json"
    MARKDOWN = "markdown"
