"""Twistleaf: exact and numerical checks of twisted Poisson structures on SU(n)."""

from .enums import Algebra, BlockVariant, Condition, FieldKind, Mode, OutputFormat
from .exceptions import (
    DimensionMismatchError,
    ParameterMismatchError,
    PreconditionError,
    RangeError,
    RingMismatchError,
    TwistleafError,
)
from .scalar import ComplexScalar, Tower, TowerScalar, get_tower, parse_rational
from .lie import (
    BasisIndex,
    GroupElement,
    LieElement,
    Subspace,
    basis_index,
    build_block_subalgebra,
    build_sigma,
    projective_twist,
)
from .wedge import Wedge2, Wedge3, WedgeSubspace, build_r, cobracket, schouten2
from .poisson import BivectorField, check_coisotropy, check_theorem3
from .double import (
    DoubleElement,
    DrinfeldDouble,
    LagrangianSubalgebra,
    double_action,
    lagrangian_of_quotient,
)
from .homogeneous import (
    GrassPoint,
    SchubertSymbol,
    leaf_rank,
    leaf_residual,
    project,
    project_twisted,
    schubert_membership,
)
from .reports import CheckReport, RunReport
from .config import RunConfig, Settings

__all__ = [
    "Algebra",
    "BlockVariant",
    "Condition",
    "FieldKind",
    "Mode",
    "OutputFormat",
    "TwistleafError",
    "ParameterMismatchError",
    "DimensionMismatchError",
    "RangeError",
    "RingMismatchError",
    "PreconditionError",
    "ComplexScalar",
    "Tower",
    "TowerScalar",
    "get_tower",
    "parse_rational",
    "BasisIndex",
    "GroupElement",
    "LieElement",
    "Subspace",
    "basis_index",
    "build_block_subalgebra",
    "build_sigma",
    "projective_twist",
    "Wedge2",
    "Wedge3",
    "WedgeSubspace",
    "build_r",
    "cobracket",
    "schouten2",
    "BivectorField",
    "check_coisotropy",
    "check_theorem3",
    "DoubleElement",
    "DrinfeldDouble",
    "LagrangianSubalgebra",
    "double_action",
    "lagrangian_of_quotient",
    "GrassPoint",
    "SchubertSymbol",
    "leaf_rank",
    "leaf_residual",
    "project",
    "project_twisted",
    "schubert_membership",
    "CheckReport",
    "RunReport",
    "RunConfig",
    "Settings",
]
