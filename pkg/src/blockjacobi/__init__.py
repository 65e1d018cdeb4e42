"""Spectral data and inverse reconstruction for finite block Jacobi matrices."""

from .config import Tolerances, DEFAULT_TOLERANCES
from .errors import (
    BlockJacobiError,
    NotPositiveDefinite,
    SingularBlock,
    AtEigenvalue,
    MultiplicityMismatch,
    SingularWeight,
    NearPole,
    SingularY,
    LanczosBreakdown,
)
from .matrixcore import Subspace, cholesky_lplus, hpd_sqrt, kernel_basis, projector
from .operator import (
    BlockJacobiOperator,
    Flavor,
    SolutionEval,
    assemble_dense,
    eval_chi,
    eval_phi,
    m_level,
    weyl_m,
    wronskian,
)
from .spectral import (
    PoleResidueFunction,
    SpectralData,
    SpectralPoint,
    eval_prf,
    forward_map,
    phi_inverse_residue,
    residues,
)
from .tame import (
    TameSystem,
    ValidationReport,
    hankel_block,
    is_p_tame,
    polynomial_obstruction,
    validate_sp,
)
from .inverse import (
    HerglotzResult,
    MeasureRepresentation,
    herglotz_decompose,
    inverse_map,
    measure_representation,
    moment_extract,
)

__version__ = "0.1.0"
