"""symcone: a toolkit for computing on symmetric cones.

Euclidean Jordan algebra arithmetic (orthant, Lorentz, real symmetric
PSD families and direct sums), weighted log-determinant barriers with a
numerical verification suite for the self-scaled identities, symmetry
group machinery (quadratic automorphisms, polar decomposition,
isotropy checks), algorithmic recovery of a cone's irreducible
decomposition from scrambled structure constants, and a primal-dual
interior-point solver driven by Nesterov-Todd scaling points.
"""

from .algebra import (
    Algebra,
    AlgebraMismatchError,
    CustomAlgebra,
    DirectSum,
    DomainError,
    Element,
    LinearOperator,
    Lorentz,
    Membership,
    Orthant,
    SpectralDecomposition,
    SymPSD,
    determinant,
    eigenvalues,
    inner,
    inverse,
    jordan_product,
    membership,
    mult_operator,
    quadratic_representation,
    scale_power,
    spectral_decompose,
    sqrt,
    trace,
)
from .barrier import (
    BarrierOracle,
    FUnitPair,
    IdentityRecord,
    SelfScaledBarrier,
    VerificationReport,
    characteristic_function_log,
    verify_self_scaled,
)
from .symmetry import (
    PolarDecomposition,
    frame_restriction_check,
    isotropy_check,
    orthogonal_automorphism_sample,
    orthogonal_quadratic_product,
    polar_decompose,
    quad_automorphism,
)
from .decompose import (
    Block,
    DecompositionResult,
    StructureTensor,
    identify_barrier_weights,
    scramble,
    split_irreducible,
    structure_constants,
)
from .ipm import (
    ConicProblem,
    Solution,
    SolveStatus,
    StepRecord,
    build_problem,
    max_step,
    nt_direction,
    solve,
)

__version__ = "0.1.0"
