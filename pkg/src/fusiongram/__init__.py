"""Fusion frames, U-fusion cross Gram matrices and their (pseudo-)inverses on C^n."""

from .errors import (
    AllZero, BadExponent, DimensionMismatch, DivergenceDetected, FusionError,
    GenerationFailed, HypothesisViolated, LocalBasisMismatch, NotAFrame, NotDual,
    NotHermitian, ParseError, PurbViolated, SpaceMismatch,
)
from .linalg import (
    DEFAULT_TOL, NotInvertible, TolerancePolicy, hermitian_eigenvalues,
    inverse_checked, operator_norm, orthonormal_basis, pseudo_inverse,
    singular_values,
)
from .spaces import (
    BlockOperator, DirectSumSpace, DirectSumVector, Subspace, apply_block,
    embed, make_subspace, projection, restrict,
)
from .frames import (
    Classification, FrameBounds, WeightedFamily, analysis, canonical_dual,
    classify, duality_defect, flatten_local, frame_bounds, frame_operator,
    is_pseudo_dual, riesz_delta_test, synthesis, unit_weight_family,
)
from .gram import (
    GramTriple, SchattenNorm, alternate_operator, composition_check, cross_gram,
    gram, gram_block, gram_inverse, gram_pinv_formula, inv_equivalence_battery,
    oblique_projection_check, phi_block, reconstruct_operator, schatten_norm,
)
from .stability import (
    PerturbationInstance, StabilityReport, check_stability, corollary_check,
    neumann_inverse, perturbation_epsilon,
)
from .corpus import InstanceSpec, OperatorSpec, generate, make_operator
from .interchange import parse, serialize

__version__ = "0.1.0"
