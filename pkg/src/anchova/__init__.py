"""Weighted anchored and ANOVA decompositions on tensor polynomials.

Submodules
----------
weights      weight schedules, compatibility, equivalence constants, classification
poly         univariate polynomials, Sturm root isolation, 1D L_p norms
tensor       sums of elementary tensors, mixed derivatives, L_p norms over subsets
decomp       anchored/ANOVA components, reconstructions, weighted norms
equivalence  norm ratios, the product witness, random sweeps
oracle       midpoint-rule integrals and finite-difference derivatives
io           JSON and CSV formats
"""

from .core import (
    AnchovaError,
    CapacityError,
    CompatibilityError,
    CoordSubset,
    InconsistencyError,
    MembershipError,
    QuadratureWarning,
    parse_p,
)
from .decomp import (
    ComponentTuple,
    anchored_components,
    anchored_norm,
    anchored_reconstruct,
    anova_components,
    anova_norm,
    anova_reconstruct,
)
from .equivalence import (
    EquivalenceReport,
    measure_ratio,
    verify_bound_sweep,
    witness_function,
    witness_lower_bound_check,
    witness_norms_closed,
)
from .poly import Poly1, lp_norm_1d
from .tensor import Restriction, TensorFunction, TensorTerm, lp_norm_subset, mixed_derivative, restrict
from .weights import (
    DimensionDependentWeights,
    ExplicitWeights,
    FiniteOrderWeights,
    ProductWeights,
    check_compatibility,
    classify_equivalence,
    closed_form_constants_product,
    constant_c1,
    constant_cdp,
    constant_cinf,
    tau_zero,
    weight_of,
)

__version__ = "0.1.0"
