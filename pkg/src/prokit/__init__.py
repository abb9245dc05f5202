"""Lossless positive real (positive real odd) matrix functions.

Foster forms, state-space and descriptor realizations, explicit inverse
realizations, and pole/zero analysis.
"""

from prokit.core import (
    DescriptorRealization,
    FosterForm,
    FosterTerm,
    StateSpaceRealization,
    ValidationReport,
    check_pro_sampling,
    eval_descriptor,
    eval_foster,
    eval_state_space,
    evaluate,
    validate_foster,
    validate_realization,
)
from prokit.errors import DegeneracyError, DomainError, PoleProximityError, ProError, StructuralError
from prokit.invert import (
    InputSpaceDecomposition,
    IntermediateInverse,
    decompose_input_space,
    inverse_descriptor_minimal,
    inverse_descriptor_raw,
    inverse_state_space,
    inverse_weierstrass,
    invertibility,
    regular_pair_check,
)
from prokit.matlin import DEFAULT_TOL, ToleranceConfig
from prokit.realize import (
    controllability_hautus,
    descriptor_minimality,
    foster_to_state_space,
    lift_factorization,
    state_space_to_foster,
    state_space_to_weierstrass,
)
from prokit.spectra import (
    InterlaceReport,
    PoleZeroReport,
    eig_perturbation_bounds,
    foster_pole_multiplicity,
    interlace_verify,
    pole_report,
    pole_zero_report,
    zero_report,
)

__version__ = "0.1.0"
