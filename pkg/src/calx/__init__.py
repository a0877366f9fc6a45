"""calx: calibration certificates and energy formulas for thermal insulation.

The package is organised around six modules:

* ``potentials``          closed-form radial potentials and inequalities,
* ``energy``              1-D and radial energy functionals,
* ``calibration_fields``  the explicit piecewise calibration vector fields,
* ``verifier``            grid-based certification of the calibration axioms,
* ``oracle``              slow independent recomputations used for testing,
* ``cli``                 the ``calx`` command line tool.
"""

from calx.potentials import (
    gamma,
    gamma_scaling_identity,
    delta_robin,
    delta_robin_prime,
    u_radial,
    rho,
    rho_prime,
    lemma_gamma_bounds,
)
from calx.energy import (
    Competitor1D,
    RadialProfile,
    EnergyBreakdown,
    unit_ball_volume,
    energy_1d,
    energy_radial_general,
    energy_radial_optimal,
    dE_dR,
    critical_radii,
    indicator_monotonicity_margin,
)
from calx.calibration_fields import (
    PiecewiseField,
    Region,
    Interface,
    CalibParams1D,
    HarmonicProfile,
    HypothesisViolation,
    affine_profile,
    radial_shell_profile,
    choose_lambda,
    build_field_1d,
    build_field_harmonic,
    build_field_indicator_const,
    build_field_indicator_two_piece,
    build_field_ball_harmonic,
)
from calx.verifier import (
    VerifyConfig,
    VerificationReport,
    CalibratedFunction,
    calibrated_function_for,
    check_condition_a,
    check_condition_b,
    check_graph_conditions,
    check_divergence_and_flux,
    verify_all,
    perturb_phi_t,
)
from calx.oracle import (
    JumpSearchSpace,
    oracle_1d_best,
    oracle_robin_shooting,
    oracle_radial_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "gamma",
    "gamma_scaling_identity",
    "delta_robin",
    "delta_robin_prime",
    "u_radial",
    "rho",
    "rho_prime",
    "lemma_gamma_bounds",
    "Competitor1D",
    "RadialProfile",
    "EnergyBreakdown",
    "unit_ball_volume",
    "energy_1d",
    "energy_radial_general",
    "energy_radial_optimal",
    "dE_dR",
    "critical_radii",
    "indicator_monotonicity_margin",
    "PiecewiseField",
    "Region",
    "Interface",
    "CalibParams1D",
    "HarmonicProfile",
    "HypothesisViolation",
    "affine_profile",
    "radial_shell_profile",
    "choose_lambda",
    "build_field_1d",
    "build_field_harmonic",
    "build_field_indicator_const",
    "build_field_indicator_two_piece",
    "build_field_ball_harmonic",
    "VerifyConfig",
    "VerificationReport",
    "CalibratedFunction",
    "calibrated_function_for",
    "check_condition_a",
    "check_condition_b",
    "check_graph_conditions",
    "check_divergence_and_flux",
    "verify_all",
    "perturb_phi_t",
    "JumpSearchSpace",
    "oracle_1d_best",
    "oracle_robin_shooting",
    "oracle_radial_sweep",
    "__version__",
]
