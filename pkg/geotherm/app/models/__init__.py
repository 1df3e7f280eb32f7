"""Fundamental equations, thermodynamic quantities and metric families."""

from geotherm.app.models.metrics import (
    METRIC_BUILDERS,
    gtd_metric,
    hessian,
    ruppeiner_metric,
    weinhold_metric,
)
from geotherm.app.models.pmi import (
    build_pmi_model,
    build_rn_model,
    charge_scale,
    entropy_from_horizon,
    horizon_radius_from_entropy,
    mass_from_horizon,
    omega,
    pmi_coefficients,
    pmi_coupling,
    pmi_exponents,
    s_to_index,
    validate_pmi_parameters,
)
from geotherm.app.models.thermo import (
    FirstLawResult,
    PMIParameters,
    ThermoModel,
    ThermoQuantities,
    build_custom_model,
    first_law_residual,
    intensive_variables,
    thermo_quantities,
)

__all__ = [
    "METRIC_BUILDERS",
    "FirstLawResult",
    "PMIParameters",
    "ThermoModel",
    "ThermoQuantities",
    "build_custom_model",
    "build_pmi_model",
    "build_rn_model",
    "charge_scale",
    "entropy_from_horizon",
    "first_law_residual",
    "gtd_metric",
    "hessian",
    "horizon_radius_from_entropy",
    "intensive_variables",
    "mass_from_horizon",
    "omega",
    "pmi_coefficients",
    "pmi_coupling",
    "pmi_exponents",
    "ruppeiner_metric",
    "s_to_index",
    "thermo_quantities",
    "validate_pmi_parameters",
    "weinhold_metric",
]
