"""Bell polynomials, Blissard reciprocals and umbral generalized Laplace transforms."""
from .bellcore import (PartialBellTable, bell_partition_oracle, bell_table, complete_bell,
                       partial_bell, stirling2)
from .errors import (ArgumentDomainError, BellaplaceError, ContourDivergenceError,
                     DivergenceError, EvaluationError, ExpressionSyntaxError,
                     KernelDomainError, NonIntegrableError, OracleLimitError, ToleranceError)
from .expression import FunctionExpr, parse_function
from .isomorphism import (SeriesMap, apply_iso, apply_iso_general, convention_gap,
                          iso_reciprocal_convention)
from .kernels import (DecayReport, KernelSpec, egf_eval, hp_decay_probe, kernel_eval,
                      laguerre_exp)
from .series import FormalPowerSeries
from .transform import (InversionResult, QuadratureConfig, TransformResult, bromwich_invert,
                        formal_integrand_series, transform, transform_truncated,
                        truncation_gap, verify_property)
from .umbral import (UmbralSequence, blissard_reciprocal, coeff_C, egf_reciprocal_oracle,
                     parse_sequence_spec)

__version__ = "0.1.0"

__all__ = [
    "ArgumentDomainError", "BellaplaceError", "ContourDivergenceError", "DecayReport",
    "DivergenceError", "EvaluationError", "ExpressionSyntaxError", "FormalPowerSeries",
    "FunctionExpr", "InversionResult", "KernelDomainError", "KernelSpec",
    "NonIntegrableError", "OracleLimitError", "PartialBellTable", "QuadratureConfig",
    "SeriesMap", "ToleranceError", "TransformResult", "UmbralSequence", "apply_iso",
    "apply_iso_general", "bell_partition_oracle", "bell_table", "blissard_reciprocal",
    "bromwich_invert", "coeff_C", "complete_bell", "convention_gap", "egf_eval",
    "egf_reciprocal_oracle", "formal_integrand_series", "hp_decay_probe",
    "iso_reciprocal_convention", "kernel_eval", "laguerre_exp", "parse_function",
    "parse_sequence_spec", "partial_bell", "stirling2", "transform", "transform_truncated",
    "truncation_gap", "verify_property",
]
