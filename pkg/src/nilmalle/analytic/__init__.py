"""Numerical checks of the mean-value inputs behind the counting asymptotics."""
from .sums import (
    SQUAREFREE,
    UNIT,
    ArithmeticFunctionSpec,
    ConvolutionCheck,
    FilterCheck,
    PrimeCondition,
    SeriesDivergence,
    a_z_sum,
    a_z_sum_direct,
    binomial_series,
    c3_constant,
    convolution_check,
    dyadic_xs,
    expected_log_power,
    filter_identity_check,
    sd_shape_check,
)

__all__ = [
    "SQUAREFREE", "UNIT", "ArithmeticFunctionSpec", "ConvolutionCheck", "FilterCheck", "PrimeCondition",
    "SeriesDivergence", "a_z_sum", "a_z_sum_direct", "binomial_series", "c3_constant",
    "convolution_check", "dyadic_xs", "expected_log_power", "filter_identity_check", "sd_shape_check",
]
