"""Quantization of functions on the Poincaré disk by weighted averages of the SU(1,1) discrete series."""
from .errors import ConvergenceError, DomainError, RangeError
from .geometry import GroupElement, h_matrix, mobius_act, observables, p_matrix
from .grid import DiskGrid, disk_grid
from .portrait import PortraitConfig, kappa_constant, lower_symbol, portrait, transition_kernel
from .quantizer import (
    QuantizerOperator,
    WeightSpec,
    displaced_m,
    gamma_constant,
    parse_weight,
    quantize,
    quantizer,
)
from .repn import FockOperator, generators, u_matrix

__all__ = [
    "ConvergenceError",
    "DomainError",
    "RangeError",
    "GroupElement",
    "p_matrix",
    "h_matrix",
    "mobius_act",
    "observables",
    "DiskGrid",
    "disk_grid",
    "FockOperator",
    "generators",
    "u_matrix",
    "WeightSpec",
    "QuantizerOperator",
    "parse_weight",
    "quantizer",
    "displaced_m",
    "quantize",
    "gamma_constant",
    "PortraitConfig",
    "lower_symbol",
    "transition_kernel",
    "portrait",
    "kappa_constant",
]

__version__ = "0.1.0"
