"""Threshold classification of one-dimensional CTMCs with polynomial rates."""

from .chain import (
    AssumptionReport,
    ChainSpec,
    DistributionFamily,
    FiniteKernel,
    ForwardFamily,
    TestFunction,
    apply_generator,
    check_assumptions,
)
from .classifier import ClassificationReport, classify, evaluate_conditions, table1_cell
from .laws import JumpLaw
from .network import (
    Network,
    ParseError,
    Reaction,
    build_branching,
    build_gene_model,
    build_runaway,
    build_verhulst,
    compile_mass_action,
    parse_model,
    parse_network,
    render,
)
from .parameters import Parameters, compute_parameters, drift_polynomial, second_moment_polynomial
from .polynomials import Polynomial, descending_factorial, leading_coeffs

__version__ = "0.1.0"
