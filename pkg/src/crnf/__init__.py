"""Exact-arithmetic normal forms for surface graphs w = z^2 + zbar^2 + O(3).

The package computes, degree by degree and without ever rounding, the
Fischer-normalized form of a truncated surface of the class above, the
formal transformation achieving it, and the diagnostics needed to audit
the construction (kernel dimensions, resonance conditions, parameter
ledger).  See README.md for the file formats and the command line.
"""

from .errors import (
    ChainInfeasibleError,
    CrnfError,
    DegenerateWError,
    NonAffineResolutionError,
    ParameterCapExceededError,
    SchemaError,
)
from .fischer import (
    ChainDecomposition,
    FischerSplit,
    chain_decompose,
    compute_W,
    fischer_divide,
    harmonic_power,
    in_normal_space,
)
from .normalform import (
    GateVerdict,
    NormalFormResult,
    build_block,
    invariance_check,
    normalize,
    solve_linear_gate,
    verify_normal_form,
)
from .poly import BiPoly, Q, adjoint_apply, conj_poly, fischer_pair, trace
from .scalars import GaussRat, ParamScalar, parse_gauss, parse_rational
from .surface import (
    FormalMap,
    Surface,
    compose_maps,
    eval_map_on_graph,
    graph_series,
    invert_2d_jet,
    push_forward,
    transform_residual,
)

__version__ = "0.1.0"

__all__ = [
    "BiPoly",
    "ChainDecomposition",
    "ChainInfeasibleError",
    "CrnfError",
    "DegenerateWError",
    "FischerSplit",
    "FormalMap",
    "GateVerdict",
    "GaussRat",
    "NonAffineResolutionError",
    "NormalFormResult",
    "ParamScalar",
    "ParameterCapExceededError",
    "Q",
    "SchemaError",
    "Surface",
    "adjoint_apply",
    "build_block",
    "chain_decompose",
    "compose_maps",
    "compute_W",
    "conj_poly",
    "eval_map_on_graph",
    "fischer_divide",
    "fischer_pair",
    "graph_series",
    "harmonic_power",
    "in_normal_space",
    "invariance_check",
    "invert_2d_jet",
    "normalize",
    "parse_gauss",
    "parse_rational",
    "push_forward",
    "solve_linear_gate",
    "trace",
    "transform_residual",
    "verify_normal_form",
]
