"""Gevrey solutions of the hypergeometric system for A = (a b).

Exact series and operator arithmetic over the rationals, Gamma-series
constructions, a Gevrey-index estimator, constructive solvers and a jet
oracle for the Ext dimension tables.
"""

from .errors import GKZError
from .ext_oracle import (
    ExtTable,
    compare_oracle_vs_theory,
    jet_kernel_dim,
    monodromy_eigenvalues,
    predicted_ext_table,
    solution_complex_maps,
)
from .gamma import (
    axis_series,
    build_gamma_series,
    build_vtilde_series,
    gamma_coeff,
    generic_series,
    pochhammer,
    resonance_data,
)
from .gevrey import estimate_gevrey_index, rho_s, slope_scan
from .problem import ProblemSpec, parse_problem, render_problem
from .series import SparseSeries, TruncationSpec, linear_combine
from .solvers import (
    BasePoint,
    ResidueClassSeries,
    decompose_VW,
    extract_lambda,
    invert_E_origin,
    solve_Ep_local,
    solve_P_recurrence,
    surject_P_on_W,
)
from .weyl import DiffOperator, apply, compose, hypergeometric_ops

__version__ = "0.1.0"

__all__ = [
    "BasePoint", "DiffOperator", "ExtTable", "GKZError", "ProblemSpec", "ResidueClassSeries",
    "SparseSeries", "TruncationSpec", "apply", "axis_series", "build_gamma_series",
    "build_vtilde_series", "compare_oracle_vs_theory", "compose", "decompose_VW",
    "estimate_gevrey_index", "extract_lambda", "gamma_coeff", "generic_series",
    "hypergeometric_ops", "invert_E_origin", "jet_kernel_dim", "linear_combine",
    "monodromy_eigenvalues", "parse_problem", "pochhammer", "predicted_ext_table",
    "render_problem", "resonance_data", "rho_s", "slope_scan", "solution_complex_maps",
    "solve_Ep_local", "solve_P_recurrence", "surject_P_on_W",
]
