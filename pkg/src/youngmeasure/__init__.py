"""Young measures of piecewise functions: exact Dirac mixtures and
inverse-Jacobian densities, Monte Carlo estimates, and the dyadic
simple-function ladder, with a CLI and an HTTP service on top.

Submodules import lazily so that process-level knobs (thread caps) can
be applied before numerical libraries load.
"""

import importlib

__version__ = "0.1.0"

_EXPORTS = {
    # domain model
    "Box": ".domain", "Domain": ".domain", "Piece": ".domain",
    "PiecewiseFunction": ".domain", "ValidationReport": ".domain",
    "interval": ".domain", "evaluate": ".domain", "evaluate_many": ".domain",
    "validate_partition": ".domain",
    # expressions
    "parse_expression": ".expressions", "parse": ".expressions",
    "to_text": ".expressions",
    # analytic engine
    "DiracMixture": ".analytic", "DensityTable": ".analytic",
    "Reference": ".analytic", "make_mixture": ".analytic",
    "simple_young_measure": ".analytic", "pushforward_density": ".analytic",
    "density_grid": ".analytic", "pushforward_probability": ".analytic",
    "invert_piece": ".analytic", "harmonic_staircase": ".analytic",
    "builtin_function": ".analytic", "BUILTIN_NAMES": ".analytic",
    # measure core
    "TestFunction": ".measures", "probe": ".measures",
    "integrate_test": ".measures", "cdf": ".measures",
    "weakstar_gap": ".measures", "default_suite": ".measures",
    "monomial_suite": ".measures", "trig_suite": ".measures",
    "suite_by_name": ".measures", "SUITE_NAMES": ".measures",
    # sampling
    "EmpiricalMeasure": ".montecarlo", "FunctionalEstimate": ".montecarlo",
    "sample_uniform": ".montecarlo", "empirical_measure": ".montecarlo",
    "ks_statistic": ".montecarlo", "young_functional_mc": ".montecarlo",
    "young_functional_quadrature": ".montecarlo", "DEFAULT_SEED": ".montecarlo",
    "GENERATOR_NAME": ".montecarlo",
    # ladder
    "SimpleFunction": ".approximation", "ApproximationLadder": ".approximation",
    "simple_approximation": ".approximation", "build_ladder": ".approximation",
    "convergence_report": ".approximation",
    # spec files
    "FunctionSpec": ".specio", "PieceSpec": ".specio",
    "build_function": ".specio", "load_function": ".specio",
    "save_spec": ".specio", "resolve_function": ".specio",
    # plots
    "emit_plot": ".plots",
    # errors
    "YoungMeasureError": ".errors", "InputError": ".errors",
    "NumericalError": ".errors", "ParseError": ".errors",
    "SpecError": ".errors",
}

__all__ = ["__version__", *sorted(_EXPORTS)]


def __getattr__(name: str):
    target = _EXPORTS.get(name)
    if target is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    return getattr(importlib.import_module(target, __name__), name)


def __dir__():
    return sorted(set(globals()) | set(_EXPORTS))
