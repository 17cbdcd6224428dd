"""Python interface to the graph-immersion verification toolkit.

The heavy lifting happens in the C++ extension; report-producing calls
return parsed dictionaries mirroring the CLI's JSON output.
"""

import json as _json

from graphcurv import _core
from graphcurv._core import (
    ConfigError,
    DomainError,
    ExpressionParseError,
    GraphMap,
    HypothesisViolation,
    builtin_names,
    eval_expression,
    load_graph,
    parse_expression,
    scale_graph,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "ExpressionParseError",
    "GraphMap",
    "HypothesisViolation",
    "area_ratio",
    "builtin_names",
    "check",
    "eval_expression",
    "flatness",
    "integral_estimate",
    "load_graph",
    "mean_value",
    "parse_expression",
    "point_geometry",
    "scale_graph",
    "stability",
    "sup_sweep",
    "sup_sweep_csv",
]


def point_geometry(graph, x, depth=4):
    """Every pointwise tensor at a chart point, as a dictionary."""
    return _json.loads(_core.point_geometry_json(graph, x, depth))


def check(graph, name, x, step=1e-3, eps=1.0):
    """One identity or inequality check at a chart point.

    Names: gauss, codazzi, ricci, simons_identity, jacobi,
    simons_inequality, subsolution.
    """
    return _json.loads(_core.check_json(graph, name, x, step, eps))


def flatness(graph, box, per_axis=5):
    return _json.loads(_core.flatness_json(graph, box, per_axis))


def stability(graph, center, rho, s=3, cells=8, gauss=4, jobs=1):
    return _json.loads(
        _core.stability_json(graph, center, rho, s, cells, gauss, jobs)
    )


def integral_estimate(graph, p, center, rho, s=3, cells=8, gauss=4, jobs=1):
    return _json.loads(
        _core.integral_estimate_json(graph, p, center, rho, s, cells, gauss, jobs)
    )


def area_ratio(graph, center, R, cells=8, gauss=3, subdiv=6):
    """Bracketing interval (lower, upper) for the ball-area ratio."""
    return _core.area_ratio(graph, center, R, cells, gauss, subdiv)


def sup_sweep(graph, center, radii, cells=8, gauss=4, jobs=1):
    return _json.loads(
        _core.sup_sweep_json(graph, center, list(radii), cells, gauss, jobs)
    )


def sup_sweep_csv(graph, center, radii, cells=8, gauss=4, jobs=1):
    return _core.sup_sweep_csv(graph, center, list(radii), cells, gauss, jobs)


def mean_value(graph, center, R, p, cells=8, gauss=4, jobs=1):
    return _json.loads(
        _core.mean_value_json(graph, center, R, p, cells, gauss, jobs)
    )
