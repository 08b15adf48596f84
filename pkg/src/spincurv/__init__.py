"""Two-component spinor calculus on analytic spacetimes.

Jets carry exact derivatives of analytic inputs; the modules build the
connecting objects, spin affinities, curvature spinors and second-order
operators of the gamma and epsilon formalisms and check their identities
pointwise.
"""

__version__ = "0.1.0"

from . import chart_fields, connection, curvature, errors, gauge, spacetimes, spin_algebra, wave
from .spacetimes import catalog_get, load_scenario

__all__ = [
    "__version__",
    "catalog_get",
    "chart_fields",
    "connection",
    "curvature",
    "errors",
    "gauge",
    "load_scenario",
    "spacetimes",
    "spin_algebra",
    "wave",
]
