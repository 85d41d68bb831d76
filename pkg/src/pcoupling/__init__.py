"""Exact symbolic engine for coupling Poisson structures on fibered charts."""

__version__ = "0.1.0"

from pcoupling.ring import Chart, VarSpec, ScalarExpr, Poly  # noqa: F401
