"""Exact directional mixing experiments on model Z^q systems."""

from .lattice import DirectionVector, StripSpec
from .scalar import Surd, parse_scalar, sqrt

__version__ = "0.1.0"

__all__ = ["DirectionVector", "StripSpec", "Surd", "parse_scalar", "sqrt", "__version__"]
