"""First cohomology of osp(1|2) acting on bilinear differential operators
between weighted densities on the supercircle, computed exactly."""
from .cohomology import dim_h1, dim_h1_relative, is_cocycle, is_trivial
from .families import classify, gbinom
from .superfield import Q, SuperFunction, contact_bracket, parse_superfunction

__version__ = "0.1.0"

__all__ = [
    "Q", "SuperFunction", "classify", "contact_bracket", "dim_h1", "dim_h1_relative",
    "gbinom", "is_cocycle", "is_trivial", "parse_superfunction",
]
