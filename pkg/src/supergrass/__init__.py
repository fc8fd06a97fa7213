"""supergrass: numerical Grassmann algebra, graded Fock spaces and
superalgebra eigenstate constructions with an independent nullspace oracle."""

from ._backend import BACKEND
from .grassmann import (
    Algebra,
    GrassmannElement,
    analytic_even,
    berezin_integrate,
    decompose,
    even_norm,
    inverse,
    involution,
)

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "GrassmannElement",
    "analytic_even",
    "berezin_integrate",
    "decompose",
    "even_norm",
    "inverse",
    "involution",
    "BACKEND",
    "__version__",
]
