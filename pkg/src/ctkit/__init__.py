"""ctkit: exact constant-term / iterated-residue computation.

Multivariate Laurent-series residue extraction over exact rationals, an
identity-verification suite that strips conjectured binomial products and
reports residual polynomials, and the weight-table / dimension bookkeeping
those identities feed.
"""

from .poly_core import Rat, RatPoly, binom_poly, binom_rat, interpolate, poly_divide, poly_gcd, primitive_normalize

__version__ = "0.1.0"

__all__ = [
    "Rat",
    "RatPoly",
    "binom_poly",
    "binom_rat",
    "interpolate",
    "poly_divide",
    "poly_gcd",
    "primitive_normalize",
    "__version__",
]
