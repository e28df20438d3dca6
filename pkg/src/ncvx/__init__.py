"""Exact engine for nearly convex polyhedral analysis.

The computable universe is finite unions of relatively open polyhedra with
rational data. On that class the library decides membership and near
convexity, computes relative interiors, closures, images, preimages, sums
and compositions of set-valued maps, optimal value functions with their
subdifferentials and coderivatives, polyhedral support functions and
Fenchel conjugates, and four strong-duality schemes, all in exact rational
arithmetic with checkable certificates.
"""

__all__ = ["__version__"]
__version__ = "0.1.0"
