"""Conic inner approximation of attainable-outcome sets.

Computes finite inner approximations of the closed attainable set of a
convex vector optimization problem by approximating its lifted cone, and
provides the closed-form error analytics (validity radius, absolute
error bound, boundary-point classification) that make the approximation
quality interpretable inside a user-chosen region of interest.
"""

from ._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"
__all__ = ["kernel_backend", "__version__"]
