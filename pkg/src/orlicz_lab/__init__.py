"""Numerical toolkit for Orlicz-space weighted conditional operators.

Submodules
----------
young    Young functions, conjugates, growth conditions
space    finite measure models, sub-algebras, conditional expectation
orlicz   modulars, Luxemburg norms, product-norm inequalities
wct      weighted conditional operators and norm estimation
criteria boundedness criteria and the generalized product inequality
essnorm  level sets, limsup indices, essential-norm sandwich
cli      experiment runner and report emission
"""

from ._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"
__all__ = ["kernel_backend", "__version__"]
