"""Algebraic Heun operators, bispectral pairs and discrete time-band limiting.

Submodules
----------
linalg      tridiagonal QL eigensolver, Lanczos, Gauss quadrature
orthopoly   Jacobi recurrences and the computed Hahn basis
operators   basis-tagged operator matrices, Leonard duality, discrete kernel
heun        differential, algebraic, difference and Heun-Hahn operators
algebra     closure fits for the Jacobi, Hahn, Racah and cubic algebras
limiting    the commuting operator for time-and-band limiting
cli         command-line entry point
"""

__version__ = "0.1.0"
