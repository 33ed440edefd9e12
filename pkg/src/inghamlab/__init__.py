"""Numerical toolkit for decay-versus-support uncertainty principles on
rank-one symmetric spaces and in Dunkl analysis.

Layers, bottom-up: ``specfun`` (special functions), ``numerics`` (grids,
quadrature, ODE and finite-difference oracles), ``transforms`` (Hankel and
Jacobi pairs), ``ingham`` (decay moduli, box products, Carleman tests),
``symmetric_space`` and ``dunkl`` (the two geometric settings) and ``cli``.
"""
__version__ = "0.1.0"
