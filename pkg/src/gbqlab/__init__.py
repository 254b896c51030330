"""Numerical laboratory for solitary waves of the generalized Boussinesq equation.

The package builds the traveling-wave family of

    u_tt - u_xx + (u_xx + |u|^p u)_xx = 0,

its conserved functionals and linearized Hessian, and the modulation and
virial diagnostics used to exhibit orbital (in)stability of the waves in
desk-scale experiments.
"""

__version__ = "0.1.0"

from .grid import (
    Grid,
    Field,
    FieldPair,
    make_grid,
    spectral_derivative,
    quadrature_integrate,
    odd_primitive,
)
from .ground_state import (
    SolitonParams,
    SolitonFamily,
    soliton_profile,
    petviashvili_oracle,
    momentum_curve,
    critical_frequency_root,
)

__all__ = [
    "Grid",
    "Field",
    "FieldPair",
    "make_grid",
    "spectral_derivative",
    "quadrature_integrate",
    "odd_primitive",
    "SolitonParams",
    "SolitonFamily",
    "soliton_profile",
    "petviashvili_oracle",
    "momentum_curve",
    "critical_frequency_root",
]
