"""Conserved functionals of the first-order system and the action Hessian.

For a state (u, v) the flow conserves

    Q = int u v dx,
    E = 1/2 int (u_x^2 + u^2 + v^2) dx - 1/(p+2) int |u|^(p+2) dx,

and the traveling wave is a critical point of the action S = E + omega Q.
The second variation of S at the wave acts as

    (f, g) -> (-f'' + f - (p+1) phi^p f + omega g,  g + omega f),

which is what drives every spectral and coercivity diagnostic downstream.
"""

from dataclasses import dataclass

import numpy as np

from . import grid as gr


@dataclass(frozen=True)
class ConservedValues:
    energy: float
    momentum: float
    action: float


def conserved_quantities(state, omega, p):
    """Energy, momentum and action S = E + omega * Q of a state."""
    u, v = state.u, state.v
    ux = gr.spectral_derivative(u, 1)
    quad = 0.5 * (gr.l2_norm_sq(ux) + gr.l2_norm_sq(u) + gr.l2_norm_sq(v))
    pot = gr.quadrature_integrate(
        gr.Field(state.grid, np.abs(u.values) ** (p + 2.0))
    ) / (p + 2.0)
    E = quad - pot
    Q = gr.l2_inner(u, v)
    return ConservedValues(energy=E, momentum=Q, action=E + omega * Q)


def action_gradient(state, omega, p):
    """Gradient of S at an arbitrary state: ( -u_xx + u - |u|^p u + omega v, v + omega u )."""
    u, v = state.u, state.v
    uxx = gr.spectral_derivative(u, 2)
    first = -uxx.values + u.values - gr.signed_power(u.values, p) + omega * v.values
    second = v.values + omega * u.values
    return gr.pair_from_arrays(state.grid, first, second)


def hessian_apply(f, omega, p, background):
    """Second variation of S at the soliton applied to a direction (f, g)."""
    if background.params.p != p or background.params.lam != omega:
        raise ValueError(
            f"background built at (p={background.params.p}, "
            f"lam={background.params.lam}), requested (p={p}, omega={omega})"
        )
    phi_p = background.profile.values ** p
    a, b = f.u, f.v
    axx = gr.spectral_derivative(a, 2)
    first = -axx.values + a.values - (p + 1.0) * phi_p * a.values + omega * b.values
    second = b.values + omega * a.values
    return gr.pair_from_arrays(f.grid, first, second)


def hessian_quadratic_form(f, omega, p, background):
    return gr.pair_inner(hessian_apply(f, omega, p, background), f)


def hessian_omega_derivative_identity(omega, p, grid):
    """L2 residual of  S''(Phi) d_omega Phi + Q'(Phi) = 0  on the given grid."""
    from . import ground_state as gs

    fam = gs.soliton_profile(gs.SolitonParams(p, omega), grid)
    lhs = hessian_apply(fam.pair_lambda_derivative, omega, p, fam)
    # Q'(u, v) = (v, u) evaluated at the wave
    ru = lhs.u.values + fam.pair.v.values
    rv = lhs.v.values + fam.pair.u.values
    res = gr.pair_from_arrays(grid, ru, rv)
    return np.sqrt(gr.l2_norm_sq(res.u) + gr.l2_norm_sq(res.v))
