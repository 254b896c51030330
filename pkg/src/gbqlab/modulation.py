"""Decomposition of a state near the soliton family into (lam, y, eta).

A state u close to the traveling-wave orbit is written

    u(x) = (Phi_lam + eta)(x - y),   i.e.   eta = u(. + y) - Phi_lam,

with the speed lam and shift y fixed by the two orthogonality conditions
<eta, Gamma_lam> = <eta, Psi_lam> = 0.  The pair (lam, y) is found by Newton
iteration with the analytic Jacobian assembled from the family derivatives;
near the soliton the Jacobian determinant is ||phi||^4 / (2 lam), so the
system is well conditioned as long as the state stays in the modulation
window.
"""

from dataclasses import dataclass

import numpy as np

from . import grid as gr
from . import ground_state as gs
from .errors import ConvergenceError, DomainTooSmallError


@dataclass
class ModulationState:
    lam: float
    y: float
    eta: gr.FieldPair
    residuals: tuple
    eta_norm: float
    valid: bool
    iterations: int = 0

    @property
    def F1(self):
        return self.residuals[0]

    @property
    def F2(self):
        return self.residuals[1]


def _family(p, lam, grid):
    return gs.soliton_profile(gs.SolitonParams(p, lam), grid)


def _eta_pair(state, lam, y, family):
    shifted = gr.shift_pair(state, y)
    return gr.pair_from_arrays(
        state.grid,
        shifted.u.values - family.pair.u.values,
        shifted.v.values - family.pair.v.values,
    ), shifted


def orthogonality_residuals(state, lam, y, p, family=None):
    """(F1, F2) = (<eta, Gamma_lam>, <eta, Psi_lam>) for eta = state(.+y) - Phi_lam."""
    if family is None:
        family = _family(p, lam, state.grid)
    eta, _ = _eta_pair(state, lam, y, family)
    F1 = gr.pair_inner(eta, family.gamma)
    F2 = gr.pair_inner(eta, family.psi)
    return F1, F2


def correlation_shift(state, family):
    """Shift maximizing the correlation of u with the profile (cold-start guess)."""
    grid = state.grid
    uh = np.fft.rfft(state.u.values)
    ph = np.fft.rfft(family.profile.values)
    corr = np.fft.irfft(uh * np.conj(ph), n=grid.N)
    # corr peaks at the lag s with u(x) ~ phi(x - s); the required shift is +s
    j = int(np.argmax(corr))
    s = j * grid.dx
    if s >= grid.L:
        s -= 2 * grid.L
    return s


def decompose(state, p, omega, guess=None, tol_factor=1e-12, max_iter=60):
    """Newton solve of the orthogonality system; returns a ModulationState.

    `guess` is (lam, y); when omitted the speed starts at omega and the shift
    at the correlation maximum.  Raises ConvergenceError when the state has
    left the modulation window (treated by callers as an exit event).
    """
    grid = state.grid
    if guess is None:
        fam0 = _family(p, omega, grid)
        lam, y = omega, correlation_shift(state, fam0)
    else:
        lam, y = guess

    for it in range(1, max_iter + 1):
        if not (-1.0 < lam < 1.0):
            raise ConvergenceError(f"speed left (-1, 1): lam={lam:.6g}")
        try:
            family = _family(p, lam, grid)
        except DomainTooSmallError as exc:
            raise ConvergenceError(f"profile left the box during Newton: {exc}")

        eta, shifted = _eta_pair(state, lam, y, family)
        F1 = gr.pair_inner(eta, family.gamma)
        F2 = gr.pair_inner(eta, family.psi)
        scale = family.norm_sq
        if max(abs(F1), abs(F2)) < tol_factor * scale:
            eta_norm = gr.pair_norm(eta)
            return ModulationState(
                lam=lam, y=y, eta=eta, residuals=(F1, F2),
                eta_norm=eta_norm, valid=True, iterations=it,
            )

        dgamma = gr.FieldPair(
            gr.odd_primitive(family.lambda_derivative), gr.zero_field(grid)
        )
        dpsi = gr.FieldPair(family.lambda_derivative, gr.zero_field(grid))
        dPhi = family.pair_lambda_derivative
        du = gr.spectral_derivative(shifted.u, 1)
        dv = gr.spectral_derivative(shifted.v, 1)
        dstate = gr.FieldPair(du, dv)

        J11 = gr.pair_inner(eta, dgamma) - gr.pair_inner(dPhi, family.gamma)
        J12 = gr.pair_inner(dstate, family.gamma)
        J21 = gr.pair_inner(eta, dpsi) - gr.pair_inner(dPhi, family.psi)
        J22 = gr.pair_inner(dstate, family.psi)
        det = J11 * J22 - J12 * J21
        if abs(det) < 1e-12 * scale * scale:
            raise ConvergenceError(f"singular modulation Jacobian (det={det:.3e})")

        dlam = -(J22 * F1 - J12 * F2) / det
        dy = -(-J21 * F1 + J11 * F2) / det
        # clip wild steps so a poor cold start cannot leave the family
        dlam = float(np.clip(dlam, -0.1, 0.1))
        dy = float(np.clip(dy, -2.0, 2.0))
        lam, y = lam + dlam, y + dy
        # keep the shift inside one period
        if y > grid.L:
            y -= 2 * grid.L
        elif y < -grid.L:
            y += 2 * grid.L

    raise ConvergenceError(
        f"modulation Newton did not converge in {max_iter} iterations "
        f"(last residuals {F1:.3e}, {F2:.3e})"
    )


def modulation_jacobian(p, omega, grid):
    """Analytic Jacobian of the orthogonality system at the exact soliton."""
    family = _family(p, omega, grid)
    dPhi = family.pair_lambda_derivative
    J11 = -gr.pair_inner(dPhi, family.gamma)
    J12 = gr.pair_inner(family.pair_x_derivative, family.gamma)
    J21 = -gr.pair_inner(dPhi, family.psi)
    J22 = gr.pair_inner(family.pair_x_derivative, family.psi)
    return np.array([[J11, J12], [J21, J22]])


def tube_distance(state, family):
    """min over shifts y of || state(.+y) - Phi ||_{H1 x L2}.

    The correlation against the soliton pair is evaluated at every grid lag in
    one transform, the peak is refined by a parabolic fit, and the distance is
    recomputed exactly at the refined shift.
    """
    grid = state.grid
    k = grid.rfft_wavenumbers
    w1 = 1.0 + k * k
    uh = np.fft.rfft(state.u.values)
    vh = np.fft.rfft(state.v.values)
    ph_u = np.fft.rfft(family.pair.u.values)
    ph_v = np.fft.rfft(family.pair.v.values)
    # c(y) = <state(.+y), Phi>_{H1 x L2} at all grid lags
    A = w1 * uh * np.conj(ph_u) + vh * np.conj(ph_v)
    corr = np.fft.irfft(A, n=grid.N) * grid.N * (grid.dx / grid.N)
    j = int(np.argmax(corr))
    cm, c0, cp = corr[j - 1], corr[j], corr[(j + 1) % grid.N]
    denom = cm - 2.0 * c0 + cp
    delta = 0.5 * (cm - cp) / denom if denom != 0.0 else 0.0
    y = (j + delta) * grid.dx
    if y >= grid.L:
        y -= 2.0 * grid.L
    shifted = gr.shift_pair(state, y)
    diff = gr.pair_from_arrays(
        grid,
        shifted.u.values - family.pair.u.values,
        shifted.v.values - family.pair.v.values,
    )
    return gr.pair_norm(diff), y


def unwrap_shifts(ys, L):
    """Undo periodic wrapping of a recorded shift series on [-L, L)."""
    ys = np.asarray(ys, dtype=float)
    out = ys.copy()
    offset = 0.0
    for i in range(1, len(ys)):
        d = ys[i] - ys[i - 1]
        if d > L:
            offset -= 2 * L
        elif d < -L:
            offset += 2 * L
        out[i] = ys[i] + offset
    return out


@dataclass
class RateDiagnostics:
    times: np.ndarray
    ydot: np.ndarray
    lamdot: np.ndarray
    ydot_minus_lam: np.ndarray
    prediction: np.ndarray
    residual_y: np.ndarray
    eta_norms: np.ndarray
    lam_values: np.ndarray


def parameter_rates(times, series, conserved0, p, omega):
    """Centered-difference parameter rates against the momentum-balance prediction.

    The prediction for (ydot - lam) is
        [Q(Phi_lam) - Q(Phi_omega) - (Q0 - Q(Phi_omega))] / ||phi_lam||^2,
    so the returned residual_y should be controlled by
    ||eta||^2 + |lam - omega| ||eta|| and lamdot by ||eta||.
    """
    if len(series) < 3:
        raise ValueError(f"need at least 3 modulation samples, got {len(series)}")
    times = np.asarray(times, dtype=float)
    lam = np.array([m.lam for m in series])
    eta = np.array([m.eta_norm for m in series])
    L = series[0].eta.grid.L
    y = unwrap_shifts([m.y for m in series], L)

    ydot = np.gradient(y, times)
    lamdot = np.gradient(lam, times)

    Q0 = conserved0.momentum
    Q_omega = gs.momentum_curve(p, omega)[0]
    pred = np.empty_like(lam)
    for i, lv in enumerate(lam):
        Q_lam = gs.momentum_curve(p, lv)[0]
        nsq = gs.family_norm_sq(p, lv)
        pred[i] = (Q_lam - Q_omega - (Q0 - Q_omega)) / nsq

    ydot_minus_lam = ydot - lam
    return RateDiagnostics(
        times=times,
        ydot=ydot,
        lamdot=lamdot,
        ydot_minus_lam=ydot_minus_lam,
        prediction=pred,
        residual_y=ydot_minus_lam - pred,
        eta_norms=eta,
        lam_values=lam,
    )
