"""Solitary-wave profiles of the generalized Boussinesq equation.

The ground state of  -phi'' + (1 - lam^2) phi - phi^(p+1) = 0  has the closed
form

    phi_lam(x) = (1 - lam^2)^(1/p) * phi_0(sqrt(1 - lam^2) x),
    phi_0(x)   = ((p+2)/2)^(1/p) * sech(p x / 2)^(2/p),

obtained by substituting the sech ansatz into the equation; every constructed
profile is verified against the elliptic residual.  A Petviashvili fixed-point
iteration is provided as an independent oracle for the same equation.
"""

from dataclasses import dataclass

import numpy as np

from . import grid as gr
from .errors import ConvergenceError, DomainTooSmallError

# target edge value when the grid is chosen automatically, and the hard
# bound beyond which a profile is rejected as corrupted by truncation
DECAY_TARGET = 1e-14
DECAY_THRESHOLD = 1e-9


@dataclass(frozen=True)
class SolitonParams:
    """Nonlinearity exponent p and wave speed lam, |lam| < 1."""

    p: float
    lam: float

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError(f"exponent must be positive, got p={self.p}")
        if abs(self.lam) >= 1:
            raise ValueError(f"speed must satisfy |lam| < 1, got lam={self.lam}")

    @property
    def omega_c(self):
        """Critical speed sqrt(p)/2 where the momentum curve degenerates."""
        return np.sqrt(self.p) / 2.0


def _sech(z):
    # exp form stays finite for any |z|
    a = np.exp(-np.abs(z))
    return 2.0 * a / (1.0 + a * a)


def _phi0(p, x):
    return ((p + 2.0) / 2.0) ** (1.0 / p) * _sech(p * x / 2.0) ** (2.0 / p)


def profile_arrays(params, x):
    """Closed-form phi_lam, d/dx phi_lam, d/dlam phi_lam sampled at x."""
    p, lam = params.p, params.lam
    m = 1.0 - lam * lam
    s = np.sqrt(m)
    phi = m ** (1.0 / p) * _phi0(p, s * x)
    dphi_dx = -s * np.tanh(p * s * x / 2.0) * phi
    dphi_dlam = -(2.0 * lam / m) * (phi / p + 0.5 * x * dphi_dx)
    return phi, dphi_dx, dphi_dlam


@dataclass
class SolitonFamily:
    """Ground-state profile with its derivatives and direction vectors.

    pair   = (phi, -lam*phi):            the traveling-wave state
    psi    = (phi, 0):                   image of the negative direction
    gamma  = (odd primitive of phi, 0):  the translated orthogonality weight
    negdir = (1/(2 lam)) (d_lam phi, -lam d_lam phi): negative direction
             (None at lam = 0 where it is undefined)
    """

    params: SolitonParams
    grid: gr.Grid
    profile: gr.Field
    x_derivative: gr.Field
    lambda_derivative: gr.Field
    pair: gr.FieldPair
    psi: gr.FieldPair
    gamma: gr.FieldPair
    negdir: "gr.FieldPair | None"
    phi0_norm_sq: float
    norm_sq: float
    elliptic_residual: float

    @property
    def pair_x_derivative(self):
        dv = gr.Field(self.grid, -self.params.lam * self.x_derivative.values)
        return gr.FieldPair(self.x_derivative, dv)

    @property
    def pair_lambda_derivative(self):
        dv = -self.profile.values - self.params.lam * self.lambda_derivative.values
        return gr.FieldPair(self.lambda_derivative, gr.Field(self.grid, dv))


def elliptic_residual_sup(params, phi_field):
    """sup | -phi'' + (1 - lam^2) phi - phi^(p+1) | for a sampled profile."""
    m = 1.0 - params.lam ** 2
    phixx = gr.spectral_derivative(phi_field, 2).values
    phi = phi_field.values
    res = -phixx + m * phi - gr.signed_power(phi, params.p)
    return float(np.max(np.abs(res)))


def _phi0_norm_sq_cache():
    cache = {}

    def get(p, grid):
        key = (p, grid.L, grid.N)
        if key not in cache:
            phi0 = gr.Field(grid, _phi0(p, grid.x))
            cache[key] = gr.l2_norm_sq(phi0)
        return cache[key]

    return get

_phi0_norm_sq = _phi0_norm_sq_cache()


def reference_grid(p):
    """Grid adequate for the lam = 0 profile of exponent p."""
    return suggest_grid(p, 0.0)


def suggest_grid(p, lam, min_N=256):
    """Pick (L, N) so phi_lam decays below threshold and is spectrally resolved."""
    m = 1.0 - lam * lam
    amp = ((p + 2.0) / 2.0) ** (1.0 / p) * 2.0 ** (2.0 / p) * m ** (1.0 / p)
    L = 1.3 * np.log(max(amp, 1.0) / (0.1 * DECAY_TARGET)) / np.sqrt(m)
    L = max(40.0, 10.0 * np.ceil(L / 10.0))
    N = 7.0 * p * np.sqrt(m) * L
    N = int(2 ** np.ceil(np.log2(max(N, min_N))))
    return gr.make_grid(L, N)


def phi0_norm_sq(p, grid=None):
    """||phi_0||_{L^2}^2 by quadrature on `grid` (reference grid by default)."""
    if grid is None:
        grid = reference_grid(p)
    return _phi0_norm_sq(p, grid)


def family_norm_sq(p, lam, grid=None):
    """||phi_lam||^2 = (1 - lam^2)^(2/p - 1/2) ||phi_0||^2."""
    m = 1.0 - lam * lam
    return m ** (2.0 / p - 0.5) * phi0_norm_sq(p, grid)


def soliton_profile(params, grid):
    """Construct the full soliton family on `grid` from the closed form."""
    phi, dphi_dx, dphi_dlam = profile_arrays(params, grid.x)
    gr.check_decay(phi, DECAY_THRESHOLD, what=f"phi(p={params.p}, lam={params.lam})")

    profile = gr.Field(grid, phi)
    x_der = gr.Field(grid, dphi_dx)
    lam_der = gr.Field(grid, dphi_dlam)
    lam = params.lam

    pair = gr.FieldPair(profile, gr.Field(grid, -lam * phi))
    psi = gr.FieldPair(profile, gr.zero_field(grid))
    gamma = gr.FieldPair(gr.odd_primitive(profile), gr.zero_field(grid))
    if lam != 0.0:
        negdir = gr.FieldPair(
            gr.Field(grid, dphi_dlam / (2.0 * lam)),
            gr.Field(grid, -dphi_dlam / 2.0),
        )
    else:
        negdir = None

    return SolitonFamily(
        params=params,
        grid=grid,
        profile=profile,
        x_derivative=x_der,
        lambda_derivative=lam_der,
        pair=pair,
        psi=psi,
        gamma=gamma,
        negdir=negdir,
        phi0_norm_sq=phi0_norm_sq(params.p, grid),
        norm_sq=gr.l2_norm_sq(profile),
        elliptic_residual=elliptic_residual_sup(params, profile),
    )


def petviashvili_oracle(params, grid, tol=1e-12, max_iter=1000):
    """Ground state by normalized fixed-point iteration, independent of the closed form.

    Iterates  phi <- M^gamma * (c - d_xx)^(-1) phi^(p+1)  with the stabilizing
    power gamma = (p+2)/(p+1); the even initial guess keeps the iterates
    centered at x = 0.
    """
    p, lam = params.p, params.lam
    m = 1.0 - lam * lam
    x = grid.x
    k = grid.rfft_wavenumbers
    symbol = m + k * k

    amp = m ** (1.0 / p) * ((p + 2.0) / 2.0) ** (1.0 / p)
    # the linearization at infinity decays like exp(-sqrt(m)|x|) whatever the
    # profile details; reject boxes that cannot contain that tail
    if amp * np.exp(-np.sqrt(m) * grid.L) >= DECAY_THRESHOLD:
        raise DomainTooSmallError(
            f"profile with decay rate sqrt(1-lam^2)={np.sqrt(m):.3e} cannot "
            f"fit in [-{grid.L}, {grid.L})"
        )
    phi = amp * np.exp(-m * x * x / 4.0)
    gamma_pow = (p + 2.0) / (p + 1.0)

    for _ in range(max_iter):
        w = gr.signed_power(phi, p)
        phix = gr.spectral_derivative(gr.Field(grid, phi), 1).values
        num = m * np.sum(phi * phi) + np.sum(phix * phix)
        den = np.sum(phi * w)
        if den <= 0:
            raise ConvergenceError("Petviashvili normalization lost positivity")
        M = num / den
        wh = np.fft.rfft(w)
        phi_new = np.fft.irfft(M ** gamma_pow * wh / symbol, n=grid.N)
        delta = float(np.max(np.abs(phi_new - phi)))
        phi = phi_new
        if delta < tol:
            break
    else:
        raise ConvergenceError(
            f"Petviashvili iteration did not reach tol={tol:.1e} "
            f"in {max_iter} iterations (last step {delta:.3e})"
        )

    gr.check_decay(phi, DECAY_THRESHOLD, what="Petviashvili profile")
    return gr.Field(grid, phi)


def momentum_curve(p, lam, grid=None):
    """Closed-form (Q(Phi_lam), dQ/dlam) for the soliton family.

    Q(Phi_lam)  = -lam (1-lam^2)^(2/p - 1/2) ||phi_0||^2
    dQ/dlam     = -(1-lam^2)^(2/p - 3/2) (1 - 4 lam^2 / p) ||phi_0||^2
    """
    if abs(lam) >= 1:
        raise ValueError(f"speed must satisfy |lam| < 1, got lam={lam}")
    nsq = phi0_norm_sq(p, grid)
    m = 1.0 - lam * lam
    Q = -lam * m ** (2.0 / p - 0.5) * nsq
    dQ = -(m ** (2.0 / p - 1.5)) * (1.0 - 4.0 * lam * lam / p) * nsq
    return Q, dQ


def critical_frequency_root(p, tol=1e-13):
    """Root of dQ/dlam on (0, 1) by bisection; exists only for 0 < p < 4."""
    if p >= 4:
        raise ValueError(f"no interior critical speed for p={p} >= 4")
    lo, hi = 1e-9, 1.0 - 1e-9
    flo = momentum_curve(p, lo)[1]
    fhi = momentum_curve(p, hi)[1]
    if flo * fhi >= 0:
        raise ValueError("momentum derivative does not change sign on (0, 1)")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = momentum_curve(p, mid)[1]
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)
