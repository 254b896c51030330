"""Discretized spectral analysis of the action Hessian at the soliton.

The scalar operator  -d_xx + (1-omega^2) - (p+1) phi^p  is a Poschl-Teller
problem whose bound states are known in closed form; each of its levels t maps
to a level of the two-component Hessian through

    mu = (t + omega^2 + 1 - sqrt((t + omega^2 - 1)^2 + 4 omega^2)) / 2,

which provides an independent oracle for the dense matrix eigensolves done
here.  Coercivity on the codimension-2 constrained subspace is computed by
projecting the quadratic form onto the constraint null space and solving the
generalized symmetric eigenproblem against the H1 x L2 metric.
"""

import json
from dataclasses import dataclass, asdict

import numpy as np
import scipy.linalg

from . import grid as gr
from . import ground_state as gs


def derivative_matrix(grid, order):
    """Dense real matrix of the Fourier multiplier (ik)^order on the grid."""
    k = grid.rfft_wavenumbers
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult = mult.copy()
        mult[-1] = 0.0
    eye = np.eye(grid.N)
    D = np.fft.irfft(mult[:, None] * np.fft.rfft(eye, axis=0), n=grid.N, axis=0)
    if order % 2 == 0:
        D = 0.5 * (D + D.T)
    else:
        D = 0.5 * (D - D.T)
    return D


def scalar_operator(p, omega, grid, family=None):
    """Dense symmetric matrix of  -d_xx + (1-omega^2) - (p+1) phi^p."""
    if family is None:
        family = gs.soliton_profile(gs.SolitonParams(p, omega), grid)
    D2 = derivative_matrix(grid, 2)
    m = 1.0 - omega * omega
    K = -D2 + m * np.eye(grid.N) - np.diag((p + 1.0) * family.profile.values ** p)
    return K, family


def scalar_bound_state_levels(p, omega):
    """Closed-form Poschl-Teller levels of the scalar operator, lowest first.

    Level n exists while p + 2 - n*p > 0 (strictly); the lowest is
    (1-omega^2)(1 - (p+2)^2/4) and level 1 is always zero (translation mode).
    """
    m = 1.0 - omega * omega
    levels = []
    n = 0
    while p + 2.0 - n * p > 1e-12:
        levels.append(m * (1.0 - (p + 2.0 - n * p) ** 2 / 4.0))
        n += 1
    return levels


def scalar_negative_eigenvalue(p, omega, grid):
    """Smallest eigenvalue of the discretized scalar operator."""
    K, _ = scalar_operator(p, omega, grid)
    vals = scipy.linalg.eigvalsh(K)
    return float(vals[0])


def mu0_closed_form(lambda_minus1, omega):
    """Negative Hessian eigenvalue from the scalar level lambda_minus1 < 0."""
    if lambda_minus1 >= 0:
        raise ValueError("expected a negative scalar eigenvalue")
    w2 = omega * omega
    disc = (lambda_minus1 + w2 - 1.0) ** 2 + 4.0 * w2
    assert disc >= 0.0  # sum of squares, cannot fail for real inputs
    mu0 = 0.5 * (lambda_minus1 + w2 + 1.0 - np.sqrt(disc))
    assert mu0 < 0.0
    return float(mu0)


def hessian_level_from_scalar(t, omega):
    """Map a scalar-operator level t to the matched two-component level (< 1 branch)."""
    w2 = omega * omega
    disc = (t + w2 - 1.0) ** 2 + 4.0 * w2
    return float(0.5 * (t + w2 + 1.0 - np.sqrt(disc)))


def hessian_matrix(p, omega, grid, family=None):
    """Dense symmetric 2N x 2N matrix of the action Hessian at the soliton."""
    if family is None:
        family = gs.soliton_profile(gs.SolitonParams(p, omega), grid)
    N = grid.N
    D2 = derivative_matrix(grid, 2)
    K = -D2 + np.eye(N) - np.diag((p + 1.0) * family.profile.values ** p)
    A = np.zeros((2 * N, 2 * N))
    A[:N, :N] = K
    A[N:, N:] = np.eye(N)
    A[:N, N:] = omega * np.eye(N)
    A[N:, :N] = omega * np.eye(N)
    return A, family


@dataclass
class SpectralReport:
    p: float
    omega: float
    L: float
    N: int
    mu0_numeric: float
    mu0_formula: float
    lambda_minus1: float
    lambda_minus1_formula: float
    kernel_eig: float
    kernel_correlation: float
    negative_count: int
    coercivity_min: "float | None"
    eigenvalues: list

    def to_json(self, **kwargs):
        return json.dumps(asdict(self), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def hessian_spectrum(p, omega, grid, k=8, family=None, with_coercivity=False):
    """k smallest Hessian eigenvalues plus kernel and negative-count diagnostics."""
    if k < 4:
        raise ValueError(f"need k >= 4 eigenvalues, got k={k}")
    A, family = hessian_matrix(p, omega, grid, family)
    N = grid.N
    vals = scipy.linalg.eigvalsh(A)
    kernel_tol = grid.dx ** 2
    negative_count = int(np.sum(vals < -kernel_tol))
    low_vals, low_vecs = scipy.linalg.eigh(A, subset_by_index=[0, k - 1])

    # eigenvalue nearest zero and its alignment with the translation mode
    idx0 = int(np.argmin(np.abs(low_vals)))
    kernel_eig = float(low_vals[idx0])
    dphi = family.pair_x_derivative
    w = np.concatenate([dphi.u.values, dphi.v.values])
    vec = low_vecs[:, idx0]
    corr = abs(float(np.dot(vec, w))) / (np.linalg.norm(vec) * np.linalg.norm(w))

    lam1 = scalar_negative_eigenvalue(p, omega, grid)
    lam1_formula = scalar_bound_state_levels(p, omega)[0]
    coercivity = constrained_coercivity(p, omega, grid, family=family) \
        if with_coercivity else None

    return SpectralReport(
        p=p,
        omega=omega,
        L=grid.L,
        N=grid.N,
        mu0_numeric=float(vals[0]),
        mu0_formula=mu0_closed_form(lam1_formula, omega),
        lambda_minus1=lam1,
        lambda_minus1_formula=lam1_formula,
        kernel_eig=kernel_eig,
        kernel_correlation=float(corr),
        negative_count=negative_count,
        coercivity_min=coercivity,
        eigenvalues=[float(v) for v in low_vals],
    )


def constrained_coercivity(p, omega, grid, family=None, drop_psi_constraint=False):
    """Minimum of <S'' eta, eta> / ||eta||_{H1 x L2}^2 on the constrained subspace.

    The subspace is { eta : <eta, Gamma> = <eta, Psi> = 0 }; with
    `drop_psi_constraint` only the Gamma constraint is kept, which re-admits
    the negative direction and makes the minimum negative.
    """
    A, family = hessian_matrix(p, omega, grid, family)
    N = grid.N
    D2 = derivative_matrix(grid, 2)
    B = np.zeros((2 * N, 2 * N))
    B[:N, :N] = np.eye(N) - D2
    B[N:, N:] = np.eye(N)

    cons = [np.concatenate([family.gamma.u.values, np.zeros(N)])]
    if not drop_psi_constraint:
        cons.append(np.concatenate([family.psi.u.values, np.zeros(N)]))
    C = np.stack(cons)
    Z = scipy.linalg.null_space(C)
    Ap = Z.T @ A @ Z
    Bp = Z.T @ B @ Z
    vals = scipy.linalg.eigh(Ap, Bp, eigvals_only=True, subset_by_index=[0, 0])
    return float(vals[0])


def sweep_rows(cells, k=6, with_coercivity=False):
    """Spectral reports over (p, omega) cells; grids chosen per cell."""
    rows = []
    for p, omega in cells:
        grid = gs.suggest_grid(p, omega)
        rows.append(hessian_spectrum(p, omega, grid, k=k,
                                     with_coercivity=with_coercivity))
    return rows


SWEEP_CSV_HEADER = "p,omega,mu0_numeric,mu0_formula,negative_count,kernel_eig,coercivity_min"


def sweep_to_csv(rows):
    lines = [SWEEP_CSV_HEADER]
    for r in rows:
        co = "" if r.coercivity_min is None else repr(r.coercivity_min)
        lines.append(
            f"{r.p!r},{r.omega!r},{r.mu0_numeric!r},{r.mu0_formula!r},"
            f"{r.negative_count},{r.kernel_eig!r},{co}"
        )
    return "\n".join(lines) + "\n"
