"""Periodic grid, spectral calculus, quadrature and norms.

The real line is truncated to a periodic box [-L, L); every profile used in
the experiments decays exponentially, so L is always chosen large enough that
the truncation sits below roundoff.  All derivatives are Fourier multipliers,
quadrature is the rectangle rule (spectrally accurate for smooth periodic
integrands), and the antiderivative splits off the mean ramp analytically so
that the periodic remainder can be inverted in Fourier space.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainTooSmallError


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L, L) with N nodes."""

    L: float
    N: int

    @property
    def dx(self):
        return 2.0 * self.L / self.N

    @property
    def x(self):
        return -self.L + self.dx * np.arange(self.N)

    @property
    def wavenumbers(self):
        """Symmetric wavenumber set pi*j/L, j = -N/2..N/2-1 (fft layout)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.N, d=self.dx)

    @property
    def rfft_wavenumbers(self):
        """Non-negative wavenumbers pi*j/L, j = 0..N/2 (rfft layout)."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.N, d=self.dx)


def make_grid(L, N):
    """Create a periodic grid; N must be even and at least 16, L positive."""
    if N % 2 != 0:
        raise ValueError(f"point count must be even, got N={N}")
    if N < 16:
        raise ValueError(f"point count must be >= 16, got N={N}")
    if L <= 0:
        raise ValueError(f"half length must be positive, got L={L}")
    return Grid(float(L), int(N))


@dataclass
class Field:
    """Real scalar samples on the nodes of a Grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.N,):
            raise ValueError(
                f"expected {self.grid.N} samples, got shape {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite samples")


@dataclass
class FieldPair:
    """Two-component state (u, v) on a shared grid."""

    u: Field
    v: Field

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise ValueError("components live on different grids")

    @property
    def grid(self):
        return self.u.grid


def field_from_function(grid, fn):
    return Field(grid, fn(grid.x))


def zero_field(grid):
    return Field(grid, np.zeros(grid.N))


def zero_pair(grid):
    return FieldPair(zero_field(grid), zero_field(grid))


def pair_from_arrays(grid, u, v):
    return FieldPair(Field(grid, u), Field(grid, v))


def spectral_derivative(f, order=1):
    """Differentiate by the Fourier multiplier (ik)^order, order in {1, 2, 3}.

    For odd orders the Nyquist mode is zeroed (its derivative is not
    representable on the real grid); even orders keep it.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    k = f.grid.rfft_wavenumbers
    fh = np.fft.rfft(f.values)
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[-1] = 0.0
    return Field(f.grid, np.fft.irfft(mult * fh, n=f.grid.N))


def quadrature_integrate(f):
    """Rectangle-rule integral dx * sum(f); spectrally accurate on this grid."""
    return f.grid.dx * float(np.sum(f.values))


def l2_inner(f, g):
    return f.grid.dx * float(np.dot(f.values, g.values))


def l2_norm_sq(f):
    return l2_inner(f, f)


def l2_norm(f):
    return np.sqrt(l2_norm_sq(f))


def h1_norm_sq(f):
    return l2_norm_sq(f) + l2_norm_sq(spectral_derivative(f, 1))


def h1_norm(f):
    return np.sqrt(h1_norm_sq(f))


def pair_inner(fp, gp):
    return l2_inner(fp.u, gp.u) + l2_inner(fp.v, gp.v)


def pair_norm_sq(fp):
    """Squared H1 x L2 norm of a two-component state."""
    return h1_norm_sq(fp.u) + l2_norm_sq(fp.v)


def pair_norm(fp):
    return np.sqrt(pair_norm_sq(fp))


def sup_norm(f):
    return float(np.max(np.abs(f.values)))


def pair_sup_norm(fp):
    return max(sup_norm(fp.u), sup_norm(fp.v))


def odd_primitive(f):
    """Cumulative integral g(x) = int_0^x f(s) ds with g(0) = 0.

    The mean of f contributes the exact ramp mean(f)*x; the zero-mean
    remainder is inverted spectrally, which keeps the result accurate to
    roundoff for smooth f.  When f is even the result is odd.
    """
    k = f.grid.rfft_wavenumbers
    fh = np.fft.rfft(f.values)
    mean = fh[0].real / f.grid.N
    gh = np.zeros_like(fh)
    gh[1:] = fh[1:] / (1j * k[1:])
    gh[-1] = 0.0
    periodic = np.fft.irfft(gh, n=f.grid.N)
    x = f.grid.x
    g = periodic - periodic[f.grid.N // 2] + mean * x
    return Field(f.grid, g)


def shift_field(f, s):
    """Samples of f(x + s) via the Fourier phase shift (exact for band-limited f).

    The Nyquist mode is scaled by cos(k*s): its shifted sine component is not
    representable on the grid and is dropped.
    """
    k = f.grid.rfft_wavenumbers
    fh = np.fft.rfft(f.values)
    fh[1:-1] *= np.exp(1j * k[1:-1] * s)
    fh[-1] *= np.cos(k[-1] * s)
    return Field(f.grid, np.fft.irfft(fh, n=f.grid.N))


def shift_pair(fp, s):
    return FieldPair(shift_field(fp.u, s), shift_field(fp.v, s))


def signed_power(values, p):
    """Pointwise |u|^p * u, well defined for fractional p."""
    return np.sign(values) * np.abs(values) ** (p + 1.0)


def dealiased_signed_power(f, p):
    """|f|^p * f evaluated on a 3/2 zero-padded grid, truncated back.

    Fractional powers cannot be dealiased exactly; padding suppresses the
    dominant aliases of the pointwise product.
    """
    N = f.grid.N
    M = 3 * N // 2
    fh = np.fft.rfft(f.values)
    padded = np.zeros(M // 2 + 1, dtype=complex)
    padded[: N // 2 + 1] = fh
    padded[N // 2] *= 0.5  # split the Nyquist bin symmetrically
    fine = np.fft.irfft(padded, n=M) * (M / N)
    wh = np.fft.rfft(signed_power(fine, p)) * (N / M)
    return Field(f.grid, np.fft.irfft(wh[: N // 2 + 1], n=N))


def check_decay(values, threshold, what="profile"):
    """Require the sampled profile to sit below `threshold` at the box edge."""
    edge = max(abs(values[0]), abs(values[-1]))
    if edge >= threshold:
        raise DomainTooSmallError(
            f"{what} does not decay inside the box: edge value {edge:.3e} "
            f">= {threshold:.1e}; enlarge L"
        )
