"""Discrete field state: Fourier coefficients on the torus, actions, norms.

Transform convention: u(x_m) = sum_k uhat_k e^{i k x_m} with
x_m = 2*pi*(m + sigma)/N, k = -N/2 .. N/2-1.  The flows use the standard
grid (sigma = 0); closed-form initial data is sampled on the half-cell
shifted grid (sigma = 1/2) because the shipped formula datum has a pole at
x = 0.  A state stores only the coefficient vector xi; the conjugate
variable eta = conj(xi) is implicit (all schemes preserve reality).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .tableio import csv_line

TWO_PI = 2.0 * math.pi

PAPER_EINIT = "paper-einit"


class SingularGridError(ValueError):
    """Closed-form datum evaluated on a grid hitting its singularity."""


class SpectralState:
    """Complex Fourier coefficient vector of the field u, grid size N (even).

    Coefficients are stored in FFT order (index k modulo N); `coefficient(k)`
    and the CSV export use signed indices.  Value semantics: operations
    return new states.
    """

    __slots__ = ("coeffs", "N")

    def __init__(self, coeffs, N=None):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim != 1:
            raise ValueError("coefficient vector must be 1-d")
        if N is None:
            N = c.size
        if N != c.size or N % 2 or N < 2:
            raise ValueError("N must equal len(coeffs) and be even")
        self.coeffs = c.copy()
        self.N = int(N)

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, N):
        return cls(np.zeros(N, dtype=complex))

    @classmethod
    def from_coefficients(cls, pairs, N):
        """State with the given (k, value) coefficients, all others zero."""
        state = cls.zeros(N)
        for k, v in dict(pairs).items():
            k = int(k)
            if not -N // 2 <= k < N // 2:
                raise ValueError(f"mode {k} not representable on an N={N} grid")
            state.coeffs[k % N] = complex(v)
        return state

    @classmethod
    def from_grid(cls, values, shifted=False):
        """State whose trigonometric interpolant passes through the samples.

        `values` are u(x_m) on the (optionally half-cell shifted) grid.
        """
        u = np.asarray(values, dtype=complex)
        N = u.size
        c = np.fft.fft(u) / N
        if shifted:
            k = np.fft.fftfreq(N, d=1.0 / N).astype(int)
            c = c * np.exp(-1j * np.pi * k / N)
        return cls(c)

    # -- basic queries ------------------------------------------------------

    def copy(self):
        return SpectralState(self.coeffs)

    def modes(self):
        """Signed mode numbers in FFT order (aligned with .coeffs)."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).astype(int)

    def coefficient(self, k):
        k = int(k)
        if not -self.N // 2 <= k < self.N // 2:
            raise ValueError(f"mode {k} not on an N={self.N} grid")
        return complex(self.coeffs[k % self.N])

    def to_physical(self, shifted=False):
        c = self.coeffs
        if shifted:
            k = self.modes()
            c = c * np.exp(1j * np.pi * k / self.N)
        return np.fft.ifft(c) * self.N

    def scaled(self, factor):
        return SpectralState(self.coeffs * factor)

    # -- observables --------------------------------------------------------

    def actions(self):
        """Paired numerical actions A_k = |u_k|^2 + |u_{-k}|^2, k = 0..N/2-1."""
        p = np.abs(self.coeffs) ** 2
        half = self.N // 2
        out = np.empty(half)
        out[0] = p[0]
        for k in range(1, half):
            out[k] = p[k] + p[self.N - k]
        return out

    def signed_actions(self):
        """Per-signed-mode actions I_a = |u_a|^2, FFT order."""
        return np.abs(self.coeffs) ** 2

    def l2_norm(self):
        """L2 norm of the field: sqrt(2*pi * sum |u_k|^2)."""
        return math.sqrt(TWO_PI * float(np.sum(np.abs(self.coeffs) ** 2)))

    def sobolev_norm(self, s):
        """sqrt( sum max(1,|k|)^{2s} * 2 |u_k|^2 ).

        The factor 2 accounts for the implicit conjugate half of the state;
        it cancels in every drift ratio.
        """
        if s < 0:
            raise ValueError("Sobolev index s must be >= 0")
        w = np.maximum(1.0, np.abs(self.modes())).astype(float) ** (2.0 * s)
        return math.sqrt(float(np.sum(w * 2.0 * np.abs(self.coeffs) ** 2)))

    # -- serialization ------------------------------------------------------

    def to_csv(self):
        """Rows (k, Re u_k, Im u_k), k ascending."""
        lines = ["k,re,im"]
        order = np.argsort(self.modes())
        ks = self.modes()[order]
        cs = self.coeffs[order]
        for k, c in zip(ks, cs):
            lines.append(csv_line([int(k), float(c.real), float(c.imag)]))
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return (isinstance(other, SpectralState) and self.N == other.N
                and np.array_equal(self.coeffs, other.coeffs))


@dataclass(frozen=True)
class InitialSpec:
    """Initial datum: either a named closed form or an explicit coefficient
    table; `scale` multiplies the result, or `scale_to_sobolev` rescales it to
    a prescribed Sobolev-s size.
    """

    formula: str = ""
    coefficients: tuple = field(default_factory=tuple)  # ((k, complex), ...)
    amplitude: float = 1.0
    shifted_grid: bool = True
    scale: float = 1.0
    scale_to_sobolev: float = 0.0     # 0 disables
    sobolev_s: float = 0.0

    def __post_init__(self):
        if bool(self.formula) == bool(self.coefficients):
            raise ValueError("exactly one of formula / coefficients required")
        object.__setattr__(
            self, "coefficients",
            tuple((int(k), complex(v)) for k, v in self.coefficients))


def paper_einit_values(x, amplitude=1.0):
    """The shipped closed-form datum evaluated pointwise.

    0.1/(2 - 2 cos x) + 0.05 (2 e^{2ix} - 2 e^{5ix} + 3 e^{7ix}), times an
    overall amplitude.  The first term has a pole at x = 0 (mod 2*pi).
    """
    x = np.asarray(x, dtype=float)
    denom = 2.0 - 2.0 * np.cos(x)
    if np.any(np.abs(denom) < 1e-9):
        raise SingularGridError(
            "datum 0.1/(2-2cos x) is singular at x=0, which lies on the "
            "unshifted grid; use the half-cell shifted grid or give the "
            "datum as an explicit coefficient list")
    return amplitude * (0.1 / denom
                        + 0.05 * (2 * np.exp(2j * x) - 2 * np.exp(5j * x)
                                  + 3 * np.exp(7j * x)))


def synthesize_initial(spec: InitialSpec, N: int) -> SpectralState:
    """Build the initial state on an N-point grid (N even, >= 16)."""
    if N % 2 or N < 16:
        raise ValueError("N must be even and >= 16")
    if spec.formula:
        if spec.formula != PAPER_EINIT:
            raise ValueError(f"unknown initial-datum formula: {spec.formula!r}")
        sigma = 0.5 if spec.shifted_grid else 0.0
        x = TWO_PI * (np.arange(N) + sigma) / N
        state = SpectralState.from_grid(
            paper_einit_values(x, spec.amplitude), shifted=spec.shifted_grid)
    else:
        state = SpectralState.from_coefficients(dict(spec.coefficients), N)
    if spec.scale != 1.0:
        state = state.scaled(spec.scale)
    if spec.scale_to_sobolev:
        current = state.sobolev_norm(spec.sobolev_s)
        if current == 0.0:
            raise ValueError("cannot rescale the zero state to a target norm")
        state = state.scaled(spec.scale_to_sobolev / current)
    return state
