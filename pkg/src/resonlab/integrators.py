"""Elementary flows and the composed time-stepping schemes.

All schemes compose the exact nonlinear flow (a pointwise phase rotation in
physical space) with a diagonal linear map in Fourier space:

  exact-split      multiplier e^{-i h omega_k}
  mid-split        midpoint stability function (1 - i h omega_k/2)/(1 + i h omega_k/2)
  truncated-split  e^{-i h omega_k} on modes with h|omega_k| <= K, identity above
  midpoint         fully implicit midpoint rule, fixed-point solve per step

Every linear multiplier is unimodular, so the discrete L2 norm is conserved
exactly by the three splitting-type schemes and to solver tolerance by the
midpoint rule.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import freqlat
from .freqlat import FrequencyModel, K_INF, ParameterError
from .spectral import SpectralState
from .tableio import csv_line

EXACT_SPLIT = "exact-split"
MID_SPLIT = "mid-split"
MIDPOINT = "midpoint"
TRUNCATED_SPLIT = "truncated-split"
SCHEMES = (EXACT_SPLIT, MID_SPLIT, MIDPOINT, TRUNCATED_SPLIT)

PHASE_EXACT = "exact"
PHASE_MIDPOINT_RATIONAL = "midpoint-rational"
PHASE_TRUNCATED_EXACT = "truncated-exact"


class MidpointDivergenceError(RuntimeError):
    """Fixed-point solve failed to contract (stepsize too large for the data).

    Carries the step index, the last residual, and any series recorded up to
    the failing step (`partial_series`, set by `run`).
    """

    def __init__(self, step_index, residual, iterations):
        super().__init__(
            f"midpoint fixed-point iteration did not converge at step "
            f"{step_index}: residual {residual:.3e} after {iterations} iterations")
        self.step_index = step_index
        self.residual = residual
        self.iterations = iterations
        self.partial_series = None


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str
    h: float
    freq: FrequencyModel
    K: float = K_INF
    fixed_point_tol: float = 1e-12
    fixed_point_max_iters: int = 200

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterError(f"unknown scheme: {self.scheme!r}")
        if not self.h > 0:
            raise ParameterError("stepsize h must be positive")
        if self.scheme == TRUNCATED_SPLIT and not math.isfinite(self.K):
            raise ParameterError("truncated-split requires a finite cut-off K")
        if not self.K > 0:
            raise ParameterError("cut-off K must be positive")
        if not self.fixed_point_tol > 0 or self.fixed_point_max_iters < 1:
            raise ParameterError("midpoint solver tolerances must be positive")


def nonlinear_flow(state: SpectralState, h: float) -> SpectralState:
    """Exact flow of the cubic part: u -> e^{-i h |u|^2} u pointwise.

    Modulus-preserving at every grid point, hence an L2 isometry; negative h
    gives the inverse flow.
    """
    u = state.to_physical()
    u = u * np.exp(-1j * h * np.abs(u) ** 2)
    return SpectralState.from_grid(u)


def linear_multipliers(kind: str, h: float, freq: FrequencyModel, N: int,
                       K: float = K_INF) -> np.ndarray:
    """Diagonal Fourier multipliers of the linear maps (all unimodular)."""
    ks = np.fft.fftfreq(N, d=1.0 / N).astype(int)
    w = freqlat.frequency_array(freq, ks)
    if kind == PHASE_EXACT:
        return np.exp(-1j * h * w)
    if kind == PHASE_MIDPOINT_RATIONAL:
        return (1.0 - 0.5j * h * w) / (1.0 + 0.5j * h * w)
    if kind == PHASE_TRUNCATED_EXACT:
        return np.where(np.abs(h * w) <= K, np.exp(-1j * h * w), 1.0 + 0.0j)
    raise ValueError(f"unknown linear phase kind: {kind!r}")


def linear_phase(state: SpectralState, h: float, kind: str,
                 freq: FrequencyModel, K: float = K_INF) -> SpectralState:
    if not h > 0:
        raise ParameterError("stepsize h must be positive")
    mult = linear_multipliers(kind, h, freq, state.N, K)
    return SpectralState(state.coeffs * mult)


def _cubic_term(state: SpectralState) -> np.ndarray:
    """Fourier coefficients of |u|^2 u (collocation product, no dealiasing)."""
    u = state.to_physical()
    return np.fft.fft(np.abs(u) ** 2 * u) / state.N


def step_midsplit(state: SpectralState, cfg: SchemeConfig) -> SpectralState:
    return linear_phase(nonlinear_flow(state, cfg.h), cfg.h,
                        PHASE_MIDPOINT_RATIONAL, cfg.freq)


def step_truncated_split(state: SpectralState, cfg: SchemeConfig) -> SpectralState:
    return linear_phase(nonlinear_flow(state, cfg.h), cfg.h,
                        PHASE_TRUNCATED_EXACT, cfg.freq, cfg.K)


def step_exact_split(state: SpectralState, cfg: SchemeConfig) -> SpectralState:
    return linear_phase(nonlinear_flow(state, cfg.h), cfg.h,
                        PHASE_EXACT, cfg.freq)


def step_midpoint(state: SpectralState, cfg: SchemeConfig,
                  nonlinear: bool = True, _step_index: int = 0) -> SpectralState:
    """One step of the implicit midpoint rule.

    Iterates on the midpoint value w = (u^{n+1}+u^n)/2:
        w <- (I + i h H0/2)^{-1} (u^n - (i h/2) g(w)),   g(u) = |u|^2 u,
    with the linear resolvent applied exactly (diagonal in Fourier space).
    Converged when the l2 change of w drops below fixed_point_tol; then
    u^{n+1} = 2w - u^n.  `nonlinear=False` disables g (the scheme must then
    equal the midpoint-rational phase map exactly).
    """
    h = cfg.h
    ks = np.fft.fftfreq(state.N, d=1.0 / state.N).astype(int)
    w_freq = freqlat.frequency_array(cfg.freq, ks)
    resolvent = 1.0 / (1.0 + 0.5j * h * w_freq)
    u = state.coeffs
    w = u.copy()
    residual = math.inf
    # non-finite intermediates are expected on divergence and handled below
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(cfg.fixed_point_max_iters):
            g = _cubic_term(SpectralState(w)) if nonlinear else 0.0
            w_new = resolvent * (u - 0.5j * h * g)
            residual = float(np.linalg.norm(w_new - w))
            w = w_new
            if not math.isfinite(residual):
                raise MidpointDivergenceError(_step_index, residual, it + 1)
            if residual < cfg.fixed_point_tol:
                return SpectralState(2.0 * w - u)
    raise MidpointDivergenceError(_step_index, residual,
                                  cfg.fixed_point_max_iters)


_STEPPERS = {
    EXACT_SPLIT: step_exact_split,
    MID_SPLIT: step_midsplit,
    TRUNCATED_SPLIT: step_truncated_split,
}

_PHASE_OF_SCHEME = {
    EXACT_SPLIT: PHASE_EXACT,
    MID_SPLIT: PHASE_MIDPOINT_RATIONAL,
    TRUNCATED_SPLIT: PHASE_TRUNCATED_EXACT,
}


def step(state: SpectralState, cfg: SchemeConfig, _step_index: int = 0) -> SpectralState:
    if cfg.scheme == MIDPOINT:
        return step_midpoint(state, cfg, _step_index=_step_index)
    return _STEPPERS[cfg.scheme](state, cfg)


def _make_stepper(cfg: SchemeConfig, N: int):
    """Per-run advance function on raw coefficient arrays.

    Precomputes the diagonal multipliers once; the arithmetic is the same
    expressions in the same order as the single-step functions, so a run is
    bitwise identical to iterating `step`.
    """
    h = cfg.h
    if cfg.scheme == MIDPOINT:
        ks = np.fft.fftfreq(N, d=1.0 / N).astype(int)
        resolvent = 1.0 / (1.0 + 0.5j * h * freqlat.frequency_array(cfg.freq, ks))

        def advance(c, step_index):
            u = c.copy()
            w = u.copy()
            with np.errstate(over="ignore", invalid="ignore"):
                for it in range(cfg.fixed_point_max_iters):
                    uw = np.fft.ifft(w) * N
                    g = np.fft.fft(np.abs(uw) ** 2 * uw) / N
                    w_new = resolvent * (u - 0.5j * h * g)
                    residual = float(np.linalg.norm(w_new - w))
                    w = w_new
                    if not math.isfinite(residual):
                        raise MidpointDivergenceError(step_index, residual, it + 1)
                    if residual < cfg.fixed_point_tol:
                        return 2.0 * w - u
            raise MidpointDivergenceError(step_index, residual,
                                          cfg.fixed_point_max_iters)
    else:
        mult = linear_multipliers(_PHASE_OF_SCHEME[cfg.scheme], h, cfg.freq,
                                  N, cfg.K)

        def advance(c, step_index):
            u = np.fft.ifft(c) * N
            u = u * np.exp(-1j * h * np.abs(u) ** 2)
            return np.fft.fft(u) / N * mult

    return advance


@dataclass
class ActionSeries:
    """Time-indexed record of paired actions and norms along a run."""

    times: np.ndarray
    actions: np.ndarray          # shape (n_records, N/2)
    l2: np.ndarray
    sobolev: np.ndarray
    sobolev_s: float

    @property
    def n_records(self):
        return len(self.times)

    def action_of_mode(self, k: int) -> np.ndarray:
        return self.actions[:, k]

    def to_csv(self) -> str:
        half = self.actions.shape[1]
        header = ["t"] + [f"A_{k}" for k in range(half)] + ["l2_norm",
                                                            f"sobolev_{self.sobolev_s!r}"]
        lines = [",".join(header)]
        for i in range(self.n_records):
            row = [float(self.times[i])]
            row.extend(float(a) for a in self.actions[i])
            row.append(float(self.l2[i]))
            row.append(float(self.sobolev[i]))
            lines.append(csv_line(row))
        return "\n".join(lines) + "\n"


def run(state0: SpectralState, cfg: SchemeConfig, n_steps: int,
        record_every: int = 1, sobolev_s: float = 0.0,
        on_record=None) -> ActionSeries:
    """Iterate the configured step, recording every `record_every` steps.

    The initial state is always recorded; n_steps = 0 yields a one-record
    series.  `on_record(step_index, time, state)` is invoked at each recorded
    instant (including step 0).  A midpoint divergence propagates with the
    partial series attached.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")

    times, actions, l2, sob = [], [], [], []

    def record(i, state):
        t = i * cfg.h
        times.append(t)
        actions.append(state.actions())
        l2.append(state.l2_norm())
        sob.append(state.sobolev_norm(sobolev_s))
        if on_record is not None:
            on_record(i, t, state)

    def build():
        return ActionSeries(np.array(times), np.array(actions),
                            np.array(l2), np.array(sob), sobolev_s)

    advance = _make_stepper(cfg, state0.N)
    coeffs = state0.coeffs.copy()
    record(0, SpectralState(coeffs))
    for i in range(1, n_steps + 1):
        try:
            coeffs = advance(coeffs, i - 1)
        except MidpointDivergenceError as err:
            err.partial_series = build()
            raise
        if i % record_every == 0 or i == n_steps:
            record(i, SpectralState(coeffs))
    return build()
