"""Frequency models of the linear operator and their stepsize-dependent cut-off.

The concrete model is the cubic NLS lattice on the 1-d torus with a smoothing
convolution potential: omega_a = a^2 - potential_scale * 2/(10 + 2 a^2).
Individual indices can be overridden with explicit values (used to engineer
resonant frequency triples), and an "explicit" model takes every retained
frequency from the override table.
"""

import math
from dataclasses import dataclass, field

import numpy as np

K_INF = math.inf

NLS_CONVOLUTION = "nls-convolution"
EXPLICIT = "explicit"
_KINDS = (NLS_CONVOLUTION, EXPLICIT)


class FrequencyRangeError(ValueError):
    """Index outside the retained range, or missing from an explicit model."""


class ParameterError(ValueError):
    """Invalid stepsize/cut-off parameter."""


@dataclass(frozen=True)
class FrequencyModel:
    """Rule producing the frequency omega_a for every retained index a.

    Immutable; evaluation is pure, so models can be shared freely.
    `index_bound` is the largest retained |a| (k_max). The default 50 matches
    a 100-coefficient collocation grid (indices -50 .. 49).
    """

    kind: str = NLS_CONVOLUTION
    potential_scale: float = 1.0
    overrides: tuple = field(default_factory=tuple)  # ((index, value), ...)
    index_bound: int = 50

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown frequency model kind: {self.kind!r}")
        if self.index_bound < 1:
            raise ParameterError("index_bound must be >= 1")
        pairs = tuple((int(a), float(v)) for a, v in self.overrides)
        seen = set()
        for a, _ in pairs:
            if a in seen:
                raise ParameterError(f"duplicate override for index {a}")
            seen.add(a)
        object.__setattr__(self, "overrides", pairs)

    @property
    def override_map(self):
        return dict(self.overrides)

    def with_overrides(self, mapping):
        merged = self.override_map
        merged.update({int(a): float(v) for a, v in dict(mapping).items()})
        return FrequencyModel(self.kind, self.potential_scale,
                              tuple(sorted(merged.items())), self.index_bound)


def frequency(model: FrequencyModel, a: int) -> float:
    """omega_a: override if present, else the model formula."""
    a = int(a)
    if abs(a) > model.index_bound:
        raise FrequencyRangeError(
            f"index {a} outside retained range |a| <= {model.index_bound}")
    for idx, val in model.overrides:
        if idx == a:
            return val
    if model.kind == EXPLICIT:
        raise FrequencyRangeError(
            f"explicit model has no frequency for index {a}")
    return float(a * a) - model.potential_scale * 2.0 / (10.0 + 2.0 * a * a)


def frequency_array(model: FrequencyModel, indices) -> np.ndarray:
    """Vectorized frequency lookup for an integer index array."""
    idx = np.asarray(indices, dtype=int)
    if idx.size and np.abs(idx).max() > model.index_bound:
        bad = idx[np.abs(idx) > model.index_bound].flat[0]
        raise FrequencyRangeError(
            f"index {bad} outside retained range |a| <= {model.index_bound}")
    if model.kind == EXPLICIT:
        return np.array([frequency(model, int(a)) for a in idx.ravel()],
                        dtype=float).reshape(idx.shape)
    af = idx.astype(float)
    out = af * af - model.potential_scale * 2.0 / (10.0 + 2.0 * af * af)
    for a, v in model.overrides:
        out[idx == a] = v
    return out


def truncate(model: FrequencyModel, h: float, K: float, a: int) -> float:
    """Truncated frequency omega_a^h: omega_a if |h*omega_a| <= K, else 0.

    The boundary |h*omega| == K is kept. K = +inf disables the cut-off.
    The absolute value handles override models with negative frequencies.
    """
    if not h > 0:
        raise ParameterError("stepsize h must be positive")
    if not K > 0:
        raise ParameterError("cut-off K must be positive")
    w = frequency(model, a)
    if K == K_INF:
        return w
    return w if abs(h * w) <= K else 0.0


def truncate_array(model: FrequencyModel, h: float, K: float, indices) -> np.ndarray:
    if not h > 0:
        raise ParameterError("stepsize h must be positive")
    if not K > 0:
        raise ParameterError("cut-off K must be positive")
    w = frequency_array(model, indices)
    if K == K_INF:
        return w
    return np.where(np.abs(h * w) <= K, w, 0.0)
