"""The two-phase sense-then-combine protocol.

Each round the UAV first flies the stop plan and measures, per stop, the
sum of effective gains plus receiver noise (the pilot flyover).  On the
second flyover every sensor backscatters its reading simultaneously, so
stop ``k`` yields ``sum_i g_i(k) * d_i + n_k``.  The UAV then forms a
scalar estimate as a weighted sum of the per-stop aggregates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import GainMatrix
from .geometry import SensorField
from .rng import make_rng


@dataclass(frozen=True)
class SumGainSamples:
    """Pilot-flyover measurements: per-stop sum of effective gains plus noise."""

    alpha: np.ndarray
    noise_var: float

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64).copy()
        if alpha.ndim != 1 or alpha.size == 0:
            raise ValueError("alpha must be a non-empty 1-d array")
        if not self.noise_var >= 0.0:
            raise ValueError(f"noise_var must be non-negative, got {self.noise_var}")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "noise_var", float(self.noise_var))

    @property
    def k(self) -> int:
        return self.alpha.size


@dataclass(frozen=True)
class AggregateSamples:
    """Data-flyover measurements: per-stop gain-weighted data sums plus noise."""

    dbar: np.ndarray
    noise_var: float

    def __post_init__(self):
        dbar = np.asarray(self.dbar, dtype=np.float64).copy()
        if dbar.ndim != 1 or dbar.size == 0:
            raise ValueError("dbar must be a non-empty 1-d array")
        if not self.noise_var >= 0.0:
            raise ValueError(f"noise_var must be non-negative, got {self.noise_var}")
        dbar.setflags(write=False)
        object.__setattr__(self, "dbar", dbar)
        object.__setattr__(self, "noise_var", float(self.noise_var))

    @property
    def k(self) -> int:
        return self.dbar.size


@dataclass(frozen=True)
class BetaVector:
    """Combining coefficients, optionally clamped to a total budget.

    If ``budget`` is set and ``sum(beta)`` exceeds it, the whole vector
    is rescaled uniformly so the sum equals the budget; coefficients must
    be non-negative.
    """

    beta: np.ndarray
    budget: float | None = None

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64).copy()
        if beta.ndim == 0:
            beta = beta.reshape(1)
        if beta.ndim != 1 or beta.size == 0:
            raise ValueError("beta must be a non-empty 1-d array")
        if np.any(beta < 0.0):
            raise ValueError("combining coefficients must be non-negative")
        if self.budget is not None:
            if not self.budget > 0.0:
                raise ValueError(f"budget must be positive, got {self.budget}")
            total = beta.sum()
            if total > self.budget:
                beta = beta * (self.budget / total)
            object.__setattr__(self, "budget", float(self.budget))
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)

    @property
    def k(self) -> int:
        return self.beta.size


def sampling_phase(gains: GainMatrix, noise_var: float, seed=None) -> SumGainSamples:
    """Pilot flyover: column sums of the gain matrix plus Gaussian noise.

    Args:
        gains: per-link gains for the deployment under flight.
        noise_var: receiver noise variance; 0 gives exact column sums.
        seed: int or SeedSequence for the noise stream.
    """
    if not noise_var >= 0.0:
        raise ValueError(f"noise_var must be non-negative, got {noise_var}")
    alpha = gains.g.sum(axis=0)
    if noise_var > 0.0:
        alpha = alpha + np.sqrt(noise_var) * make_rng(seed).standard_normal(gains.k)
    return SumGainSamples(alpha=alpha, noise_var=noise_var)


def computation_phase(gains: GainMatrix, data, noise_var: float, seed=None) -> AggregateSamples:
    """Data flyover: per-stop gain-weighted sums of readings plus noise.

    The noise stream is independent of the pilot flyover's whenever the
    two calls receive distinct seeds (see ``rng.spawn_seeds``).
    """
    data = np.asarray(data, dtype=np.float64)
    if data.shape != (gains.n,):
        raise ValueError(f"data must have shape ({gains.n},), got {data.shape}")
    if not noise_var >= 0.0:
        raise ValueError(f"noise_var must be non-negative, got {noise_var}")
    dbar = gains.g.T @ data
    if noise_var > 0.0:
        dbar = dbar + np.sqrt(noise_var) * make_rng(seed).standard_normal(gains.k)
    return AggregateSamples(dbar=dbar, noise_var=noise_var)


def estimate(samples: AggregateSamples, beta: BetaVector) -> float:
    """Combine per-stop aggregates into the scalar estimate ``sum_k beta_k * dbar_k``."""
    if beta.k != samples.k:
        raise ValueError(f"beta has {beta.k} entries but samples have {samples.k}")
    return float(samples.dbar @ beta.beta)


def draw_sensor_data(field: SensorField, seed=None) -> np.ndarray:
    """Draw one reading per sensor from its Gaussian source.

    Zero-variance sensors report their mean exactly.
    """
    std = np.sqrt(field.data_var)
    return field.data_mean + std * make_rng(seed).standard_normal(field.n)
