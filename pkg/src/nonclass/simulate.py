"""Monte Carlo click experiments and the statistical error of a linear witness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import EfficiencySettings, StateModel, probability_vector

BLOCK = 1 << 20  # trials per independent random stream


@dataclass(frozen=True)
class TrialPlan:
    """``M`` trials at every setting, reproducible from ``seed``."""

    trials_per_setting: int
    seed: int
    settings: EfficiencySettings
    state: StateModel

    def __post_init__(self):
        if int(self.trials_per_setting) != self.trials_per_setting or self.trials_per_setting < 1:
            raise ValueError("trials_per_setting must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True, eq=False)
class EmpiricalRecord:
    no_click_counts: np.ndarray
    M: int

    @property
    def p_hat(self):
        return self.no_click_counts / self.M

    def __eq__(self, other):
        return (isinstance(other, EmpiricalRecord) and self.M == other.M
                and np.array_equal(self.no_click_counts, other.no_click_counts))


def _stream(seed, setting, block):
    """Independent generator addressed by ``(seed, setting, block)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), setting, block])))


def sample_counts(P, M, seed):
    """Binomial no-click counts, one stream per setting and trial block."""
    P = np.asarray(P, dtype=float)
    counts = np.zeros(len(P), dtype=np.int64)
    for i, p in enumerate(P):
        done = 0
        block = 0
        while done < M:
            n = min(BLOCK, M - done)
            counts[i] += _stream(seed, i, block).binomial(n, p)
            done += n
            block += 1
    return counts


def run_experiment(plan: TrialPlan) -> EmpiricalRecord:
    """Simulate ``M`` Bernoulli trials per setting with the state's no-click law."""
    P = probability_vector(plan.state, plan.settings)
    M = int(plan.trials_per_setting)
    return EmpiricalRecord(sample_counts(P, M, plan.seed), M)


def witness_error(direction, record: EmpiricalRecord):
    """``sqrt(sum_i lam_i**2 p_i (1 - p_i) / M)`` with plug-in ``p_i = p_hat_i``.

    ``direction`` is a ``TightDirection`` or a plain coefficient vector.
    """
    lam = np.asarray(getattr(direction, "lam", direction), dtype=float)
    p = record.p_hat
    if lam.shape != p.shape:
        raise ValueError("direction and record dimensions differ")
    if record.M < 1:
        raise ValueError("record needs at least one trial")
    return float(np.sqrt(np.sum(lam**2 * p * (1.0 - p)) / record.M))


def significance(V, epsilon, z=3.0):
    """``True`` iff ``V > z * epsilon``."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if z <= 0:
        raise ValueError("z must be positive")
    return bool(V > z * epsilon)


__all__ = [
    "TrialPlan",
    "EmpiricalRecord",
    "run_experiment",
    "sample_counts",
    "witness_error",
    "significance",
]
