"""No-click probabilities of an on-off detector for a handful of single-mode states.

Every law here is closed form; no density matrices are built. The detection
efficiency enters as the product ``eta_c * eta_i`` of the overall detector
efficiency and the attenuator setting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Complex, Real

import numpy as np

FOCK_MAX = 10**6
SQUEEZE_MAX = 20.0
_WEIGHT_TOL = 1e-12


def _check_eta(eta):
    eta = np.asarray(eta, dtype=float)
    if np.any(~np.isfinite(eta)) or np.any(eta < 0.0) or np.any(eta > 1.0):
        raise ValueError(f"efficiency must lie in [0, 1], got {eta}")
    return eta


def _real_scalar(value, name):
    if isinstance(value, Complex) and not isinstance(value, Real):
        if value.imag != 0:
            raise ValueError(f"{name} must be real, got {value!r}")
        value = value.real
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite")
    return value


def _as_output(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def noclick_coherent(eta, amplitude_sq):
    """No-click probability ``exp(-eta |alpha|^2)`` of a coherent state."""
    eta = _check_eta(eta)
    amplitude_sq = _real_scalar(amplitude_sq, "amplitude_sq")
    if amplitude_sq < 0:
        raise ValueError("amplitude_sq must be non-negative")
    return _as_output(np.exp(-eta * amplitude_sq))


def noclick_fock(eta, n):
    """No-click probability ``(1 - eta)^n`` of the Fock state ``|n>``."""
    eta = _check_eta(eta)
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ValueError(f"photon number must be a non-negative integer, got {n!r}")
    n = int(n)
    if n > FOCK_MAX:
        raise ValueError(f"photon number capped at {FOCK_MAX}")
    if n == 0:
        return _as_output(np.ones_like(eta))
    with np.errstate(divide="ignore"):
        out = np.exp(n * np.log1p(-eta))
    out = np.where(eta == 1.0, 0.0, out)
    return _as_output(out)


def noclick_squeezed_coherent(eta, r, alpha0, quadrature="phase"):
    """No-click probability of the displaced squeezed vacuum ``D(alpha0) S(r) |0>``.

    Parameters
    ----------
    eta : float or array
        Total detection efficiency in [0, 1].
    r : float
        Squeezing parameter, ``0 <= r <= 20``.
    alpha0 : float
        Real coherent amplitude.
    quadrature : {"phase", "amplitude"}
        Which quadrature is squeezed relative to the real displacement.
        ``"phase"`` gives the super-Poissonian phase-squeezed state;
        ``"amplitude"`` flips the sign of the off-diagonal entry of the
        inverse covariance and gives the sub-Poissonian state.

    Notes
    -----
    With ``D = 1 + eta (2 - eta) sinh^2 r`` the result is
    ``exp[(a0, -a0) S (-a0, a0)^T] / sqrt(D)`` where
    ``S = eta / (4 D) [[A, B], [B, A]]``, ``A = eta cosh 2r + 2 - eta`` and
    ``B = +eta sinh 2r`` (phase) or ``-eta sinh 2r`` (amplitude).
    """
    eta = _check_eta(eta)
    r = _real_scalar(r, "r")
    alpha0 = _real_scalar(alpha0, "alpha0")
    if r < 0:
        raise ValueError("squeezing parameter r must be non-negative")
    if r > SQUEEZE_MAX:
        raise ValueError(f"squeezing parameter r > {SQUEEZE_MAX} rejected")
    if quadrature not in ("phase", "amplitude"):
        raise ValueError(f"unknown quadrature {quadrature!r}")

    denom = 1.0 + eta * (2.0 - eta) * np.sinh(r) ** 2
    diag = eta * np.cosh(2 * r) + 2.0 - eta
    off = eta * np.sinh(2 * r) if quadrature == "phase" else -eta * np.sinh(2 * r)
    # (a0, -a0) [[A, B], [B, A]] (-a0, a0)^T = -2 a0^2 (A - B)
    quad = -2.0 * alpha0**2 * (diag - off) * eta / (4.0 * denom)
    return _as_output(np.exp(quad) / np.sqrt(denom))


@dataclass(frozen=True)
class StateModel:
    """Closed-form no-click law of one of the supported states.

    Build instances with the classmethods rather than the raw constructor.
    """

    kind: str
    amplitude_sq: float = 0.0
    photon_number: int = 0
    squeeze: float = 0.0
    amplitude: float = 0.0
    weights: tuple = ()
    amplitudes_sq: tuple = ()
    quadrature: str = "phase"

    KINDS = ("coherent", "fock", "squeezed", "mixture")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown state kind {self.kind!r}")
        if self.kind == "coherent" and self.amplitude_sq < 0:
            raise ValueError("amplitude_sq must be non-negative")
        if self.kind == "fock":
            noclick_fock(0.0, self.photon_number)
        if self.kind == "squeezed":
            noclick_squeezed_coherent(0.0, self.squeeze, self.amplitude, self.quadrature)
        if self.kind == "mixture":
            w = np.asarray(self.weights, dtype=float)
            a = np.asarray(self.amplitudes_sq, dtype=float)
            if w.ndim != 1 or w.shape != a.shape or w.size == 0:
                raise ValueError("mixture needs equal-length, non-empty weights and amplitudes")
            if np.any(w < 0) or abs(w.sum() - 1.0) > _WEIGHT_TOL:
                raise ValueError("mixture weights must be non-negative and sum to 1")
            if np.any(a < 0):
                raise ValueError("mixture amplitudes_sq must be non-negative")

    @classmethod
    def coherent(cls, amplitude_sq):
        return cls("coherent", amplitude_sq=float(amplitude_sq))

    @classmethod
    def fock(cls, n):
        return cls("fock", photon_number=int(n))

    @classmethod
    def squeezed(cls, r, alpha0, quadrature="phase"):
        return cls("squeezed", squeeze=_real_scalar(r, "r"),
                   amplitude=_real_scalar(alpha0, "alpha0"), quadrature=quadrature)

    @classmethod
    def mixture(cls, weights, amplitudes_sq):
        return cls("mixture", weights=tuple(float(w) for w in weights),
                   amplitudes_sq=tuple(float(a) for a in amplitudes_sq))

    def noclick(self, eta):
        """No-click probability at total efficiency ``eta`` (scalar or array)."""
        if self.kind == "coherent":
            return noclick_coherent(eta, self.amplitude_sq)
        if self.kind == "fock":
            return noclick_fock(eta, self.photon_number)
        if self.kind == "squeezed":
            return noclick_squeezed_coherent(eta, self.squeeze, self.amplitude, self.quadrature)
        eta = _check_eta(eta)
        w = np.asarray(self.weights)
        a = np.asarray(self.amplitudes_sq)
        out = np.exp(-np.multiply.outer(eta, a)) @ w
        return _as_output(out)

    def replace(self, **changes):
        fields = dict(self.__dict__)
        fields.update(changes)
        return StateModel(**fields)


@dataclass(frozen=True)
class EfficiencySettings:
    """Attenuator settings ``eta_1 < ... < eta_N`` plus overall efficiency ``eta_c``.

    ``delta_bound`` holds the half-widths of the calibration-uncertainty box;
    ``None`` means the settings are known exactly.
    """

    etas: tuple
    eta_c: float = 1.0
    delta_bound: tuple | None = None

    def __post_init__(self):
        etas = tuple(float(e) for e in self.etas)
        object.__setattr__(self, "etas", etas)
        if len(etas) < 1:
            raise ValueError("at least one efficiency setting is required")
        if any(not (0.0 < e <= 1.0) for e in etas):
            raise ValueError(f"efficiency settings must lie in (0, 1], got {etas}")
        if any(b <= a for a, b in zip(etas, etas[1:])):
            raise ValueError(f"efficiency settings must be strictly increasing, got {etas}")
        if not (0.0 < self.eta_c <= 1.0):
            raise ValueError(f"eta_c must lie in (0, 1], got {self.eta_c}")
        if self.delta_bound is not None:
            bound = tuple(float(b) for b in np.broadcast_to(self.delta_bound, (len(etas),)))
            if any(b < 0 for b in bound):
                raise ValueError("uncertainty half-widths must be non-negative")
            object.__setattr__(self, "delta_bound", bound)

    @classmethod
    def uniform(cls, n, eta_c=1.0, delta_bound=None):
        """Settings ``eta_i = i / n``."""
        return cls(tuple(i / n for i in range(1, n + 1)), eta_c, delta_bound)

    @property
    def N(self):
        return len(self.etas)

    @property
    def nus(self):
        etas = np.asarray(self.etas)
        return etas / etas[0]

    @property
    def effective(self):
        """Total efficiencies ``eta_c * eta_i`` seen by the detector."""
        return self.eta_c * np.asarray(self.etas)

    @property
    def is_uniform(self):
        return np.allclose(self.etas, np.arange(1, self.N + 1) / self.N, rtol=0, atol=1e-12)

    def shifted(self, delta):
        """Copy with ``etas + delta``; ordering is re-validated.

        If a shifted setting exceeds 1 the overall efficiency is folded into
        the settings (``eta_c = 1``), which keeps both the total efficiencies
        and the ratios ``nu_i`` unchanged.
        """
        etas = np.asarray(self.etas) + np.asarray(delta, dtype=float)
        if np.max(etas) > 1.0:
            return EfficiencySettings(tuple(self.eta_c * etas), 1.0, self.delta_bound)
        return EfficiencySettings(tuple(etas), self.eta_c, self.delta_bound)


def probability_vector(state: StateModel, settings: EfficiencySettings) -> np.ndarray:
    """No-click vector ``P_i = P(0 | eta_c eta_i)`` for every setting."""
    return np.atleast_1d(np.asarray(state.noclick(settings.effective), dtype=float))


def random_mixture(rng, n_atoms=None, max_atoms=6, max_amplitude_sq=6.0):
    """Random finite coherent mixture, handy for soundness checks."""
    if n_atoms is None:
        n_atoms = int(rng.integers(1, max_atoms + 1))
    w = rng.dirichlet(np.ones(n_atoms))
    a = rng.uniform(0.0, max_amplitude_sq, n_atoms)
    w = w / w.sum()
    return StateModel.mixture(w, a)


def random_settings(rng, n, eta_c=1.0, min_gap=0.02) -> EfficiencySettings:
    """Random strictly ordered settings in (0, 1] with a minimum spacing."""
    while True:
        etas = np.sort(rng.uniform(0.05, 1.0, n))
        if n == 1 or np.min(np.diff(etas)) >= min_gap:
            return EfficiencySettings(tuple(etas), eta_c)


__all__ = [
    "StateModel",
    "EfficiencySettings",
    "noclick_coherent",
    "noclick_fock",
    "noclick_squeezed_coherent",
    "probability_vector",
    "random_mixture",
    "random_settings",
]

