"""Nonlinear classicality tests.

For two and three settings the tight linear families collapse to closed-form
envelopes. For uniform settings ``eta_i = i / N`` the no-click vector of a
classical state is a moment sequence ``P_k = E[t**k]`` of a distribution on
[0, 1], so classicality is equivalent to positive semidefiniteness of two
Hankel matrices.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import geometry as geo

PSD_TOL = 1e-9


def envelope_two(P, nu2):
    """``(P_1**nu_2 - P_2, P_2 - P_1)``; classical iff both entries are <= 0."""
    P = np.asarray(P, dtype=float)
    if P.shape != (2,):
        raise ValueError("envelope_two needs exactly two probabilities")
    return float(P[0] ** nu2 - P[1]), float(P[1] - P[0])


def _tau1_scan(P, spec, n=401):
    """Largest violation over the ``tau = 1`` three-setting family."""
    ts = np.linspace(0.0, 1.0, n)
    v = geo.batch_violation(spec, geo.ODD_1, ts[:, None], P)
    i = int(np.argmax(v))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, n - 1)]
    res = minimize_scalar(lambda t: -geo.batch_violation(spec, geo.ODD_1, [[t]], P)[0],
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(max(v[i], -res.fun))


@functools.lru_cache(maxsize=64)
def _check_general_envelope(nu2, nu3, n=200, seed=0):
    """Compare the closed-form ``tau = 0`` envelope against the linear family."""
    spec = geo.CurveSpec((1.0, nu2, nu3))
    rng = np.random.default_rng(seed)
    ts = np.linspace(0.0, 1.0, 801)[:, None]
    bad = 0
    for _ in range(n):
        P = np.sort(rng.uniform(0.01, 1.0, 3))[::-1]
        env = P[1] ** (nu3 - 1) - P[0] ** (nu3 - nu2) * P[2] ** (nu2 - 1)
        lin = float(np.max(geo.batch_violation(spec, geo.ODD_0, ts, P)))
        if abs(env) > 1e-6 and abs(lin) > 1e-6 and np.sign(env) != np.sign(lin):
            bad += 1
    if bad:
        raise RuntimeError(f"general envelope disagrees with the linear family on {bad} points")
    return True


def envelope_three(P, nu2=2.0, nu3=3.0):
    """Three-setting nonlinear violations; classical iff every entry is <= 0.

    For ``nu = (1, 2, 3)`` returns
    ``(P2**2 - P1 P3, (P1 - P2)**2 - (1 - P1)(P2 - P3), 3 P1 - 3 P2 + P3 - 1)``.
    Otherwise the first entry is ``P2**(nu3-1) - P1**(nu3-nu2) P3**(nu2-1)``, the
    second the largest violation of the ``tau = 1`` linear family, and the
    third the violation of its ``t -> 1`` limit direction.
    """
    P = np.asarray(P, dtype=float)
    if P.shape != (3,):
        raise ValueError("envelope_three needs exactly three probabilities")
    p1, p2, p3 = P
    if nu2 == 2.0 and nu3 == 3.0:
        return (float(p2**2 - p1 * p3),
                float((p1 - p2) ** 2 - (1 - p1) * (p2 - p3)),
                float(3 * p1 - 3 * p2 + p3 - 1))
    _check_general_envelope(float(nu2), float(nu3))
    spec = geo.CurveSpec((1.0, nu2, nu3))
    first = p2 ** (nu3 - 1) - p1 ** (nu3 - nu2) * p3 ** (nu2 - 1)
    lim = geo.lambda_three(spec, 1.0, 1)
    return float(first), _tau1_scan(P, spec), float(lim.violation(P))


@dataclass(frozen=True, eq=False)
class MomentMatrices:
    """Hankel matrices of the moment sequence ``(1, P_1, ..., P_N)``."""

    m1: np.ndarray
    m2: np.ndarray
    parity: str
    form: str = "hausdorff"


def build_moment_matrices(P, N=None, uniform=True, form="hausdorff"):
    """Assemble the two moment matrices for uniform settings.

    Parameters
    ----------
    P : array of N probabilities
    N : int, optional
        Number of settings; must match ``len(P)``.
    uniform : bool
        Caller's assertion that ``eta_i = i / N``. The test is meaningless
        otherwise, so ``False`` raises.
    form : {"hausdorff", "printed"}
        For even ``N = 2m`` the localizing matrix for ``t (1 - t)`` is
        ``P_{i+j+1} - P_{i+j+2}`` (``"hausdorff"``, the default). ``"printed"``
        gives ``P_{i+j} - P_{i+j+2}``, which is the ``1 - t**2`` condition of
        the interval [-1, 1] and is kept only for reproduction.
    """
    P = np.asarray(P, dtype=float)
    if N is None:
        N = len(P)
    if len(P) != N or N < 1:
        raise ValueError(f"expected {N} probabilities, got {len(P)}")
    if not uniform:
        raise ValueError("moment matrices require uniform settings eta_i = i/N")
    if form not in ("hausdorff", "printed"):
        raise ValueError(f"unknown form {form!r}")
    s = np.concatenate(([1.0], P))
    m = N // 2
    if N % 2 == 0:
        i = np.arange(m + 1)
        m1 = s[i[:, None] + i[None, :]]
        j = np.arange(m)
        idx = j[:, None] + j[None, :]
        if form == "hausdorff":
            m2 = s[idx + 1] - s[idx + 2]
        else:
            m2 = s[idx] - s[idx + 2]
        parity = "even"
    else:
        i = np.arange(m + 1)
        idx = i[:, None] + i[None, :]
        m1 = s[idx + 1]
        m2 = s[idx] - s[idx + 1]
        parity = "odd"
    return MomentMatrices(m1, m2, parity, form)


@dataclass(frozen=True)
class MomentVerdict:
    classical: bool
    min_eig_m1: float
    min_eig_m2: float

    @property
    def violation(self):
        """Most negative eigenvalue, sign-flipped; positive means nonclassical."""
        return -min(self.min_eig_m1, self.min_eig_m2)


def _min_eig(M):
    if M.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(M)[0])


def is_classical_moments(mm: MomentMatrices, tol=PSD_TOL) -> MomentVerdict:
    """PSD test by smallest eigenvalue, relative to the largest matrix entry."""
    e1, e2 = _min_eig(mm.m1), _min_eig(mm.m2)
    ok = True
    for M, e in ((mm.m1, e1), (mm.m2, e2)):
        scale = float(np.max(np.abs(M))) if M.size else 0.0
        if e < -tol * max(scale, np.finfo(float).tiny):
            ok = False
    return MomentVerdict(ok, e1, e2)


def sylvester_minors(M):
    """All principal minors, keyed by index tuple (exact small-N reproduction)."""
    from itertools import combinations

    n = M.shape[0]
    out = {}
    for k in range(1, n + 1):
        for idx in combinations(range(n), k):
            out[idx] = float(np.linalg.det(M[np.ix_(idx, idx)]))
    return out


def is_classical_sylvester(mm: MomentMatrices, tol=PSD_TOL):
    """Semidefinite Sylvester test: every principal minor is >= -tol."""
    return all(v >= -tol for M in (mm.m1, mm.m2) for v in sylvester_minors(M).values())


__all__ = [
    "envelope_two",
    "envelope_three",
    "MomentMatrices",
    "MomentVerdict",
    "build_moment_matrices",
    "is_classical_moments",
    "is_classical_sylvester",
    "sylvester_minors",
]
