"""Maximal violation over all tight directions, robustness, and an LP oracle."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, nnls
from scipy.stats import qmc

from . import geometry as geo
from .states import EfficiencySettings, StateModel, probability_vector

V_TOL = 1e-8
LP_TOL = 1e-9
N_STARTS = 32
N_FINE = 4
SAFETY_GRID = 2001

CLASSICAL = "classical-compatible"
NONCLASSICAL = "nonclassical"
INCONCLUSIVE = "inconclusive"


def _spec_of(settings):
    if isinstance(settings, geo.CurveSpec):
        return settings
    if isinstance(settings, EfficiencySettings):
        return geo.CurveSpec.from_etas(settings.etas)
    return geo.CurveSpec.from_etas(settings)


def violation(direction: geo.TightDirection, P):
    """``lam . P - sup``; positive values witness nonclassicality."""
    return float(direction.violation(P))


# --------------------------------------------------------------------------
# LP oracle


@dataclass(frozen=True, eq=False)
class OracleResult:
    feasible: bool
    residual: float
    ts: np.ndarray
    weights: np.ndarray
    status: str = "ok"

    @property
    def inconclusive(self):
        return self.status != "ok"


def _l1_fit(A, b):
    """Minimize ``||A w - b||_1`` over ``w >= 0``."""
    n, G = A.shape
    c = np.concatenate((np.zeros(G), np.ones(2 * n)))
    A_eq = np.hstack((A, np.eye(n), -np.eye(n)))
    tight = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}
    # HiGHS occasionally reports a solve error at tight tolerances; fall back
    for method, options in (("highs", tight), ("highs-ds", tight), ("highs-ipm", {}),
                            ("highs", {})):
        res = linprog(c, A_eq=A_eq, b_eq=b, bounds=(0, None), method=method, options=options)
        if res.status == 0:
            break
    else:
        return None, np.inf
    w = np.maximum(res.x[:G], 0.0)
    r = float(np.sum(np.abs(A @ w - b)))
    # the LP is only solved to its feasibility tolerance; polish on the support
    act = np.flatnonzero(w > 0)
    if act.size:
        wa, _ = nnls(A[:, act], b)
        cand = np.zeros(G)
        cand[act] = wa
        rc = float(np.sum(np.abs(A @ cand - b)))
        if rc < r:
            w, r = cand, rc
    return w, r


def hull_membership_oracle(P, settings, grid=2001, tol=LP_TOL, refine=6):
    """Brute-force test whether ``P`` is a convex combination of curve points.

    Solves ``min ||[Pi(t_j); 1] w - [P; 1]||_1`` with ``w >= 0`` over a uniform
    grid of ``t``, then refines the grid around the active atoms so that curve
    points between grid nodes are reproduced to high accuracy. ``P`` is
    classical iff the residual is at most ``tol``.
    """
    if grid < 2:
        raise ValueError("grid must have at least two points")
    spec = _spec_of(settings)
    P = np.asarray(P, dtype=float)
    if P.shape != (spec.N,):
        raise ValueError(f"expected {spec.N} probabilities")
    b = np.concatenate((P, [1.0]))
    ts = np.linspace(0.0, 1.0, int(grid))
    best = (None, np.inf, ts)
    for _ in range(refine + 1):
        A = np.vstack((geo.curve_point(spec, ts).T, np.ones(len(ts))))
        w, r = _l1_fit(A, b)
        if w is None:
            return OracleResult(False, np.inf, ts, np.zeros(len(ts)), "lp-failure")
        if r < best[1]:
            best = (w, r, ts)
        if r <= tol * 1e-3:
            break
        # zoom in on the support; the previous solution stays feasible
        extra = []
        for i in np.flatnonzero(w > 1e-14):
            lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
            extra.append(np.linspace(lo, hi, 21))
        if not extra:
            break
        ts = np.unique(np.concatenate(extra))
    w, r, ts = best
    keep = w > 1e-14
    return OracleResult(bool(r <= tol), r, ts[keep], w[keep])


# --------------------------------------------------------------------------
# maximal violation


@dataclass(frozen=True, eq=False)
class MaxViolation:
    V: float
    direction: geo.TightDirection
    family: str
    converged: bool = True
    evaluations: int = 0


def _pattern_search(fun, x, h, hmin, maxit=400, diagonal=False, shrink=0.5):
    """Batched coordinate pattern search (maximization) inside the unit cube."""
    S, d = x.shape
    dirs = [np.eye(d)]
    if diagonal:
        for i, j in itertools.combinations(range(d), 2):
            for sj in (1.0, -1.0):
                v = np.zeros(d)
                v[i], v[j] = 1.0, sj
                dirs.append(v[None])
    dirs = np.vstack(dirs)
    dirs = np.vstack((dirs, -dirs))
    fx = fun(x)
    h = np.full(S, float(h))
    nev = S
    it = 0
    while it < maxit:
        act = np.flatnonzero(h >= hmin)
        if act.size == 0:
            break
        cand = np.clip(x[act, None, :] + h[act, None, None] * dirs[None], 0.0, 1.0)
        f = fun(cand.reshape(-1, d)).reshape(act.size, len(dirs))
        nev += f.size
        j = np.argmax(f, axis=1)
        fb = f[np.arange(act.size), j]
        up = fb > fx[act]
        moved = act[up]
        x[moved] = cand[up, j[up]]
        fx[moved] = fb[up]
        h[act[~up]] *= shrink
        it += 1
    return x, fx, nev, it < maxit


def _family_optimum(spec, family, P, rng_seed=0):
    d = geo.free_zero_count(spec.N, family)

    def fun(x):
        return geo.batch_violation(spec, family, x, P)

    if d == 0:
        x = np.zeros((1, 0))
        return x[0], float(fun(x)[0]), 1, True
    starts = qmc.Sobol(d, scramble=True, seed=rng_seed).random(N_STARTS)
    x, fx, nev, ok = _pattern_search(fun, starts, 0.125, 1e-3)
    order = np.argsort(-fx)
    keep = []
    for i in order:
        xs = np.sort(x[i])
        if all(np.max(np.abs(xs - np.sort(x[k]))) > 1e-3 for k in keep):
            keep.append(i)
        if len(keep) == N_FINE:
            break
    x2, fx2, nev2, ok2 = _pattern_search(fun, x[keep].copy(), 1e-3, 1e-8, shrink=0.25)
    nev += nev2
    i = int(np.argmax(fx2))
    xb, fb = np.sort(x2[i]), float(fx2[i])

    # polish along coordinate and diagonal directions to follow ridges
    if d > 1:
        x3, fx3, nev3, _ = _pattern_search(fun, xb[None].copy(), 1e-5, 1e-10, diagonal=True,
                                           shrink=0.25)
        nev += nev3
        if fx3[0] > fb:
            xb, fb = np.sort(x3[0]), float(fx3[0])

    xb, fb, n3 = _degenerate_refine(fun, xb, fb)
    return xb, fb, nev + n3, ok and ok2


def _degenerate_refine(fun, xb, fb, close=1e-3):
    """Re-optimize with near-coinciding zeros merged and near-boundary zeros pinned."""
    d = len(xb)
    groups = [[0]]
    for j in range(1, d):
        if xb[j] - xb[j - 1] < close:
            groups[-1].append(j)
        else:
            groups.append([j])
    lo_pin = xb[0] < close
    hi_pin = xb[-1] > 1.0 - close
    if len(groups) == d and not lo_pin and not hi_pin:
        return xb, fb, 0
    vals = np.array([np.mean(xb[g]) for g in groups])
    free = np.ones(len(groups), bool)
    if lo_pin:
        vals[0], free[0] = 0.0, False
    if hi_pin:
        vals[-1], free[-1] = 1.0, False

    def expand(v):
        full = np.empty((v.shape[0], d))
        for k, g in enumerate(groups):
            full[:, g] = v[:, [k]]
        return full

    def sub(y):
        v = np.tile(vals, (y.shape[0], 1))
        v[:, free] = y
        return fun(expand(v))

    nev = 1
    if free.any():
        y0 = vals[free][None].copy()
        y, fy, n, _ = _pattern_search(sub, y0, 1e-3, 1e-10, diagonal=True, shrink=0.25)
        nev += n
        cand_v = vals.copy()
        cand_v[free] = y[0]
        cand = expand(cand_v[None])[0]
        fc = float(fy[0])
    else:
        cand = expand(vals[None])[0]
        fc = float(fun(cand[None])[0])
    if fc > fb:
        return np.sort(cand), fc, nev
    return xb, fb, nev


def max_violation(P, settings, safety_grid=SAFETY_GRID) -> MaxViolation:
    """Largest ``lam . P - sup`` over every tight family of the curve.

    Multi-start batched pattern search over the ordered zeros of each family
    (32 scrambled Sobol starts), a fine search from the best few, a
    Nelder-Mead polish, then a re-optimization with merged or pinned zeros
    when the optimum is degenerate. The winning sup is checked against a
    dense grid and raised if the grid finds a larger value.
    """
    spec = _spec_of(settings)
    P = np.asarray(P, dtype=float)
    if P.shape != (spec.N,):
        raise ValueError(f"expected {spec.N} probabilities, got shape {P.shape}")
    if spec.N < 2:
        raise ValueError("at least two settings are needed")
    best = None
    nev = 0
    converged = True
    for family in geo.families_for(spec.N):
        x, f, n, ok = _family_optimum(spec, family, P)
        nev += n
        converged &= ok
        if best is None or f > best[1]:
            best = (family, f, x)
    family, f, x = best
    zeros = geo.ZeroSet(tuple(np.sort(x)), geo._FAMILY_BOUNDARY[family])
    direction = geo.tight_direction(spec, zeros)
    if safety_grid:
        gmax = geo.grid_max(direction, safety_grid)
        if gmax > direction.sup_value:
            direction = geo.TightDirection(direction.lam, direction.zeros, gmax, True, spec)
    V = float(direction.violation(P))
    return MaxViolation(V, direction, family, converged, nev)


# --------------------------------------------------------------------------
# robustness


@dataclass(frozen=True)
class UncertaintyDomain:
    """Box ``|delta_i| <= bounds_i`` of calibration errors on the settings."""

    bounds: tuple

    def __post_init__(self):
        b = tuple(float(v) for v in np.atleast_1d(self.bounds))
        if any(v < 0 or not np.isfinite(v) for v in b):
            raise ValueError("uncertainty half-widths must be finite and non-negative")
        object.__setattr__(self, "bounds", b)

    def validate(self, settings: EfficiencySettings):
        """Reject boxes that can leave (0, 1] or swap the order of the settings.

        The range check applies to the total efficiency ``eta_c * eta_i``
        seen by the detector.
        """
        b = np.asarray(self.bounds)
        etas = np.asarray(settings.etas)
        if b.shape != etas.shape:
            raise ValueError(f"need {len(etas)} half-widths, got {len(b)}")
        lo = settings.eta_c * (etas - b)
        hi = settings.eta_c * (etas + b)
        if np.any(lo <= 0) or np.any(hi > 1.0 + 1e-12):
            raise ValueError("uncertainty box leaves the efficiency range (0, 1]")
        if np.any(etas[1:] - b[1:] <= etas[:-1] + b[:-1]):
            raise ValueError("uncertainty box allows the settings to swap order")
        return True


@dataclass(eq=False)
class CertificationReport:
    """Outcome of a certification run."""

    verdict: str
    V: float
    best_direction: geo.TightDirection | None
    best_delta: np.ndarray | None = None
    oracle_agrees: bool | None = None
    epsilon: float | None = None
    family: str | None = None
    mode: str = "measured"
    oracle: OracleResult | None = None
    moments: object = None
    timings: dict = field(default_factory=dict)
    converged: bool = True

    def to_dict(self):
        d = self.best_direction
        out = {
            "verdict": self.verdict,
            "V": self.V,
            "epsilon": self.epsilon,
            "lambda": None if d is None else [float(v) for v in d.lam],
            "sup": None if d is None else float(d.sup_value),
            "zeros": None if d is None else list(d.zeros.ts),
            "tau": None if d is None else list(d.zeros.boundary),
            "family": self.family,
            "best_delta": None if self.best_delta is None else [float(v) for v in self.best_delta],
            "mode": self.mode,
            "oracle": None if self.oracle is None else {
                "feasible": self.oracle.feasible,
                "residual": self.oracle.residual,
                "agrees": self.oracle_agrees,
            },
            "moments": self.moments,
            "converged": self.converged,
            "timings": dict(self.timings),
        }
        return out


def decide(V, epsilon=None, z=3.0, converged=True, v_tol=V_TOL):
    """Verdict from a violation and its optional statistical error."""
    if not converged:
        return INCONCLUSIVE
    if epsilon is None:
        return NONCLASSICAL if V > v_tol else CLASSICAL
    if V > max(z * epsilon, v_tol):
        return NONCLASSICAL
    if V <= v_tol:
        return CLASSICAL
    return INCONCLUSIVE


def _vector_at(source, settings, delta, mode):
    if mode == "model":
        eta = settings.eta_c * (np.asarray(settings.etas) + delta)
        return np.atleast_1d(np.asarray(source.noclick(eta), dtype=float))
    return np.asarray(source, dtype=float)


def robust_violation(source, settings: EfficiencySettings, domain: UncertaintyDomain | None = None,
                     mode=None, n_random=8, warm=(), seed=0):
    """Minimize the maximal violation over the calibration-error box.

    Parameters
    ----------
    source : StateModel or array
        A state model (P recomputed at the perturbed settings in ``"model"``
        mode) or measured probabilities (held fixed).
    settings : EfficiencySettings
        Nominal settings ``eta_0``.
    domain : UncertaintyDomain, optional
        Defaults to ``settings.delta_bound`` or the zero box.
    mode : {"measured", "model"}, optional
        ``"measured"`` keeps the data fixed and perturbs only the curve
        exponents; ``"model"`` recomputes P from the state at every candidate
        setting. Defaults to ``"measured"``. A state model in measured mode
        is evaluated once at the nominal settings.
    warm : sequence of arrays
        Extra ``delta`` seeds.

    Returns
    -------
    CertificationReport with ``V = min_delta V(eta_0 + delta)``.
    """
    t0 = time.perf_counter()
    if mode is None:
        mode = "measured"
    if mode not in ("measured", "model"):
        raise ValueError(f"unknown mode {mode!r}")
    if domain is None:
        domain = UncertaintyDomain(settings.delta_bound or (0.0,) * settings.N)
    domain.validate(settings)
    b = np.asarray(domain.bounds)
    eta0 = np.asarray(settings.etas)
    if isinstance(source, StateModel):
        if mode == "measured":
            source = probability_vector(source, settings)
    elif mode == "model":
        raise ValueError("model mode needs a state model")

    cache = {}

    def V_at(delta):
        key = tuple(np.round(delta, 15))
        if key not in cache:
            P = _vector_at(source, settings, delta, mode)
            cache[key] = max_violation(P, geo.CurveSpec.from_etas(eta0 + delta))
        return cache[key]

    if not np.any(b > 0):
        mv = V_at(np.zeros_like(b))
        return CertificationReport(decide(mv.V, converged=mv.converged), mv.V, mv.direction,
                                   np.zeros_like(b), family=mv.family, mode=mode,
                                   timings={"robust": time.perf_counter() - t0},
                                   converged=mv.converged)

    seeds = [np.array(c) * b for c in itertools.product((-1.0, 1.0), repeat=len(b))]
    seeds.append(np.zeros_like(b))
    if n_random:
        u = qmc.Sobol(len(b), scramble=True, seed=seed).random(n_random)
        seeds += [(2 * r - 1) * b for r in u]
    seeds += [np.clip(np.asarray(w, float), -b, b) for w in warm]
    vals = [V_at(s).V for s in seeds]
    order = np.argsort(vals)
    best_d, best_v = seeds[order[0]], vals[order[0]]

    # coordinate descent in delta from the two best seeds
    active = b > 0
    for i in order[:2]:
        d = seeds[i].copy()
        fd = vals[i]
        h = 0.5 * b
        while np.any(h[active] >= 1e-3 * b[active]):
            improved = False
            for k in np.flatnonzero(active):
                for s in (1.0, -1.0):
                    c = d.copy()
                    c[k] = np.clip(c[k] + s * h[k], -b[k], b[k])
                    fc = V_at(c).V
                    if fc < fd:
                        d, fd, improved = c, fc, True
            if not improved:
                h = h * 0.5
        if fd < best_v:
            best_d, best_v = d, fd
    mv = V_at(best_d)
    return CertificationReport(decide(mv.V, converged=mv.converged), mv.V, mv.direction, best_d,
                               family=mv.family, mode=mode,
                               timings={"robust": time.perf_counter() - t0},
                               converged=mv.converged)


def oracle_agreement(V, oracle: OracleResult, band=1e-7):
    """``True`` when both verdicts match; ``None`` inside the boundary band."""
    if oracle.inconclusive or abs(V) < band:
        return None
    return (V > 0) == (not oracle.feasible)


def certify(P, settings: EfficiencySettings, tests=("linear", "oracle"), epsilon=None, z=3.0,
            grid=2001, moment_form="hausdorff"):
    """Run the selected tests on a measured vector and assemble a report."""
    from . import moments

    P = np.asarray(P, dtype=float)
    timings = {}
    t0 = time.perf_counter()
    mv = max_violation(P, settings)
    timings["linear"] = time.perf_counter() - t0
    report = CertificationReport(decide(mv.V, epsilon, z, mv.converged), mv.V, mv.direction,
                                 epsilon=epsilon, family=mv.family, converged=mv.converged,
                                 timings=timings)
    if "oracle" in tests:
        t0 = time.perf_counter()
        report.oracle = hull_membership_oracle(P, settings, grid)
        report.oracle_agrees = oracle_agreement(mv.V, report.oracle)
        timings["oracle"] = time.perf_counter() - t0
    if "moments" in tests:
        t0 = time.perf_counter()
        if settings.is_uniform:
            mm = moments.build_moment_matrices(P, settings.N, form=moment_form)
            mv_m = moments.is_classical_moments(mm)
            report.moments = {"classical": mv_m.classical, "min_eig_m1": mv_m.min_eig_m1,
                              "min_eig_m2": mv_m.min_eig_m2}
        else:
            report.moments = {"skipped": "settings are not uniform"}
        timings["moments"] = time.perf_counter() - t0
    return report


__all__ = [
    "violation",
    "max_violation",
    "robust_violation",
    "hull_membership_oracle",
    "certify",
    "decide",
    "oracle_agreement",
    "CertificationReport",
    "UncertaintyDomain",
    "OracleResult",
    "MaxViolation",
    "CLASSICAL",
    "NONCLASSICAL",
    "INCONCLUSIVE",
]
