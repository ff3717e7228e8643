"""Tight supporting directions of the convex hull of the coherent-state curve.

The curve is ``Pi(t) = (t**nu_1, ..., t**nu_N)`` on ``t in [0, 1]`` with
``nu_1 = 1``. A tight direction ``lam`` comes with the generalized polynomial

    Q(t) = sup - lam . Pi(t) = c_0 + sum_i c_i t**nu_i >= 0 on [0, 1],

whose zeros (the touching points) fix it up to scale. Every family is built
by one engine: the zeros are listed as nodes (interior zeros twice, boundary
zeros once), the coefficient vector ``c`` is the oriented null vector of the
node columns of the extended Chebyshev system ``{1, t**nu_1, ..., t**nu_N}``,
and then ``lam = -c[1:]`` and ``sup = c[0]``.

Numerics
--------
* Nodes at ``t = 0`` are divided out exactly: ``Q = t**e_z R(t)`` where ``R``
  lives in the system with shifted exponents. This is also the l'Hopital
  limit of the coinciding-zero constructions at 0.
* Nodes closer than ``CLUSTER_REL`` (relative) are replaced by Newton
  divided differences, evaluated by a Taylor series about the cluster
  centre. The change of basis has positive determinant, so orientation is
  kept and nearly coinciding zeros lose no accuracy.
* Zeros closer than ``MERGE_EPS`` to each other or to 0/1 are merged, which
  routes them to the coinciding-zero (derivative column) form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.special import binom

MERGE_EPS = 1e-6
CLUSTER_REL = 0.05
_MAX_TAYLOR = 90

ODD_0 = "odd-0"
ODD_1 = "odd-1"
INTERIOR = "even-interior"
BOUNDARY = "even-boundary"
FAMILIES = (ODD_0, ODD_1, INTERIOR, BOUNDARY)

_FAMILY_BOUNDARY = {
    ODD_0: (0.0,),
    ODD_1: (1.0,),
    INTERIOR: (),
    BOUNDARY: (0.0, 1.0),
}


# --------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class CurveSpec:
    """Exponents ``nu_i = eta_i / eta_1`` of the classical curve."""

    nus: tuple

    def __post_init__(self):
        nus = tuple(float(v) for v in self.nus)
        object.__setattr__(self, "nus", nus)
        if len(nus) < 1:
            raise ValueError("curve needs at least one exponent")
        if nus[0] != 1.0:
            raise ValueError(f"first exponent must be exactly 1, got {nus[0]}")
        if any(b <= a for a, b in zip(nus, nus[1:])):
            raise ValueError(f"exponents must be strictly increasing, got {nus}")
        if not all(math.isfinite(v) for v in nus):
            raise ValueError("exponents must be finite")

    @classmethod
    def from_etas(cls, etas):
        etas = np.asarray(etas, dtype=float)
        nus = etas / etas[0]
        nus[0] = 1.0
        return cls(tuple(nus))

    @classmethod
    def uniform(cls, n):
        return cls(tuple(float(i) for i in range(1, n + 1)))

    @property
    def N(self):
        return len(self.nus)

    @property
    def exps(self):
        """Exponents of the extended system, constant function first."""
        return np.concatenate(([0.0], self.nus))


@dataclass(frozen=True)
class ZeroSet:
    """Touching points of a tight direction.

    ``ts`` holds the interior zeros (each of multiplicity two, repeated
    entries mean merged zeros) and ``boundary`` the simple boundary zeros,
    a subset of ``{0, 1}``.
    """

    ts: tuple
    boundary: tuple = ()

    def __post_init__(self):
        ts = tuple(float(t) for t in self.ts)
        bnd = tuple(sorted(float(b) for b in self.boundary))
        if any(not (0.0 <= t <= 1.0) for t in ts):
            raise ValueError(f"zeros must lie in [0, 1], got {ts}")
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ValueError(f"zeros must be sorted, got {ts}")
        if any(b not in (0.0, 1.0) for b in bnd) or len(set(bnd)) != len(bnd):
            raise ValueError(f"boundary zeros must be a subset of {{0, 1}}, got {bnd}")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "boundary", bnd)

    @property
    def order(self):
        """Number of zeros counted with multiplicity."""
        return 2 * len(self.ts) + len(self.boundary)

    @property
    def nodes(self):
        return np.sort(np.concatenate((self.boundary, np.repeat(self.ts, 2))))

    @property
    def family(self):
        for name, bnd in _FAMILY_BOUNDARY.items():
            if bnd == self.boundary:
                return name
        raise ValueError(f"boundary set {self.boundary} names no family")


@dataclass(frozen=True, eq=False)
class TightDirection:
    """Unit normal ``lam`` of a supporting hyperplane plus its sup over the curve."""

    lam: np.ndarray
    zeros: ZeroSet
    sup_value: float
    normalized: bool = True
    spec: CurveSpec | None = field(default=None, repr=False)

    @property
    def N(self):
        return len(self.lam)

    def value(self, t):
        """``lam . Pi(t)`` for scalar or array ``t``."""
        return _curve(self.spec.nus, np.asarray(t, dtype=float)) @ self.lam

    def violation(self, P):
        P = np.asarray(P, dtype=float)
        if P.shape[-1] != self.N:
            raise ValueError(f"expected {self.N} probabilities, got {P.shape[-1]}")
        return P @ self.lam - self.sup_value


# --------------------------------------------------------------------------
# curve


def _curve(nus, t):
    nus = np.asarray(nus)
    with np.errstate(divide="ignore"):
        return np.power.outer(t, nus)


def curve_point(spec: CurveSpec, t):
    """``Pi(t) = (t**nu_1, ..., t**nu_N)``."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)) or np.any(~np.isfinite(t)):
        raise ValueError("t must lie in [0, 1]")
    return _curve(spec.nus, t)


def curve_tangent(spec: CurveSpec, t):
    """Derivative ``dPi/dt``; at ``t = 0`` the limit ``(1, 0, ..., 0)``."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise ValueError("t must lie in [0, 1]")
    nus = np.asarray(spec.nus)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = nus * np.power.outer(t, nus - 1.0)
    out = np.where(np.expand_dims(t, -1) == 0.0, (nus == 1.0).astype(float), out)
    return out


def hodge_star(vectors):
    """Cofactor expansion of the formal determinant ``det[e; v_1; ...; v_{N-1}]``.

    Generalizes the cross product: the result is orthogonal to every input.
    """
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    n = V.shape[1]
    if V.shape[0] != n - 1:
        raise ValueError(f"need exactly {n - 1} vectors of dimension {n}, got {V.shape[0]}")
    out = np.empty(n)
    for i in range(n):
        minor = np.delete(V, i, axis=1)
        out[i] = (-1) ** i * (np.linalg.det(minor) if n > 1 else 1.0)
    return out


# --------------------------------------------------------------------------
# engine


def _confluent_order(x):
    """For sorted nodes, how many equal nodes precede each one."""
    r = np.zeros(x.shape, dtype=int)
    for j in range(1, x.shape[-1]):
        r[..., j] = np.where(x[..., j] == x[..., j - 1], r[..., j - 1] + 1, 0)
    return r


def _batch_columns(exps, x):
    """Node columns for a batch of sorted positive nodes.

    Nodes within ``CLUSTER_REL`` (relative) of their predecessor form a
    cluster; column ``j`` is the divided difference ``f[x_s, ..., x_j]`` over
    the cluster prefix, evaluated by a Taylor series about the cluster centre:
    with ``x_i = c (1 + u_i)``,
    ``f[x_s..x_j] = c**(e-k) sum_p binom(e, k+p) h_p(u_s..u_j)`` where ``h_p``
    is the complete homogeneous symmetric polynomial and ``k = j - s``.
    Isolated and repeated nodes reduce to ``binom(e, k) x**(e - k)``.
    """
    B, n = x.shape
    K = len(exps)
    link = np.zeros((B, n), dtype=bool)
    link[:, 1:] = (x[:, 1:] - x[:, :-1]) < CLUSTER_REL * x[:, 1:]
    same = np.zeros((B, n), dtype=bool)
    same[:, 1:] = x[:, 1:] == x[:, :-1]
    if np.array_equal(link, same):
        # only exact repeats: plain derivative columns
        r = _confluent_order(x)
        e = exps[None, :, None]
        rr = r[:, None, :]
        return binom(e, rr) * np.power(x[:, None, :], e - rr)
    # cluster id, start index and centre per node
    cid = np.cumsum(~link, axis=1) - 1
    starts = np.zeros((B, n), dtype=int)
    for j in range(1, n):
        starts[:, j] = np.where(link[:, j], starts[:, j - 1], j)
    k = np.arange(n)[None, :] - starts
    sums = np.zeros((B, n))
    counts = np.zeros((B, n))
    rows = np.arange(B)[:, None]
    np.add.at(sums, (rows, cid), x)
    np.add.at(counts, (rows, cid), 1.0)
    centre = (sums / np.maximum(counts, 1.0))[rows, cid]
    u = x / centre - 1.0
    umax = float(np.max(np.abs(u))) if u.size else 0.0
    J = 1 if umax == 0.0 else min(_MAX_TAYLOR, int(math.ceil(18.0 / -math.log10(umax))) + 2) + 1
    table = binom(exps[:, None], np.arange(n + J)[None, :])  # (K, n+J)
    cols = np.empty((B, K, n))
    H = np.zeros((B, J))
    for j in range(n):
        fresh = ~link[:, j]
        H[fresh] = 0.0
        H[fresh, 0] = 1.0
        uj = u[:, j]
        if np.any(uj != 0.0):
            for p in range(1, J):
                H[:, p] += uj * H[:, p - 1]
        idx = k[:, j][:, None] + np.arange(J)[None, :]  # (B, J)
        coef = table[:, idx]  # (K, B, J)
        series = np.einsum("kbj,bj->bk", coef, H)
        cols[:, :, j] = np.power(centre[:, j][:, None], exps[None, :] - k[:, j][:, None]) * series
    return cols


def _oriented_null(C):
    """Unit vector ``w`` with ``w . C = 0`` and ``det[w, C] > 0``; batched."""
    B, K, _ = C.shape
    if K == 1:
        return np.ones((B, 1))
    Q, R = np.linalg.qr(C, mode="complete")
    w = Q[:, :, -1]
    d = np.diagonal(R, axis1=1, axis2=2)
    sd = np.where(d < 0, -1.0, 1.0)
    sgn = np.sign(np.linalg.det(Q)) * (-1.0) ** (K + 1) * np.prod(sd, axis=1)
    return w * sgn[:, None]


def snap_zeros(ts):
    """Merge zeros within ``MERGE_EPS`` of each other or of 0 and 1."""
    ts = np.sort(np.clip(np.asarray(ts, dtype=float), 0.0, 1.0), axis=-1)
    ts = np.where(ts < MERGE_EPS, 0.0, ts)
    ts = np.where(ts > 1.0 - MERGE_EPS, 1.0, ts)
    for j in range(1, ts.shape[-1]):
        close = ts[..., j] - ts[..., j - 1] < MERGE_EPS
        ts[..., j] = np.where(close, ts[..., j - 1], ts[..., j])
    return ts


def coefficients_from_nodes(exps, nodes):
    """Oriented coefficient vectors ``c`` (``Q = c . (1, Pi)``) for sorted node batches.

    Parameters
    ----------
    exps : (K,) array
        Exponents of the extended system, ``exps[0] = 0``.
    nodes : (B, K-1) array
        Sorted nodes in [0, 1] with multiplicity.

    Returns
    -------
    (B, K) array normalized so that ``||c[1:]|| = 1``.
    """
    exps = np.asarray(exps, dtype=float)
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    B, n = nodes.shape
    K = len(exps)
    if n != K - 1:
        raise ValueError(f"need {K - 1} nodes, got {n}")
    out = np.zeros((B, K))
    z_all = np.sum(nodes == 0.0, axis=1)
    for z in np.unique(z_all):
        rows = np.flatnonzero(z_all == z)
        red = exps[z:] - exps[z]
        x = nodes[rows, z:]
        w = np.empty((len(rows), K - z))
        if x.shape[1] == 0:
            w[:] = 1.0
        else:
            w[:] = _oriented_null(_batch_columns(red, x))
        out[rows, z:] = w
    norm = np.linalg.norm(out[:, 1:], axis=1)
    return out / norm[:, None]


def family_nodes(family, ts):
    """Sorted node arrays for a family given (snapped) interior zeros ``ts``."""
    ts = np.atleast_2d(np.asarray(ts, dtype=float))
    bnd = np.broadcast_to(np.asarray(_FAMILY_BOUNDARY[family], dtype=float),
                          (ts.shape[0], len(_FAMILY_BOUNDARY[family])))
    return np.sort(np.concatenate((bnd, np.repeat(ts, 2, axis=1)), axis=1), axis=1)


def families_for(N):
    """Tight-direction families available for ``N`` settings."""
    if N < 1:
        raise ValueError("N must be positive")
    return (ODD_0, ODD_1) if N % 2 else (INTERIOR, BOUNDARY)


def free_zero_count(N, family):
    """Number of interior zeros that parametrize a family."""
    if family not in families_for(N):
        raise ValueError(f"family {family!r} not available for N={N}")
    return (N - len(_FAMILY_BOUNDARY[family])) // 2


def batch_coefficients(spec: CurveSpec, family, ts, snap=True):
    """Coefficient vectors for a batch of interior-zero tuples of one family."""
    ts = np.atleast_2d(np.asarray(ts, dtype=float))
    if ts.shape[1] != free_zero_count(spec.N, family):
        raise ValueError(f"{family} with N={spec.N} needs {free_zero_count(spec.N, family)} zeros")
    if snap:
        ts = snap_zeros(ts)
    else:
        ts = np.sort(ts, axis=1)
    return coefficients_from_nodes(spec.exps, family_nodes(family, ts)), ts


def batch_violation(spec: CurveSpec, family, ts, P):
    """``lam . P - sup`` for every zero tuple in the batch."""
    c, _ = batch_coefficients(spec, family, ts)
    P = np.asarray(P, dtype=float)
    return -(c[:, 0] + c[:, 1:] @ P)


def tight_direction(spec: CurveSpec, zeros: ZeroSet) -> TightDirection:
    """Tight direction with the given touching points (any family)."""
    if zeros.order != spec.N:
        raise ValueError(f"zero set has order {zeros.order}, curve needs {spec.N}")
    family = zeros.family
    if family not in families_for(spec.N):
        raise ValueError(f"boundary {zeros.boundary} does not fit N={spec.N}")
    c, ts = batch_coefficients(spec, family, np.asarray(zeros.ts).reshape(1, -1))
    return TightDirection(-c[0, 1:], ZeroSet(tuple(ts[0]), zeros.boundary), float(c[0, 0]),
                          True, spec)


# --------------------------------------------------------------------------
# named constructors


def _require_N(spec, cond, what):
    if not cond:
        raise ValueError(f"{what} not defined for N={spec.N}")


def lambda_two(spec: CurveSpec, t1) -> TightDirection:
    """Tangent-line normal ``(nu_2 t1**(nu_2-1), -1)`` at ``Pi(t1)``, unit-normalized."""
    _require_N(spec, spec.N == 2, "lambda_two")
    t1 = float(t1)
    if not 0.0 <= t1 <= 1.0:
        raise ValueError("t1 must lie in [0, 1]")
    nu2 = spec.nus[1]
    lam = np.array([nu2 * t1 ** (nu2 - 1.0), -1.0])
    sup = (nu2 - 1.0) * t1**nu2
    n = np.linalg.norm(lam)
    return TightDirection(lam / n, ZeroSet((t1,)), sup / n, True, spec)


def lambda_nw(spec: CurveSpec | None = None) -> TightDirection:
    """The chord normal ``(-1, 1) / sqrt(2)`` encoding ``P_2 <= P_1``."""
    spec = spec or CurveSpec((1.0, 2.0))
    _require_N(spec, spec.N == 2, "lambda_nw")
    lam = np.array([-1.0, 1.0]) / math.sqrt(2.0)
    return TightDirection(lam, ZeroSet((), (0.0, 1.0)), 0.0, True, spec)


def lambda_three(spec: CurveSpec, t1, tau) -> TightDirection:
    """Explicit closed-form three-setting directions, with their endpoint limits."""
    _require_N(spec, spec.N == 3, "lambda_three")
    if tau not in (0, 1):
        raise ValueError("tau must be 0 or 1")
    t = float(t1)
    if not 0.0 <= t <= 1.0:
        raise ValueError("t1 must lie in [0, 1]")
    _, n2, n3 = spec.nus
    if tau == 0:
        if t < MERGE_EPS:
            lam = np.array([0.0, 0.0, -1.0])
            t = 0.0
        else:
            lam = np.array([-(n3 - n2) * t ** (n2 + n3 - 1), (n3 - 1) * t**n3, -(n2 - 1) * t**n2])
    else:
        if t > 1.0 - MERGE_EPS:
            lam = np.array([n2 * n3 * (n3 - n2), -n3 * (n3 - 1), n2 * (n2 - 1)])
            t = 1.0
        else:
            lam = np.array([
                (n3 - n2) * t ** (n3 + n2 - 1) - n3 * t ** (n3 - 1) + n2 * t ** (n2 - 1),
                -(n3 - 1) * t**n3 + n3 * t ** (n3 - 1) - 1,
                (n2 - 1) * t**n2 - n2 * t ** (n2 - 1) + 1,
            ])
    lam = lam / np.linalg.norm(lam)
    sup = float(lam.sum()) if tau == 1 else 0.0
    return TightDirection(lam, ZeroSet((t,), (float(tau),)), sup, True, spec)


def _family_direction(spec, ts, family):
    ts = tuple(sorted(float(t) for t in ts))
    return tight_direction(spec, ZeroSet(ts, _FAMILY_BOUNDARY[family]))


def lambda_odd(spec: CurveSpec, zeros, tau) -> TightDirection:
    """Odd-``N`` direction touching at ``tau`` and at the ``m`` interior zeros."""
    _require_N(spec, spec.N % 2 == 1, "lambda_odd")
    if tau not in (0, 1):
        raise ValueError("tau must be 0 or 1")
    ts = zeros.ts if isinstance(zeros, ZeroSet) else zeros
    return _family_direction(spec, ts, ODD_1 if tau else ODD_0)


def lambda_even_interior(spec: CurveSpec, zeros) -> TightDirection:
    """Even-``N`` direction touching only at ``m`` interior zeros."""
    _require_N(spec, spec.N % 2 == 0, "lambda_even_interior")
    ts = zeros.ts if isinstance(zeros, ZeroSet) else zeros
    return _family_direction(spec, ts, INTERIOR)


def lambda_even_boundary(spec: CurveSpec, zeros) -> TightDirection:
    """Even-``N`` direction touching at 0, 1 and ``m - 1`` interior zeros; sup is 0."""
    _require_N(spec, spec.N % 2 == 0, "lambda_even_boundary")
    ts = zeros.ts if isinstance(zeros, ZeroSet) else zeros
    return _family_direction(spec, ts, BOUNDARY)


# --------------------------------------------------------------------------
# counting and determinants


def enumerate_configurations(N, family):
    """Number of distinct coinciding-zero variants of a family.

    Odd ``N = 2m + 1`` gives ``2**m`` per ``tau``; even ``N = 2m`` gives
    ``2**(m - 1)`` for the interior family and ``2**(m + 1) - 1`` for the
    boundary family.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    m = N // 2
    if N % 2:
        if family not in (ODD_0, ODD_1):
            raise ValueError(f"family {family!r} not available for odd N")
        return 2**m
    if family == INTERIOR:
        return 2 ** (m - 1)
    if family == BOUNDARY:
        return 2 ** (m + 1) - 1
    raise ValueError(f"family {family!r} not available for even N")


def configuration_patterns(N, family):
    """Representative zero tuples for every structural coinciding-zero pattern.

    Each pattern is a composition of the free zeros into groups of equal
    values, with the outer groups optionally pinned to the family's boundary
    points. Returned as a list of ``ZeroSet``.
    """
    d = free_zero_count(N, family)
    bnd = _FAMILY_BOUNDARY[family]
    out = []
    if d == 0:
        return [ZeroSet((), bnd)]
    for cuts in product((False, True), repeat=d - 1):
        sizes = []
        size = 1
        for c in cuts:
            if c:
                sizes.append(size)
                size = 1
            else:
                size += 1
        sizes.append(size)
        q = len(sizes)
        pins_lo = (False, True) if 0.0 in bnd else (False,)
        pins_hi = (False, True) if 1.0 in bnd else (False,)
        for lo, hi in product(pins_lo, pins_hi):
            if lo and hi and q == 1:
                continue
            vals = list(np.linspace(0.0, 1.0, q + 2)[1:-1])
            if lo:
                vals[0] = 0.0
            if hi:
                vals[-1] = 1.0
            ts = tuple(v for v, s in zip(vals, sizes) for _ in range(s))
            out.append(ZeroSet(ts, bnd))
    return out


def _newton_factor(x):
    """Positive factor relating derivative-column and divided-difference determinants."""
    f = 1.0
    r = _confluent_order(x)
    for k in range(len(x)):
        f *= math.factorial(int(r[k]))
    start = 0
    n = len(x)
    for j in range(1, n + 1):
        if j == n or x[j] - x[j - 1] >= CLUSTER_REL * x[j]:
            g = x[start:j]
            for k in range(len(g)):
                for i in range(k):
                    if g[i] != g[k]:
                        f *= g[k] - g[i]
            start = j
    return f


def chebyshev_determinant(spec: CurveSpec, ts):
    """``Delta(t_0, ..., t_N)`` of the system ``{1, t**nu_1, ..., t**nu_N}``.

    Repeated points take successive derivative columns. Positive for any
    ordered tuple in (0, 1].
    """
    x = np.asarray(ts, dtype=float)
    if x.ndim != 1 or len(x) != spec.N + 1:
        raise ValueError(f"need {spec.N + 1} points, got {x.size}")
    if np.any(np.diff(x) < 0):
        raise ValueError("points must be ordered")
    if np.any(x <= 0) or np.any(x > 1):
        raise ValueError("points must lie in (0, 1]")
    cols = _batch_columns(spec.exps, x[None])[0]
    sign, logdet = np.linalg.slogdet(cols)
    return float(sign * math.exp(logdet) * _newton_factor(x))


def determinant_form(spec: CurveSpec, zeros: ZeroSet, P=None, dps=40):
    """Unnormalized determinant expressions for ``lam . P`` and the sup.

    Evaluated in extended precision with mpmath. Only distinct interior
    zeros away from the boundary points are supported.

    Returns
    -------
    lhs : float or None
        ``lam . P`` for the unnormalized direction (``None`` without ``P``).
    sup : float
        The sup of ``lam . Pi(t)`` over the curve.
    lam : ndarray
        The unnormalized direction.
    """
    import mpmath

    family = zeros.family
    N = spec.N
    if zeros.order != N:
        raise ValueError("zero set order does not match the curve")
    ts = list(zeros.ts)
    if len(set(ts)) != len(ts) or any(t in (0.0, 1.0) for t in ts):
        raise ValueError("determinant form needs distinct interior zeros in (0, 1)")
    with mpmath.workdps(dps):
        nus = [mpmath.mpf(v) for v in spec.nus]

        def pi(t):
            t = mpmath.mpf(t)
            return [t**v for v in nus]

        def dpi(t):
            t = mpmath.mpf(t)
            return [v * t ** (v - 1) for v in nus]

        def sub(a, b):
            return [x - y for x, y in zip(a, b)]

        if family in (ODD_0, ODD_1):
            tau = 0 if family == ODD_0 else 1
            sign = (-1) ** (tau + 1)
            head = [mpmath.mpf(tau)] * N
            rows = []
            for t in ts:
                rows += [sub(pi(t), [mpmath.mpf(tau)] * N), dpi(t)]
        elif family == INTERIOR:
            sign = 1
            head = pi(ts[0])
            rows = []
            for t in ts[1:]:
                rows += [sub(pi(t), pi(ts[0])), dpi(t)]
            rows.append(dpi(ts[0]))
        else:
            sign = -1
            head = [mpmath.mpf(0)] * N
            rows = []
            for t in ts:
                rows += [pi(t), dpi(t)]
            rows.append([mpmath.mpf(1)] * N)

        def det_with(first):
            return sign * mpmath.det(mpmath.matrix([first] + rows))

        sup = det_with(head)
        lam = []
        for i in range(N):
            e = [mpmath.mpf(0)] * N
            e[i] = mpmath.mpf(1)
            lam.append(det_with(e))
        lhs = None
        if P is not None:
            lhs = float(det_with([mpmath.mpf(float(p)) for p in P]))
        return lhs, float(sup), np.array([float(v) for v in lam])


def uniform_sup_closed_form(ts, N, tau=None):
    """Closed-form sup for ``nu_i = i``: ``tau f(t;0) f(t;1) g(t)`` (odd) or ``f(t;0) g(t)`` (even)."""
    t = np.asarray(ts, dtype=float)
    f0 = float(np.prod(t**2))
    f1 = float(np.prod((t - 1.0) ** 2))
    diffs = t[:, None] - t[None, :]
    iu = np.triu_indices(len(t), 1)
    g = float(np.prod(diffs[iu] ** 4))
    if N % 2:
        if tau not in (0, 1):
            raise ValueError("odd N needs tau in {0, 1}")
        return tau * f0 * f1 * g
    return f0 * g


def grid_max(direction: TightDirection, n=10_001):
    """Dense-grid maximum of ``lam . Pi(t)`` on [0, 1]."""
    t = np.linspace(0.0, 1.0, n)
    return float(np.max(direction.value(t)))


__all__ = [
    "CurveSpec",
    "ZeroSet",
    "TightDirection",
    "MERGE_EPS",
    "FAMILIES",
    "ODD_0",
    "ODD_1",
    "INTERIOR",
    "BOUNDARY",
    "curve_point",
    "curve_tangent",
    "hodge_star",
    "tight_direction",
    "lambda_two",
    "lambda_nw",
    "lambda_three",
    "lambda_odd",
    "lambda_even_interior",
    "lambda_even_boundary",
    "enumerate_configurations",
    "configuration_patterns",
    "chebyshev_determinant",
    "determinant_form",
    "uniform_sup_closed_form",
    "families_for",
    "free_zero_count",
    "batch_coefficients",
    "batch_violation",
    "snap_zeros",
    "grid_max",
]
