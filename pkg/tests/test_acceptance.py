"""Acceptance suite: one test per headline criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import time

import numpy as np

from nonclass import geometry as geo
from nonclass.certify import (UncertaintyDomain, hull_membership_oracle, max_violation,
                              robust_violation)
from nonclass.moments import build_moment_matrices, envelope_two, is_classical_moments
from nonclass.simulate import EmpiricalRecord, TrialPlan, run_experiment, sample_counts, witness_error
from nonclass.states import (EfficiencySettings, StateModel, probability_vector, random_mixture,
                             random_settings)

# regression goldens for the squeezed-state sweep, N=3 uniform, eta_c=0.8
SWEEP_GOLDEN = {
    0.2: {0.1: 0.00021777998516905872, 0.5: -8.430567818035195e-05,
          1.0: -0.0011853175467920474, 2.0: -0.004306256593808226},
    0.5: {0.1: 0.001044795591763445, 0.5: 0.00016332967167435875,
          1.0: -0.0025690713672128634, 2.0: -0.009591967085921825},
    1.0: {0.1: -0.0010332353995861077, 0.5: -0.002017089149188911,
          1.0: -0.004747116843446066, 2.0: -0.011279373874223685},
}
CROSSOVER_GOLDEN = {0.2: 0.45, 0.5: 0.55, 1.0: 0.0}


def test_fock_two_settings(criterion):
    t0 = time.perf_counter()
    failures = []
    worst = np.inf
    for eta_c in (0.9, 1.0):
        settings = EfficiencySettings((0.5, 1.0), eta_c)
        for n in range(1, 6):
            P = probability_vector(StateModel.fock(n), settings)
            env = max(envelope_two(P, settings.nus[1]))
            orc = hull_membership_oracle(P, settings)
            worst = min(worst, orc.residual)
            if not (env > 0 and not orc.feasible and orc.residual > 1e-3):
                failures.append(f"n={n} eta_c={eta_c} residual={orc.residual:.3g}")
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 1.0
    criterion(1, "Fock detection with two settings", ok,
              f"min residual {worst:.4g}, {elapsed:.2f} s; failing: {failures or 'none'}")
    assert ok, failures


def test_classical_soundness(criterion):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = -np.inf
    bad = []
    for k in range(1000):
        N = 2 + k % 5
        settings = random_settings(rng, N, eta_c=float(rng.uniform(0.5, 1.0)))
        P = probability_vector(random_mixture(rng), settings)
        V = max_violation(P, settings).V
        orc = hull_membership_oracle(P, settings)
        worst = max(worst, V)
        if V > 1e-8 or not orc.feasible:
            bad.append((k, V, orc.residual))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    criterion(2, "classical soundness on 1000 coherent mixtures", ok,
              f"max V {worst:.3g}, {len(bad)} failures, {elapsed:.1f} s")
    assert ok, bad[:5]


def test_squeezed_sweep(criterion):
    settings = EfficiencySettings.uniform(3, 0.8)
    alphas = np.round(np.arange(0.0, 3.0 + 1e-9, 0.05), 10)
    t0 = time.perf_counter()
    curves = {}
    for r in SWEEP_GOLDEN:
        curves[r] = np.array([max_violation(probability_vector(StateModel.squeezed(r, a), settings),
                                            settings).V for a in alphas])
    elapsed = time.perf_counter() - t0
    notes = []
    ok = elapsed < 30
    for r, V in curves.items():
        at = dict(zip(alphas, V))
        pos = np.flatnonzero(V > 0)
        cross = float(alphas[pos[-1] + 1]) if len(pos) else 0.0
        golden_ok = all(abs(at[a] - v) <= 1e-8 for a, v in SWEEP_GOLDEN[r].items())
        golden_ok &= cross == CROSSOVER_GOLDEN[r]
        qual_ok = at[0.1] > 0 and 0 < cross < 3
        ok &= golden_ok and qual_ok
        notes.append(f"r={r}: V(0.1)={at[0.1]:.3g} crossover={cross} "
                     f"{'ok' if qual_ok else 'no positive V at 0.1'}")
    criterion(3, "squeezed-state sweep over alpha0", ok, f"{elapsed:.1f} s; " + "; ".join(notes))
    assert ok, notes


def _significant_points(r, alphas, settings, box, M, seed):
    out = []
    for a in alphas:
        state = StateModel.squeezed(r, a)
        rob = robust_violation(state, settings, UncertaintyDomain(box), mode="model")
        worst = settings.shifted(rob.best_delta)
        record = run_experiment(TrialPlan(M, seed, worst, state))
        V_hat = float(rob.best_direction.violation(record.p_hat))
        eps = witness_error(rob.best_direction, record)
        out.append((a, rob.V, V_hat, eps, V_hat > 3 * eps and rob.V > 3 * eps))
    return out


def test_robust_statistical_certification(criterion):
    settings = EfficiencySettings.uniform(3, 0.8)
    t0 = time.perf_counter()
    rows = _significant_points(0.5, (0.1, 0.2, 0.3, 0.4, 0.5), settings, (0.01,) * 3,
                               10_000_000, 1234)
    elapsed = time.perf_counter() - t0
    significant = [a for a, *_, sig in rows if sig]
    ok = bool(significant) and elapsed < 300
    best = max(rows, key=lambda row: row[2] / row[3])
    criterion(4, "robust certification with 1e7 trials at r=0.5", ok,
              f"significant alpha0 {significant}; best V={best[2]:.3g} vs 3 eps={3 * best[3]:.3g}; "
              f"{elapsed:.1f} s")
    assert ok


def _zero_sets(rng, N, family, count):
    d = geo.free_zero_count(N, family)
    return [np.sort(rng.uniform(0.02, 0.98, d)) for _ in range(count)]


def test_tight_direction_invariants(criterion):
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    worst = {"orth": 0.0, "height": 0.0, "grid": -np.inf}
    for N in range(2, 8):
        spec = geo.CurveSpec.from_etas(random_settings(rng, N, min_gap=0.05).etas)
        for family in geo.families_for(N):
            bnd = geo._FAMILY_BOUNDARY[family]
            for ts in _zero_sets(rng, N, family, 200):
                d = geo.tight_direction(spec, geo.ZeroSet(tuple(ts), bnd))
                if len(ts):
                    tan = geo.curve_tangent(spec, ts)
                    orth = np.abs(tan @ d.lam) / np.linalg.norm(tan, axis=1)
                    worst["orth"] = max(worst["orth"], float(orth.max()))
                touch = np.concatenate((ts, bnd))
                height = np.abs(d.value(touch) - d.sup_value) / max(1.0, abs(d.sup_value))
                worst["height"] = max(worst["height"], float(height.max()))
                worst["grid"] = max(worst["grid"], geo.grid_max(d) - d.sup_value)
    elapsed = time.perf_counter() - t0
    ok = worst["orth"] <= 1e-9 and worst["height"] <= 1e-9 and worst["grid"] <= 1e-7 and elapsed < 60
    criterion(5, "tight-direction invariants for N=2..7", ok,
              f"orthogonality {worst['orth']:.2e}, equal heights {worst['height']:.2e}, "
              f"grid excess {worst['grid']:.2e}, {elapsed:.1f} s")
    assert ok, worst


def test_uniform_closed_form_sup(criterion):
    rng = np.random.default_rng(11)
    worst = 0.0
    for N in (4, 5):
        spec = geo.CurveSpec.uniform(N)
        families = (geo.INTERIOR,) if N % 2 == 0 else (geo.ODD_0, geo.ODD_1)
        for family in families:
            bnd = geo._FAMILY_BOUNDARY[family]
            for ts in _zero_sets(rng, N, family, 100):
                _, sup, _ = geo.determinant_form(spec, geo.ZeroSet(tuple(ts), bnd))
                tau = int(bnd[0]) if bnd else None
                ref = geo.uniform_sup_closed_form(ts, N, tau)
                err = abs(sup - ref) / abs(ref) if ref else abs(sup)
                worst = max(worst, err)
    ok = worst <= 1e-9
    criterion(6, "uniform-case closed-form sup for N=4,5", ok, f"max relative error {worst:.2e}")
    assert ok


def _random_vector(rng, settings, k):
    if k % 2 == 0:
        return np.sort(rng.uniform(0, 1, settings.N))[::-1]
    P = probability_vector(random_mixture(rng), settings) + rng.normal(0, 1e-3, settings.N)
    return np.clip(P, 0, 1)


def test_three_way_agreement(criterion):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    disagree, banded = [], 0
    for N in range(2, 7):
        settings = EfficiencySettings.uniform(N)
        for k in range(100):
            P = _random_vector(rng, settings, k)
            V = max_violation(P, settings).V
            if abs(V) < 1e-7:
                banded += 1
                continue
            lin = V > 0
            orc = not hull_membership_oracle(P, settings).feasible
            mom = not is_classical_moments(build_moment_matrices(P, N)).classical
            if not lin == orc == mom:
                disagree.append((N, k, V))
    elapsed = time.perf_counter() - t0
    ok = not disagree
    criterion(7, "moment, linear and oracle agreement on 500 vectors", ok,
              f"{len(disagree)} disagreements, {banded} in the boundary band, {elapsed:.1f} s")
    assert ok, disagree[:5]


def test_chebyshev_positivity(criterion):
    rng = np.random.default_rng(3)
    worst = np.inf
    n_confluent = 0
    for k in range(500):
        N = 1 + k % 6
        spec = geo.CurveSpec.from_etas(random_settings(rng, N, min_gap=0.03).etas)
        x = np.sort(rng.uniform(0.01, 1.0, N + 1))
        if k % 2:
            # coinciding points take derivative columns
            i = int(rng.integers(0, N))
            x[i + 1] = x[i]
            if N >= 3 and k % 4 == 1:
                x[min(i + 2, N)] = x[i]
            x = np.sort(x)
            n_confluent += 1
        worst = min(worst, geo.chebyshev_determinant(spec, x))
    ok = worst > 0
    criterion(8, "Chebyshev determinant positivity on 500 tuples", ok,
              f"min determinant {worst:.3g}, {n_confluent} with coinciding points")
    assert ok


def test_statistical_calibration(criterion):
    rng = np.random.default_rng(99)
    M = 100_000
    worst = 0.0
    for s in range(10):
        N = 2 + s % 4
        settings = random_settings(rng, N, eta_c=0.9, min_gap=0.05)
        state = random_mixture(rng) if s % 2 else StateModel.squeezed(rng.uniform(0.1, 1.0),
                                                                     rng.uniform(0.0, 1.0))
        P = probability_vector(state, settings)
        lam = max_violation(P, settings).direction.lam
        wit, eps = [], []
        for rep in range(200):
            record = EmpiricalRecord(sample_counts(P, M, 10_000 * s + rep), M)
            wit.append(lam @ record.p_hat)
            eps.append(witness_error(lam, record))
        rel = abs(np.std(wit, ddof=1) / np.mean(eps) - 1.0)
        worst = max(worst, rel)
    ok = worst <= 0.15
    criterion(9, "witness error matches empirical spread", ok, f"max relative deviation {worst:.3f}")
    assert ok
