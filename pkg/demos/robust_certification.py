"""Robust certification under calibration error with simulated statistics.

For each displacement the worst calibration error within +-0.01 is found,
click data are simulated there with 1e7 trials per setting, and the
empirical violation is compared with three standard errors.
"""

from nonclass import (EfficiencySettings, StateModel, TrialPlan, UncertaintyDomain,
                      robust_violation, run_experiment, witness_error)

settings = EfficiencySettings.uniform(3, eta_c=0.8)
domain = UncertaintyDomain((0.01, 0.01, 0.01))
M, seed = 10_000_000, 1234

print(f"{'r':>4} {'alpha0':>6} {'min V':>12} {'V_hat':>12} {'3 eps':>12}  significant")
for r in (0.2, 0.5, 1.0):
    for a in (0.1, 0.2, 0.3, 0.4, 0.5):
        state = StateModel.squeezed(r, a)
        rob = robust_violation(state, settings, domain, mode="model")
        record = run_experiment(TrialPlan(M, seed, settings.shifted(rob.best_delta), state))
        v_hat = rob.best_direction.violation(record.p_hat)
        eps = witness_error(rob.best_direction, record)
        print(f"{r:4.1f} {a:6.2f} {rob.V:12.4e} {v_hat:12.4e} {3 * eps:12.4e}  {v_hat > 3 * eps}")
