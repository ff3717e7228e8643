"""Fock states seen with two attenuator settings (0.5 and 1)."""

from nonclass import EfficiencySettings, StateModel, envelope_two, hull_membership_oracle
from nonclass import probability_vector

for eta_c in (0.9, 1.0):
    settings = EfficiencySettings((0.5, 1.0), eta_c)
    for n in range(1, 6):
        P = probability_vector(StateModel.fock(n), settings)
        env = envelope_two(P, settings.nus[1])
        orc = hull_membership_oracle(P, settings)
        print(f"eta_c={eta_c} n={n}  envelope={max(env):+.4e}  oracle residual={orc.residual:.4e}")
