"""Maximal violation of phase-squeezed coherent states versus displacement.

Three uniform settings, overall efficiency 0.8. Prints one column per
squeezing parameter; positive entries certify nonclassicality.
"""

import numpy as np

from nonclass import EfficiencySettings, StateModel, max_violation, probability_vector

settings = EfficiencySettings.uniform(3, eta_c=0.8)
alphas = np.arange(0.0, 3.0 + 1e-9, 0.05)
squeezes = (0.2, 0.5, 1.0)

print("alpha0  " + "  ".join(f"r={r:<10}" for r in squeezes))
for a in alphas:
    row = [max_violation(probability_vector(StateModel.squeezed(r, a), settings), settings).V
           for r in squeezes]
    print(f"{a:6.2f}  " + "  ".join(f"{v:+.5e}" for v in row))
