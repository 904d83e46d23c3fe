# # Error exponent curve
#
# With activation the NS error decays as exp(-n E(r)) with
# E(r) = sup_a ((1 - a) / a) (C_a - r), which is zero above capacity and
# infinite below the zero-error capacity.

# %%

import numpy as np

from nscq import capacities as cap
from nscq import channels as ch
from nscq import exponents as ex

w = ch.bsc(0.1)
c = cap.holevo_capacity(w).value
rates = np.linspace(0.0, c, 12)[1:-1]
curve = ex.exponent_curve(w, rates)
for pt in curve.points:
    print(f"r={pt.rate:.4f}  E={pt.E:.6f}  alpha*={pt.alpha_star:.4f}")

# Without activation the same exponent survives above r'_c.

# %%

rc, _ = cap.critical_rate_new(w)
for r in (0.5 * rc, rc + 0.02, 0.8 * c):
    print(f"r={r:.4f}  no-activation={ex.no_activation_exponent(w, r):.6f}  "
          f"activated={ex.eans_exponent(w, r).E:.6f}")
