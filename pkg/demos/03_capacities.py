# # Renyi capacities
#
# The Petz-Renyi capacity C_a interpolates between the zero-error capacity
# (a -> 0) and the Holevo capacity (a = 1).

# %%

import numpy as np

from nscq import capacities as cap
from nscq import channels as ch

w = ch.bsc(0.1)
for a in (0.1, 0.3, 0.5, 0.7, 0.9):
    print(a, cap.renyi_capacity(w, a).value)
print("C  =", cap.holevo_capacity(w).value)
print("C0 =", cap.c0_capacity(w).value)

# Overlapping pure states have a positive zero-error capacity.

# %%

plus = np.array([1.0, 1.0]) / np.sqrt(2)
w = ch.CQChannel(np.stack([np.diag([1.0, 0.0]), np.outer(plus, plus)]))
print("C0 =", cap.c0_capacity(w).value, "expected", np.log(2 / (1 + 2 ** -0.5)))

# Two critical rates: the derivative form and sup_a (1 - a)^2 C_a.

# %%

w = ch.bsc(0.1)
print("r_c  =", cap.critical_rate_old(w))
print("r'_c =", cap.critical_rate_new(w))
