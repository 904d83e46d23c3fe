# # One-shot coding with non-signaling assistance
#
# The smallest error for sending M messages over a classical-quantum channel
# with non-signaling (NS) assistance is a semidefinite program. Its relaxation,
# the meta-converse (MC), drops one equality constraint.

# %%

import numpy as np

from nscq import channels as ch
from nscq import oneshot

# A noiseless bit carries two messages perfectly. With four messages half of
# them collide.

# %%

w = ch.noiseless(2)
for m in (2, 3, 4):
    print(m, round(oneshot.eps_ns(m, w), 6), round(oneshot.eps_mc(m, w), 6))

# A random qubit channel with three inputs. The primal SDP value and the
# dual saddle value found by cutting planes agree up to solver tolerance.

# %%

w = ch.random_cq_channel(3, 2, np.random.default_rng(0))
for m in (2, 3):
    primal = oneshot.eps_ns(m, w)
    dual = oneshot.eps_ns_dual_hermitian(m, w)
    print(m, primal, dual.value, dual.value - dual.lower)

# The optimal code itself: input weights and decoding operators.

# %%

sol = oneshot.solve_coding_program(2, w, "ns")
print(np.round(sol.p, 4))
print(np.round(sum(sol.povm), 6))
