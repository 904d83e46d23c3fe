# # Fully quantum channels
#
# A quantum channel enters through its Choi operator. The meta-converse is
# then one SDP over the decoder and the reference state jointly.

# %%

import numpy as np

from nscq import channels as ch
from nscq import oneshot
from nscq import exponents as ex

ident = ch.identity_choi(2)
for m in (2, 4, 8):
    print(m, oneshot.eps_mc_quantum(m, ident).value, max(0.0, 1 - 4 / m))

dep = ch.depolarizing_choi(2, 1.0)
print([round(oneshot.eps_mc_quantum(m, dep).value, 6) for m in (2, 4)])

# A CQ channel written as a Choi operator gives the same answers.

# %%

w = ch.random_cq_channel(2, 2, np.random.default_rng(5))
print(oneshot.eps_mc(3, w), oneshot.eps_mc_quantum(3, ch.choi_of_cq(w)).value)

# Achievability exponent for the identity channel grows without bound as
# the order goes to zero, since every rate below log 4 is zero-error.

# %%

for a in (0.5, 0.1, 0.01):
    print(a, ex.quantum_achievability(ident, 0.5, a)[0])
