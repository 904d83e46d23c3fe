# # Activation by one noiseless bit
#
# The meta-converse value for M messages equals the NS value for 2M
# messages once a perfect bit channel is added. For classical channels the
# NS and MC programs coincide, so the extra bit buys nothing.

# %%

import numpy as np

from nscq import channels as ch
from nscq import oneshot

w = ch.random_cq_channel(2, 3, np.random.default_rng(1))
for m in (2, 3, 4):
    mc, ns_act, gap = oneshot.activation_identity_check(m, w)
    print(f"M={m}  eps_MC={mc:.8f}  eps_NS(2M, W x I2)={ns_act:.8f}  gap={gap:.1e}")

# For this channel NS and MC also agree up to solver noise; MC is never larger.

# %%

for m in (2, 3):
    print(m, oneshot.eps_ns(m, w) - oneshot.eps_mc(m, w))

# Classical collapse: the difference vanishes for a stochastic matrix.

# %%

bsc = ch.bsc(0.15)
print([round(oneshot.eps_ns(m, bsc) - oneshot.eps_mc(m, bsc), 9) for m in (2, 3, 4)])
