# # Finite-n sandwich
#
# For small blocklengths the exact NS error of the activated channel sits
# between a computable sphere-packing lower bound and the achievability
# bound. At half capacity and n <= 3 the activated bit alone already
# separates every message, so the SDP value is zero.

# %%

from nscq import capacities as cap
from nscq import channels as ch
from nscq import exponents as ex

w = ch.bsc(0.2)
r = 0.5 * cap.holevo_capacity(w).value
for row in ex.exponent_sandwich(w, r, 3):
    print(row.n, row.spb_lower, row.sdp_value, row.achievability_bound, row.notes)

# A cleaner channel at a rate close to capacity gives a nonzero SDP value.
# The lower bound stays near zero at these sizes: its polynomial prefactor
# only loses against the exponent for larger n.

# %%

w = ch.bsc(0.02)
for row in ex.exponent_sandwich(w, 0.5, 3):
    print(row.n, round(row.spb_lower, 6), round(row.sdp_value, 6),
          round(row.achievability_bound, 6), row.notes)
