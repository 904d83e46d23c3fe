"""Non-signaling assisted coding over classical-quantum channels.

Modules:
    herm: Hermitian operator primitives.
    sdp: dense interior-point SDP solver.
    channels: channels, tensor powers and types.
    divergences: Renyi divergences and hypothesis testing.
    oneshot: one-shot NS and meta-converse coding programs.
    capacities: Renyi, Holevo and zero-error capacities, critical rates.
    exponents: error exponents and finite-blocklength bounds.
    cli: command-line front end.
"""

from . import capacities, channels, divergences, exponents, herm, oneshot, sdp
from .errors import InvariantViolation, MalformedInputError, NumericalFailure, ResourceLimitError

__version__ = "0.1.0"

__all__ = ["capacities", "channels", "divergences", "exponents", "herm", "oneshot", "sdp",
           "InvariantViolation", "MalformedInputError", "NumericalFailure",
           "ResourceLimitError"]
