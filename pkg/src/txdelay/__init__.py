"""
Transmission delay analytics for quasi-static Rayleigh links with ``N``
transmit antennas.

Two coding regimes are covered. Under infinite blocklength (IBL) a packet of
``L`` bits takes ``L / (B log2(1 + gamma))`` seconds. Under finite
blocklength (FBL) the normal approximation fixes the smallest blocklength
meeting a target error rate, and the delay is that blocklength over ``B``.
For each regime the package gives delay CDF/PDF, mean and jitter
approximations, violation probabilities and a seeded Monte Carlo oracle.

Submodules
----------
specfun     special functions (Q, incomplete gamma, Lambert W)
channel     SNR laws
ibl, fbl    delay analytics per regime
mc          Monte Carlo oracle
validation  analytical-vs-simulation cross-checks
cli         command-line front end
"""

from . import channel, fbl, ibl, mc, specfun, validation
from .channel import ChannelModel, PathLossParams, db_to_linear, linear_to_db
from .fbl import FblConfig, SeriesParams
from .ibl import IblApproxParams, LinkConfig, MomentMethod, MomentReport, RateMoments
from .mc import McConfig

__version__ = "0.1.0"

__all__ = [
    "channel", "fbl", "ibl", "mc", "specfun", "validation",
    "ChannelModel", "PathLossParams", "db_to_linear", "linear_to_db",
    "FblConfig", "SeriesParams",
    "IblApproxParams", "LinkConfig", "MomentMethod", "MomentReport", "RateMoments",
    "McConfig",
]
