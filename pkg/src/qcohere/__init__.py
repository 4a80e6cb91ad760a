"""Coherence and quantum-correlation quantifiers.

The package is organised by topic:

``qcore``         linear-algebra kernel, entropies, partial traces, bases
``states``        state families (Bell-diagonal, X, Werner, isotropic, MCMS) and JSON I/O
``coherence``     coherence measures relative to a reference basis
``discord``       discord-like measures (entropic, geometric, Hellinger, LQU, ...)
``min_measures``  measurement-induced nonlocality variants
``channels``      Kraus channels, transfer matrices, freezing and cohering power
``protocols``     DQC1, Grover, teleportation, MUB complementarity, Haar averages
``relativistic``  Unruh-degraded Bell states
``cli``           command-line front end
"""

from . import (
               channels,
               coherence,
               discord,
               min_measures,
               protocols,
               qcore,
               relativistic,
               states,
)
from .channels import KrausChannel, apply, classify, standard_channel, transfer_matrix
from .coherence import c_l1, c_rel_entropy, c_trace, robustness
from .discord import (
               entropic_discord_2q,
               hellinger_discord,
               lqu,
               negativity,
               trace_discord,
)
from .exceptions import (
               NotApplicable,
               OptimizerError,
               QCohereError,
               TruncationInsufficient,
               ValidationError,
)
from .min_measures import hs_min, trace_min
from .results import MeasureResult

__version__ = "0.1.0"

__all__ = [
               "KrausChannel",
               "MeasureResult",
               "NotApplicable",
               "OptimizerError",
               "QCohereError",
               "TruncationInsufficient",
               "ValidationError",
               "apply",
               "c_l1",
               "c_rel_entropy",
               "c_trace",
               "channels",
               "classify",
               "coherence",
               "discord",
               "entropic_discord_2q",
               "hellinger_discord",
               "hs_min",
               "lqu",
               "min_measures",
               "negativity",
               "protocols",
               "qcore",
               "relativistic",
               "robustness",
               "standard_channel",
               "states",
               "trace_discord",
               "trace_min",
               "transfer_matrix",
]
