"""Large independent sets on random d-regular graphs by deferred decisions."""

from .deferred import AlgState, RunResult, p_fraction_trace, run, run_d3, run_general
from .pairing import GraphConfig, PairingState, new_pairing, subroutine_ga, terminal_loop_fixup

__all__ = [
    "AlgState",
    "GraphConfig",
    "PairingState",
    "RunResult",
    "new_pairing",
    "p_fraction_trace",
    "run",
    "run_d3",
    "run_general",
    "subroutine_ga",
    "terminal_loop_fixup",
]
