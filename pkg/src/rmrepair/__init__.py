"""Trace repair for evaluation-coded distributed storage.

Symbols of F_{q^t} live on storage nodes; repair downloads are counted in
F_q subsymbols.  The package builds the field tower, the evaluation codes,
the repair schemes for one or several erasures, and an in-process cluster
simulation with transcript logging, all deterministically from (p, a, t, m, d).
"""

from .galois import FieldTower, SubSymbol, Symbol, tower_new
from .rmcode import (
    AmbiguousErasureError,
    Codeword,
    InconsistentCodewordError,
    MultiPoly,
    RMCode,
    code_new,
    eval_poly,
)
from .repair import (
    DegreeGateError,
    ErasureConditionError,
    RecoveryPoly,
    ReconstructionError,
    RepairPlan,
    RepairTranscript,
    TraceQuery,
    bandwidth_bounds,
    codeword_responder,
    degree_gate,
    execute,
    plan_multi,
    plan_single,
    recovery_poly,
)
from .dss import (
    Cluster,
    FailureEvent,
    NodeUnavailableError,
    UndecodableError,
    cluster_init,
    replay_transcript,
    run_scenario,
    seeded_message,
)

__all__ = [
    "AmbiguousErasureError",
    "Cluster",
    "Codeword",
    "DegreeGateError",
    "ErasureConditionError",
    "FailureEvent",
    "FieldTower",
    "InconsistentCodewordError",
    "MultiPoly",
    "NodeUnavailableError",
    "RMCode",
    "ReconstructionError",
    "RecoveryPoly",
    "RepairPlan",
    "RepairTranscript",
    "SubSymbol",
    "Symbol",
    "TraceQuery",
    "UndecodableError",
    "bandwidth_bounds",
    "cluster_init",
    "code_new",
    "codeword_responder",
    "degree_gate",
    "eval_poly",
    "execute",
    "plan_multi",
    "plan_single",
    "recovery_poly",
    "replay_transcript",
    "run_scenario",
    "seeded_message",
    "tower_new",
]

__version__ = "0.1.0"
