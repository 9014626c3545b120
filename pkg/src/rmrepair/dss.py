"""Distributed storage simulation: one codeword spread over n single-symbol nodes.

The simulation is in-process with a query-count cost model; a "download" is
one answered query, costed in subsymbols.  Failed nodes never answer, and a
repair either restores every failed node or leaves the cluster untouched.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import repair
from .galois import Symbol, tower_new
from .rmcode import Codeword, RMCode, code_new
from .repair import RepairTranscript, TraceQuery

__all__ = [
    "Cluster",
    "FailureEvent",
    "NodeUnavailableError",
    "UndecodableError",
    "cluster_init",
    "replay_transcript",
    "run_scenario",
    "seeded_message",
]


class NodeUnavailableError(RuntimeError):
    """A failed node was asked to answer a query."""


class UndecodableError(ValueError):
    """The surviving nodes cannot determine the codeword."""


@dataclass(frozen=True)
class FailureEvent:
    """Simultaneous failure of a set of nodes; refailing is idempotent."""

    nodes: tuple

    def __init__(self, nodes):
        object.__setattr__(self, "nodes", tuple(nodes))


def seeded_message(code: RMCode, seed: int):
    """Deterministic pseudo-random message for reproducible scenarios."""
    rng = random.Random(seed)
    return [code.tower.symbol(rng.randrange(code.tower.order)) for _ in range(code.k)]


@dataclass
class Cluster:
    """n storage nodes holding one codeword; None marks a failed node."""

    code: RMCode
    nodes: list
    rng_seed: int
    history: list = field(default_factory=list)

    def failed(self) -> tuple:
        return tuple(i for i, v in enumerate(self.nodes) if v is None)

    def fail(self, event) -> "Cluster":
        nodes = event.nodes if isinstance(event, FailureEvent) else tuple(event)
        for i in nodes:
            if not 0 <= i < self.code.n:
                raise ValueError(f"node {i} out of range")
        for i in nodes:
            self.nodes[i] = None
        return self

    def respond(self, query: TraceQuery):
        value = self.nodes[query.node]
        if value is None:
            raise NodeUnavailableError(f"node {query.node} has failed")
        if query.kind == "full":
            return value
        return (query.multiplier * value).trace()

    def repair_failed(self) -> RepairTranscript:
        """Plan, execute, and write back the repair of all failed nodes.

        Nothing is written unless execution completes, so planner and
        responder errors leave the cluster unchanged.
        """
        failed = self.failed()
        if not failed:
            raise ValueError("no failed nodes to repair")
        if len(failed) == 1:
            plan = repair.plan_single(self.code, failed[0])
        else:
            plan = repair.plan_multi(self.code, failed)
        transcript = repair.execute(plan, self.respond)
        for node, symbol in transcript.recovered:
            self.nodes[node] = symbol
        self.history.append(transcript)
        return transcript

    def naive_bandwidth(self, failed=None) -> int:
        """Subsymbol cost of the baseline full-symbol decode.

        Reads t subsymbols from each of the k survivors whose generator
        columns are picked greedily to be linearly independent; this is a
        reporting convention, not a scheme.
        """
        failed = self.failed() if failed is None else tuple(failed)
        if not failed:
            return 0
        code = self.code
        ext = code.tower._ext
        basis_rows = []
        chosen = 0
        for i in range(code.n):
            if i in failed:
                continue
            col = [code._gen[r][i] for r in range(code.k)]
            for row in basis_rows:
                lead = next(j for j, v in enumerate(row) if v)
                if col[lead]:
                    f = col[lead]
                    col = [ext.sub(c, ext.mul(f, v)) for c, v in zip(col, row)]
            if any(col):
                lead = next(j for j, v in enumerate(col) if v)
                col = [ext.mul(ext.inv(col[lead]), v) for v in col]
                basis_rows.append(col)
                chosen += 1
                if chosen == code.k:
                    return code.tower.t * code.k
        raise UndecodableError("survivors do not span the message space")

    def state_codeword(self) -> Codeword:
        erased = frozenset(self.failed())
        return Codeword(self.code, tuple(self.nodes), erased)

    def state_json(self) -> dict:
        data = self.state_codeword().to_json()
        data["seed"] = self.rng_seed
        return data


def cluster_init(code: RMCode, message, seed: int = 0) -> Cluster:
    """Populate a fresh cluster from an encoded message."""
    cw = code.encode(message)
    return Cluster(code=code, nodes=list(cw.values), rng_seed=seed)


def replay_transcript(cluster: Cluster, transcript_or_pairs) -> None:
    """Re-ask every recorded query; raise if any answer changed."""
    pairs = (transcript_or_pairs.responses
             if isinstance(transcript_or_pairs, RepairTranscript)
             else transcript_or_pairs)
    for query, recorded in pairs:
        fresh = cluster.respond(query)
        if fresh != recorded:
            raise ValueError(
                f"replay mismatch at node {query.node}: {fresh!r} != {recorded!r}")


def run_scenario(scenario: dict):
    """Drive a scripted run: {"params": {p,a,t,m,d}, "seed": s, "failures": [[...], ...]}."""
    params = scenario["params"]
    tower = tower_new(params["p"], params["a"], params["t"])
    code = code_new(tower, params["m"], params["d"])
    seed = scenario.get("seed", 0)
    cluster = cluster_init(code, seeded_message(code, seed), seed)
    transcripts = []
    for group in scenario.get("failures", []):
        cluster.fail(FailureEvent(group))
        transcripts.append(cluster.repair_failed())
    return cluster, transcripts
