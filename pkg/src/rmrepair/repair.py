"""Trace repair schemes: query planning, reconstruction, bandwidth accounting.

The one-erasure scheme picks an axis j and splits the surviving nodes by the
hyperplane through the erased point: nodes sharing the erased j-coordinate
upload their full symbol (t subsymbols), every other node answers a single
trace query Tr(f(s) / (s_j - a)) worth one subsymbol.  The recovery
polynomials Tr(z (x_j - a)) / (x_j - a), expanded as
z + z^q (x_j - a)^(q-1) + ... + z^(q^(t-1)) (x_j - a)^(q^(t-1) - 1),
are orthogonal to the code whenever d <= m(q^t - 1) - q^(t-1), which turns
each basis trace of the lost symbol into a sum over the responses.

For several simultaneous erasures whose j-coordinates differ pairwise by
nonzero base field elements, one scheme per erasure is run: the first is
unscaled and the rest are scaled by independent elements of the trace
kernel, which makes the cross terms between erasures collapse to base field
multiples that the reconstruction ladder can eliminate step by step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import linalg
from .galois import FieldTower, SubSymbol, Symbol
from .rmcode import RMCode

__all__ = [
    "DegreeGateError",
    "ErasureConditionError",
    "RecoveryPoly",
    "ReconstructionError",
    "RepairPlan",
    "RepairTranscript",
    "ResponseError",
    "SchemeSpec",
    "TraceQuery",
    "bandwidth_bounds",
    "codeword_responder",
    "degree_gate",
    "execute",
    "plan_single",
    "plan_multi",
    "recovery_poly",
    "responses_from_json",
]


class DegreeGateError(ValueError):
    """The code degree is too large for trace repair."""


class ErasureConditionError(ValueError):
    """No axis separates the erased points by nonzero base field steps."""

    def __init__(self, message: str, offenders: dict):
        super().__init__(message)
        self.offenders = offenders


class ReconstructionError(RuntimeError):
    """The response ladder could not be solved."""


class ResponseError(ValueError):
    """A query response had the wrong type, tower, or was missing."""


@dataclass(frozen=True)
class RecoveryPoly:
    """One dual-code polynomial targeting basis element z at an erased slice.

    ``expanded_terms`` holds (coefficient, exponent) pairs in (x_j - anchor);
    evaluation always goes through them, never through the defining fraction,
    which is 0/0 on the anchor slice itself.
    """

    z: Symbol
    anchor: Symbol
    axis: int
    scale: Symbol
    expanded_terms: tuple

    @property
    def degree(self) -> int:
        return max(e for _, e in self.expanded_terms)

    def value_at(self, coord: Symbol) -> Symbol:
        u = coord - self.anchor
        acc = self.z.tower.zero
        for coeff, e in self.expanded_terms:
            acc = acc + coeff * u ** e
        return acc

    def evaluate(self, point) -> Symbol:
        return self.value_at(point[self.axis - 1])

    def evaluation_vector(self, code: RMCode) -> tuple:
        return tuple(self.evaluate(P) for P in code.points)


def recovery_poly(tower: FieldTower, z: Symbol, anchor: Symbol, axis: int,
                  scale: Symbol | None = None) -> RecoveryPoly:
    if scale is None:
        scale = tower.one
    if not z:
        raise ValueError("z must be nonzero")
    if not scale:
        raise ValueError("scale must be nonzero")
    if axis < 1:
        raise ValueError("axis is 1-based")
    terms = []
    zi = z
    for i in range(tower.t):
        terms.append((scale * zi, tower.q ** i - 1))
        zi = tower.frobenius(zi)
    return RecoveryPoly(z, anchor, axis, scale, tuple(terms))


def degree_gate(code: RMCode) -> bool:
    """True when the dual degree admits the recovery polynomials."""
    tower = code.tower
    return code.d <= code.m * (tower.order - 1) - tower.q ** (tower.t - 1)


def bandwidth_bounds(code: RMCode, l: int) -> tuple:
    """(deduped subsymbol count, closed-form published bound) for l erasures.

    The two agree for l = 1.  For l >= 2 the first counts one full download
    per hyperplane survivor and l trace queries per outsider; the published
    bound dominates exactly when q^((m-1)t) >= t.
    """
    if not degree_gate(code):
        raise DegreeGateError(f"degree {code.d} exceeds the repair gate")
    tower = code.tower
    if not 1 <= l <= tower.t:
        raise ValueError(f"erasure count must lie in [1, {tower.t}]")
    n, t = code.n, tower.t
    hyperplane = tower.order ** (code.m - 1)
    measured = l * (n - t + (t - l) * hyperplane)
    published = l * (n - l + (t - 1) * (hyperplane - l))
    return measured, published


@dataclass(frozen=True)
class TraceQuery:
    """A download request to one node; full costs t subsymbols, trace costs 1."""

    node: int
    kind: str
    multiplier: Symbol | None = None

    def __post_init__(self):
        if self.kind not in ("full", "trace"):
            raise ValueError(f"unknown query kind {self.kind!r}")
        if self.kind == "trace":
            if self.multiplier is None or not self.multiplier:
                raise ValueError("trace queries need a nonzero multiplier")
        elif self.multiplier is not None:
            raise ValueError("full queries carry no multiplier")

    def cost(self, tower: FieldTower) -> int:
        return tower.t if self.kind == "full" else 1


@dataclass(frozen=True)
class SchemeSpec:
    """Per-erasure bookkeeping: hyperplane membership and the scheme scale."""

    erased_node: int
    anchor: Symbol
    scale: Symbol
    gamma_nodes: tuple      # surviving nodes on the erased point's slice
    outsider_nodes: tuple   # surviving nodes off the slice

    def multiplier_at(self, coord: Symbol) -> Symbol:
        return self.scale / (coord - self.anchor)


@dataclass(frozen=True)
class RepairPlan:
    code: RMCode
    erased: tuple
    axis: int
    basis: tuple
    dual: tuple
    tau: tuple
    schemes: tuple
    full_nodes: tuple
    trace_nodes: tuple
    full_queries: tuple
    trace_queries: tuple    # one tuple of queries per scheme
    bandwidth_subsymbols: int
    bandwidth_undeduped: int
    paper_bound: int

    @property
    def queries(self) -> tuple:
        return self.full_queries + tuple(itertools.chain.from_iterable(self.trace_queries))

    def recovery_polys(self) -> tuple:
        """Per scheme, the t recovery polynomials in basis order."""
        tower = self.code.tower
        return tuple(
            tuple(recovery_poly(tower, z, s.anchor, self.axis, s.scale) for z in self.basis)
            for s in self.schemes
        )


def _coord(code: RMCode, node: int, axis: int) -> Symbol:
    return code.points[node][axis - 1]


def _build_plan(code: RMCode, erased, axis, basis, tau, scales) -> RepairPlan:
    tower = code.tower
    dual = tower.dual_basis(basis)
    anchors = [_coord(code, e, axis) for e in erased]
    erased_set = set(erased)

    schemes = []
    gamma_all = set()
    for e, anchor, scale in zip(erased, anchors, scales):
        gamma = [i for i in range(code.n)
                 if i not in erased_set and _coord(code, i, axis) == anchor]
        outsiders = [i for i in range(code.n)
                     if i not in erased_set and _coord(code, i, axis) != anchor]
        schemes.append(SchemeSpec(e, anchor, scale, tuple(gamma), tuple(outsiders)))
        gamma_all.update(gamma)

    full_nodes = tuple(sorted(gamma_all))
    trace_nodes = tuple(sorted(set(range(code.n)) - erased_set - gamma_all))
    full_queries = tuple(TraceQuery(i, "full") for i in full_nodes)
    trace_queries = tuple(
        tuple(TraceQuery(i, "trace", s.multiplier_at(_coord(code, i, axis)))
              for i in trace_nodes)
        for s in schemes
    )

    l, t, n = len(erased), tower.t, code.n
    hyperplane = tower.order ** (code.m - 1)
    measured = t * len(full_nodes) + l * len(trace_nodes)
    assert measured == l * (n - t + (t - l) * hyperplane)
    undeduped = l * (t * (hyperplane - 1) + (n - hyperplane - (l - 1)))
    _, published = bandwidth_bounds(code, l)

    return RepairPlan(
        code=code, erased=tuple(erased), axis=axis, basis=tuple(basis),
        dual=dual, tau=tuple(tau), schemes=tuple(schemes),
        full_nodes=full_nodes, trace_nodes=trace_nodes,
        full_queries=full_queries, trace_queries=trace_queries,
        bandwidth_subsymbols=measured, bandwidth_undeduped=undeduped,
        paper_bound=published,
    )


def plan_single(code: RMCode, erased: int, axis: int = 1, basis=None) -> RepairPlan:
    """Plan the repair of one node along ``axis`` (any axis works)."""
    if not degree_gate(code):
        raise DegreeGateError(
            f"degree {code.d} exceeds the repair gate "
            f"{code.m * (code.tower.order - 1) - code.tower.q ** (code.tower.t - 1)}")
    if not 0 <= erased < code.n:
        raise ValueError(f"node {erased} out of range")
    if not 1 <= axis <= code.m:
        raise ValueError(f"axis must lie in [1, {code.m}]")
    if basis is None:
        basis = code.tower.basis
    return _build_plan(code, [erased], axis, tuple(basis),
                       tau=(), scales=[code.tower.one])


def _find_axis(code: RMCode, erased) -> int:
    """Smallest axis whose erased coordinates differ pairwise by base units."""
    tower = code.tower
    offenders = {}
    for axis in range(1, code.m + 1):
        bad = None
        for ea, eb in itertools.combinations(erased, 2):
            diff = _coord(code, ea, axis) - _coord(code, eb, axis)
            if not diff or not tower.is_in_base(diff):
                bad = (ea, eb)
                break
        if bad is None:
            return axis
        offenders[axis] = bad
    detail = "; ".join(
        f"axis {j}: nodes {b[0]} and {b[1]}" for j, b in sorted(offenders.items()))
    raise ErasureConditionError(
        "no axis separates the erased points by nonzero base field steps "
        f"(first offending pair per axis: {detail})", offenders)


def _default_multi_basis(tower: FieldTower):
    kernel = tower.kernel_trace_basis()
    completion = next(s for s in tower.symbols() if tower.trace(s))
    return kernel + (completion,)


def plan_multi(code: RMCode, erased, basis=None) -> RepairPlan:
    """Plan the joint repair of 2..t nodes.

    Requires an axis along which all pairwise differences of the erased
    coordinates are nonzero base field elements; the smallest such axis is
    chosen.  The first erasure gets the unscaled scheme, the rest are scaled
    by successive trace-kernel basis elements.
    """
    tower = code.tower
    erased = tuple(sorted(set(erased)))
    l = len(erased)
    if l < 2:
        raise ValueError("use plan_single for a single erasure")
    for e in erased:
        if not 0 <= e < code.n:
            raise ValueError(f"node {e} out of range")
    if not degree_gate(code):
        raise DegreeGateError(
            f"degree {code.d} exceeds the repair gate "
            f"{code.m * (tower.order - 1) - tower.q ** (tower.t - 1)}")
    if l > tower.t:
        raise ValueError(
            f"{l} erasures need {l - 1} independent trace-kernel elements "
            f"but the kernel has dimension {tower.t - 1}")
    axis = _find_axis(code, erased)

    if basis is None:
        basis = _default_multi_basis(tower)
    else:
        basis = tuple(basis)
        if len(basis) != tower.t:
            raise ValueError(f"basis must have {tower.t} elements")
        for z in basis[:-1]:
            if tower.trace(z):
                raise ValueError(
                    "the first t-1 basis elements must lie in the trace kernel")
    tau = tower.kernel_trace_basis()[:l - 1]
    scales = [tower.one] + list(tau)
    return _build_plan(code, erased, axis, basis, tau=tau, scales=scales)


def codeword_responder(cw):
    """Answer queries from a (possibly punctured) codeword's surviving values."""
    def respond(query: TraceQuery):
        value = cw.values[query.node]
        if value is None:
            raise ResponseError(f"node {query.node} is erased and cannot answer")
        if query.kind == "full":
            return value
        return (query.multiplier * value).trace()
    return respond


def _kernel_coordinates(tower: FieldTower, basis, tau):
    """Coordinates of each tau in the kernel part of ``basis`` (over F_q)."""
    t = tower.t
    cols = [tower._ext.vec(z.index) for z in basis[:t - 1]]
    mat = [[cols[i][c] for i in range(t - 1)] for c in range(t)]
    out = []
    for tk in tau:
        rhs = list(tower._ext.vec(tk.index))
        out.append(linalg.solve(tower._base, mat, rhs, require_unique=True))
    return out


def execute(plan: RepairPlan, respond) -> "RepairTranscript":
    """Gather all planned responses and rebuild the erased symbols.

    ``respond`` must answer a full query with the stored symbol and a trace
    query with Tr(multiplier * symbol); responses may be gathered in any
    order since the reconstruction only ever sums them.
    """
    code = plan.code
    tower = code.tower
    t = tower.t
    l = len(plan.erased)

    responses = []
    full_vals = {}
    for query in plan.full_queries:
        value = respond(query)
        if not isinstance(value, Symbol) or value.tower != tower:
            raise ResponseError(f"full query at node {query.node} must return a symbol")
        full_vals[query.node] = value
        responses.append((query, value))
    trace_vals = {}
    for k, queries in enumerate(plan.trace_queries):
        for query in queries:
            value = respond(query)
            if not isinstance(value, SubSymbol) or value.tower != tower:
                raise ResponseError(
                    f"trace query at node {query.node} must return a subsymbol")
            trace_vals[(k, query.node)] = value
            responses.append((query, value))

    # Per scheme and basis element, the negated sum of Tr(r_i(s) f(s)) over
    # the survivors: full nodes contribute locally evaluated terms, outsiders
    # factor through Tr(z_i (s_j - a)) times their one-subsymbol response.
    polys = plan.recovery_polys()
    coord = lambda node: _coord(code, node, plan.axis)
    rhs = []
    for k, scheme in enumerate(plan.schemes):
        row = []
        for i, z in enumerate(plan.basis):
            acc = tower.subsymbol(0)
            poly = polys[k][i]
            for node in plan.full_nodes:
                acc = acc + (poly.value_at(coord(node)) * full_vals[node]).trace()
            for node in plan.trace_nodes:
                factor = (z * (coord(node) - scheme.anchor)).trace()
                acc = acc + factor * trace_vals[(k, node)]
            row.append(-acc)
        rhs.append(row)

    dual = plan.dual
    if l == 1:
        symbol = tower.zero
        for i in range(t):
            symbol = symbol + rhs[0][i] * dual[i]
        recovered = ((plan.erased[0], symbol),)
    else:
        recovered = _recover_multi(plan, rhs)

    bandwidth = sum(q.cost(tower) for q, _ in responses)
    if bandwidth != plan.bandwidth_subsymbols:
        raise ResponseError("response count does not match the plan")
    return RepairTranscript(
        plan=plan, responses=tuple(responses), recovered=recovered,
        bandwidth_subsymbols=bandwidth,
        bandwidth_undeduped=plan.bandwidth_undeduped,
        paper_bound=plan.paper_bound,
    )


def _recover_multi(plan: RepairPlan, rhs):
    """Reconstruction ladder for two or more erasures.

    Step 1: the first t-1 sums of each scheme are already the own-erasure
    traces Tr(scale z_i f), because z_i lies in the trace kernel and the
    cross coefficients Tr(z_i) vanish.  Step 2: each scale expands in the
    kernel basis, giving Tr(scale f) at the unscaled erasure exactly.
    Step 3: the z_t sums couple the scaled erasures through base field
    coefficients only; solving that small system yields their last traces,
    hence the scaled symbols via the dual basis.  Step 4: the unscaled
    erasure's z_t trace follows by subtracting the now-known cross terms.
    """
    code = plan.code
    tower = code.tower
    base = tower._base
    t = tower.t
    l = len(plan.erased)
    dual = plan.dual
    z_t = plan.basis[-1]
    tr_zt = z_t.trace()

    # Tr(tau_k f) at the unscaled erasure, from its kernel traces
    alphas = _kernel_coordinates(tower, plan.basis, plan.tau)
    tr_tau_f0 = []
    for coords in alphas:
        acc = tower.subsymbol(0)
        for i, a in enumerate(coords):
            acc = acc + tower.subsymbol(a) * rhs[0][i]
        tr_tau_f0.append(acc)

    # scaled erasures: f(e_k) = known_part + x_k * unknown_direction
    known = [None] * l
    direction = [None] * l
    for k in range(1, l):
        scale_inv = plan.schemes[k].scale.inv()
        part = tower.zero
        for i in range(t - 1):
            part = part + rhs[k][i] * dual[i]
        known[k] = scale_inv * part
        direction[k] = scale_inv * dual[t - 1]

    if l >= 2:
        rows, vec = [], []
        for k in range(1, l):
            scale_k = plan.schemes[k].scale
            row = [0] * (l - 1)
            row[k - 1] = 1
            const = tr_tau_f0[k - 1]
            for r in range(1, l):
                if r == k:
                    continue
                row[r - 1] = (tr_zt * (scale_k * direction[r]).trace()).index
                const = const + (scale_k * known[r]).trace()
            rows.append(row)
            vec.append((rhs[k][t - 1] - tr_zt * const).index)
        try:
            solution = linalg.solve(base, rows, vec, require_unique=True)
        except (linalg.SingularMatrixError, linalg.InconsistentSystemError) as exc:
            raise ReconstructionError(
                "the coupled trace system for the scaled erasures is singular") from exc

    symbols = [None] * l
    for k in range(1, l):
        symbols[k] = known[k] + tower.subsymbol(solution[k - 1]) * direction[k]

    cross = tower.subsymbol(0)
    for k in range(1, l):
        cross = cross + symbols[k].trace()
    x0 = rhs[0][t - 1] - tr_zt * cross
    part = tower.zero
    for i in range(t - 1):
        part = part + rhs[0][i] * dual[i]
    symbols[0] = part + x0 * dual[t - 1]

    return tuple(sorted(
        ((plan.schemes[k].erased_node, symbols[k]) for k in range(l)),
        key=lambda item: item[0],
    ))


@dataclass(frozen=True)
class RepairTranscript:
    """Everything a repair downloaded and concluded, for audit and replay."""

    plan: RepairPlan
    responses: tuple
    recovered: tuple
    bandwidth_subsymbols: int
    bandwidth_undeduped: int
    paper_bound: int

    def to_json(self) -> dict:
        queries = []
        for query, value in self.responses:
            queries.append({
                "node": query.node,
                "kind": query.kind,
                "multiplier": None if query.multiplier is None else query.multiplier.index,
                "response": value.index,
            })
        return {
            "params": self.plan.code.params_json(),
            "erased": list(self.plan.erased),
            "axis": self.plan.axis,
            "tau": [s.index for s in self.plan.tau],
            "queries": queries,
            "bandwidth_subsymbols": self.bandwidth_subsymbols,
            "paper_bound": self.paper_bound,
            "recovered": [{"node": n, "symbol": s.index} for n, s in self.recovered],
        }


def responses_from_json(code: RMCode, data: dict):
    """Rebuild (query, response) pairs recorded in a transcript document."""
    if data["params"] != code.params_json():
        raise ValueError("transcript was recorded against different parameters")
    tower = code.tower
    pairs = []
    for entry in data["queries"]:
        mult = entry["multiplier"]
        query = TraceQuery(entry["node"], entry["kind"],
                           None if mult is None else tower.symbol(mult))
        if entry["kind"] == "full":
            value = tower.symbol(entry["response"])
        else:
            value = tower.subsymbol(entry["response"])
        pairs.append((query, value))
    return pairs
