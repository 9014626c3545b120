import itertools
import random

import pytest

from rmrepair import repair
from rmrepair.galois import tower_new
from rmrepair.rmcode import code_new
from rmrepair.repair import (
    DegreeGateError,
    ErasureConditionError,
    ResponseError,
    TraceQuery,
    bandwidth_bounds,
    codeword_responder,
    degree_gate,
    execute,
    plan_multi,
    plan_single,
    recovery_poly,
)

F4 = tower_new(2, 1, 2)
F8 = tower_new(2, 1, 3)
F16_4 = tower_new(2, 2, 2)
F27 = tower_new(3, 1, 3)

C44 = code_new(F4, 2, 4)     # n=16, two variables
C83 = code_new(F8, 1, 3)     # length-8 univariate code
C27 = code_new(F27, 1, 10)   # length-27 univariate code


def random_message(code, rng):
    return [code.tower.symbol(rng.randrange(code.tower.order)) for _ in range(code.k)]


def repair_and_check(code, plan, cw):
    """Run a plan against a punctured codeword; recovered must match both
    the sealed original and the brute-force decoder."""
    punctured = cw.with_erasures(set(plan.erased))
    transcript = execute(plan, codeword_responder(punctured))
    oracle = code.oracle_erasure_decode(punctured)
    recovered = dict(transcript.recovered)
    for node in plan.erased:
        assert recovered[node] == cw.values[node]
        assert recovered[node] == oracle.values[node]
    return transcript


# ---------------------------------------------------------------- recovery polys

def test_expanded_terms_example():
    poly = recovery_poly(F4, F4.symbol(2), F4.zero, 1)
    assert [(c.index, e) for c, e in poly.expanded_terms] == [(2, 0), (3, 1)]
    assert poly.value_at(F4.zero) == F4.symbol(2)


def test_value_matches_fraction_away_from_anchor():
    for tower in (F4, F8, F27, F16_4):
        anchor = tower.symbol(1)
        for zi in range(1, tower.order):
            z = tower.symbol(zi)
            poly = recovery_poly(tower, z, anchor, 1)
            for si in range(tower.order):
                s = tower.symbol(si)
                if s == anchor:
                    continue
                fraction = tower.trace(z * (s - anchor)).embed() / (s - anchor)
                assert poly.value_at(s) == fraction


def test_anchor_value_is_scaled_z():
    tau = F8.kernel_trace_basis()[0]
    poly = recovery_poly(F8, F8.symbol(6), F8.symbol(2), 1, scale=tau)
    assert poly.value_at(F8.symbol(2)) == tau * F8.symbol(6)


def test_degree_one_tower_gives_constant():
    t = tower_new(2, 1, 1)
    poly = recovery_poly(t, t.one, t.zero, 1)
    assert [(c.index, e) for c, e in poly.expanded_terms] == [(1, 0)]
    assert poly.degree == 0


def test_rejects_zero_inputs():
    with pytest.raises(ValueError):
        recovery_poly(F4, F4.zero, F4.zero, 1)
    with pytest.raises(ValueError):
        recovery_poly(F4, F4.one, F4.zero, 1, scale=F4.zero)


def test_poly_degree_fits_the_dual_code():
    poly = recovery_poly(F4, F4.one, F4.zero, 1)
    assert poly.degree == 1 == C44.dual_degree()


# ---------------------------------------------------------------- degree gate

def test_degree_gate_values():
    assert degree_gate(C44) is True
    assert degree_gate(code_new(F4, 2, 5)) is False
    assert degree_gate(C83) is True
    assert degree_gate(code_new(F4, 1, 3)) is False


def test_gate_failure_witness():
    code = code_new(F4, 1, 3)
    with pytest.raises(DegreeGateError):
        plan_single(code, 0)
    witness = recovery_poly(F4, F4.one, F4.zero, 1)
    assert not code.is_dual_member(witness.evaluation_vector(code))


# ---------------------------------------------------------------- planning

def test_single_plan_counts_f4():
    plan = plan_single(C44, 5)
    assert len(plan.full_nodes) == 3
    assert len(plan.trace_nodes) == 12
    assert plan.bandwidth_subsymbols == 18
    assert plan.paper_bound == 18


def test_single_plan_counts_f8():
    plan = plan_single(C83, 2)
    assert plan.full_nodes == ()  # one variable: the slice is the erased point
    assert len(plan.trace_nodes) == 7
    assert plan.bandwidth_subsymbols == 7 == plan.paper_bound


def test_single_plan_any_axis():
    for axis in (1, 2):
        plan = plan_single(C44, 6, axis=axis)
        anchor = C44.points[6][axis - 1]
        for node in plan.full_nodes:
            assert C44.points[node][axis - 1] == anchor


def test_single_plan_validation():
    with pytest.raises(ValueError):
        plan_single(C44, 99)
    with pytest.raises(ValueError):
        plan_single(C44, 0, axis=3)


def test_multi_plan_picks_smallest_axis():
    plan = plan_multi(C44, [0, 4])  # points (0,0) and (1,0)
    assert plan.axis == 1
    plan = plan_multi(C44, [0, 1])  # points (0,0) and (0,1): axis 1 coords equal
    assert plan.axis == 2


def test_multi_plan_rejects_unseparated_pair():
    with pytest.raises(ErasureConditionError) as info:
        plan_multi(C44, [0, 8])  # (0,0) vs (v,0): v is outside the base field
    assert set(info.value.offenders) == {1, 2}
    assert info.value.offenders[1] == (0, 8)


def test_multi_plan_accepts_f27_triple():
    plan = plan_multi(C27, [0, 1, 2])
    assert plan.axis == 1
    assert len(plan.tau) == 2


def test_multi_plan_rejects_too_many_erasures():
    with pytest.raises(ValueError):
        plan_multi(C44, [0, 4, 12])  # three erasures but t=2
    with pytest.raises(ErasureConditionError):
        plan_multi(C83, [0, 1, 2])   # q=2 cannot separate three points


def test_multi_plan_gamma_sets_are_disjoint():
    plan = plan_multi(C44, [0, 4])
    gammas = [set(s.gamma_nodes) for s in plan.schemes]
    assert not (gammas[0] & gammas[1])
    assert set(plan.full_nodes) == gammas[0] | gammas[1]


def test_multi_basis_override_must_start_in_the_kernel():
    with pytest.raises(ValueError):
        plan_multi(C44, [0, 4], basis=(F4.symbol(2), F4.one))  # Tr(v) = 1


def test_plan_queries_cost_accounting():
    plan = plan_multi(C44, [0, 4])
    total = sum(q.cost(F4) for q in plan.queries)
    assert total == plan.bandwidth_subsymbols == 28
    assert plan.bandwidth_undeduped == 2 * (2 * 3 + 16 - 4 - 1)


# ---------------------------------------------------------------- execution

def test_constant_codeword_single_repair():
    message = [F4.zero] * C44.k
    message[0] = F4.symbol(3)
    cw = C44.encode(message)
    for node in (0, 7, 15):
        tr = repair_and_check(C44, plan_single(C44, node), cw)
        assert tr.bandwidth_subsymbols == 18


def test_single_repairs_all_nodes_random_messages():
    rng = random.Random(21)
    plans = [plan_single(C44, node) for node in range(C44.n)]
    for _ in range(10):
        cw = C44.encode(random_message(C44, rng))
        for plan in plans:
            tr = repair_and_check(C44, plan, cw)
            assert tr.bandwidth_subsymbols == 18


def test_single_repair_with_alternate_axis_and_basis():
    rng = random.Random(3)
    basis = (F4.symbol(3), F4.symbol(2))
    cw = C44.encode(random_message(C44, rng))
    plan = plan_single(C44, 9, axis=2, basis=basis)
    repair_and_check(C44, plan, cw)


def test_two_erasures_f4():
    rng = random.Random(31)
    plan = plan_multi(C44, [0, 4])
    for _ in range(20):
        cw = C44.encode(random_message(C44, rng))
        tr = repair_and_check(C44, plan, cw)
        assert tr.bandwidth_subsymbols == 28
        assert tr.paper_bound == 32


def test_two_erasures_deeper_tower():
    rng = random.Random(32)
    plan = plan_multi(C83, [0, 1])
    for _ in range(20):
        cw = C83.encode(random_message(C83, rng))
        repair_and_check(C83, plan, cw)


def test_two_erasures_with_intermediate_base_field():
    code = code_new(F16_4, 1, 11)
    plan = plan_multi(code, [0, 2])  # coordinates 0 and u, distinct in F_4
    rng = random.Random(33)
    for _ in range(10):
        cw = code.encode(random_message(code, rng))
        repair_and_check(code, plan, cw)


def test_three_erasures_f27():
    rng = random.Random(34)
    plan = plan_multi(C27, [0, 1, 2])
    for _ in range(10):
        cw = C27.encode(random_message(C27, rng))
        tr = repair_and_check(C27, plan, cw)
        assert tr.bandwidth_subsymbols == 72
        assert tr.paper_bound == 60


def test_three_erasures_quartic_tower():
    tower = tower_new(3, 1, 4)
    code = code_new(tower, 1, 5)
    plan = plan_multi(code, [0, 1, 2])
    rng = random.Random(35)
    for _ in range(3):
        cw = code.encode(random_message(code, rng))
        repair_and_check(code, plan, cw)


def test_multi_erasures_off_axis_points():
    # erased points share nothing with the origin; coordinates differ by 1
    ids = [C44.point_index((F4.symbol(2), F4.symbol(1))),
           C44.point_index((F4.symbol(3), F4.symbol(2)))]
    plan = plan_multi(C44, ids)
    rng = random.Random(36)
    for _ in range(10):
        cw = C44.encode(random_message(C44, rng))
        repair_and_check(C44, plan, cw)


# ---------------------------------------------------------------- properties

def test_recovery_vectors_are_dual_members_for_planned_schemes():
    plans = [plan_single(C44, 5), plan_single(C83, 0),
             plan_multi(C44, [0, 4]), plan_multi(C27, [0, 1, 2])]
    for plan in plans:
        for scheme_polys in plan.recovery_polys():
            for poly in scheme_polys:
                assert plan.code.is_dual_member(poly.evaluation_vector(plan.code))


def test_outsider_terms_factor_through_base_constants():
    rng = random.Random(41)
    plan = plan_single(C44, 5)
    scheme = plan.schemes[0]
    z = plan.basis[1]
    poly = recovery_poly(F4, z, scheme.anchor, plan.axis, scheme.scale)
    for _ in range(20):
        f = F4.symbol(rng.randrange(4))
        node = rng.choice(plan.trace_nodes)
        s = C44.points[node][plan.axis - 1]
        lhs = (poly.value_at(s) * f).trace()
        constant = (z * (s - scheme.anchor)).trace()
        rhs = constant * (scheme.multiplier_at(s) * f).trace()
        assert lhs == rhs


def test_bandwidth_bounds_table():
    assert bandwidth_bounds(C44, 1) == (18, 18)
    assert bandwidth_bounds(C44, 2) == (28, 32)
    assert bandwidth_bounds(C83, 1) == (7, 7)
    assert bandwidth_bounds(C27, 3) == (72, 60)
    with pytest.raises(ValueError):
        bandwidth_bounds(C44, 3)
    with pytest.raises(DegreeGateError):
        bandwidth_bounds(code_new(F4, 2, 5), 1)


def test_bound_gap_formula():
    # published minus deduped equals l(l-1)(Q - t)
    for code, l in ((C44, 2), (C27, 2), (C27, 3)):
        measured, published = bandwidth_bounds(code, l)
        hyperplane = code.tower.order ** (code.m - 1)
        assert published - measured == l * (l - 1) * (hyperplane - code.tower.t)


def test_execute_bandwidth_matches_formula():
    rng = random.Random(51)
    for plan in (plan_single(C44, 3), plan_multi(C44, [0, 4]), plan_multi(C27, [0, 1, 2])):
        cw = plan.code.encode(random_message(plan.code, rng))
        tr = execute(plan, codeword_responder(cw.with_erasures(set(plan.erased))))
        assert tr.bandwidth_subsymbols == bandwidth_bounds(plan.code, len(plan.erased))[0]


def test_execute_rejects_malformed_responses():
    plan = plan_single(C44, 5)
    cw = C44.encode([F4.zero] * C44.k)
    def bad_full(query):
        return F4.subsymbol(0) if query.kind == "full" else F4.subsymbol(0)
    with pytest.raises(ResponseError):
        execute(plan, bad_full)
    def bad_trace(query):
        value = cw.values[query.node]
        return value  # full symbols for trace queries
    with pytest.raises(ResponseError):
        execute(plan, bad_trace)


def test_trace_query_validation():
    with pytest.raises(ValueError):
        TraceQuery(0, "trace", None)
    with pytest.raises(ValueError):
        TraceQuery(0, "trace", F4.zero)
    with pytest.raises(ValueError):
        TraceQuery(0, "full", F4.one)
    with pytest.raises(ValueError):
        TraceQuery(0, "partial")


# ---------------------------------------------------------------- transcripts

def test_transcript_json_shape_and_round_trip():
    rng = random.Random(61)
    plan = plan_multi(C44, [0, 4])
    cw = C44.encode(random_message(C44, rng))
    tr = execute(plan, codeword_responder(cw.with_erasures({0, 4})))
    data = tr.to_json()
    assert data["params"] == {"p": 2, "a": 1, "t": 2, "m": 2, "d": 4}
    assert data["erased"] == [0, 4]
    assert data["axis"] == 1
    assert data["tau"] == [1]
    assert data["bandwidth_subsymbols"] == 28
    assert data["paper_bound"] == 32
    assert {q["kind"] for q in data["queries"]} == {"full", "trace"}
    full_entries = [q for q in data["queries"] if q["kind"] == "full"]
    assert all(q["multiplier"] is None for q in full_entries)
    assert len(data["queries"]) == 6 + 2 * 8
    assert sorted(r["node"] for r in data["recovered"]) == [0, 4]

    pairs = repair.responses_from_json(C44, data)
    assert pairs == list(tr.responses)
    with pytest.raises(ValueError):
        repair.responses_from_json(C83, data)
