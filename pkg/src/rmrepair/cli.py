"""Command line front end: field inspection, repair runs, verification, benchmarks.

Exit codes: 0 on success, 1 when a verification suite fails, 2 for invalid
parameters or refused repairs (with a diagnostic on stderr).  Machine
readable output is JSON (or CSV for bench); identical configuration and
seed always produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from . import dss, linalg, repair
from .galois import tower_new
from .rmcode import code_new

__all__ = ["RunConfig", "main"]

_EXHAUSTIVE_LIMIT = 1 << 12   # largest field order for all-pairs property sweeps


@dataclass
class RunConfig:
    p: int
    a: int
    t: int
    m: int = 1
    d: int = 0
    seed: int = 0
    out: str | None = None
    format: str = "table"
    pretty: bool = False


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _dump(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


def _sym(symbol, pretty: bool):
    return symbol.pretty() if pretty else symbol.index


# ---------------------------------------------------------------- field


def cmd_field(cfg: RunConfig) -> int:
    tower = tower_new(cfg.p, cfg.a, cfg.t)
    basis = tower.basis
    dual = tower.dual_basis(basis)
    info = {
        "p": tower.p, "a": tower.a, "t": tower.t,
        "q": tower.q, "order": tower.order,
        "base_modulus": list(tower.base_modulus),
        "ext_modulus": list(tower.ext_modulus),
        "basis": [_sym(z, cfg.pretty) for z in basis],
        "dual_basis": [_sym(z, cfg.pretty) for z in dual],
        "kernel_basis": ([_sym(z, cfg.pretty) for z in tower.kernel_trace_basis()]
                         if tower.t > 1 else []),
    }
    if tower.order <= 1024:
        info["trace_table"] = {
            str(_sym(x, cfg.pretty)): _sym(tower.trace(x), cfg.pretty)
            for x in tower.symbols()
        }
    if cfg.format == "json":
        _emit(_dump(info), cfg.out)
    else:
        lines = [f"field tower: F_{tower.order} over F_{tower.q} over F_{tower.p}"]
        lines.append(f"base modulus (constant first): {info['base_modulus']}")
        lines.append(f"ext modulus  (constant first): {info['ext_modulus']}")
        lines.append(f"basis:        {info['basis']}")
        lines.append(f"dual basis:   {info['dual_basis']}")
        lines.append(f"kernel basis: {info['kernel_basis']}")
        if "trace_table" in info:
            lines.append("trace table:  " + ", ".join(
                f"{k}->{v}" for k, v in info["trace_table"].items()))
        _emit("\n".join(lines), cfg.out)
    return 0


# ---------------------------------------------------------------- repair


def cmd_repair(cfg: RunConfig, failures) -> int:
    tower = tower_new(cfg.p, cfg.a, cfg.t)
    code = code_new(tower, cfg.m, cfg.d)
    cluster = dss.cluster_init(code, dss.seeded_message(code, cfg.seed), cfg.seed)
    cluster.fail(dss.FailureEvent(failures))
    naive = cluster.naive_bandwidth()
    transcript = cluster.repair_failed()
    out = cfg.out or "transcript.json"
    Path(out).write_text(_dump(transcript.to_json()))
    print(f"bandwidth={transcript.bandwidth_subsymbols} "
          f"paper={transcript.paper_bound} naive={naive}")
    return 0


# ---------------------------------------------------------------- verify


def _verify_field(tower, results):
    q, t, order = tower.q, tower.t, tower.order
    elems = list(tower.symbols())
    exhaustive = order * order <= _EXHAUSTIVE_LIMIT ** 2 and order <= _EXHAUSTIVE_LIMIT

    ok = True
    if exhaustive:
        ok = all((x + y).trace() == x.trace() + y.trace() for x in elems for y in elems)
    results.append(("trace additivity", ok))

    ok = all(tower.trace(c.embed() * x) == c * x.trace()
             for c in tower.subsymbols() for x in elems)
    results.append(("trace base-field linearity", ok))

    images = {x.trace().index for x in elems}
    kernel = sum(1 for x in elems if not x.trace())
    results.append(("trace onto base with kernel size q^(t-1)",
                    len(images) == q and kernel == q ** (t - 1)))

    basis = tower.basis
    dual = tower.dual_basis(basis)
    ok = all((basis[i] * dual[j]).trace().index == (1 if i == j else 0)
             for i in range(t) for j in range(t))
    results.append(("dual basis pairing", ok))

    ok = all(tower.expand_in_dual(x, basis, dual) == x for x in elems)
    results.append(("dual expansion round trip", ok))

    fixed = sum(1 for x in elems if tower.frobenius(x) == x)
    results.append(("frobenius fixes exactly the base field", fixed == q))


def _verify_code(code, rng, results):
    dd = code.dual_degree()
    if dd >= 0 and code.n <= 256:
        dual_code = code_new(code.tower, code.m, dd)
        ok = (code.k + dual_code.k == code.n and
              all(code.is_dual_member(row) for row in dual_code.generator))
        results.append(("dual code membership and dimensions", ok))
    order = code.tower.order
    ok = True
    for _ in range(5):
        msg = [code.tower.symbol(rng.randrange(order)) for _ in range(code.k)]
        cw = code.encode(msg)
        f = code.message_poly(msg)
        ok = ok and all(f.evaluate(P) == v for P, v in zip(code.points, cw.values))
    results.append(("encode agrees with evaluation", ok))


def _verify_repair(code, rng, results):
    order = code.tower.order
    if not repair.degree_gate(code):
        try:
            repair.plan_single(code, 0)
            results.append(("planner refuses above the degree gate", False))
        except repair.DegreeGateError:
            results.append(("planner refuses above the degree gate (expected)", True))
        witness = repair.recovery_poly(code.tower, code.tower.one, code.tower.zero, 1)
        results.append(("witness polynomial fails dual membership above the gate",
                        not code.is_dual_member(witness.evaluation_vector(code))))
        return

    msg = [code.tower.symbol(rng.randrange(order)) for _ in range(code.k)]
    cw = code.encode(msg)
    nodes = range(code.n) if code.n <= 32 else rng.sample(range(code.n), 32)
    ok = True
    for node in nodes:
        plan = repair.plan_single(code, node)
        tr = repair.execute(plan, repair.codeword_responder(cw.with_erasures({node})))
        oracle = code.oracle_erasure_decode(cw.with_erasures({node}))
        got = dict(tr.recovered)[node]
        ok = ok and got == cw.values[node] == oracle.values[node]
        ok = ok and tr.bandwidth_subsymbols == repair.bandwidth_bounds(code, 1)[0]
        ok = ok and all(code.is_dual_member(p.evaluation_vector(code))
                        for polys in plan.recovery_polys() for p in polys)
    results.append(("single repairs match original and oracle", ok))

    # fault injection: a corrupted response must be caught by the comparison
    node = next(iter(nodes))
    broken = list(cw.values)
    broken[node - 1 if node else 1] = broken[node - 1 if node else 1] + code.tower.one
    from .rmcode import Codeword
    bad_cw = Codeword(code, tuple(broken), frozenset()).with_erasures({node})
    tr = repair.execute(repair.plan_single(code, node), repair.codeword_responder(bad_cw))
    results.append(("corrupted symbol detected by comparison",
                    dict(tr.recovered)[node] != cw.values[node]))


def cmd_verify(cfg: RunConfig) -> int:
    rng = random.Random(cfg.seed)
    tower = tower_new(cfg.p, cfg.a, cfg.t)
    code = code_new(tower, cfg.m, cfg.d)
    results = []
    _verify_field(tower, results)
    _verify_code(code, rng, results)
    _verify_repair(code, rng, results)
    failed = [name for name, ok in results if not ok]
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 1 if failed else 0


# ---------------------------------------------------------------- bench


def _bench_failure_set(code, l):
    # first l base-field values along the first axis, other coordinates zero
    step = code.tower.order ** (code.m - 1)
    return [c * step for c in range(l)]


def cmd_bench(cfg: RunConfig, l_max: int | None) -> int:
    tower = tower_new(cfg.p, cfg.a, cfg.t)
    code = code_new(tower, cfg.m, cfg.d)
    l_top = min(l_max or tower.t, tower.t, tower.q)
    rows = []
    for l in range(1, l_top + 1):
        cluster = dss.cluster_init(code, dss.seeded_message(code, cfg.seed), cfg.seed)
        failures = _bench_failure_set(code, l)
        cluster.fail(dss.FailureEvent(failures))
        naive = cluster.naive_bandwidth()
        try:
            transcript = cluster.repair_failed()
        except (repair.ErasureConditionError, ValueError):
            continue
        rows.append((l, transcript.bandwidth_subsymbols, transcript.paper_bound, naive))
    if cfg.format == "table":
        lines = [f"{'l':>3} {'measured':>9} {'paper_bound':>12} {'naive':>6}"]
        for l, measured, bound, naive in rows:
            flag = "  (exceeds paper bound)" if measured > bound else ""
            lines.append(f"{l:>3} {measured:>9} {bound:>12} {naive:>6}{flag}")
        _emit("\n".join(lines), cfg.out)
    else:
        lines = ["l,measured,paper_bound,naive"]
        lines += [f"{l},{m},{b},{nv}" for l, m, b, nv in rows]
        _emit("\n".join(lines) + "\n", cfg.out)
    return 0


# ---------------------------------------------------------------- scenario


def cmd_scenario(path: str, out: str | None) -> int:
    scenario = json.loads(Path(path).read_text())
    cluster, transcripts = dss.run_scenario(scenario)
    out_dir = Path(out) if out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, tr in enumerate(transcripts):
        (out_dir / f"transcript_{i}.json").write_text(_dump(tr.to_json()))
        print(f"repair {i}: erased={list(tr.plan.erased)} "
              f"bandwidth={tr.bandwidth_subsymbols} paper={tr.paper_bound}")
    return 0


# ---------------------------------------------------------------- driver


def _add_tower_args(sp, with_code=True):
    sp.add_argument("--p", type=int, required=True, help="prime characteristic")
    sp.add_argument("--a", type=int, default=1, help="base extension exponent (q = p^a)")
    sp.add_argument("--t", type=int, required=True, help="tower extension degree")
    if with_code:
        sp.add_argument("--m", type=int, required=True, help="number of variables")
        sp.add_argument("--d", type=int, required=True, help="total degree bound")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rmrepair",
        description="trace repair simulator for evaluation-coded storage")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("field", help="inspect a field tower")
    _add_tower_args(sp, with_code=False)
    sp.add_argument("--format", choices=("json", "table"), default="table")
    sp.add_argument("--pretty", action="store_true",
                    help="render symbols as polynomials instead of indices")

    sp = sub.add_parser("repair", help="fail nodes and repair them")
    _add_tower_args(sp)
    sp.add_argument("failures", type=int, nargs="+",
                    help="point indices of the nodes to fail")

    sp = sub.add_parser("verify", help="run the property suites")
    _add_tower_args(sp)

    sp = sub.add_parser("bench", help="bandwidth table over erasure counts")
    _add_tower_args(sp)
    sp.add_argument("--l-max", type=int, default=None)
    sp.add_argument("--format", choices=("csv", "table"), default="csv")

    sp = sub.add_parser("scenario", help="drive a scripted failure/repair run")
    sp.add_argument("path")
    sp.add_argument("--out", default=None)
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        p=args.p, a=args.a, t=args.t,
        m=getattr(args, "m", 1), d=getattr(args, "d", 0),
        seed=args.seed, out=args.out,
        format=getattr(args, "format", "table"),
        pretty=getattr(args, "pretty", False),
    )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "field":
            return cmd_field(_config(args))
        if args.command == "repair":
            return cmd_repair(_config(args), args.failures)
        if args.command == "verify":
            return cmd_verify(_config(args))
        if args.command == "bench":
            return cmd_bench(_config(args), args.l_max)
        if args.command == "scenario":
            return cmd_scenario(args.path, args.out)
    except (ValueError, repair.ReconstructionError, dss.NodeUnavailableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    raise SystemExit(main())
