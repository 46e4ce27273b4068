"""Command-line front end.

Subcommands: ``gen`` (write a CSI1 instance), ``solve`` (run a strategy and
emit a trace CSV plus a summary JSON), ``certify`` (optimality certificate of
a solution file), ``oracle`` (high-precision reference solve), ``bench``
(seed-by-strategy sweep into a combined CSV), and ``kernels`` (timing
comparison of the inner-solver backends).

Exit codes: 0 success, 1 usage or file-format error, 2 numerical failure.
All floats are printed with 17 significant digits so files round-trip
losslessly.
"""

from __future__ import annotations

import argparse
import json
import struct
import sys
import time
from pathlib import Path

import numpy as np

from . import kernels
from .certify import check_global
from .dws import DwsConfig, RunResult
from .errors import FormatError, NumericalError
from .instance import GeneratorConfig, Instance, generate, read_instance, \
    write_instance
from .solver import SolverConfig, default_inner_tol, solve_full_oracle, \
    solve_restricted
from .strategies import STRATEGIES, run_strategy

__all__ = [
    "TRACE_HEADER",
    "main",
    "main_entry",
    "write_trace_csv",
    "write_solution",
    "read_solution",
    "dump_json",
]

TRACE_HEADER = "r,ws_size,supp_size,e_size,tau_next,objective,inner_iters,cum_seconds"

SUMMARY_FIELDS = (
    "strategy", "seed", "n", "s", "k", "eta", "outer_iterations", "sum_tau",
    "max_ws_size", "final_supp_size", "final_objective", "wall_seconds",
    "certificate_max_violation",
)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def dump_json(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits."""
    pad = " " * indent
    if isinstance(obj, dict):
        items = ",\n".join(
            f"{pad}  {json.dumps(str(key))}: {dump_json(val, indent + 2).lstrip()}"
            for key, val in obj.items())
        return f"{pad}{{\n{items}\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        return pad + "[" + ", ".join(dump_json(v).strip() for v in seq) + "]"
    if isinstance(obj, bool) or obj is None:
        return pad + json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return pad + str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return pad + _fmt(obj)
    return pad + json.dumps(obj)


def write_trace_csv(path, trace) -> None:
    lines = [TRACE_HEADER]
    for rec in trace:
        lines.append(",".join([
            str(rec.r), str(rec.ws_size), str(rec.supp_size), str(rec.e_size),
            str(rec.tau_next), _fmt(rec.objective), str(rec.inner_iters),
            _fmt(rec.cum_seconds),
        ]))
    Path(path).write_text("\n".join(lines) + "\n")


def write_solution(path, x) -> None:
    """Raw little-endian solution file: u64 length prefix, then f64 entries."""
    x = np.ascontiguousarray(x, dtype="<f8")
    Path(path).write_bytes(struct.pack("<Q", x.size) + x.tobytes())


def read_solution(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise FormatError("truncated header", 0)
    (count,) = struct.unpack("<Q", data[:8])
    expected = 8 + 8 * count
    if len(data) < expected:
        raise FormatError(f"truncated payload, expected {expected} bytes",
                          len(data))
    if len(data) > expected:
        raise FormatError(f"trailing {len(data) - expected} bytes", expected)
    return np.frombuffer(data[8:], dtype="<f8").astype(np.float64, copy=True)


def make_summary(strategy: str, inst: Instance, result: RunResult) -> dict:
    cert_tol = result.cfg.kkt_eps + 10.0 * result.scfg.tol_inner
    cert = check_global(inst, result.x, cert_tol)
    wall = result.trace[-1].cum_seconds if result.trace else 0.0
    return {
        "strategy": strategy,
        "seed": inst.seed,
        "n": inst.n,
        "s": inst.s,
        "k": inst.k,
        "eta": inst.eta,
        "outer_iterations": len(result.trace),
        "sum_tau": result.sum_tau,
        "max_ws_size": result.max_ws_size,
        "final_supp_size": int(np.count_nonzero(result.x)),
        "final_objective": result.final_objective,
        "wall_seconds": wall,
        "certificate_max_violation": cert.max_violation,
        "certificate_status": cert.status,
        "truncated": result.truncated,
        "inner_failures": result.inner_failures,
    }


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _gen_config(args) -> GeneratorConfig:
    return GeneratorConfig(
        n=args.n, s=args.s, k=args.k, c=args.c, eta_alpha=args.alpha,
        noise_sigma2=args.noise, seed=args.seed,
        normalize_b=getattr(args, "normalize_b", False))


def _dws_config(args) -> DwsConfig:
    return DwsConfig(h=args.h, tau=args.tau, p0=args.p0,
                     kkt_eps=args.kkt_eps, max_outer=args.max_outer)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(variant=args.variant, tol_inner=args.tol_inner,
                        max_inner_iters=args.max_inner)


def cmd_gen(args) -> int:
    inst = generate(_gen_config(args))
    write_instance(args.out, inst)
    print(f"wrote {args.out}: k={inst.k} n={inst.n} s={inst.s} "
          f"eta={_fmt(inst.eta)} seed={inst.seed}")
    return 0


def cmd_solve(args) -> int:
    inst = read_instance(args.input)
    result = run_strategy(args.strategy, inst, _dws_config(args),
                          _solver_config(args))
    if args.trace:
        write_trace_csv(args.trace, result.trace)
    summary = make_summary(args.strategy, inst, result)
    text = dump_json(summary)
    if args.summary:
        Path(args.summary).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_certify(args) -> int:
    inst = read_instance(args.input)
    x = read_solution(args.x)
    if x.size != inst.n:
        raise FormatError(
            f"solution length {x.size} does not match instance n={inst.n}", 0)
    cert = check_global(inst, x, args.tol)
    payload = {
        "status": cert.status,
        "max_violation": cert.max_violation,
        "tol": cert.tol,
        "eta": inst.eta,
        "worst": [[i, v] for i, v in cert.worst],
        "gamma": cert.gamma.tolist(),
    }
    text = dump_json(payload)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_oracle(args) -> int:
    inst = read_instance(args.input)
    x = solve_full_oracle(inst, args.tol)
    write_solution(args.out, x)
    from .linalg import objective
    print(f"wrote {args.out}: objective={_fmt(objective(inst.a, inst.b, inst.eta, x))} "
          f"supp={int(np.count_nonzero(x))}")
    return 0


def _parse_seeds(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return list(range(int(lo), int(hi)))
    return [int(tok) for tok in text.split(",") if tok]


def cmd_bench(args) -> int:
    strategies = [tok for tok in args.strategies.split(",") if tok]
    for strat in strategies:
        if strat not in STRATEGIES:
            raise ValueError(f"unknown strategy {strat!r}")
    seeds = _parse_seeds(args.seeds)
    rows = []
    trace_dir = Path(args.trace_dir) if args.trace_dir else None
    if trace_dir:
        trace_dir.mkdir(parents=True, exist_ok=True)
    for seed in seeds:
        cfg = GeneratorConfig(n=args.n, s=args.s, k=args.k, c=args.c,
                              eta_alpha=args.alpha, noise_sigma2=args.noise,
                              seed=seed, normalize_b=args.normalize_b)
        inst = generate(cfg)
        for strat in strategies:
            result = run_strategy(strat, inst, _dws_config(args),
                                  _solver_config(args))
            rows.append(make_summary(strat, inst, result))
            if trace_dir:
                write_trace_csv(trace_dir / f"trace_{strat}_{seed}.csv",
                                result.trace)
    rows.sort(key=lambda row: (row["strategy"], row["seed"]))
    lines = [",".join(SUMMARY_FIELDS)]
    for row in rows:
        cells = []
        for field in SUMMARY_FIELDS:
            val = row[field]
            cells.append(_fmt(val) if isinstance(val, float) else str(val))
        lines.append(",".join(cells))
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {args.out}: {len(rows)} rows")
    return 0


def cmd_kernels(args) -> int:
    cfg = GeneratorConfig(n=args.n, s=args.s, seed=args.seed)
    inst = generate(cfg)
    atb = inst.a.T @ inst.b
    tol = default_inner_tol(atb)
    order = np.argsort(-np.abs(atb), kind="stable")
    names = sorted(kernels.backends())
    print(f"backends available: {', '.join(names)} (default: {kernels.BACKEND})")
    header = f"{'solver':10s} {'ws':>5s} " + " ".join(f"{nm:>12s}" for nm in names)
    print(header)
    for w in args.widths:
        ws = np.sort(order[:w])
        a_w = np.asfortranarray(inst.a[:, ws])
        warm = np.zeros(w)
        for variant in ("gpsr_bb", "ista_oracle"):
            cells = []
            for nm in names:
                best = np.inf
                for _ in range(args.repeats):
                    t0 = time.perf_counter()
                    sol = solve_restricted(
                        a_w, inst.b, inst.eta, warm,
                        SolverConfig(variant=variant, tol_inner=tol),
                        backend=nm)
                    best = min(best, time.perf_counter() - t0)
                cells.append(f"{best * 1e3:9.3f}ms")
            print(f"{variant:10s} {w:5d} " + " ".join(f"{c:>12s}" for c in cells))
    if len(names) == 1:
        print("compiled backend not built; run `python -m dwslasso.kernels.build`")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="dwslasso",
                     description="dynamic working-set solver toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_gen_flags(p, with_seed=True):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--s", type=int, required=True)
        group = p.add_mutually_exclusive_group()
        group.add_argument("--k", type=int, default=None,
                           help="explicit observation count")
        group.add_argument("--c", type=float, default=None,
                           help="observation multiplier (default 2)")
        p.add_argument("--alpha", type=float, default=0.1)
        p.add_argument("--noise", type=float, default=1e-4,
                       help="noise variance")
        if with_seed:
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--normalize-b", action="store_true",
                       dest="normalize_b",
                       help="scale the problem so the observation has unit norm")

    def add_run_flags(p):
        p.add_argument("--h", type=float, default=2.0)
        p.add_argument("--tau", type=int, default=None)
        p.add_argument("--p0", type=int, default=10)
        p.add_argument("--kkt-eps", type=float, default=None, dest="kkt_eps")
        p.add_argument("--max-outer", type=int, default=500, dest="max_outer")
        p.add_argument("--variant", choices=("gpsr_bb", "ista_oracle"),
                       default="gpsr_bb")
        p.add_argument("--tol-inner", type=float, default=None, dest="tol_inner")
        p.add_argument("--max-inner", type=int, default=100_000,
                       dest="max_inner")

    p = sub.add_parser("gen", help="generate a CSI1 instance file")
    add_gen_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run a working-set strategy")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--strategy", choices=STRATEGIES, default="dws")
    p.add_argument("--trace", default=None, help="trace CSV path")
    p.add_argument("--summary", default=None, help="summary JSON path")
    add_run_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", help="certificate for a solution file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--x", required=True, help="solution file")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("oracle", help="high-precision reference solve")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="seed-by-strategy sweep")
    add_gen_flags(p, with_seed=False)
    p.add_argument("--seeds", required=True, help="e.g. 0:10 or 1,2,3")
    p.add_argument("--strategies", default="dws,doubling")
    p.add_argument("--out", required=True)
    p.add_argument("--trace-dir", default=None, dest="trace_dir")
    add_run_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("kernels", help="benchmark the solver backends")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--s", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--widths", type=int, nargs="+", default=[50, 100, 200])
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=cmd_kernels)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"dwslasso: file format error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"dwslasso: error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"dwslasso: numerical failure: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())
