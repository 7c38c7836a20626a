"""Command-line front end.

Exit codes: 0 when every check is verified (or a witness was found), 1 when
a check is violated (or no witness was found), 2 on any error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import theorems as th
from .constants import OptOptions, compute_beta, compute_delta, compute_zeta
from .errors import OpJensenError
from .instances import (
    GeneratorSpec,
    default_interval,
    dumps,
    generate_instance,
    load_instance,
    report_row,
    report_to_dict,
    rows_to_csv,
    save_instance,
)
from .posmaps import KINDS
from .scalarfun import parse_function

THEOREMS = (
    "reverse-jensen", "forward-jensen", "beta", "choi-forward", "choi-reverse",
    "psum-forward", "psum-reverse", "cdj-naive", "power-reverse", "power-forward",
)
DEFAULT_THEOREMS = ("reverse-jensen", "forward-jensen", "beta")
BENCH_COLUMNS = (
    "instance_label", "function", "d_H", "d_K", "n", "delta", "zeta", "beta",
    "margin_delta", "margin_beta", "tighter_bound",
)


class UsageError(Exception):
    pass


def _dims(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if not 1 <= a <= b:
        raise argparse.ArgumentTypeError(f"need 1 <= A <= B, got {text!r}")
    return a, b


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", action="append", default=[], metavar="PATH",
                        help="instance JSON file (repeatable)")
    common.add_argument("--function", action="append", default=[], metavar="NAME[:PARAM]",
                        help="function selector for generated instances, e.g. power:4, exp (repeatable)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=_positive_int, default=64)
    common.add_argument("--tol", type=_positive_float, default=th.LOEWNER_TOL)
    common.add_argument("--dims", type=_dims, default=(2, 4), metavar="A..B",
                        help="range of d_H for generated instances")
    common.add_argument("--count", type=int, default=None, help="number of generated instances")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--format", choices=("text", "json", "csv"), default=None)

    p = argparse.ArgumentParser(prog="opjensen", description="Verify operator Jensen-type inequalities.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run inequality verifiers")
    v.add_argument("--theorem", action="append", choices=THEOREMS, default=[])
    sub.add_parser("constants", parents=[common], help="compute delta, zeta and beta")
    sub.add_parser("bench", parents=[common], help="compare beta with delta and zeta on an ensemble")
    c = sub.add_parser("counterexample", parents=[common],
                       help="search for a violation of the uncorrected operator Jensen inequality")
    c.add_argument("--dim-h", type=_positive_int, default=3)
    c.add_argument("--dim-k", type=_positive_int, default=2)
    c.add_argument("--trials", type=int, default=100_000)
    return p


# ---------------------------------------------------------------------------


def _functions(args, default=("power:2",)):
    return [parse_function(s) for s in (args.function or default)]


def generated_instances(args, count: int, functions):
    """Instances drawn deterministically from ``--seed``; instance ``k`` depends
    only on ``(seed, k)``."""
    lo, hi = args.dims
    out = []
    for k in range(count):
        rng = np.random.default_rng([args.seed, k])
        d_h = int(rng.integers(lo, hi + 1))
        d_k = int(rng.integers(1, d_h + 1))
        n = int(rng.integers(1, 4))
        f = functions[k % len(functions)]
        spectrum, floor = default_interval(f)
        spec = GeneratorSpec(d_h, d_k, n, KINDS, spectrum, floor, seed=int(rng.integers(2 ** 63)))
        out.append(generate_instance(spec, f, label=f"gen-{args.seed}-{k}-{f.label}"))
    return out


def collect_instances(args, default_count: int = 1):
    insts = [load_instance(p) for p in args.instance]
    count = args.count if args.count is not None else (0 if insts else default_count)
    if count < 0:
        raise UsageError("--count must be >= 0")
    if count:
        insts.extend(generated_instances(args, count, _functions(args)))
    return insts


def run_theorem(tid: str, inst, opts: OptOptions, tol: float) -> th.VerificationReport:
    if tid == "reverse-jensen":
        return th.verify_reverse_jensen(inst, opts, tol)
    if tid == "forward-jensen":
        return th.verify_forward_jensen(inst, opts, tol)
    if tid == "beta":
        return th.verify_beta_reverse(inst, opts, tol)
    if tid == "cdj-naive":
        return th.verify_cdj_naive(inst, min(tol, th.EXACT_TOL))
    if tid in ("power-reverse", "power-forward"):
        return th.verify_power(inst, tid.split("-")[1], opts, tol)
    # single-map propositions: the family's summed map, A and B the first two operators
    if len(inst.operators) < 2:
        return th.VerificationReport(tid, th.ERROR, float("nan"),
                                     diagnostics=f"{tid} needs an instance with at least two operators (A, B)", tol=tol)
    A, B = inst.operators[:2]
    if tid == "choi-forward":
        return th.verify_choi_forward(inst.family, A, B, min(tol, th.EXACT_TOL))
    if tid == "choi-reverse":
        return th.verify_choi_reverse(inst.family, A, B, opts, tol)
    if tid == "psum-forward":
        return th.verify_parallel_sum_forward(inst.family, A, B, min(tol, th.EXACT_TOL))
    return th.verify_parallel_sum_reverse(inst.family, A, B, opts, tol)


def _fmt(v) -> str:
    return "-" if v is None else f"{v:.10g}"


def report_text(inst, rep: th.VerificationReport) -> str:
    c = rep.constants
    parts = [f"[{rep.verdict}] {rep.inequality_id}", f"instance={inst.label or '-'}",
             f"f={inst.function.label}", f"d_H={inst.d_h} d_K={inst.d_k} n={inst.n}"]
    for key in ("delta", "zeta", "beta"):
        if getattr(c, key) is not None:
            parts.append(f"{key}={_fmt(getattr(c, key))}")
    parts.append(f"margin={_fmt(rep.margin)}")
    for side in ("lhs", "rhs"):
        r = rep.eig_range(side)
        if r is not None:
            parts.append(f"{side} eig [{r[0]:.6g}, {r[1]:.6g}]")
    if rep.pointwise_min is not None:
        parts.append(f"pointwise_min={rep.pointwise_min:.3e}")
    if rep.diagnostics:
        parts.append(f"({rep.diagnostics})")
    return "  ".join(parts)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    insts = collect_instances(args)
    theorems = args.theorem or list(DEFAULT_THEOREMS)
    opts = OptOptions(restarts=args.restarts, seed=args.seed)
    results = [(inst, run_theorem(t, inst, opts, args.tol)) for inst in insts for t in theorems]
    fmt = args.format or "text"
    if fmt == "json":
        text = dumps([report_to_dict(r, i) for i, r in results])
    elif fmt == "csv":
        text = rows_to_csv(report_row(i, r) for i, r in results)
    else:
        text = "".join(report_text(i, r) + "\n" for i, r in results)
    _emit(args, text)
    verdicts = {r.verdict for _, r in results}
    if th.ERROR in verdicts:
        return 2
    return 1 if th.VIOLATED in verdicts else 0


def cmd_constants(args) -> int:
    insts = collect_instances(args)
    opts = OptOptions(restarts=args.restarts, seed=args.seed)
    rows = []
    for inst in insts:
        d = compute_delta(inst.function, inst.family, inst.operators, opts)
        z = compute_zeta(inst.function, inst.family, inst.operators, opts)
        b = compute_beta(inst.function, inst.hull())
        rows.append({
            "instance_label": inst.label, "function": inst.function.label,
            "d_H": inst.d_h, "d_K": inst.d_k, "n": inst.n,
            "delta": d.delta, "zeta": z.zeta, "beta": b.beta,
            "delta_converged": d.witnesses["delta"].converged,
            "zeta_converged": z.witnesses["zeta"].converged,
        })
    fmt = args.format or "text"
    if fmt == "json":
        text = dumps(rows)
    elif fmt == "csv":
        text = rows_to_csv(rows, tuple(rows[0]) if rows else ("instance_label", "delta", "zeta", "beta"))
    else:
        text = "".join(
            f"{r['instance_label']}  f={r['function']}  delta={_fmt(r['delta'])}  "
            f"zeta={_fmt(r['zeta'])}  beta={_fmt(r['beta'])}\n" for r in rows
        )
    _emit(args, text)
    return 0


def bench_row(inst, opts: OptOptions, tol: float) -> dict:
    rev = th.verify_reverse_jensen(inst, opts, tol, samples=0)
    fwd = th.verify_forward_jensen(inst, opts, tol, samples=0)
    bet = th.verify_beta_reverse(inst, opts, tol, samples=0, delta=rev.constants.delta)
    delta, beta = rev.constants.delta, bet.constants.beta
    if any(r.verdict == th.ERROR for r in (rev, fwd, bet)):
        tighter = "error"
    elif abs(beta - delta) <= 1e-12 * (1 + abs(delta)):
        tighter = "equal"
    else:
        tighter = "beta" if beta < delta else "delta"
    return {
        "instance_label": inst.label, "function": inst.function.label,
        "d_H": inst.d_h, "d_K": inst.d_k, "n": inst.n,
        "delta": delta, "zeta": fwd.constants.zeta, "beta": beta,
        "margin_delta": rev.margin, "margin_beta": bet.margin, "tighter_bound": tighter,
    }


def cmd_bench(args) -> int:
    insts = [load_instance(p) for p in args.instance]
    count = args.count if args.count is not None else 10
    if count < 0:
        raise UsageError("--count must be >= 0")
    insts += generated_instances(args, count, _functions(args, ("power:2", "power:3", "exp")))
    opts = OptOptions(restarts=args.restarts, seed=args.seed)
    rows = [bench_row(inst, opts, args.tol) for inst in insts]
    fmt = args.format or "csv"
    if fmt == "json":
        text = dumps(rows)
    elif fmt == "csv":
        text = rows_to_csv(rows, BENCH_COLUMNS)
    else:
        text = "".join(
            "  ".join(f"{k}={_fmt(v) if isinstance(v, float) else v}" for k, v in r.items()) + "\n" for r in rows
        )
    _emit(args, text)
    return 2 if any(r["tighter_bound"] == "error" for r in rows) else 0


def cmd_counterexample(args) -> int:
    if len(args.function) > 1:
        raise UsageError("counterexample takes a single --function")
    f = parse_function(args.function[0] if args.function else "power:4")
    if args.dim_h < args.dim_k:
        raise UsageError("--dim-h must be >= --dim-k")
    found = th.find_cdj_counterexample(f, args.dim_h, args.dim_k, args.trials, args.seed)
    if found is None:
        sys.stdout.write(f"no violation found for {f.label} in {args.trials} trials (seed {args.seed})\n")
        return 1
    witness = {"margin": found.margin, "trial": found.trial, "seed": found.seed}
    path = args.out or "counterexample.json"
    save_instance(found.instance, path, {"witness": witness})
    sys.stdout.write(
        f"violation found for {f.label}: trial {found.trial}, Loewner margin {found.margin:.6g}; "
        f"witness written to {path}\n"
    )
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "constants": cmd_constants,
    "bench": cmd_bench,
    "counterexample": cmd_counterexample,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return COMMANDS[args.command](args)
    except (OpJensenError, UsageError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
