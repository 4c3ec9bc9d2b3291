"""Command-line surface: verification, Maxwell experiments, demos, dumps.

Commands
--------
verify          run the module invariant suites, one line per check
maxwell         --mode spectrum | converge | energy
demo-advection  1D advection energy traces
dump-operator   write an SBP pair in Matrix Market text form

A config file of ``key = value`` lines can prefill any option; explicit
flags win.  Exit codes: 0 success, 1 check failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .sbp1d import build_sbp1d
from .curvilinear import sinusoidal_mapping
from .solvers import (
    advection_demo_1d,
    assemble_maxwell,
    convergence_study,
    random_compatible_state,
    spectrum,
)
from .verify import run_checks

__all__ = ["main", "build_parser", "read_config"]


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _comma_ints(text) -> list[int]:
    if isinstance(text, list):
        return [int(v) for v in text]
    return [int(tok) for tok in str(text).split(",") if tok.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbpproj",
        description="SBP operators with projection boundary conditions",
    )
    parser.add_argument("--config", help="key = value file of option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the invariant check suites")
    p_verify.add_argument("--only", help="restrict to one check group")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument(
        "--tol-scale", type=float, default=1.0, help="scale every check tolerance"
    )
    p_verify.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    p_max = sub.add_parser("maxwell", help="curvilinear four-block Maxwell runs")
    p_max.add_argument("--mode", choices=("spectrum", "converge", "energy"), required=True)
    p_max.add_argument("--order", default="4", help="comma-separated orders")
    p_max.add_argument("--n", default=None, help="comma-separated per-block N")
    p_max.add_argument("--alpha", type=float, default=0.1, help="mapping amplitude")
    p_max.add_argument("--eps", type=float, default=0.2)
    p_max.add_argument("--mu", type=float, default=5.0)
    p_max.add_argument("--t-final", type=float, default=1.0)
    p_max.add_argument("--workers", type=int, default=1, help="parallel convergence cells")
    p_max.add_argument("--seed", type=int, default=0)
    p_max.add_argument("--out", default=None, help="output file path")
    p_max.add_argument("--format", choices=("csv", "json"), default="csv")

    p_adv = sub.add_parser("demo-advection", help="1D advection energy traces")
    p_adv.add_argument("--flavor", choices=("single", "multiblock-skew"), default="single")
    p_adv.add_argument(
        "--c-pattern",
        choices=("zero", "const", "flip"),
        default="const",
        help="wave speed in time: 0, +1, or +1 flipping to -1 at t = 0.5",
    )
    p_adv.add_argument("--order", type=int, default=4)
    p_adv.add_argument("--n", type=int, default=40)
    p_adv.add_argument("--t-final", type=float, default=1.0)
    p_adv.add_argument("--out", default=None)
    p_adv.add_argument("--format", choices=("csv", "json"), default="csv")

    p_dump = sub.add_parser("dump-operator", help="write H and D in Matrix Market form")
    p_dump.add_argument("--order", type=int, required=True)
    p_dump.add_argument("--n", type=int, required=True)
    p_dump.add_argument("--out", default=None, help="output prefix (default: sbp_<order>_<n>)")

    parser._command_parsers = {
        "verify": p_verify,
        "maxwell": p_max,
        "demo-advection": p_adv,
        "dump-operator": p_dump,
    }
    return parser


def _apply_config(parser, argv):
    """Let a config file prefill option defaults; explicit flags still win."""
    ns, _ = parser.parse_known_args(argv)
    if not getattr(ns, "config", None):
        return parser.parse_args(argv)
    cfg = read_config(ns.config)
    sub = parser._command_parsers[ns.command]
    known = {action.dest for action in sub._actions}
    unknown = set(cfg) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for action in sub._actions:
        if action.dest in cfg:
            value = cfg[action.dest]
            if action.type is not None:
                value = action.type(value)
            elif isinstance(action.const, bool) or isinstance(action.default, bool):
                value = value.lower() in ("1", "true", "yes")
            action.default = value
    return parser.parse_args(argv)


def _write_rows(path, fmt, header, rows, meta):
    if fmt == "json":
        payload = {"meta": meta, "results": [dict(zip(header, row)) for row in rows]}
        text = json.dumps(payload, indent=2, sort_keys=True)
        if path:
            Path(path).write_text(text + "\n")
        else:
            print(text)
        return
    if path:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x) -> str:
    return f"{x:.6e}"


def cmd_verify(args) -> int:
    try:
        results = run_checks(
            only=args.only,
            seed=args.seed,
            inject_fault=args.inject_fault,
            tol_scale=args.tol_scale,
        )
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    failures = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(
            f"{status} [{res.group}] {res.name}: defect={res.defect:.3e} "
            f"tol={res.tolerance:.1e}"
        )
        failures += 0 if res.passed else 1
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 0 if failures == 0 else 1


def cmd_maxwell(args) -> int:
    orders = _comma_ints(args.order)
    mapping = sinusoidal_mapping(args.alpha)
    meta = {
        "mode": args.mode,
        "orders": orders,
        "alpha": args.alpha,
        "eps": args.eps,
        "mu": args.mu,
        "seed": args.seed,
    }
    if args.mode == "spectrum":
        n = _comma_ints(args.n)[0] if args.n else 20
        meta["n_per_block"] = n
        results = []
        rows = []
        for order in orders:
            problem = assemble_maxwell(order, n, mapping=mapping, eps=args.eps, mu=args.mu)
            eigs, max_re, max_abs = spectrum(problem)
            ratio = max_re / max_abs if max_abs else 0.0
            print(
                f"order {order}: {eigs.size} eigenvalues, "
                f"max|Re|={max_re:.3e}, max|Re|/max|lambda|={ratio:.3e}"
            )
            results.append(
                {
                    "order": order,
                    "max_re": max_re,
                    "max_abs": max_abs,
                    "re": eigs.real.tolist(),
                    "im": eigs.imag.tolist(),
                }
            )
            rows.append([order, _fmt(max_re), _fmt(max_abs), _fmt(ratio)])
        if args.format == "json" or args.out and str(args.out).endswith(".json"):
            payload = {"meta": meta, "results": results}
            text = json.dumps(payload)
            if args.out:
                Path(args.out).write_text(text + "\n")
            else:
                print(text)
        else:
            _write_rows(args.out, "csv", ["order", "max_re", "max_abs", "ratio"], rows, meta)
        return 0

    if args.mode == "converge":
        n_list = _comma_ints(args.n) if args.n else [10, 20, 30, 40, 50]
        meta["n_list"] = n_list
        study = convergence_study(
            orders=orders,
            n_list=n_list,
            mapping=mapping,
            t_final=args.t_final,
            eps=args.eps,
            mu=args.mu,
            workers=args.workers,
        )
        _print_convergence_table(study, orders)
        rows = [
            [
                row.n_per_block,
                row.order,
                _fmt(row.log10_error),
                "" if row.rate is None else _fmt(row.rate),
            ]
            for row in study
        ]
        _write_rows(args.out, args.format, ["n", "order", "log10_error", "rate"], rows, meta)
        return 0

    # energy: per-step energy traces, one per order
    n = _comma_ints(args.n)[0] if args.n else 20
    meta["n_per_block"] = n
    rows = []
    for order in orders:
        problem = assemble_maxwell(order, n, mapping=mapping, eps=args.eps, mu=args.mu)
        w0 = random_compatible_state(problem, seed=args.seed)
        trace = []
        problem.integrate(
            w0, args.t_final, callback=lambda t, w: trace.append((t, problem.energy(w)))
        )
        drift = abs(trace[-1][1] / trace[0][1] - 1.0)
        print(f"order {order}: |E(T)/E(0) - 1| = {drift:.3e}")
        rows.extend([order, _fmt(t), _fmt(e)] for t, e in trace)
    _write_rows(args.out, args.format, ["order", "t", "energy"], rows, meta)
    return 0


def _print_convergence_table(study, orders):
    """Wide layout: one row per N, (log10 e, q) column pair per order."""
    n_values = sorted({row.n_per_block for row in study})
    cells = {(row.order, row.n_per_block): row for row in study}
    header = f"{'N':>5}"
    for order in orders:
        header += f" {'log10(e' + str(order) + ')':>10} {'q' + str(order):>6}"
    print(header)
    for n in n_values:
        line = f"{n:>5}"
        for order in orders:
            row = cells.get((order, n))
            if row is None:
                line += f" {'-':>10} {'-':>6}"
            else:
                rate = "-" if row.rate is None else f"{row.rate:.2f}"
                line += f" {row.log10_error:>10.3f} {rate:>6}"
        print(line)


def cmd_demo_advection(args) -> int:
    patterns = {
        "zero": lambda t: 0.0,
        "const": lambda t: 1.0,
        "flip": lambda t: 1.0 if t < 0.5 else -1.0,
    }
    trace = advection_demo_1d(
        flavor=args.flavor,
        c=patterns[args.c_pattern],
        order=args.order,
        n=args.n,
        t_final=args.t_final,
    )
    print(
        f"{args.flavor} / c={args.c_pattern}: E(0)={trace.energies[0]:.6e} "
        f"E(T)={trace.energies[-1]:.6e} max step increase={trace.max_step_increase():.3e}"
    )
    rows = [[_fmt(t), _fmt(e)] for t, e in zip(trace.times, trace.energies)]
    meta = {
        "flavor": args.flavor,
        "c_pattern": args.c_pattern,
        "order": args.order,
        "n": args.n,
        "swap_times": list(trace.swap_times),
    }
    _write_rows(args.out, args.format, ["t", "energy"], rows, meta)
    return 0


def cmd_dump_operator(args) -> int:
    from scipy.io import mmwrite

    op = build_sbp1d(args.order, args.n)
    prefix = args.out or f"sbp_{args.order}_{args.n}"
    mmwrite(f"{prefix}_h", np.asarray(op.H.matrix), comment="SBP norm H")
    mmwrite(f"{prefix}_d", np.asarray(op.D.matrix), comment="SBP derivative D")
    print(f"wrote {prefix}_h.mtx and {prefix}_d.mtx")
    return 0


_COMMANDS = {
    "verify": cmd_verify,
    "maxwell": cmd_maxwell,
    "demo-advection": cmd_demo_advection,
    "dump-operator": cmd_dump_operator,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
