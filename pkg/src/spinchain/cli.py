"""Command line entry point: ``spinchain run|verify|bench|classify``.

Exit codes: 0 success, 1 validation or diagnostic failure, 2 oracle
mismatch above tolerance.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import gates, runner
from .experiment import ExperimentConfig, ExperimentError, parse_complex, parse_experiment, with_verify
from .linalg import LinalgError

EXIT_OK, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2


def seed() -> int:
    return int(os.environ.get("SPINCHAIN_SEED", "0"))


def _load(path: str) -> ExperimentConfig:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse_experiment(text)


def _report_verify(result: runner.VerifyResult) -> int:
    if not result.checked:
        print(f"verify: skipped ({result.note})", file=sys.stderr)
        return EXIT_OK
    status = "ok" if result.ok else "MISMATCH"
    print(f"verify: max deviation {result.max_deviation:.3e} (tol {result.tol:.1e}) {status}", file=sys.stderr)
    return EXIT_OK if result.ok else EXIT_MISMATCH


def cmd_run(args) -> int:
    cfg = _load(args.file)
    if args.format:
        from dataclasses import replace

        cfg = replace(cfg, output=replace(cfg.output, format=args.format))
    text = runner.emit(cfg, runner.run_experiment(cfg))
    if text is not None:
        sys.stdout.write(text)
    if cfg.verify is not None:
        return _report_verify(runner.verify_experiment(cfg, cfg.verify.max_n, cfg.verify.tol))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = with_verify(_load(args.file), args.max_n, args.tol)
    return _report_verify(runner.verify_experiment(cfg, cfg.verify.max_n, cfg.verify.tol))


def cmd_bench(args) -> int:
    rng = np.random.default_rng(seed())
    rows = []
    for n in args.sizes:
        rows.append(runner.bench_compressed(n, args.depth, rng))
    dense_dev = None
    if args.dense_n:
        row, dense_dev = runner.bench_dense(args.dense_n, args.dense_depth, rng)
        rows.append(row)
    if args.json:
        payload = {
            "seed": seed(),
            "rows": [r.__dict__ for r in rows],
            "dense_max_deviation": dense_dev,
        }
        print(json.dumps(payload, indent=1))
    else:
        print(f"{'path':<11}{'n':>6}{'depth':>7}{'gates':>8}{'compile_s':>12}{'evolve_s':>12}")
        for r in rows:
            print(f"{r.path:<11}{r.n:>6}{r.depth:>7}{r.gates:>8}{r.compile_s:>12.4f}{r.evolve_s:>12.6f}")
        print("compressed rows ran with the dense oracle disabled (no 2**n allocation)")
        if dense_dev is not None:
            print(f"dense oracle max deviation vs compressed: {dense_dev:.3e}")
    if dense_dev is not None and dense_dev > args.tol:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_classify(args) -> int:
    entries = " ".join(args.entries).replace(",", " ").split()
    if len(entries) != 16:
        print(f"classify: expected 16 complex entries, got {len(entries)}", file=sys.stderr)
        return EXIT_INVALID
    try:
        g = np.array([parse_complex(e) for e in entries]).reshape(4, 4)
        cls = gates.classify_gate(g)
    except (ValueError, LinalgError) as exc:
        print(f"classify: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"class: {cls.value}")
    try:
        terms = gates.terms_from_hamiltonian(gates.gate_generator(g))
    except gates.NotInTermBasis as exc:
        print(f"terms: none ({exc})")
        return EXIT_OK
    for name, value in terms.as_dict().items():
        print(f"{name.rstrip('_')}: {value:.17g}")
    return EXIT_OK


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}")
    if not sizes or min(sizes) < 2:
        raise argparse.ArgumentTypeError("sizes must be integers >= 2")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinchain", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment file and emit step,node,probability records")
    run.add_argument("file", help="experiment file ('-' for stdin)")
    run.add_argument("--format", choices=("csv", "json"), help="override [output] format")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="cross-check the compressed result against the dense oracle")
    ver.add_argument("file")
    ver.add_argument("--max-n", type=int, default=None, help="largest n sent to the oracle (default 10)")
    ver.add_argument("--tol", type=float, default=None, help="max allowed deviation (default 1e-9)")
    ver.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="time random admissible circuits on the compressed path")
    bench.add_argument("--sizes", type=_sizes, default=[64, 256, 1024])
    bench.add_argument("--depth", type=int, default=100)
    bench.add_argument("--dense-n", type=int, default=12, help="oracle comparison size (0 disables)")
    bench.add_argument("--dense-depth", type=int, default=20)
    bench.add_argument("--tol", type=float, default=1e-9)
    bench.add_argument("--json", action="store_true")
    bench.set_defaults(func=cmd_bench)

    cls = sub.add_parser("classify", help="classify a 4x4 gate given as 16 row-major complex entries")
    cls.add_argument("entries", nargs="+")
    cls.set_defaults(func=cmd_classify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ExperimentError as exc:
        for d in exc.diagnostics:
            print(f"{getattr(args, 'file', '-')}:{d}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ValueError) as exc:
        print(f"spinchain: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
