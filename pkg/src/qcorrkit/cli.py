"""Command-line surface: generators, verifiers, and the see-saw optimizer.

Subcommands emit JSON on stdout by default (canonical key order, shortest
round-trip float formatting) or CSV with ``--format csv``; ``--out`` writes
to a file instead.  Exit codes: 0 success, 1 usage error, 2 verification
failure (the failing residual is named on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, correlation, seesaw, separating, strategy

__all__ = ["run", "main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qcorrkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, m_default=8):
        p.add_argument("--alpha", type=float, default=0.5, help="state ratio in (0,1)")
        p.add_argument("--m", type=int, default=m_default, help="number of pairing blocks (dimension 2m)")
        p.add_argument("--out", type=str, default=None, help="write output to this path")
        p.add_argument("--format", choices=["json", "csv"], default=None, help="output format")

    p = sub.add_parser("tables", help="closed-form or exact correlation tables")
    common(p)
    p.add_argument("--pair", type=int, nargs=2, metavar=("X", "Y"), default=None)
    p.add_argument("--source", choices=["printed", "exact"], default="printed")

    p = sub.add_parser("truncate", help="emit the truncated ideal strategy as JSON")
    common(p)

    p = sub.add_parser("induce", help="correlation induced by a strategy")
    common(p)
    p.add_argument("--strategy", type=str, default=None, help="strategy JSON file")

    p = sub.add_parser("distance", help="distance between correlations")
    common(p)
    p.add_argument("--metric", choices=["max_tv", "l2"], default="max_tv")
    p.add_argument("--p", dest="p_file", type=str, default=None, help="correlation JSON file")
    p.add_argument("--q", dest="q_file", type=str, default=None, help="correlation JSON file")

    p = sub.add_parser("schmidt", help="Schmidt spectrum of a strategy's state")
    common(p)
    p.add_argument("--strategy", type=str, default=None)
    p.add_argument("--cutoff", type=float, default=analysis.ZERO_CUTOFF)

    p = sub.add_parser("blocks", help="block decomposition of the truncated strategy")
    common(p)
    p.add_argument("--xs", type=int, nargs="+", default=[2, 3])
    p.add_argument("--ys", type=int, nargs="+", default=[2, 3])
    p.add_argument("--alice-partition", type=str, default="0,1|2")
    p.add_argument("--bob-partition", type=str, default="0,1|2")
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("y4", help="operator relations tied to Bob's question 4")
    common(p)
    p.add_argument("--strategy", type=str, default=None)
    p.add_argument("--tol", type=float, default=1e-12)

    p = sub.add_parser("chain", help="descent-chain lengths across truncations")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--m-min", type=int, default=2)
    p.add_argument("--m-max", type=int, default=8)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=["json", "csv"], default="csv")

    p = sub.add_parser("seesaw", help="see-saw search for a fixed-dimension fit")
    p.add_argument("--target", choices=["pstar", "chsh"], default="pstar")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--iters", type=int, default=80)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--rounding", choices=["none", "projective"], default="none")
    p.add_argument("--trace-out", type=str, default=None, help="write the iteration trace CSV here")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=["json", "csv"], default=None)

    p = sub.add_parser("verify", help="full invariant suite on the reference construction")
    common(p)
    p.add_argument("--strategy", type=str, default=None, help="validate this strategy file instead")
    p.add_argument("--tol", type=float, default=1e-12)

    return parser


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _csv_rows(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _load_strategy(path: str) -> strategy.Strategy:
    return strategy.Strategy.from_json(Path(path).read_text(encoding="utf-8"))


def _strategy_from_args(args) -> strategy.Strategy:
    if getattr(args, "strategy", None):
        return _load_strategy(args.strategy)
    spec = separating.TruncationSpec(alpha=args.alpha, m=args.m)
    return separating.ideal_truncated_strategy(spec)


def _cmd_tables(args) -> int:
    fmt = args.format or "json"
    if args.pair is None:
        corr = separating.exact_pstar(args.alpha)
        if fmt == "csv":
            _emit(corr.to_csv(), args.out)
        else:
            payload = {"alpha": args.alpha, "correlation": corr.to_dict()}
            _emit(_dump_json(payload), args.out)
        return EXIT_OK
    x, y = args.pair
    if args.source == "printed":
        table = separating.printed_table(args.alpha, x, y)
        entries = table.entries
    else:
        corr = separating.exact_pstar(args.alpha)
        entries = corr.table[x, y]
    if fmt == "csv":
        rows = [
            [a, b, repr(float(entries[a, b]))]
            for a in range(entries.shape[0])
            for b in range(entries.shape[1])
        ]
        _emit(_csv_rows(["a", "b", "p"], rows), args.out)
    else:
        payload = {
            "alpha": args.alpha,
            "x": x,
            "y": y,
            "source": args.source,
            "entries": entries.tolist(),
        }
        _emit(_dump_json(payload), args.out)
    return EXIT_OK


def _cmd_truncate(args) -> int:
    if args.format == "csv":
        raise UsageError("strategies serialize to JSON only")
    s = separating.ideal_truncated_strategy(
        separating.TruncationSpec(alpha=args.alpha, m=args.m)
    )
    _emit(s.to_json(), args.out)
    return EXIT_OK


def _cmd_induce(args) -> int:
    fmt = args.format or "json"
    corr = strategy.induce(_strategy_from_args(args))
    if fmt == "csv":
        _emit(corr.to_csv(), args.out)
    else:
        _emit(corr.to_json(), args.out)
    return EXIT_OK


def _cmd_distance(args) -> int:
    if (args.p_file is None) != (args.q_file is None):
        raise UsageError("--p and --q must be given together")
    if args.p_file:
        p = correlation.Correlation.from_json(Path(args.p_file).read_text(encoding="utf-8"))
        q = correlation.Correlation.from_json(Path(args.q_file).read_text(encoding="utf-8"))
        value = correlation.distance(p, q, args.metric)
        payload = {"metric": args.metric, "value": value}
    else:
        value = separating.truncation_distance(args.alpha, args.m, args.metric)
        payload = {
            "alpha": args.alpha,
            "m": args.m,
            "metric": args.metric,
            "value": value,
        }
    _emit(_dump_json(payload), args.out)
    return EXIT_OK


def _cmd_schmidt(args) -> int:
    fmt = args.format or "json"
    s = _strategy_from_args(args)
    result = analysis.schmidt(s.state, s.dA, s.dB, zero_cutoff=args.cutoff)
    coeffs = result.spectrum.as_list()
    if fmt == "csv":
        rows = [[i, repr(float(c))] for i, c in enumerate(coeffs)]
        _emit(_csv_rows(["index", "coefficient"], rows), args.out)
    else:
        _emit(_dump_json({"coefficients": coeffs, "cutoff": args.cutoff}), args.out)
    return EXIT_OK


def _parse_partition(text: str) -> tuple[tuple[int, ...], ...]:
    try:
        return tuple(
            tuple(int(v) for v in cls.split(",") if v != "") for cls in text.split("|")
        )
    except ValueError as exc:
        raise UsageError(f"bad partition syntax {text!r}: {exc}") from exc


def _cmd_blocks(args) -> int:
    s = _strategy_from_args(args)
    sub = strategy.restrict_questions(s, args.xs, args.ys)
    try:
        deco = analysis.strategy_block_decompose(
            sub,
            _parse_partition(args.alice_partition),
            _parse_partition(args.bob_partition),
            tol=args.tol,
        )
    except analysis.BlockDecompositionError as exc:
        sys.stderr.write(f"block decomposition failed: {exc}\n")
        return EXIT_VERIFY
    _emit(_dump_json(deco.as_dict()), args.out)
    return EXIT_OK


def _cmd_y4(args) -> int:
    s = _strategy_from_args(args)
    report = analysis.verify_y4_relations(s, tol=args.tol)
    _emit(_dump_json(report.as_dict()), args.out)
    if not report.passed:
        name, value = report.worst()
        sys.stderr.write(f"relation check failed: {name} residual {value!r} > {args.tol!r}\n")
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_chain(args) -> int:
    if args.m_min < 2 or args.m_max < args.m_min:
        raise UsageError("need 2 <= m-min <= m-max")
    rows = []
    for m in range(args.m_min, args.m_max + 1):
        s = separating.ideal_truncated_strategy(
            separating.TruncationSpec(alpha=args.alpha, m=m)
        )
        spectrum = analysis.schmidt(s.state, s.dA, s.dB).spectrum
        chains = analysis.descent_chain(spectrum, args.alpha, rel_tol=args.rel_tol)
        rows.append((m, chains.max_length))
    if args.format == "json":
        payload = [{"m": m, "max_chain_length": L} for m, L in rows]
        _emit(_dump_json(payload), args.out)
    else:
        _emit(_csv_rows(["m", "max_chain_length"], [[m, L] for m, L in rows]), args.out)
    return EXIT_OK


def _cmd_seesaw(args) -> int:
    if args.target == "pstar":
        target = separating.exact_pstar(args.alpha)
    else:
        target = correlation.restrict(separating.exact_pstar(args.alpha), [0, 1], [0, 1])
    cfg = seesaw.SeesawConfig(
        local_dim=args.dim,
        max_outer_iters=args.iters,
        restarts=args.restarts,
        seed=args.seed,
        convergence_tol=args.tol,
        rounding=args.rounding,
    )
    result = seesaw.optimize(target, cfg)
    if args.trace_out:
        Path(args.trace_out).write_text(result.trace_csv(), encoding="utf-8")
    payload = {
        "target": args.target,
        "alpha": args.alpha,
        "seed": args.seed,
        **result.summary_dict(),
    }
    if result.strategy is not None:
        payload["strategy"] = result.strategy.to_dict()
    _emit(_dump_json(payload), args.out)
    return EXIT_OK


def _verify_strategy_file(args) -> int:
    s = _load_strategy(args.strategy)
    report = strategy.validate(s)
    payload = {"checks": report.as_dict(), "passed": report.ok}
    _emit(_dump_json(payload), args.out)
    if not report.ok:
        first = report.issues[0]
        sys.stderr.write(
            f"strategy invalid: {first.describe()} (and {len(report.issues) - 1} more)\n"
        )
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.strategy:
        return _verify_strategy_file(args)

    alpha, m = args.alpha, args.m
    dim = 2 * m
    tail = alpha ** (2 * dim)
    checks: list[dict] = []

    def record(name: str, residual: float, tol: float) -> None:
        checks.append(
            {"name": name, "residual": residual, "tolerance": tol, "pass": residual <= tol}
        )

    spec = separating.TruncationSpec(alpha=alpha, m=m)
    s = separating.ideal_truncated_strategy(spec)
    record("strategy_valid", strategy.validate(s).max_residual, 1e-10)

    exact = separating.exact_pstar(alpha)
    worst_printed = 0.0
    for x, y in separating.PRINTED_PAIRS:
        printed = separating.printed_table(alpha, x, y).entries
        worst_printed = max(worst_printed, float(np.abs(exact.table[x, y] - printed).max()))
    record("tables_printed_match", worst_printed, 1e-12)

    # the cut block reassigned by the dangling-vector policy carries mass
    # ~alpha^(2(D-1)), which dominates the tail for small alpha
    record(
        "truncation_bound",
        separating.truncation_distance(alpha, m, "max_tv"),
        max(4.0 * tail, 2.0 * alpha ** (2 * (dim - 1))) + 1e-13,
    )

    block_tol = max(args.tol, 1e-9)
    sub = strategy.restrict_questions(s, [2, 3], [2, 3])
    try:
        deco = analysis.strategy_block_decompose(sub, ((0, 1), (2,)), ((0, 1), (2,)), tol=block_tol)
        c = 1.0 / (1.0 - alpha**2)
        weight_gap = max(
            abs(deco.weights[0] - (c - 1.0) / c), abs(deco.weights[1] - 1.0 / c)
        )
        record("block_weights", weight_gap, max(1e-8, 8.0 * tail))
        record("block_idempotence", deco.residuals["restricted_idempotence"], 1e-9)
        assert deco.restricted[0] is not None
        block_corr = strategy.induce(deco.restricted[0], check=False)
        worst_block = 0.0
        for x in range(2):
            for y in range(2):
                ref = separating.printed_table(alpha, x + 2, y + 2).entries[:2, :2] * c / (c - 1.0)
                worst_block = max(
                    worst_block, float(np.abs(block_corr.table[x, y] - ref).max())
                )
        record("block_chsh_match", worst_block, max(1e-8, 8.0 * alpha ** (2 * (dim - 1))))
    except analysis.BlockDecompositionError as exc:
        checks.append(
            {"name": "block_decomposition", "residual": float("inf"), "tolerance": block_tol,
             "pass": False, "detail": str(exc)}
        )

    y4 = analysis.verify_y4_relations(s, tol=args.tol)
    record("y4_relations", y4.max_residual, args.tol)

    try:
        bij = analysis.verify_schmidt_bijections(s, alpha, tol=1e-9)
        record("schmidt_partition_bijections", bij.max_pair_deviation, 1e-9)
        record("schmidt_point_block_single", float(abs(bij.s2_size - 1)), 0.0)
    except analysis.AnalysisError as exc:
        checks.append(
            {"name": "schmidt_partition", "residual": float("inf"), "tolerance": 1e-9,
             "pass": False, "detail": str(exc)}
        )

    spectrum = analysis.schmidt(s.state, s.dA, s.dB).spectrum
    chains = analysis.descent_chain(spectrum, alpha)
    record("descent_chain_length", float(abs(chains.max_length - dim)), 0.0)

    passed = all(c["pass"] for c in checks)
    payload = {"alpha": alpha, "m": m, "checks": checks, "passed": passed}
    _emit(_dump_json(payload), args.out)
    if not passed:
        first = next(c for c in checks if not c["pass"])
        sys.stderr.write(
            f"verification failed: {first['name']} residual {first['residual']!r} "
            f"> {first['tolerance']!r}\n"
        )
        return EXIT_VERIFY
    return EXIT_OK


_HANDLERS = {
    "tables": _cmd_tables,
    "truncate": _cmd_truncate,
    "induce": _cmd_induce,
    "distance": _cmd_distance,
    "schmidt": _cmd_schmidt,
    "blocks": _cmd_blocks,
    "y4": _cmd_y4,
    "chain": _cmd_chain,
    "seesaw": _cmd_seesaw,
    "verify": _cmd_verify,
}


def run(argv: list[str]) -> int:
    """Parse and execute one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
