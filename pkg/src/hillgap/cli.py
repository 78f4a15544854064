"""Command-line front end.

    hillgap gaps   -c config.json [--out table.csv] [--json]
    hillgap oracle -c config.json [--out table.csv] [--json]
    hillgap verify {theorem1,theorem4,theorem5,mathieu,gasymov,dense,weights}
                   -c config.json [--out report.json] [--json]

Exit status: 0 on success, 1 when a check fails or a table row records a
numerical error, 2 on config errors.  HILLGAP_THREADS sets the worker count
for index sweeps; results are collected in index order, so the output does
not depend on it.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import blockdecomp, floquet, harness

_TABLE_OK = {"gaps": {"gaps", "adapted", "oracle"}, "oracle": {"oracle"}}
_SUITES = ("theorem1", "theorem4", "theorem5", "mathieu", "gasymov",
           "dense", "weights")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", required=True, help="JSON config path")
    p.add_argument("--out", help="write the CSV table or JSON report here")
    p.add_argument("--json", action="store_true",
                   help="emit the result as JSON on stdout")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hillgap",
        description="spectral gap tables and verification suites for "
                    "Hill's operator with periodic potential")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("gaps", help="oracle and block gap table"))
    _add_common(sub.add_parser("oracle", help="oracle-only gap table"))
    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("suite", choices=_SUITES)
    _add_common(pv)
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "verify":
            kind = "weights_check" if args.suite == "weights" else args.suite
            config = harness.parse_config(raw, kind)
            if config.kind != kind:
                raise harness.ConfigError(
                    f"config kind {config.kind!r} does not match suite "
                    f"{args.suite!r}")
            return _run_verify(config, args)
        config = harness.parse_config(raw, args.command)
        if config.kind not in _TABLE_OK[args.command]:
            raise harness.ConfigError(
                f"config kind {config.kind!r} does not fit subcommand "
                f"{args.command!r}")
        return _run_table(config, args)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (floquet.RootSearchError, blockdecomp.DomainError,
            blockdecomp.ContractionError, blockdecomp.IterationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


def _run_table(config: harness.ExperimentConfig, args) -> int:
    rows, failed = harness.run_table(config)
    out = args.out or config.out
    if out:
        harness.write_csv(rows, out)
    if args.json:
        print(json.dumps({"kind": config.kind, "failed": failed,
                          "rows": _jsonable(rows)}))
    elif not out:
        sys.stdout.write(harness.rows_to_csv(rows))
    return 1 if failed else 0


def _run_verify(config: harness.ExperimentConfig, args) -> int:
    report = harness.run_verify(config)
    text = json.dumps(_jsonable(report), indent=2)
    out = args.out or config.out
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        _print_summary(report)
    return 0 if report["pass"] else 1


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _print_summary(report: dict) -> None:
    print(f"{report['kind']}: {'PASS' if report['pass'] else 'FAIL'}")
    pre = report["preconditions"]
    if pre:
        print("  " + ", ".join(f"{k} = {v:.6g}" for k, v in pre.items()))
    for note in report["notes"]:
        print(f"  note: {note}")
    for item in report["items"]:
        print("  " + _item_line(report["kind"], item))


def _item_line(kind: str, item: dict) -> str:
    if kind in ("theorem1", "theorem4"):
        return (f"N = {item['N']}: lhs = {item['lhs']:.6g}, "
                f"rhs = {item['rhs']:.6g}, margin = {item['margin']:.6g}")
    if kind == "theorem5":
        return (f"n = {item['n']}: |gamma| <= {item['gamma_ceiling']:.6g}, "
                f"bound = {item['bound']:.6g}, "
                f"{'ok' if item['holds'] else 'violated'}")
    if kind == "mathieu" and "ratio" in item:
        return (f"n = {item['n']}: ratio = {item['ratio']:.9g} "
                f"(band {item['band']:.3g}), "
                f"{'ok' if item['holds'] else 'violated'}")
    if kind == "gasymov":
        tail = ""
        if "exact_zero" in item:
            tail = f", reduced entries exactly zero: {item['exact_zero']}"
        return (f"n = {item['n']}: |gamma| <= {item['gamma_ceiling']:.6g}"
                + tail)
    if kind == "dense":
        return (f"N = {item['N']}: distance = {item['distance']:.6g}, "
                f"bound = {item['lipschitz_bound']:.6g}, "
                f"{'ok' if item['holds'] else 'violated'}")
    if kind == "weights_check":
        spec = item["weight"]
        tempered = ", ".join(
            f"eps = {t['eps']:g}: {'ok' if t['ok'] else 'violated'}"
            f" (crossover {t['crossover']})" for t in item["tempered"])
        head = (f"{spec.get('kind', '?')}: class {item['growth_class']}, "
                f"submultiplicative {item['base_ok']}")
        return head + ("; tempered " + tempered if tempered else "")
    return json.dumps(_jsonable(item))


if __name__ == "__main__":
    sys.exit(main())
