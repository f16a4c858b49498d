"""Command-line interface.

Subcommands:

    run <config>        execute an experiment (config file path or preset name)
    report <dir>        regenerate verdicts and plots from a run directory
    check <model|file>  admissibility table, critical index, exponent witness
    calibrate <dir>     fit empirical weights to a stored trace
    mild <config>       run only the Picard mild-solution construction

Exit codes: 0 ok, 1 usage error, 2 admissibility failure, 3 blow-up detected,
4 I/O or integrity error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import runner
from .config import preset_names

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ADMISSIBILITY = 2
EXIT_BLOWUP = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specenergy",
        description="Spectral experiments for dissipative PDEs with quadratic "
                    "nonlinearities: energy-functional monotonicity, decay "
                    "bounds, and mild-solution cross-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a configured experiment")
    p_run.add_argument("config",
                       help=f"config JSON path or preset ({', '.join(preset_names())})")
    p_run.add_argument("--out", default="runs/latest", help="run directory")
    p_run.add_argument("--seed", type=int, default=None, help="override options.seed")
    p_run.add_argument("--nmax", type=int, default=None, help="override energy.n_max")
    p_run.add_argument("--override-admissibility", action="store_true",
                       help="run even if the admissibility bounds fail (recorded)")

    p_rep = sub.add_parser("report", help="summarize and re-verify a run directory")
    p_rep.add_argument("run_dir")

    p_chk = sub.add_parser("check", help="admissibility and exponent table")
    p_chk.add_argument("model", help="model name (optionally name:theta) or spec file")
    p_chk.add_argument("--theta", default=None, help="dissipation order, e.g. 3/4")
    p_chk.add_argument("--json", action="store_true", help="emit JSON instead of text")

    p_cal = sub.add_parser("calibrate", help="fit empirical weights to a stored run")
    p_cal.add_argument("run_dir")
    p_cal.add_argument("--nmax", type=int, default=None)

    p_mild = sub.add_parser("mild", help="Picard mild-solution construction only")
    p_mild.add_argument("config")
    p_mild.add_argument("--out", default=None, help="write the iteration report here")
    p_mild.add_argument("--seed", type=int, default=None)
    return parser


def _overrides(args) -> dict:
    out: dict = {}
    if getattr(args, "seed", None) is not None:
        out.setdefault("options", {})["seed"] = args.seed
    if getattr(args, "nmax", None) is not None:
        out.setdefault("energy", {})["n_max"] = args.nmax
    if getattr(args, "override_admissibility", False):
        out.setdefault("options", {})["override_admissibility"] = True
    return out


def _cmd_run(args) -> int:
    record = runner.run(args.config, args.out, overrides=_overrides(args))
    print(f"run directory: {record.out_dir}")
    print(f"status: {record.status}")
    mono = record.verdicts.get("monotonicity")
    if mono:
        print(f"monotone: {mono['monotone']} "
              f"(max relative increase {mono['max_relative_increase']:.3e})")
    for n, fit in record.verdicts.get("decay", {}).items():
        if "bound_margin" in fit:
            print(f"order {n}: fitted exponent {fit['fitted_exponent']:+.3f}, "
                  f"bound margin {fit['bound_margin']:.3e}")
    if record.status == "blown_up":
        print(f"blow-up detected at t = {record.verdicts['blowup_time']:.6g}")
        return EXIT_BLOWUP
    return EXIT_OK


def _cmd_report(args) -> int:
    summary = runner.report(args.run_dir)
    print(f"run: {summary['run_dir']} (status {summary['status']})")
    mono = summary["recomputed"]["monotonicity"]
    print(f"recomputed monotone: {mono['monotone']} "
          f"(max relative increase {mono['max_relative_increase']:.3e})")
    for n, fit in summary["recomputed"]["decay"].items():
        print(f"order {n}: fitted exponent {fit['fitted_exponent']:+.3f}, "
              f"bound margin {fit['bound_margin']:.3e}")
    print("verdicts match stored: " + ("yes" if summary["matches"] else
                                       f"NO ({summary['mismatches']})"))
    return EXIT_OK if summary["matches"] else EXIT_IO


def _cmd_check(args) -> int:
    target = args.model
    if args.theta is not None and ":" not in target:
        target = f"{target}:{args.theta}"
    result = runner.check(target)
    if args.json:
        print(json.dumps(result, indent=2))
    else:
        adm = result["admissibility"]
        print(f"model: {result['model']} (d = {result['d']}, theta = {result['theta']})")
        print(f"critical index: {result['critical_index']} "
              f"(= {result['critical_index_float']:g})")
        print(f"admissible range: ({adm['lower_bound']}, {adm['upper_bound']})"
              f"  -> {'ok' if result['ok'] else 'FAIL'}")
        print(f"lower-bound terms: {adm['lower_terms']}")
        print(f"upper-bound terms: {adm['upper_terms']}")
        print(f"mild-solution range: ({adm['mild_lower']}, {adm['mild_upper']})"
              f"  -> {'ok' if adm['mild_admissible'] else 'FAIL'}")
        witness = result["exponent_witness"]
        if "infeasible" in witness:
            print(f"exponent system infeasible: {witness['infeasible']['detail']}")
        else:
            print("exponent witness: " + ", ".join(
                f"{k} = {v}" for k, v in witness.items()))
        for note in adm.get("notes", []):
            print(f"note: {note}")
    return EXIT_OK if result["ok"] else EXIT_ADMISSIBILITY


def _cmd_calibrate(args) -> int:
    seq = runner.calibrate_run(args.run_dir, n_max=args.nmax)
    print(f"calibrated weights written to {args.run_dir}/weights_calibrated.json")
    values = ", ".join(f"{float(v):.4g}" for v in seq.values)
    print(f"values: {values}")
    if seq.params["flags"]:
        print(f"flags: {seq.params['flags']}")
    return EXIT_OK


def _cmd_mild(args) -> int:
    overrides = _overrides(args)
    payload = runner.mild_run(args.config, out_path=args.out, overrides=overrides)
    print(f"status: {payload['status']} after {payload['iterations']} iterations")
    print(f"deltas: {['%.3e' % d for d in payload['deltas']]}")
    print(f"measured bilinear constant: {payload['bilinear_constant']:.4g}")
    print(f"final norm {payload['final_norm']:.4g} vs "
          f"2*||u0|| = {2 * payload['initial_norm']:.4g}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    handlers = {
        "run": _cmd_run,
        "report": _cmd_report,
        "check": _cmd_check,
        "calibrate": _cmd_calibrate,
        "mild": _cmd_mild,
    }
    try:
        return handlers[args.command](args)
    except runner.AdmissibilityError as exc:
        print(f"admissibility failure: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except (runner.NotARunError, runner.ChecksumError, FileNotFoundError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
