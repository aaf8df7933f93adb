"""Command-line entry point: ``dispersive-lab <command> [options]``.

Exit codes: 0 every target met, 1 a target missed, 2 configuration error,
3 numeric failure (blow-up or non-finite values).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import scipy.fft

from ..errors import ConfigurationError, LabError, NumericError, OutputError
from .config import SCENARIOS, build_config, deep_merge, dotted_override, parse_text
from .emit import verify_manifest
from .scenarios import plan, run_scenario

log = logging.getLogger("dispersive_lab")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

# command -> (default scenario, scenarios it accepts)
COMMANDS: dict[str, tuple[str | None, tuple[str, ...]]] = {
    "simulate": (None, SCENARIOS),
    "linear-decay": ("linear_decay_kdv", ("linear_decay_kdv", "linear_decay_zk2d", "linear_decay_zk3d", "anisotropic_zk4d")),
    "nonlinear-decay": ("nonlinear_decay_gkdv", ("nonlinear_decay_gkdv", "nonlinear_decay_zk2d", "nonlinear_decay_zk3d")),
    "kato": ("kato_identity", ("kato_identity",)),
    "strichartz": ("strichartz_scan", ("strichartz_scan",)),
    "commutators": ("commutator_corpus", ("commutator_corpus",)),
    "lorentz": ("lorentz_unit", ("lorentz_unit",)),
}


def _global_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML or JSON experiment file")
    common.add_argument("--out", type=Path, help="output directory (default runs/<scenario>)")
    common.add_argument("--seed", type=int, help="override the data / corpus seed")
    common.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    common.add_argument("--dry-run", action="store_true", help="validate and print the plan without running")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key, dotted for nesting (repeatable)")
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(prog="dispersive-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (default, allowed) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=f"run {default or 'a configured scenario'}")
        if len(allowed) > 1:
            p.add_argument("--scenario", choices=allowed, default=None)
        if name == "nonlinear-decay":
            p.add_argument("--k", type=int, help="nonlinearity power")
            p.add_argument("--epsilon", type=float, help="data amplitude")
    rep = sub.add_parser("report", help="summarise (and re-hash) finished runs")
    rep.add_argument("runs", nargs="+", type=Path, help="run directories holding manifest.json")
    rep.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _raw_config(args: argparse.Namespace) -> dict[str, Any]:
    if args.config is None:
        return {}
    try:
        text = args.config.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read configuration {args.config}: {exc.strerror}") from None
    return parse_text(text, str(args.config))


def resolve_config(args: argparse.Namespace):
    default, allowed = COMMANDS[args.command]
    raw = _raw_config(args)
    overrides: dict[str, Any] = {}
    for item in args.overrides:
        overrides = deep_merge(overrides, dotted_override(item))
    scenario = getattr(args, "scenario", None) or raw.get("scenario") or default
    if scenario is None:
        raise ConfigurationError("no scenario given: use --config with a 'scenario' key")
    if scenario not in allowed:
        raise ConfigurationError(f"command {args.command!r} cannot run scenario {scenario!r}")
    overrides["scenario"] = scenario
    if args.seed is not None:
        overrides["seed"] = args.seed
        overrides.setdefault("corpus", {})["seed"] = args.seed
    if args.out is not None:
        overrides["outdir"] = str(args.out)
    if getattr(args, "k", None) is not None:
        overrides["k"] = args.k
    if getattr(args, "epsilon", None) is not None:
        overrides.setdefault("data", {})["epsilon"] = args.epsilon
    return build_config(raw, overrides)


def _report(runs: Sequence[Path]) -> int:
    code = EXIT_PASS
    for run in runs:
        path = run / "manifest.json"
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise OutputError(f"cannot read {path}: {exc.strerror}") from None
        stale = verify_manifest(run)
        verdict = "pass" if data.get("pass") else "FAIL"
        print(f"{data.get('scenario')}: {verdict}  ({run})")
        for fit in data.get("summary", {}).get("fits", []):
            print(f"  {fit['norm']:>12s} exponent {fit['exponent']:+.4f}  target {fit['target']:+.4f} "
                  f"+/- {fit['tolerance']:.3g}  {'ok' if fit['pass'] else 'MISS'}")
        for check in data.get("summary", {}).get("checks", []):
            print(f"  {check['name']:>24s} {check['value']:.4g}  {'ok' if check['pass'] else 'MISS'}")
        if stale:
            print(f"  hash mismatch: {', '.join(stale)}")
            code = max(code, EXIT_FAIL)
        if not data.get("pass"):
            code = max(code, EXIT_NUMERIC if data.get("numeric_failure") else EXIT_FAIL)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "report":
            return _report(args.runs)
        cfg = resolve_config(args)
        if args.dry_run:
            print(json.dumps(plan(cfg), indent=2))
            return EXIT_PASS
        with scipy.fft.set_workers(max(1, args.threads)):
            manifest = run_scenario(cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"{manifest.scenario}: {'pass' if manifest.passed else 'FAIL'}  -> {manifest.outdir}")
    for failure in manifest.failures:
        print(f"  {failure}")
    return manifest.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
