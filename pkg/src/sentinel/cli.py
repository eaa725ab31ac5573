"""Command-line front end.

The verbs mirror the HTTP endpoints and run the same handlers, so a
shell pipeline and a service call cannot disagree.  Results go to
standard output as JSON; signal files land next to each other in the
chosen output directory.

Exit codes, in decreasing specificity: 0 success (or clean detect),
1 attack detected, 2 domain error (zero behavior, singular kernel,
not maximally secure, ...), 3 tied vote (tally on standard error),
64 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import DegenerateInput, MajorityTie, SentinelError, ShapeError
from .service import handlers
from .sim import load_scenario, run_scenario, write_run_dir

EXIT_OK = 0
EXIT_ATTACKED = 1
EXIT_DOMAIN = 2
EXIT_TIE = 3
EXIT_USAGE = 64


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DegenerateInput("%s is not valid JSON: %s" % (path, exc)) from exc


def _system_doc(args):
    doc = _read_json(args.system)
    if not isinstance(doc, dict):
        raise DegenerateInput("system file must hold a JSON object")
    if args.mode:
        doc["mode"] = args.mode
    if args.eps_zero is not None:
        doc["eps_zero"] = args.eps_zero
    return doc


def _emit(data):
    print(json.dumps(data, indent=2))


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_index(args):
    _emit(handlers.compute_index(_system_doc(args)))
    return EXIT_OK


def cmd_canon(args):
    doc = handlers.compute_canonical(_system_doc(args))
    out = _out_dir(args)
    observers = doc.pop("observers")
    (out / "canonical.json").write_text(json.dumps(doc, indent=2) + "\n")
    (out / "observers.json").write_text(json.dumps(observers, indent=2) + "\n")
    _emit({"out": str(out), "files": ["canonical.json", "observers.json"]})
    return EXIT_OK


def cmd_detect(args):
    received = Path(args.signals).read_text()
    verdict = handlers.run_detection(_system_doc(args), received, args.eps_sig)
    residual = verdict.pop("residual_csv")
    if args.out:
        (_out_dir(args) / "residual.csv").write_text(residual)
    _emit(verdict)
    return EXIT_ATTACKED if verdict["attacked"] else EXIT_OK


def cmd_correct(args):
    received = Path(args.signals).read_text()
    result = handlers.run_correction(_system_doc(args), received, args.eps_sig)
    out = _out_dir(args)
    (out / "corrected.csv").write_text(result.pop("corrected_csv"))
    (out / "result.json").write_text(json.dumps(result, indent=2) + "\n")
    _emit(result)
    return EXIT_OK


def cmd_simulate(args):
    seed_override = os.environ.get("SENTINEL_SEED")
    if seed_override is not None:
        try:
            seed_override = int(seed_override)
        except ValueError as exc:
            raise DegenerateInput(
                "SENTINEL_SEED must be an integer, got %r" % seed_override
            ) from exc
    spec, scenario, initial, correct = load_scenario(args.scenario, seed_override)
    kwargs = {} if args.eps_sig is None else {"eps_sig": handlers.checked_eps(args.eps_sig)}
    result = run_scenario(spec, scenario, initial, correct, **kwargs)
    write_run_dir(args.out, result)
    _emit(result.as_dict())
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sentinel",
        description=(
            "Security index, sensor-attack detection and majority-vote "
            "correction for discrete-time systems in kernel form."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def system_flags(p):
        p.add_argument("--system", required=True, help="system description JSON")
        p.add_argument("--mode", choices=["exact", "tolerant"], help="override the file's coefficient mode")
        p.add_argument("--eps-zero", type=float, dest="eps_zero", help="coefficient zero threshold (tolerant mode)")

    p = sub.add_parser("index", help="print the security report")
    system_flags(p)
    p.set_defaults(fn=cmd_index)

    p = sub.add_parser("canon", help="write canonical form and observer bank")
    system_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=cmd_canon)

    p = sub.add_parser("detect", help="residual test on a received signal")
    system_flags(p)
    p.add_argument("--signals", required=True, help="received signal CSV")
    p.add_argument("--out", help="directory for residual.csv (optional)")
    p.add_argument("--eps-sig", type=float, dest="eps_sig", help="signal zero threshold")
    p.set_defaults(fn=cmd_detect)

    p = sub.add_parser("correct", help="vote a correction of a received signal")
    system_flags(p)
    p.add_argument("--signals", required=True, help="received signal CSV")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--eps-sig", type=float, dest="eps_sig", help="signal zero threshold")
    p.set_defaults(fn=cmd_correct)

    p = sub.add_parser("simulate", help="run a scenario file end to end")
    p.add_argument("--scenario", required=True, help="scenario description JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--eps-sig", type=float, dest="eps_sig", help="signal zero threshold")
    p.set_defaults(fn=cmd_simulate)

    return parser


def _diagnostic(exc, **extra):
    body = {"error": type(exc).__name__, "detail": str(exc)}
    body.update(extra)
    print(json.dumps(body, indent=2), file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except MajorityTie as exc:
        _diagnostic(exc, tally=list(exc.tally) if exc.tally else [])
        return EXIT_TIE
    except (DegenerateInput, ShapeError) as exc:
        _diagnostic(exc)
        return EXIT_USAGE
    except SentinelError as exc:
        _diagnostic(exc)
        return EXIT_DOMAIN
    except OSError as exc:
        _diagnostic(exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
