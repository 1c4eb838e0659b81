"""Command-line interface.

Every command prints one JSON document (or a plain-text table with
``--format table``).  JSON output is the result object itself plus a
``metadata`` block, so the output of ``apply`` is again a valid state file.

Exit codes: 0 success, 1 a repro or suite assertion failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Sequence

from . import __version__
from .channels import CLASSIFY_TOL, amplitude_damping, apply_local, classify
from .classicality import TOL_CC, is_classically_correlated
from .errors import QCNoiseError
from .measures import measure
from .numerics import DEFAULT_TOL
from .optimize import OptimizerConfig
from .repro import CASES, SUITES, construct_qc_input, run_case, theorem_suite
from .serialize import (
    dumps,
    load_channel,
    load_state,
    loads,
    measure_result_from_dict,
    state_from_dict,
    state_to_dict,
    to_jsonable,
)

KINDS = {"geometric": "geometric", "relent": "relative_entropy"}
DEFAULT_SEED = 0
DEFAULT_RESTARTS = OptimizerConfig().restarts


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=None,
                   help="decision tolerance of the command (CC residual or classification)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS,
                   help=f"random starts of the basis search (default {DEFAULT_RESTARTS})")
    p.add_argument("--out", default=None, help="write the report to this file instead of stdout")
    p.add_argument("--format", choices=("json", "table"), default="json")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="qcnoise", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify-channel", parents=[common], help="unital / semi-classical / can create QC")
    p.add_argument("channel")

    p = sub.add_parser("apply", parents=[common], help="apply a channel to one subsystem")
    p.add_argument("--channel", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--target", type=int, required=True)

    p = sub.add_parser("check-cc", parents=[common], help="is the state classically correlated")
    p.add_argument("state")

    p = sub.add_parser("measure", parents=[common], help="geometric or relative-entropy quantumness")
    p.add_argument("--kind", choices=sorted(KINDS), required=True)
    p.add_argument("state")

    p = sub.add_parser("repro", parents=[common], help="run a worked example")
    p.add_argument("case", choices=CASES)
    p.add_argument("--channel", default=None, help="channel file for construct-qc-input")

    p = sub.add_parser("suite", parents=[common], help="randomized theorem checks")
    p.add_argument("which", choices=SUITES)
    p.add_argument("--trials", type=int, default=10)
    return parser


def _opt(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, seed=args.seed)


def _metadata(args) -> dict:
    return {
        "command": args.command,
        "version": __version__,
        "seed": args.seed,
        "restarts": args.restarts,
        "tol": args.tol,
        "tolerances": dataclasses.asdict(DEFAULT_TOL),
        "significant_digits": 12,
    }


def execute(args) -> tuple[dict, int]:
    """Run the parsed command; returns the result document and exit code."""
    cmd = args.command
    if cmd == "classify-channel":
        cls = classify(load_channel(args.channel), CLASSIFY_TOL if args.tol is None else args.tol)
        return cls.to_dict(), 0
    if cmd == "apply":
        out = apply_local(load_channel(args.channel), load_state(args.state), args.target)
        return state_to_dict(out), 0
    if cmd == "check-cc":
        v = is_classically_correlated(load_state(args.state), _opt(args),
                                      TOL_CC if args.tol is None else args.tol)
        return v.to_dict(), 0
    if cmd == "measure":
        return measure(KINDS[args.kind], load_state(args.state), _opt(args)).to_dict(), 0
    if cmd == "repro":
        if args.case == "construct-qc-input":
            ch = load_channel(args.channel) if args.channel else amplitude_damping(0.5)
            witness, rep = construct_qc_input(ch, seed=args.seed)
            rep.quantities["witness"] = witness
        elif args.case == "qubit-phase-damping":
            rep = run_case(args.case, seed=args.seed)
        else:
            rep = run_case(args.case)
        return rep.to_dict(), 0 if rep.passed else 1
    if cmd == "suite":
        rep = theorem_suite(args.which, args.trials, args.seed, _opt(args))
        return rep.to_dict(), 0 if rep.passed else 1
    raise AssertionError(cmd)


def _is_pair(z) -> bool:
    return isinstance(z, list) and len(z) == 2 and all(isinstance(x, (int, float)) for x in z)


def _is_matrix(v) -> bool:
    return (isinstance(v, list) and bool(v) and all(isinstance(r, list) and r for r in v)
            and all(_is_pair(z) for r in v for z in r))


def _fmt_complex(z) -> str:
    re, im = z
    return f"{re:.6g}{im:+.6g}j" if im else f"{re:.6g}"


def _fmt_value(v, indent: str = "      ") -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if _is_matrix(v):
        rows = ["[" + ", ".join(_fmt_complex(z) for z in row) + "]" for row in v]
        return "\n" + indent + ("\n" + indent).join(rows)
    if isinstance(v, list) and v and all(_is_matrix(m) for m in v):
        return "".join(_fmt_value(m, indent) + "\n" + indent.rstrip() for m in v).rstrip()
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return str(v)


def render_table(doc: dict) -> str:
    lines = []
    if "assertions" in doc:
        lines.append(f"case: {doc['case']}  ->  {'PASS' if doc['pass'] else 'FAIL'}")
        for k, v in doc["quantities"].items():
            lines.append(f"  {k}: {_fmt_value(v)}")
        for a in doc["assertions"]:
            mark = "ok  " if a["pass"] else "FAIL"
            lines.append(f"  [{mark}] {a['name']}" + (f"  ({a['detail']})" if a["detail"] else ""))
        return "\n".join(lines) + "\n"
    for k, v in doc.items():
        if k == "metadata":
            continue
        if isinstance(v, dict):
            lines.append(f"{k}:")
            lines.extend(f"  {kk}: {_fmt_value(vv)}" for kk, vv in v.items())
        else:
            lines.append(f"{k}: {_fmt_value(v)}")
    return "\n".join(lines) + "\n"


def parse_output(text: str):
    """Inverse of the JSON output: the command's result object and metadata."""
    doc = loads(text)
    meta = doc.pop("metadata", {})
    cmd = meta.get("command")
    if cmd == "apply":
        return state_from_dict(doc), meta
    if cmd == "measure":
        return measure_result_from_dict(doc), meta
    return doc, meta


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.restarts < 1:
        parser.error("--restarts must be >= 1")
    try:
        result, code = execute(args)
    except QCNoiseError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return 2
    doc = to_jsonable(result)
    doc["metadata"] = to_jsonable(_metadata(args))
    text = render_table(doc) if args.format == "table" else dumps(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
