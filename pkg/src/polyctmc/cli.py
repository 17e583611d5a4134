"""Command-line interface: ``polyctmc classify|params|check|simulate|qfcheck FILE``.

Exit codes: 0 on success, 1 when the model file does not parse, 2 when the
model violates a standing assumption or a builder hypothesis.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional

from . import __version__
from .chain import ChainError, check_assumptions
from .classifier import classify, evaluate_conditions
from .laws import LawError
from .network import HypothesisError, ParseError, parse_model
from .parameters import ParameterError, compute_parameters
from .report import Report, params_line, render_text

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_ASSUMPTION = 2


class _Abort(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def default_bound(spec) -> int:
    """u + 10 * (largest |jump| among the finitely many jump sizes)."""
    return spec.tail_threshold + 10 * max(spec.max_finite_jump(), 1)


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _Abort(EXIT_PARSE, f"{path}: {exc.strerror}") from None
    try:
        mf = parse_model(text, label=path)
    except ParseError as exc:
        raise _Abort(EXIT_PARSE, f"{path}: {exc}") from None
    try:
        spec = mf.build()
    except (HypothesisError, ChainError, LawError) as exc:
        raise _Abort(EXIT_ASSUMPTION, f"{path}: {exc}") from None
    return mf, spec


def _pipeline(args, command: str, classify_it: bool) -> tuple[Report, int]:
    mf, spec = _load(args.file)
    rep = Report(command, mf.render(), spec)
    bound = args.bound if args.bound is not None else default_bound(spec)
    try:
        rep.assumptions = check_assumptions(spec, bound)
    except ChainError as exc:
        raise _Abort(EXIT_ASSUMPTION, str(exc)) from None
    code = EXIT_OK
    if not rep.assumptions.ok:
        code = EXIT_ASSUMPTION
        bad = ", ".join(f"{k} ({s.witness or s.note})" for k, s in rep.assumptions.violations().items())
        rep.errors = (f"assumption violated: {bad}",)
        return rep, code
    try:
        rep.parameters = compute_parameters(spec)
    except ParameterError as exc:
        rep.errors = (f"parameters undefined: {exc}",)
        return rep, EXIT_ASSUMPTION
    if classify_it:
        rep.conditions = evaluate_conditions(rep.parameters)
        rep.classification = classify(rep.parameters, bool(spec.absorbing_set))
    return rep, code


def _emit(rep: Report, as_json: bool, text: Optional[str] = None) -> None:
    if as_json:
        sys.stdout.write(rep.to_json() + "\n")
    else:
        sys.stdout.write(text if text is not None else render_text(rep.to_dict()))
    for e in rep.errors:
        print(e, file=sys.stderr)


def cmd_classify(args) -> int:
    rep, code = _pipeline(args, "classify", True)
    _emit(rep, args.json)
    return code


def cmd_params(args) -> int:
    rep, code = _pipeline(args, "params", False)
    text = None
    if rep.parameters is not None:
        text = params_line(rep.parameters.to_dict()) + "\n"
    _emit(rep, args.json, text)
    return code


def cmd_check(args) -> int:
    mf, spec = _load(args.file)
    rep = Report("check", mf.render(), spec)
    bound = args.bound if args.bound is not None else default_bound(spec)
    try:
        rep.assumptions = check_assumptions(spec, bound)
    except ChainError as exc:
        raise _Abort(EXIT_ASSUMPTION, str(exc)) from None
    code = EXIT_OK
    if not rep.assumptions.ok:
        code = EXIT_ASSUMPTION
        rep.errors = tuple(f"{k} violated: {s.witness or s.note}" for k, s in rep.assumptions.violations().items())
    _emit(rep, args.json)
    return code


def _target(text: Optional[str]):
    if text is None:
        return None
    out = set()
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-", 1)
            out.update(range(int(a), int(b) + 1))
        elif part:
            out.add(int(part))
    return frozenset(out)


def cmd_simulate(args) -> int:
    from .simulator import SimConfig, SimulationError, simulate

    mf, spec = _load(args.file)
    rep = Report("simulate", mf.render(), spec, seed=args.seed)
    try:
        cfg = SimConfig(
            x0=args.x0,
            t_max=args.t_max,
            max_jumps=args.max_jumps,
            state_cap=args.state_cap,
            trials=args.trials,
            seed=args.seed,
            target_set=_target(args.target),
            record_occupation=False,
        )
    except ValueError as exc:
        raise _Abort(EXIT_PARSE, f"bad simulation option: {exc}") from None
    try:
        batch = simulate(spec, cfg, workers=args.workers)
    except SimulationError as exc:
        raise _Abort(EXIT_ASSUMPTION, str(exc)) from None
    summary = batch.summary()
    summary["backend"] = batch.backend
    if args.csv:
        batch.write_csv(args.csv)
        summary["csv"] = args.csv
    rep.simulation = summary
    _emit(rep, args.json)
    return EXIT_OK


def cmd_qfcheck(args) -> int:
    from .simulator import check_generator_expansion
    from .simulator.expansion import ExpansionError

    rep, code = _pipeline(args, "qfcheck", False)
    if code != EXIT_OK:
        _emit(rep, args.json)
        return code
    grid = [int(float(g)) for g in args.grid.split(",")]
    try:
        rows = check_generator_expansion(rep.spec, args.family, args.delta, grid, rep.parameters)
    except (ExpansionError, ValueError) as exc:
        raise _Abort(EXIT_ASSUMPTION, str(exc)) from None
    rep.expansion = {"family": args.family, "delta": args.delta, "rows": [r.to_dict() for r in rows]}
    _emit(rep, args.json)
    return EXIT_OK


def _float(text: str) -> float:
    v = float(text)
    if math.isnan(v):
        raise argparse.ArgumentTypeError("nan is not allowed")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyctmc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", help="model file (reactions or 'model = ...' builder)")
        p.add_argument("--json", action="store_true", help="print the JSON report")
        p.set_defaults(func=func)
        return p

    for name, func, help_ in (
        ("classify", cmd_classify, "assumptions, parameters and verdicts"),
        ("params", cmd_params, "print R, alpha, beta, gamma"),
        ("check", cmd_check, "check the standing assumptions"),
    ):
        p = add(name, func, help_)
        p.add_argument("--bound", type=int, help="positivity/reachability bound (default u + 10 max|w|)")

    p = add("simulate", cmd_simulate, "run SSA trials")
    p.add_argument("--x0", type=int, required=True)
    p.add_argument("--t-max", type=_float, default=math.inf)
    p.add_argument("--max-jumps", type=int, default=10**6)
    p.add_argument("--state-cap", type=int, default=10**6)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", help="target states, e.g. '0-5' or '0,2,4'")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", help="write one row per trial to this file")

    p = add("qfcheck", cmd_qfcheck, "compare Qf(x) with its two-term expansion")
    p.add_argument("--family", default="pow", choices=("pow", "log", "loglog", "x-log", "x-over-log"))
    p.add_argument("--delta", type=_float, default=1.0)
    p.add_argument("--grid", default="100,1000,10000")
    p.add_argument("--bound", type=int)
    return ap


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Abort as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
