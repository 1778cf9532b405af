"""Command-line entry point: validate, analyze, charge, generate, check-rt, render.

Exit codes: 0 success, 1 validation or audit failure, 2 I/O, parse or parameter error.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .arrangement import REPORT_ONLY, STRICT, SideConflictError, extract_arrangement, orient_curves
from .charging import (
    EmptySchedule,
    analyze_family,
    check_richter_thomassen,
    default_schedule,
    happiness_then_sad,
    run_schedule,
    schedule_from_scales,
)
from .generators import KINDS, EpsilonTooLarge, GeneratorSpec, InfeasibleParams
from .geometry import GeneralPositionError, validate_general_position
from .happiness import default_alpha1
from .io import (
    ParseError,
    dump_family,
    dumps,
    happiness_to_dict,
    ledger_csv,
    load_family,
    parse_rational,
    schedule_report,
)
from .svg import DEFAULT_LAYERS, LAYERS, render_svg

OK, FAILED, BAD_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    path: str | None = None
    out: str | None = None
    mode: str = STRICT
    alpha1: Fraction | None = None
    scales: list[Fraction] | None = None
    layers: list[str] = field(default_factory=lambda: list(DEFAULT_LAYERS))

    def __post_init__(self):
        if self.alpha1 is not None and self.alpha1 <= 0:
            raise ValueError("alpha1 must be positive")
        if self.scales is not None:
            if not self.scales:
                raise ValueError("scale list is empty")
            if any(k <= 0 for k in self.scales):
                raise ValueError("scales must be positive")
        bad = [x for x in self.layers if x not in LAYERS]
        if bad:
            raise ValueError(f"unknown layers: {', '.join(bad)}")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text, "argument")
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _scales(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _layers(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="touchcross", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def family_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("path", help="curve-family JSON file")
        p.add_argument("--mode", choices=(STRICT, REPORT_ONLY), default=STRICT)
        p.add_argument("--out", help="output file or directory")
        return p

    family_cmd("validate", "check general position")
    p = family_cmd("analyze", "counts, ratio and happy/sad split")
    p.add_argument("--alpha1", type=_rational)
    p = family_cmd("charge", "run the charging schedule and its audits")
    p.add_argument("--alpha1", type=_rational)
    p.add_argument("--scales", type=_scales, help="comma-separated scales k")
    p.add_argument("--schedule", help='JSON file {"alpha1": ..., "scales": [...]}')
    family_cmd("check-rt", "non-asymptotic crossing count check")
    p = family_cmd("render", "write an SVG figure")
    p.add_argument("--layers", type=_layers, default=list(DEFAULT_LAYERS), help=",".join(LAYERS))
    p.add_argument("--alpha1", type=_rational)
    p.add_argument("--scales", type=_scales)

    g = sub.add_parser("generate", help="emit a generated curve family")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, help="comb count, or touching pairs for tangent_chain")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--resolution", type=int, default=64)
    g.add_argument("--epsilon", type=_rational, default=Fraction(1, 100))
    g.add_argument("--out")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _arrangement(args):
    family = load_family(args.path)
    return family, extract_arrangement(family, args.mode)


def cmd_validate(args) -> int:
    family = load_family(args.path)
    report = validate_general_position(family, strict=args.mode == STRICT)
    lines = [f"{v.kind}: {', '.join(v.curves)}" + (f" at ({v.point.x}, {v.point.y})" if v.point else "")
             + (f" [{v.detail}]" if v.detail else "") for v in report.violations]
    lines.append("valid" if report.valid else f"{len(report.violations)} violation(s)")
    _emit("\n".join(lines) + "\n", args.out)
    return OK if report.valid else FAILED


def cmd_analyze(args) -> int:
    _, arr = _arrangement(args)
    _emit(dumps(analyze_family(arr, args.alpha1)), args.out)
    return OK


def _schedule(args, n):
    alpha1, scales = args.alpha1, getattr(args, "scales", None)
    if getattr(args, "schedule", None):
        data = json.loads(Path(args.schedule).read_text(), parse_float=str)
        if "alpha1" in data and alpha1 is None:
            alpha1 = parse_rational(data["alpha1"], "alpha1")
        if "scales" in data and scales is None:
            scales = [parse_rational(k, "scales") for k in data["scales"]]
    RunConfig(args.command, alpha1=alpha1, scales=scales)
    if scales is None:
        # an empty u-range is the more useful error, so check it before alpha1
        schedule = default_schedule(n, alpha1)
        return schedule.phases[0].alpha1, schedule
    if alpha1 is None:
        alpha1 = default_alpha1(n)
    return alpha1, schedule_from_scales(n, alpha1, scales)


def _charged(args):
    family, arr = _arrangement(args)
    arr = orient_curves(arr, family)
    alpha1, schedule = _schedule(args, arr.n)
    arr, report = happiness_then_sad(arr, alpha1)
    return family, arr, report, run_schedule(arr, schedule)


def cmd_charge(args) -> int:
    _, arr, happy, result = _charged(args)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    (out / "ledger.csv").write_text(ledger_csv(result.ledger))
    report = schedule_report(result)
    report["happiness"] = happiness_to_dict(happy)
    (out / "report.json").write_text(dumps(report))
    for a in result.audits:
        tag = "PASS" if a.holds else "FAIL"
        print(f"{tag:4}  {'assert' if a.asserted else 'report'}  {a.name}")
    print(f"phases={result.schedule.M} records={len(result.ledger)} sad={len(arr.sad)} -> {out}")
    return OK if result.ok else FAILED


def cmd_check_rt(args) -> int:
    _, arr = _arrangement(args)
    res = check_richter_thomassen(arr)
    _emit(dumps(res), args.out)
    return OK if res["holds"] or not res["pairwise_intersecting"] else FAILED


def cmd_render(args) -> int:
    layers = args.layers
    RunConfig(args.command, layers=layers)
    ledger = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if "charges" in layers:
            args.schedule = None
            family, arr, _, result = _charged(args)
            ledger = result.ledger
        else:
            family, arr = _arrangement(args)
        svg = render_svg(family, arr, layers, ledger)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _emit(svg, args.out)
    return OK


def cmd_generate(args) -> int:
    spec = GeneratorSpec(args.kind, args.n, args.k, args.seed, args.resolution, args.epsilon)
    _emit(dump_family(spec.build()), args.out)
    return OK


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "charge": cmd_charge,
    "generate": cmd_generate,
    "check-rt": cmd_check_rt,
    "render": cmd_render,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except GeneralPositionError as exc:
        for v in exc.report.violations:
            print(f"{v.kind}: {', '.join(v.curves)}", file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return FAILED
    except (EmptySchedule, InfeasibleParams, EpsilonTooLarge, SideConflictError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
