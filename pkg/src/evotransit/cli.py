"""Command-line front end: image transition runs and bitstring experiments."""

from __future__ import annotations

import argparse
import csv
import json
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import engine
from .errors import (
    DecodeError,
    DimensionMismatchError,
    EmptyFrameListError,
    ImagingIoError,
    UnreadableFileError,
    UnsupportedFormatError,
    UsageError,
)
from .imaging import DirectoryFrameSink, assemble_animation, load_raster
from .mutation import (
    ASYMMETRIC,
    BOX,
    COMBINED_STRIP,
    COMPOSITE,
    STANDARD,
    STRIP,
    OperatorSpec,
)
from .onemax import scaling_experiment

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DIMENSION = 3

OPERATOR_NAMES = (
    "standard",
    "asymmetric",
    "strip",
    "combined-strip",
    "box",
    "asym+strip",
    "asym+combined-strip",
    "asym+box",
)

_PARTNER_BY_NAME = {
    "asym+strip": STRIP,
    "asym+combined-strip": COMBINED_STRIP,
    "asym+box": BOX,
}

_PLAIN_KINDS = {
    "standard": STANDARD,
    "asymmetric": ASYMMETRIC,
    "strip": STRIP,
    "combined-strip": COMBINED_STRIP,
    "box": BOX,
}

DEFAULT_GIF_DELAY_MS = 100


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class CliInvocation:
    command: str
    # transition
    start: str | None = None
    target: str | None = None
    operator_name: str | None = None
    operator: OperatorSpec | None = None
    seeds: tuple[int, ...] = (0,)
    batch: bool = False
    milestones: tuple[float, ...] = engine.DEFAULT_MILESTONES
    max_generations: int = 10_000_000
    frame_every: int | None = None
    out_dir: str | None = None
    gif_delay: int | None = None
    # onemax
    n_list: tuple[int, ...] = ()
    repeats: int = 50
    seed: int = 0
    csv_path: str | None = None


def _parse_interleave(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"--interleave expects A:B, got {text!r}")
    try:
        a, b = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"--interleave expects integers, got {text!r}") from None
    if a < 1 or b < 1:
        raise UsageError("--interleave parts must be >= 1")
    return a, b


def _parse_milestones(text: str) -> tuple[float, ...]:
    if text.strip() == "":
        return ()
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"--milestones expects comma-separated fractions, got {text!r}") from None
    for v in values:
        if not 0.0 < v < 1.0:
            raise UsageError("milestone fractions must lie strictly between 0 and 1")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError("milestones must be strictly increasing")
    return values


def _parse_seed(text: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise UsageError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed < 2**64:
        raise UsageError("seed must fit in an unsigned 64-bit integer")
    return seed


def _parse_seed_range(text: str) -> tuple[int, ...]:
    parts = text.split("..")
    if len(parts) != 2:
        raise UsageError(f"--seeds expects A..B, got {text!r}")
    first, last = _parse_seed(parts[0]), _parse_seed(parts[1])
    if last < first:
        raise UsageError("--seeds range must have A <= B")
    return tuple(range(first, last + 1))


def _parse_n_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"--n-list expects comma-separated integers, got {text!r}") from None
    if any(v < 1 for v in values):
        raise UsageError("--n-list entries must be >= 1")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError("--n-list must be strictly increasing")
    return values


def _build_operator(args) -> OperatorSpec:
    name = args.operator
    if name not in OPERATOR_NAMES:
        raise UsageError(
            f"unknown operator {name!r}; choose from: " + ", ".join(OPERATOR_NAMES)
        )
    common = dict(
        c_s=args.cs,
        c_t=args.ct,
        strip_length=args.strip_length,
        box_size=args.box_size,
        toggle_geometric=args.toggle_geometric,
        fit_anchors=args.fit_anchors,
    )
    try:
        if name in _PARTNER_BY_NAME:
            return OperatorSpec(
                kind=COMPOSITE,
                partner=_PARTNER_BY_NAME[name],
                interleave=args.interleave,
                **common,
            )
        return OperatorSpec(kind=_PLAIN_KINDS[name], interleave=args.interleave, **common)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> _Parser:
    parser = _Parser(prog="evotransit", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    t = sub.add_parser("transition", help="evolve a start image into a target image")
    t.add_argument("--start", required=True, help="start image (PNG/JPEG/BMP)")
    t.add_argument("--target", required=True, help="target image, same dimensions")
    t.add_argument("--operator", default="asymmetric", help="one of: " + ", ".join(OPERATOR_NAMES))
    t.add_argument("--cs", type=float, default=100.0, help="asymmetric start-state constant (>= 1)")
    t.add_argument("--ct", type=float, default=50.0, help="asymmetric target-state constant (>= 1)")
    t.add_argument("--strip-length", type=int, default=180, help="vertical strip length in pixels")
    t.add_argument("--box-size", type=int, default=3, help="box side length in pixels")
    t.add_argument("--interleave", type=str, default="1:1", help="composite schedule A:B")
    t.add_argument("--seed", type=str, default=None, help="run seed (unsigned 64-bit)")
    t.add_argument("--seeds", type=str, default=None, help="batch seed range A..B")
    t.add_argument("--milestones", type=str, default="0.125,0.375,0.625,0.875",
                   help="comma-separated completion fractions for milestone frames")
    t.add_argument("--max-gens", type=int, default=10_000_000, help="generation cap")
    t.add_argument("--frame-every", type=int, default=None, help="extra frame every N generations")
    t.add_argument("--out-dir", type=str, default=None, help="directory for frames and report.json")
    t.add_argument("--gif", type=int, nargs="?", const=DEFAULT_GIF_DELAY_MS, default=None,
                   metavar="DELAY_MS", help="assemble emitted frames into an animated GIF")
    t.add_argument("--toggle-geometric", action="store_true",
                   help="geometric operators toggle covered cells instead of setting them to target")
    t.add_argument("--fit-anchors", action="store_true",
                   help="restrict anchors so regions fit inside the image instead of clipping")

    o = sub.add_parser("onemax", help="bitstring runtime scaling experiment")
    o.add_argument("--operator", default="asymmetric", choices=("standard", "asymmetric"))
    o.add_argument("--cs", type=float, default=1.0, help="asymmetric start-state constant (>= 1)")
    o.add_argument("--ct", type=float, default=1.0, help="asymmetric target-state constant (>= 1)")
    o.add_argument("--n-list", type=str, default="1024,2048,4096,8192",
                   help="comma-separated bitstring lengths, strictly increasing")
    o.add_argument("--repeats", type=int, default=50, help="independent trials per length")
    o.add_argument("--seed", type=str, default="0", help="base seed; trials enumerate from it")
    o.add_argument("--csv", type=str, default=None, help="write per-trial results to this CSV file")
    return parser


def parse_and_validate(argv) -> CliInvocation:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a subcommand is required: transition or onemax")

    if args.command == "transition":
        if args.seed is not None and args.seeds is not None:
            raise UsageError("--seed and --seeds are mutually exclusive")
        if args.seeds is not None:
            if args.out_dir is None:
                raise UsageError("--seeds batch mode requires --out-dir")
            seeds = _parse_seed_range(args.seeds)
            batch = True
        else:
            seeds = (_parse_seed(args.seed) if args.seed is not None else 0,)
            batch = False
        if args.gif is not None and args.out_dir is None:
            raise UsageError("--gif requires --out-dir")
        if args.gif is not None and args.gif < 1:
            raise UsageError("--gif delay must be >= 1 ms")
        if args.max_gens < 1:
            raise UsageError("--max-gens must be >= 1")
        if args.frame_every is not None and args.frame_every < 1:
            raise UsageError("--frame-every must be >= 1")
        if args.strip_length < 1:
            raise UsageError("--strip-length must be >= 1")
        if args.box_size < 1:
            raise UsageError("--box-size must be >= 1")
        args.interleave = _parse_interleave(args.interleave)
        return CliInvocation(
            command="transition",
            start=args.start,
            target=args.target,
            operator_name=args.operator,
            operator=_build_operator(args),
            seeds=seeds,
            batch=batch,
            milestones=_parse_milestones(args.milestones),
            max_generations=args.max_gens,
            frame_every=args.frame_every,
            out_dir=args.out_dir,
            gif_delay=args.gif,
        )

    # onemax
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    try:
        spec = OperatorSpec(kind=_PLAIN_KINDS[args.operator], c_s=args.cs, c_t=args.ct)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return CliInvocation(
        command="onemax",
        operator_name=args.operator,
        operator=spec,
        n_list=_parse_n_list(args.n_list),
        repeats=args.repeats,
        seed=_parse_seed(args.seed),
        csv_path=args.csv,
    )


def _config_echo(inv: CliInvocation, seed: int) -> dict:
    return {
        "command": "transition",
        "start": inv.start,
        "target": inv.target,
        "operator": inv.operator_name,
        "cs": inv.operator.c_s,
        "ct": inv.operator.c_t,
        "strip_length": inv.operator.strip_length,
        "box_size": inv.operator.box_size,
        "interleave": "%d:%d" % inv.operator.interleave,
        "seed": seed,
        "milestones": list(inv.milestones),
        "max_gens": inv.max_generations,
        "frame_every": inv.frame_every,
        "out_dir": inv.out_dir,
        "gif": inv.gif_delay,
        "toggle_geometric": inv.operator.toggle_geometric,
        "fit_anchors": inv.operator.fit_anchors,
    }


def reproduce_command(config: dict) -> str:
    """Command line that replays the run a report's config echo describes."""
    parts = [
        "evotransit", "transition",
        "--start", config["start"],
        "--target", config["target"],
        "--operator", config["operator"],
        "--cs", repr(config["cs"]),
        "--ct", repr(config["ct"]),
        "--strip-length", str(config["strip_length"]),
        "--box-size", str(config["box_size"]),
        "--interleave", config["interleave"],
        "--seed", str(config["seed"]),
        "--milestones", ",".join(repr(m) for m in config["milestones"]),
        "--max-gens", str(config["max_gens"]),
    ]
    if config["frame_every"] is not None:
        parts += ["--frame-every", str(config["frame_every"])]
    if config["out_dir"] is not None:
        parts += ["--out-dir", config["out_dir"]]
    if config["gif"] is not None:
        parts += ["--gif", str(config["gif"])]
    if config["toggle_geometric"]:
        parts.append("--toggle-geometric")
    if config["fit_anchors"]:
        parts.append("--fit-anchors")
    return " ".join(shlex.quote(p) for p in parts)


def _write_report(doc: dict, directory: Path) -> Path:
    path = directory / "report.json"
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def _run_one_transition(inv: CliInvocation, seed: int, out_dir: Path | None, start, target) -> Path:
    sink = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        sink = DirectoryFrameSink(out_dir)
    config = engine.RunConfig(
        operator=inv.operator,
        seed=seed,
        milestones=inv.milestones,
        max_generations=inv.max_generations,
        frame_every=inv.frame_every,
    )
    report = engine.run(start, target, config, sink=sink)
    echo = _config_echo(inv, seed)
    doc = {"config": echo}
    doc.update(report.as_dict())
    for entry in doc["milestones"]:
        if entry["frame"] is not None:
            entry["frame"] = os.path.basename(entry["frame"])
    report_path = _write_report(doc, out_dir if out_dir is not None else Path.cwd())
    if inv.gif_delay is not None and sink is not None and sink.records:
        assemble_animation(sink.records, out_dir / "transition.gif", inv.gif_delay)
    print(
        f"[seed {seed}] {report.termination}: generations={report.generations_run} "
        f"accepted={report.accepted} rejected={report.rejected} "
        f"final_fraction={report.final_fraction:.4f} report={report_path}"
    )
    print("reproduce: " + reproduce_command(echo))
    return report_path


def _batch_workers(n_jobs: int) -> int:
    cap = os.environ.get("EVOTRANSIT_THREADS")
    if cap is not None:
        try:
            cap_value = int(cap)
        except ValueError:
            raise UsageError(f"EVOTRANSIT_THREADS must be an integer, got {cap!r}") from None
        if cap_value < 1:
            raise UsageError("EVOTRANSIT_THREADS must be >= 1")
        return min(n_jobs, cap_value)
    return min(n_jobs, os.cpu_count() or 1)


def _execute_transition(inv: CliInvocation) -> int:
    start = load_raster(inv.start)
    target = load_raster(inv.target)
    base_dir = Path(inv.out_dir) if inv.out_dir is not None else None
    if not inv.batch:
        _run_one_transition(inv, inv.seeds[0], base_dir, start, target)
        return EXIT_OK
    jobs = [(seed, base_dir / f"seed_{seed}") for seed in inv.seeds]
    workers = _batch_workers(len(jobs))
    if workers == 1:
        for seed, directory in jobs:
            _run_one_transition(inv, seed, directory, start, target)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_one_transition, inv, seed, directory, start, target)
                for seed, directory in jobs
            ]
            for future in futures:
                future.result()
    return EXIT_OK


def _execute_onemax(inv: CliInvocation) -> int:
    result = scaling_experiment(inv.operator, list(inv.n_list), inv.repeats, inv.seed)
    if inv.csv_path is not None:
        with open(inv.csv_path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["operator", "n", "repeat", "seed", "generations"])
            for trial in result.trials:
                writer.writerow(
                    [trial.operator, trial.n, trial.repeat, trial.seed, trial.generations]
                )
    for n, mean, std in zip(result.n_values, result.means, result.stds):
        print(f"n={n}: trimmed mean={mean:.1f} generations (std {std:.1f})")
    ratios = result.doubling_ratios
    if ratios:
        print("consecutive mean ratios: " + ", ".join(f"{r:.3f}" for r in ratios))
        print(
            f"fit residuals: linear={result.linear_residual:.4g} "
            f"nlogn={result.nlogn_residual:.4g} -> better model: {result.better_model}"
        )
    else:
        print("insufficient points for ratios (need at least two lengths)")
    return EXIT_OK


def execute(inv: CliInvocation) -> int:
    if inv.command == "transition":
        return _execute_transition(inv)
    return _execute_onemax(inv)


def main(argv=None) -> int:
    """Parse, run, and map errors to exit codes (1 usage, 2 io, 3 dimensions)."""
    try:
        invocation = parse_and_validate(sys.argv[1:] if argv is None else argv)
        return execute(invocation)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        UnreadableFileError,
        UnsupportedFormatError,
        DecodeError,
        ImagingIoError,
        EmptyFrameListError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DimensionMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION


def entrypoint() -> None:
    raise SystemExit(main())
