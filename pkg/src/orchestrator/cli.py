"""
Command-line entry of the experiment runner.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from ..config import load_settings
from ..errors import JamsenseError
from ..sim.scenarios import named_schedule
from ..telemetry.types import ScenarioSchedule, load_schedule
from .experiment import ExperimentMode, ExperimentSpec, run_experiment, run_paired
from .labeler_eval import run_table1_labeler_eval
from .report import plot_accuracy

logger = logging.getLogger(__name__)


def resolve_schedule(value: str, phase_s: float) -> ScenarioSchedule:
    """Built-in schedule name or path to a schedule file."""
    if Path(value).exists():
        return load_schedule(value)
    return named_schedule(value, phase_s=phase_s)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jamsense", description="Self-adaptive jamming detection loop")
    parser.add_argument("--log-level", default=None, help="Logging level (default from settings)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run the closed loop over a schedule")
    run.add_argument("--schedule", default="eval12", help="Built-in name (eval12, table1) or schedule file")
    run.add_argument("--mode", choices=["adaptive", "static", "paired"], default="paired")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", type=Path, default=Path("./runs/latest"))
    run.add_argument("--phase-s", type=float, default=60.0, help="Phase length for built-in schedules")
    pace = run.add_mutually_exclusive_group()
    pace.add_argument("--accel", dest="realtime", action="store_false", help="Logical time (default)")
    pace.add_argument("--realtime", dest="realtime", action="store_true", help="Pace at the sample period")
    run.add_argument("--no-plot", action="store_true")

    table = sub.add_parser("table1", help="Offline labeler evaluation over the table rows")
    table.add_argument("--out", type=Path, default=Path("./runs/table1"))
    table.add_argument("--phase-s", type=float, default=30.0)
    table.add_argument("--seed", type=int, default=0)
    return parser


def _run(args, settings) -> int:
    schedule = resolve_schedule(args.schedule, args.phase_s)
    if args.mode == "paired":
        reports = run_paired(
            schedule, seed=args.seed, output_dir=args.out, settings=settings,
            realtime=args.realtime, progress=True, plot=not args.no_plot,
        )
    else:
        experiment = ExperimentSpec(
            schedule=schedule, mode=ExperimentMode(args.mode), seed=args.seed,
            output_dir=args.out, realtime=args.realtime,
        )
        report = run_experiment(experiment, settings, progress=True)
        if not args.no_plot:
            plot_accuracy(report.per_window, args.out / "accuracy.png")
        reports = {report.mode: report}

    for mode, report in reports.items():
        print(f"\n{mode.value}: {report.swap_count} swaps")
        print(report.per_window.to_string(index=False))
    print(f"\nArtifacts in {args.out}")
    return 0


def _table1(args, settings) -> int:
    sim_cfg = settings.sim.model_copy(update={"seed": args.seed})
    frame = run_table1_labeler_eval(sim_cfg, settings.labeler, phase_s=args.phase_s, progress=True)
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / "labeler_eval.csv"
    frame.to_csv(path, index=False, float_format="%.6f")
    print(frame.to_string(index=False))
    print(f"\nWrote {path}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings()
        logging.basicConfig(level=(args.log_level or settings.log_level).upper())
        if args.command == "run":
            return _run(args, settings)
        return _table1(args, settings)
    except JamsenseError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
