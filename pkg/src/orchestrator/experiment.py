"""
Experiment runner: one closed-loop run per mode over a scenario schedule.
"""
import logging
import shutil
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from ..config import Settings, load_settings
from ..errors import ComponentStartupError, ExperimentAborted, JamsenseError
from ..sim.simulator import RanSimulator
from ..telemetry.types import EventKind, LoopEvent, ScenarioSchedule
from .loop import ClosedLoop
from .report import events_frame, plot_accuracy, window_accuracy, window_bounds, write_events, write_report

logger = logging.getLogger(__name__)


class ExperimentMode(str, Enum):
    ADAPTIVE = "adaptive"
    STATIC = "static"


class ExperimentSpec(BaseModel):
    """What to run and where to put the artifacts."""
    model_config = ConfigDict(frozen=True)

    schedule: ScenarioSchedule
    mode: ExperimentMode = ExperimentMode.ADAPTIVE
    seed: int = 0
    output_dir: Path = Field(Path("./runs/latest"))
    realtime: bool = Field(False, description="Pace the stream at the sample period")


@dataclass
class ExperimentReport:
    mode: ExperimentMode
    per_window: pd.DataFrame
    events: List[LoopEvent] = field(default_factory=list)
    swap_count: int = 0
    n_samples: int = 0
    window_start_ms: List[int] = field(default_factory=list)

    def accuracy_by_window(self) -> Dict[str, float]:
        return dict(zip(self.per_window["window_id"], self.per_window["accuracy"]))

    @property
    def bootstrap_window(self) -> Optional[str]:
        """Window in which the first model went live."""
        swaps = [e for e in self.events if e.kind == EventKind.MODEL_SWAPPED]
        if not swaps:
            return None
        sample = swaps[0].timestamp_ms
        windows = self.per_window["window_id"].tolist()
        index = int(np.searchsorted(self.window_start_ms, sample, side="right")) - 1
        return windows[index] if 0 <= index < len(windows) else None

    def mean_accuracy(self, window_ids: List[str]) -> float:
        frame = self.per_window.set_index("window_id")
        return float(frame.loc[window_ids, "accuracy"].mean())


def _experiment_settings(experiment: ExperimentSpec, settings: Optional[Settings]) -> Settings:
    settings = settings or load_settings()
    return settings.model_copy(update={
        "sim": settings.sim.model_copy(update={"seed": experiment.seed}),
        "train": settings.train.model_copy(update={"seed": experiment.seed}),
        "service": settings.service.model_copy(update={"sample_period_ms": experiment.schedule.sample_period_ms}),
    })


def run_experiment(
    experiment: ExperimentSpec,
    settings: Optional[Settings] = None,
    progress: bool = False,
    write_artifacts: bool = True,
) -> ExperimentReport:
    """
    Run the closed loop over the experiment schedule and score it against ground truth.

    Args:
        experiment: Experiment specification
        settings: Component settings; seeds and sample period come from the experiment
        progress: Show a progress bar
        write_artifacts: Write report.csv and events.csv to experiment.output_dir

    Returns:
        ExperimentReport

    Raises:
        ComponentStartupError: empty schedule or a component failed to start
        ExperimentAborted: the run stopped early; report.partial.csv is written
    """
    if not experiment.schedule.phases:
        raise ComponentStartupError("no phases")
    settings = _experiment_settings(experiment, settings)
    workdir = Path(experiment.output_dir) / experiment.mode.value
    if workdir.exists():
        shutil.rmtree(workdir)

    try:
        loop = ClosedLoop(workdir, settings, adaptive=experiment.mode == ExperimentMode.ADAPTIVE)
    except (JamsenseError, OSError) as e:
        raise ComponentStartupError(f"closed loop did not start: {e}") from e

    schedule = experiment.schedule
    total = sum(schedule.samples_in(p) for p in schedule.phases)
    items = RanSimulator(settings.sim).stream(schedule)
    logger.info(f"Running {experiment.mode.value} over {len(schedule.phases)} phases ({total} samples)")
    try:
        loop.run(items, total=total, realtime=experiment.realtime, progress=progress)
    except (Exception, KeyboardInterrupt) as e:
        partial = window_accuracy(schedule, loop.scored, experiment.mode.value)
        path = write_report(partial, Path(experiment.output_dir) / "report.partial.csv")
        logger.error(f"Experiment aborted after {loop.samples_run} samples: {e}; partial report at {path}")
        loop.close()
        raise ExperimentAborted(f"aborted after {loop.samples_run} samples: {e}") from e

    per_window = window_accuracy(schedule, loop.scored, experiment.mode.value)
    report = ExperimentReport(
        mode=experiment.mode,
        per_window=per_window,
        events=list(loop.manager.events),
        swap_count=loop.manager.swap_count,
        n_samples=loop.samples_run,
        window_start_ms=[b * schedule.sample_period_ms for b in window_bounds(schedule)[:-1]],
    )
    loop.close()

    if write_artifacts:
        write_report(per_window, Path(experiment.output_dir) / "report.csv")
        write_events(events_frame(report.events, experiment.mode.value), Path(experiment.output_dir) / "events.csv")
    logger.info(
        f"{experiment.mode.value}: {report.swap_count} swaps, "
        f"mean accuracy {np.nanmean(per_window['accuracy'].to_numpy(dtype=float)):.3f}"
    )
    return report


def run_paired(
    schedule: ScenarioSchedule,
    seed: int = 0,
    output_dir: Path = Path("./runs/latest"),
    settings: Optional[Settings] = None,
    realtime: bool = False,
    progress: bool = False,
    plot: bool = True,
) -> Dict[ExperimentMode, ExperimentReport]:
    """
    Adaptive and static runs over identical telemetry, written to one report.

    Returns:
        Report per mode
    """
    output_dir = Path(output_dir)
    reports = {}
    for mode in (ExperimentMode.ADAPTIVE, ExperimentMode.STATIC):
        experiment = ExperimentSpec(schedule=schedule, mode=mode, seed=seed, output_dir=output_dir, realtime=realtime)
        reports[mode] = run_experiment(experiment, settings, progress=progress, write_artifacts=False)

    frame = pd.concat([r.per_window for r in reports.values()], ignore_index=True)
    write_report(frame, output_dir / "report.csv")
    events = pd.concat([events_frame(r.events, r.mode.value) for r in reports.values()], ignore_index=True)
    write_events(events, output_dir / "events.csv")
    if plot:
        plot_accuracy(frame, output_dir / "accuracy.png")
    return reports
