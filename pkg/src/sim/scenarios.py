"""
Built-in scenario schedules: the interference/noise table rows and the
twelve-phase adaptation run.
"""
from typing import Dict, Tuple

from ..errors import ConfigError
from ..telemetry.types import ScenarioPhase, ScenarioSchedule

NOISE_AMPLITUDES = (0.056, 0.15, 0.33)
JAMMER_POWERS_DB = (-8.0, -20.0, -40.0)


def _build_rows() -> Dict[int, Tuple[bool, float, float]]:
    rows = {}
    row = 1
    for power in JAMMER_POWERS_DB:
        for amp in NOISE_AMPLITUDES:
            rows[row] = (True, power, amp)
            rows[row + 1] = (False, -100.0, amp)
            row += 2
    return rows


# row -> (interference_event, interference_db, noise_amplitude)
TABLE1_ROWS: Dict[int, Tuple[bool, float, float]] = _build_rows()


def table1_phase(row: int, duration_s: float = 100.0) -> ScenarioPhase:
    """Phase for one numbered table row."""
    if row not in TABLE1_ROWS:
        raise ConfigError(f"No table row {row}")
    event, power, amp = TABLE1_ROWS[row]
    if event:
        return ScenarioPhase.on(power, amp, duration_s, name=f"row{row}")
    return ScenarioPhase.off(amp, duration_s, name=f"row{row}")


def table1_pair_schedule(on_row: int, phase_s: float = 30.0, cycles: int = 2,
                         sample_period_ms: int = 100) -> ScenarioSchedule:
    """
    ON row followed by its OFF partner, repeated `cycles` times.

    The first ON phase is held until the labeler sees a transition, so at least
    two cycles are needed to label both rows.
    """
    off_row = on_row + 1
    if not TABLE1_ROWS.get(on_row, (False,))[0] or off_row not in TABLE1_ROWS:
        raise ConfigError(f"Row {on_row} is not an ON row with an OFF partner")
    phases = []
    for _ in range(cycles):
        phases.append(table1_phase(on_row, phase_s))
        phases.append(table1_phase(off_row, phase_s))
    return ScenarioSchedule(phases=phases, sample_period_ms=sample_period_ms)


def evaluation_schedule(phase_s: float = 60.0, jammer_db: float = -12.0,
                        noise_before: float = 0.1, noise_after: float = 0.333,
                        sample_period_ms: int = 100) -> ScenarioSchedule:
    """
    Twelve alternating ON/OFF phases, 1a-1f at `noise_before` then 2a-2f at
    `noise_after`.
    """
    phases = []
    for group, amp in (("1", noise_before), ("2", noise_after)):
        for i, letter in enumerate("abcdef"):
            name = f"{group}{letter}"
            if i % 2 == 0:
                phases.append(ScenarioPhase.on(jammer_db, amp, phase_s, name=name))
            else:
                phases.append(ScenarioPhase.off(amp, phase_s, name=name))
    return ScenarioSchedule(phases=phases, sample_period_ms=sample_period_ms)


def named_schedule(name: str, phase_s: float = 60.0) -> ScenarioSchedule:
    """
    Look up a built-in schedule.

    Args:
        name: "eval12" (twelve-phase adaptation run) or "table1" (all rows in order)
        phase_s: Phase duration in seconds

    Returns:
        The schedule
    """
    if name in ("eval12", "evaluation"):
        return evaluation_schedule(phase_s=phase_s)
    if name == "table1":
        return ScenarioSchedule(phases=[table1_phase(row, phase_s) for row in sorted(TABLE1_ROWS)])
    raise ConfigError(f"Unknown schedule: {name}")
