#!/usr/bin/env python3
"""
Generate a synthetic uplink KPI stream and write it to a file, a TCP stream
listener, or a store directory.
"""

import argparse
import asyncio
import logging
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from tqdm import tqdm

from src.config import load_settings
from src.errors import JamsenseError
from src.orchestrator.cli import resolve_schedule
from src.sim.simulator import RanSimulator
from src.sim.source import emit_stream
from src.store.timeseries import GROUND_TRUTH, RAW, FileTimeSeriesStore

logger = logging.getLogger(__name__)


def main():
    parser = argparse.ArgumentParser(description="Synthetic uplink KPI source")
    parser.add_argument("--schedule", default="eval12", help="Built-in schedule name or schedule file")
    parser.add_argument("--phase-s", type=float, default=60.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, help="Write samples to this file (ground truth to <out>.truth)")
    parser.add_argument("--tcp", help="Send samples to a stream listener host:port")
    parser.add_argument("--store", type=Path, help="Append samples to a store directory")
    parser.add_argument("--realtime", action="store_true", help="Pace samples at the sample period")
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO)
    if not (args.out or args.tcp or args.store):
        parser.error("one of --out, --tcp or --store is required")

    try:
        settings = load_settings()
        schedule = resolve_schedule(args.schedule, args.phase_s)
        sim = RanSimulator(settings.sim.model_copy(update={"seed": args.seed}))
    except JamsenseError as e:
        print(f"Error: {e}")
        sys.exit(1)

    total = sum(schedule.samples_in(p) for p in schedule.phases)
    period_s = schedule.sample_period_ms / 1000.0
    items = tqdm(sim.stream(schedule), total=total, desc="simulating")

    tcp = None
    if args.tcp:
        host, port = args.tcp.rsplit(":", 1)
        tcp = (host, int(port))
    store = FileTimeSeriesStore(args.store, series=(RAW, GROUND_TRUTH)) if args.store else None
    try:
        emitted = asyncio.run(emit_stream(
            items, store=store, tcp=tcp, out=args.out, period_s=period_s if args.realtime else 0.0,
        ))
    except (JamsenseError, OSError) as e:
        print(f"Error: {e}")
        sys.exit(1)
    finally:
        if store is not None:
            store.close()
    logger.info(f"Done: {emitted} samples")


if __name__ == "__main__":
    main()
