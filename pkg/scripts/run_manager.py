#!/usr/bin/env python3
"""
Run the labeler and the training manager against a store directory, notifying
a running xApp over HTTP.
"""

import argparse
import logging
import sys
import time
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import load_settings
from src.errors import JamsenseError
from src.labeler.labeler import GmmLabeler
from src.manager.manager import TrainingManager
from src.manager.notifier import ModelUpdateNotifier
from src.manager.registry import ModelRegistry
from src.store.timeseries import EVENTS, LABELED, PREDICTIONS, RAW, FileTimeSeriesStore

logger = logging.getLogger(__name__)

END_OF_TIME = 2 ** 62


def main():
    parser = argparse.ArgumentParser(description="Training manager")
    parser.add_argument("--store", type=Path, required=True, help="Store directory")
    parser.add_argument("--registry", type=Path, required=True, help="Model registry directory")
    parser.add_argument("--xapp", required=True, help="Control API base URL, e.g. http://127.0.0.1:8000")
    parser.add_argument("--drift-threshold", type=float, default=None)
    parser.add_argument("--eval-window", type=int, default=None)
    parser.add_argument("--periodic", type=float, default=None, help="Periodic retrain interval (s)")
    parser.add_argument("--poll-s", type=float, default=0.5, help="Store polling interval")
    args = parser.parse_args()

    try:
        settings = load_settings()
        updates = {
            key: value for key, value in (
                ("drift_threshold", args.drift_threshold),
                ("eval_window", args.eval_window),
                ("periodic_interval_s", args.periodic),
            ) if value is not None
        }
        drift_cfg = settings.drift.model_copy(update=updates)
        logging.basicConfig(level=settings.log_level.upper())

        reader = FileTimeSeriesStore(args.store, series=(RAW, PREDICTIONS), writable=False)
        writer = FileTimeSeriesStore(args.store, series=(LABELED, EVENTS), fsync=settings.store.fsync)
        manager = TrainingManager(
            writer,
            ModelRegistry(args.registry),
            notifier=ModelUpdateNotifier(args.xapp, settings.notify),
            drift_cfg=drift_cfg,
            train_cfg=settings.train,
            sample_period_ms=settings.service.sample_period_ms,
            gap_factor=settings.service.gap_factor,
        )
    except JamsenseError as e:
        print(f"Error: {e}")
        sys.exit(1)

    labeler = GmmLabeler(settings.labeler)
    sample_cursor = (writer.last_timestamp(LABELED) or -1) + 1
    prediction_cursor = 0
    logger.info(f"Training manager polling {args.store} from ts {sample_cursor}")

    try:
        while True:
            for prediction in reader.query_predictions(prediction_cursor, END_OF_TIME):
                manager.add_prediction(prediction)
                prediction_cursor = prediction.timestamp_ms + 1

            samples = reader.query_samples(sample_cursor, END_OF_TIME)
            if samples:
                sample_cursor = samples[-1].timestamp_ms + 1
                labeled = labeler.push(samples)
                for ls in labeled:
                    writer.append_labeled(ls)
                manager.process_labels(labeled)
            else:
                time.sleep(args.poll_s)
    except KeyboardInterrupt:
        logger.info("Stopping training manager")
    finally:
        reader.close()
        writer.close()


if __name__ == "__main__":
    main()
