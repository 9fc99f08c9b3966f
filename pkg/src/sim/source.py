"""
Fan a simulated stream out to its sinks: the store, a stream listener and
sample/ground-truth files.
"""
import asyncio
import json
import logging
import time
from contextlib import ExitStack
from pathlib import Path
from typing import Iterable, Optional, Tuple

from ..store.timeseries import GROUND_TRUTH, TimeSeriesStore
from ..telemetry.types import KpiSample
from ..telemetry.wire import encode_sample

logger = logging.getLogger(__name__)


def truth_line(sample: KpiSample, truth: bool) -> str:
    return json.dumps({"ts": sample.timestamp_ms, "label": int(truth)}) + "\n"


async def emit_stream(
    items: Iterable[Tuple[KpiSample, bool]],
    store: Optional[TimeSeriesStore] = None,
    tcp: Optional[Tuple[str, int]] = None,
    out: Optional[Path] = None,
    period_s: float = 0.0,
) -> int:
    """
    Deliver each sample to every sink before moving to the next one.

    A sample reaches the store no later than the stream listener.

    Args:
        items: (sample, ground truth) pairs in timestamp order
        store: Store receiving the raw sample and its ground truth
        tcp: (host, port) of a stream listener
        out: Sample file; ground truth goes to "<out>.truth" as one JSON object per line
        period_s: Pace between samples (0 sends as fast as possible)

    Returns:
        Number of samples emitted
    """
    writer = None
    if tcp is not None:
        _, writer = await asyncio.open_connection(*tcp)
    emitted = 0
    with ExitStack() as files:
        samples_file = truth_file = None
        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            samples_file = files.enter_context(open(out, "wb"))
            truth_file = files.enter_context(open(f"{out}.truth", "w"))
        try:
            for sample, truth in items:
                started = time.monotonic()
                if store is not None:
                    store.append_sample(sample)
                    store.append(GROUND_TRUTH, {"ts": sample.timestamp_ms, "label": int(truth)})
                if writer is not None:
                    writer.write(encode_sample(sample))
                if samples_file is not None:
                    samples_file.write(encode_sample(sample))
                    truth_file.write(truth_line(sample, truth))
                emitted += 1
                if writer is not None and (period_s > 0 or emitted % 256 == 0):
                    await writer.drain()
                if period_s > 0:
                    await asyncio.sleep(max(0.0, period_s - (time.monotonic() - started)))
            if writer is not None:
                await writer.drain()
        finally:
            if writer is not None:
                writer.close()
                await writer.wait_closed()
    logger.info(f"Emitted {emitted} samples")
    return emitted
