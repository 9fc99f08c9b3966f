"""
Time-series store: one newline-delimited JSON file per series, an in-memory
timestamp index, and a periodic index checkpoint.
"""
import json
import logging
import os
import threading
from bisect import bisect_left
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from ..errors import OutOfOrder, StoreIOError, UnknownSeries
from ..telemetry.types import KpiSample, LabeledSample, LoopEvent, Prediction
from ..telemetry.wire import labeled_to_record, record_to_labeled, record_to_sample, sample_to_record

logger = logging.getLogger(__name__)

RAW = "raw"
LABELED = "labeled"
EVENTS = "events"
PREDICTIONS = "predictions"
GROUND_TRUTH = "ground_truth"
DEFAULT_SERIES = (RAW, LABELED, EVENTS, PREDICTIONS, GROUND_TRUTH)

Record = Dict[str, Any]


class TimeSeriesStore:
    """Base class for time-series stores. Records carry an integer "ts"."""

    series: Iterable[str] = ()

    def append(self, series: str, record: Record):
        """Append a record; its ts must not be older than the series' last ts."""
        raise NotImplementedError

    def query_range(self, series: str, t0: int, t1: int) -> List[Record]:
        """Records with t0 <= ts < t1, in order."""
        raise NotImplementedError

    def count_since(self, series: str, t0: int) -> int:
        """Number of records with ts >= t0."""
        raise NotImplementedError

    def last_timestamp(self, series: str) -> Optional[int]:
        raise NotImplementedError

    def close(self):
        pass

    # Typed helpers

    def append_sample(self, sample: KpiSample):
        self.append(RAW, sample_to_record(sample))

    def append_labeled(self, labeled: LabeledSample):
        self.append(LABELED, labeled_to_record(labeled))

    def append_event(self, event: LoopEvent):
        self.append(EVENTS, event.to_record())

    def append_prediction(self, prediction: Prediction):
        self.append(PREDICTIONS, prediction.to_record())

    def query_samples(self, t0: int, t1: int) -> List[KpiSample]:
        return [record_to_sample(r) for r in self.query_range(RAW, t0, t1)]

    def query_labeled(self, t0: int, t1: int) -> List[LabeledSample]:
        return [record_to_labeled(r) for r in self.query_range(LABELED, t0, t1)]

    def query_predictions(self, t0: int, t1: int) -> List[Prediction]:
        return [Prediction.from_record(r) for r in self.query_range(PREDICTIONS, t0, t1)]

    def query_events(self, t0: int = 0, t1: Optional[int] = None) -> List[LoopEvent]:
        end = t1 if t1 is not None else (self.last_timestamp(EVENTS) or 0) + 1
        return [LoopEvent.from_record(r) for r in self.query_range(EVENTS, t0, end)]

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _record_ts(record: Record) -> int:
    ts = record.get("ts")
    if isinstance(ts, bool) or not isinstance(ts, int):
        raise ValueError(f"record needs an integer ts, got {ts!r}")
    return ts


class MemoryTimeSeriesStore(TimeSeriesStore):
    """Volatile store for offline evaluation runs."""

    def __init__(self, series: Iterable[str] = DEFAULT_SERIES):
        self.series = tuple(series)
        self._records: Dict[str, List[Record]] = {name: [] for name in self.series}
        self._ts: Dict[str, List[int]] = {name: [] for name in self.series}
        self._lock = threading.Lock()

    def _check(self, series: str):
        if series not in self._records:
            raise UnknownSeries(series)

    def append(self, series: str, record: Record):
        self._check(series)
        ts = _record_ts(record)
        with self._lock:
            stamps = self._ts[series]
            if stamps and ts < stamps[-1]:
                raise OutOfOrder(f"{series}: ts {ts} < last {stamps[-1]}")
            stamps.append(ts)
            self._records[series].append(dict(record))

    def query_range(self, series: str, t0: int, t1: int) -> List[Record]:
        self._check(series)
        if t0 > t1:
            raise ValueError(f"t0 {t0} > t1 {t1}")
        with self._lock:
            stamps = self._ts[series]
            lo, hi = bisect_left(stamps, t0), bisect_left(stamps, t1)
            return [dict(r) for r in self._records[series][lo:hi]]

    def count_since(self, series: str, t0: int) -> int:
        self._check(series)
        with self._lock:
            stamps = self._ts[series]
            return len(stamps) - bisect_left(stamps, t0)

    def last_timestamp(self, series: str) -> Optional[int]:
        self._check(series)
        stamps = self._ts[series]
        return stamps[-1] if stamps else None


class _SeriesLog:
    """Append log and index of one series."""

    def __init__(self, root: Path, name: str):
        self.name = name
        self.path = root / f"{name}.ndjson"
        self.checkpoint_path = root / f"{name}.idx.json"
        self.lock = threading.Lock()
        self.ts: List[int] = []
        self.offsets: List[int] = []
        self.size = 0
        self.write_fd: Optional[int] = None
        self.read_fd: Optional[int] = None

    @property
    def last_ts(self) -> Optional[int]:
        return self.ts[-1] if self.ts else None


class FileTimeSeriesStore(TimeSeriesStore):
    """
    File-backed store.

    Each record is written with a single append, and a torn trailing record
    left by a crash is truncated when the writer reopens the series. Readers in
    other processes pick up new complete lines on every query.
    """

    def __init__(
        self,
        root: Union[str, Path],
        series: Iterable[str] = DEFAULT_SERIES,
        fsync: bool = False,
        checkpoint_every: int = 1000,
        writable: bool = True,
    ):
        """
        Initialize the store.

        Args:
            root: Directory holding the series files
            series: Series this store declares
            fsync: fsync after every append
            checkpoint_every: Appends between index checkpoints
            writable: Open series for appending (False for reader processes)
        """
        self.root = Path(root)
        self.series = tuple(series)
        self.fsync = fsync
        self.checkpoint_every = max(1, checkpoint_every)
        self.writable = writable
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            self._logs = {name: self._open(name) for name in self.series}
        except OSError as e:
            raise StoreIOError(f"cannot open store at {self.root}: {e}") from e
        logger.info(f"Opened store at {self.root} ({', '.join(self.series)})")

    def _open(self, name: str) -> _SeriesLog:
        log = _SeriesLog(self.root, name)
        if self.writable:
            log.write_fd = os.open(log.path, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
            self._truncate_torn_tail(log)
        elif not log.path.exists():
            log.path.touch()
        log.read_fd = os.open(log.path, os.O_RDONLY)
        self._load_checkpoint(log)
        self._scan(log)
        return log

    def _truncate_torn_tail(self, log: _SeriesLog):
        size = log.path.stat().st_size
        if size == 0:
            return
        with open(log.path, "rb") as f:
            data = f.read()
        if data.endswith(b"\n"):
            return
        keep = data.rfind(b"\n") + 1
        logger.warning(f"{log.name}: dropping torn record ({size - keep} bytes)")
        os.truncate(log.path, keep)

    def _load_checkpoint(self, log: _SeriesLog):
        if not log.checkpoint_path.exists():
            return
        try:
            checkpoint = json.loads(log.checkpoint_path.read_text())
            size = int(checkpoint["size"])
            ts, offsets = list(checkpoint["ts"]), list(checkpoint["offsets"])
        except (OSError, ValueError, KeyError, TypeError):
            logger.warning(f"{log.name}: ignoring unreadable index checkpoint")
            return
        if size <= os.fstat(log.read_fd).st_size and len(ts) == len(offsets):
            log.ts, log.offsets, log.size = ts, offsets, size

    def _scan(self, log: _SeriesLog):
        """Index complete lines appended after log.size."""
        end = os.fstat(log.read_fd).st_size
        if end <= log.size:
            return
        data = os.pread(log.read_fd, end - log.size, log.size)
        pos = 0
        while True:
            newline = data.find(b"\n", pos)
            if newline < 0:
                break
            line = data[pos:newline]
            if line:
                record = json.loads(line)
                log.ts.append(_record_ts(record))
                log.offsets.append(log.size + pos)
            pos = newline + 1
        log.size += pos

    def _write_checkpoint(self, log: _SeriesLog):
        tmp = log.checkpoint_path.with_name(log.checkpoint_path.name + ".tmp")
        tmp.write_text(json.dumps({"size": log.size, "ts": log.ts, "offsets": log.offsets}))
        os.replace(tmp, log.checkpoint_path)

    def _log(self, series: str) -> _SeriesLog:
        try:
            return self._logs[series]
        except KeyError:
            raise UnknownSeries(series) from None

    def append(self, series: str, record: Record):
        """
        Append one record durably.

        Args:
            series: Series name
            record: JSON-serializable dict with an integer "ts"

        Raises:
            OutOfOrder: ts older than the series' last record
            StoreIOError: the write failed
        """
        log = self._log(series)
        if log.write_fd is None:
            raise StoreIOError(f"store at {self.root} is read-only")
        ts = _record_ts(record)
        line = (json.dumps(record, separators=(",", ":")) + "\n").encode("utf-8")
        with log.lock:
            if log.last_ts is not None and ts < log.last_ts:
                raise OutOfOrder(f"{series}: ts {ts} < last {log.last_ts}")
            try:
                written = os.write(log.write_fd, line)
                if written != len(line):
                    raise OSError(f"short write ({written}/{len(line)} bytes)")
                if self.fsync:
                    os.fsync(log.write_fd)
            except OSError as e:
                self._rollback(log)
                raise StoreIOError(f"{series}: append failed: {e}") from e
            log.ts.append(ts)
            log.offsets.append(log.size)
            log.size += len(line)
            if len(log.ts) % self.checkpoint_every == 0:
                self._write_checkpoint(log)

    def _rollback(self, log: _SeriesLog):
        # partial bytes past log.size would glue onto the next record
        try:
            os.ftruncate(log.write_fd, log.size)
        except OSError as e:
            logger.error(f"{log.path}: cannot truncate to {log.size} after failed write: {e}")

    def _snapshot(self, log: _SeriesLog):
        with log.lock:
            if log.write_fd is None:
                self._scan(log)
            return log.ts, log.offsets, log.size, len(log.ts)

    def query_range(self, series: str, t0: int, t1: int) -> List[Record]:
        """
        Records with t0 <= ts < t1.

        Raises:
            UnknownSeries: series not declared by this store
        """
        log = self._log(series)
        if t0 > t1:
            raise ValueError(f"t0 {t0} > t1 {t1}")
        ts, offsets, size, n = self._snapshot(log)
        lo = bisect_left(ts, t0, 0, n)
        hi = bisect_left(ts, t1, 0, n)
        if lo >= hi:
            return []
        start = offsets[lo]
        end = offsets[hi] if hi < n else size
        try:
            data = os.pread(log.read_fd, end - start, start)
        except OSError as e:
            raise StoreIOError(f"{series}: read failed: {e}") from e
        return [json.loads(line) for line in data.splitlines() if line]

    def count_since(self, series: str, t0: int) -> int:
        log = self._log(series)
        ts, _, _, n = self._snapshot(log)
        return n - bisect_left(ts, t0, 0, n)

    def last_timestamp(self, series: str) -> Optional[int]:
        log = self._log(series)
        ts, _, _, n = self._snapshot(log)
        return ts[n - 1] if n else None

    def close(self):
        for log in self._logs.values():
            with log.lock:
                if log.write_fd is not None:
                    self._write_checkpoint(log)
                    os.close(log.write_fd)
                    log.write_fd = None
                if log.read_fd is not None:
                    os.close(log.read_fd)
                    log.read_fd = None


def create_store(store_type: str = "file", **kwargs) -> TimeSeriesStore:
    """
    Factory function to create a time-series store.

    Args:
        store_type: "file" or "memory"
        **kwargs: Arguments for the store constructor

    Returns:
        TimeSeriesStore instance
    """
    if store_type == "file":
        return FileTimeSeriesStore(**kwargs)
    elif store_type == "memory":
        return MemoryTimeSeriesStore(**kwargs)
    else:
        raise ValueError(f"Unknown store type: {store_type}")
