"""
Order-preserving prediction log writer.
"""
import logging
import queue
import threading
from typing import Callable, List, Optional

from ..errors import JamsenseError
from ..store.timeseries import TimeSeriesStore
from ..telemetry.types import Prediction

logger = logging.getLogger(__name__)

_STOP = object()


class PredictionLog:
    """
    Writes predictions to the store in emission order.

    In asynchronous mode a single worker thread drains a FIFO queue, so the
    inference path never waits on disk. Synchronous mode writes inline.
    """

    def __init__(
        self,
        store: Optional[TimeSeriesStore] = None,
        asynchronous: bool = True,
        sinks: Optional[List[Callable[[Prediction], None]]] = None,
    ):
        """
        Initialize the log.

        Args:
            store: Destination store; None keeps predictions in memory only
            asynchronous: Write from a background thread
            sinks: Extra callbacks invoked with every prediction, in order
        """
        self.store = store
        self.asynchronous = asynchronous
        self.sinks = list(sinks or [])
        self.written = 0
        self.errors = 0
        self._queue: "queue.Queue" = queue.Queue()
        self._worker: Optional[threading.Thread] = None
        if asynchronous:
            self._worker = threading.Thread(target=self._drain, name="prediction-log", daemon=True)
            self._worker.start()

    def add_sink(self, sink: Callable[[Prediction], None]):
        self.sinks.append(sink)

    def write(self, prediction: Prediction):
        if self.asynchronous:
            self._queue.put(prediction)
        else:
            self._write(prediction)

    def _write(self, prediction: Prediction):
        try:
            if self.store is not None:
                self.store.append_prediction(prediction)
            for sink in self.sinks:
                sink(prediction)
            self.written += 1
        except JamsenseError as e:
            self.errors += 1
            logger.error(f"Prediction at ts {prediction.timestamp_ms} not logged: {e}")

    def _drain(self):
        while True:
            item = self._queue.get()
            try:
                if item is _STOP:
                    return
                self._write(item)
            finally:
                self._queue.task_done()

    def flush(self):
        """Block until every queued prediction is written."""
        if self.asynchronous:
            self._queue.join()

    def close(self):
        if self._worker is not None and self._worker.is_alive():
            self._queue.put(_STOP)
            self._worker.join()
        logger.info(f"Prediction log closed: {self.written} written, {self.errors} failed")
