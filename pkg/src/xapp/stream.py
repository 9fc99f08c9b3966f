"""
E2-like stream transport: newline-delimited wire samples over TCP.
"""
import asyncio
import logging
from typing import Iterable, Optional

from ..errors import BindError
from ..telemetry.types import KpiSample
from ..telemetry.wire import encode_sample
from .service import DetectionService

logger = logging.getLogger(__name__)


class StreamServer:
    """
    Feeds one stream connection at a time into the detection service.

    A new connection resets the window buffer; counters carry over.
    """

    def __init__(self, service: DetectionService, host: str = "127.0.0.1", port: int = 9100):
        self.service = service
        self.host = host
        self.port = port
        self.connections = 0
        self._server: Optional[asyncio.base_events.Server] = None
        self._active = asyncio.Lock()

    @property
    def bound_port(self) -> int:
        """Actual port, useful when bound to port 0."""
        if self._server is None or not self._server.sockets:
            return self.port
        return self._server.sockets[0].getsockname()[1]

    async def start(self):
        try:
            self._server = await asyncio.start_server(self._handle, self.host, self.port)
        except OSError as e:
            raise BindError(f"cannot bind stream listener {self.host}:{self.port}: {e}") from e
        logger.info(f"Stream listener on {self.host}:{self.bound_port}")

    async def _handle(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        peer = writer.get_extra_info("peername")
        async with self._active:
            self.connections += 1
            if self.connections > 1:
                self.service.reset_buffer("reconnect")
            logger.info(f"Stream connected from {peer}")
            try:
                while True:
                    line = await reader.readline()
                    if not line:
                        break
                    if line.strip():
                        self.service.ingest_line(line)
            except (ConnectionError, asyncio.IncompleteReadError) as e:
                logger.warning(f"Stream from {peer} dropped: {e}")
            finally:
                writer.close()
                logger.info(f"Stream from {peer} closed after {self.service.stats.received} samples total")

    async def stop(self):
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None


async def send_samples(
    host: str,
    port: int,
    samples: Iterable[KpiSample],
    period_s: float = 0.0,
) -> int:
    """
    Stream samples to a listener, optionally paced.

    Returns:
        Number of samples sent
    """
    reader, writer = await asyncio.open_connection(host, port)
    sent = 0
    try:
        for sample in samples:
            writer.write(encode_sample(sample))
            sent += 1
            if period_s > 0:
                await writer.drain()
                await asyncio.sleep(period_s)
        await writer.drain()
    finally:
        writer.close()
        await writer.wait_closed()
    return sent
