"""
Process lifecycle of the detection service: the stream listener and the
control API share one event loop.
"""
import asyncio
import logging
import socket
from typing import Optional

import uvicorn

from ..config import Settings
from ..errors import BindError
from ..manager.registry import ModelRegistry
from ..store.timeseries import PREDICTIONS, create_store
from .prediction_log import PredictionLog
from .service import DetectionService
from .stream import StreamServer

logger = logging.getLogger(__name__)


def build_service(settings: Settings) -> DetectionService:
    """Detection service wired to the configured registry and prediction store."""
    store = create_store(
        "file",
        root=settings.store.root,
        series=(PREDICTIONS,),
        fsync=settings.store.fsync,
        checkpoint_every=settings.store.checkpoint_every,
    )
    service = DetectionService(
        registry=ModelRegistry(settings.service.registry_dir),
        prediction_log=PredictionLog(store, asynchronous=settings.service.async_prediction_log),
        sample_period_ms=settings.service.sample_period_ms,
        gap_factor=settings.service.gap_factor,
    )
    service.load_latest()
    return service


def _bind(host: str, port: int) -> socket.socket:
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
    except OSError as e:
        sock.close()
        raise BindError(f"cannot bind control listener {host}:{port}: {e}") from e
    return sock


async def serve_async(settings: Settings, service: Optional[DetectionService] = None):
    """
    Run until the control server is asked to exit (Ctrl+C / SIGTERM).

    Raises:
        BindError: a listener address is unavailable
    """
    from ..api.app import create_app

    service = service or build_service(settings)
    cfg = settings.service
    control_sock = _bind(cfg.control_host, cfg.control_port)
    stream = StreamServer(service, cfg.stream_host, cfg.stream_port)
    try:
        await stream.start()
    except BindError:
        control_sock.close()
        raise

    server = uvicorn.Server(uvicorn.Config(
        create_app(service),
        log_level=settings.log_level.lower(),
    ))
    logger.info(f"Control API on {cfg.control_url}")
    try:
        await server.serve(sockets=[control_sock])
    finally:
        await stream.stop()
        service.shutdown()


def serve(settings: Settings):
    asyncio.run(serve_async(settings))
