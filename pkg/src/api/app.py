"""
FastAPI application for the detection service's A1-like control interface.
"""
import asyncio
import inspect
import logging
import os
from typing import Optional

from dotenv import load_dotenv
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import FetchError, FormatError, VersionError
from .models import ErrorResponse, HealthResponse, ModelUpdateAck, ModelUpdateRequest, StatusResponse

# Load '.env' if provided
load_dotenv()

logger = logging.getLogger(__name__)

SYSTEM_NOT_READY = "Detection service is still initializing. Please try again in a moment."


def _system_is_ready(request: Request) -> bool:
    """Whether a detection service is bound to the app."""
    if getattr(request.app.state, "service", None) is None:
        logger.warning("Detection service is not ready (is None)")
        return False
    return True


async def run_endpoint(
    request: Request,
    endpoint, *args,
    run_sync_in_thread: bool = True,
    skip_system_check: bool = False,
    **kwargs,
):
    """
    Run an endpoint body, mapping unexpected failures to HTTP 500 and requests
    before startup to HTTP 503.
    """
    if not skip_system_check and not _system_is_ready(request):
        raise HTTPException(status_code=503, detail=SYSTEM_NOT_READY)

    try:
        if inspect.iscoroutinefunction(endpoint):
            return await endpoint(*args, **kwargs)

        if run_sync_in_thread:
            return await asyncio.to_thread(endpoint, *args, **kwargs)

        return endpoint(*args, **kwargs)

    except HTTPException:
        raise
    except Exception as e:
        logger.error(f"Error in endpoint {endpoint.__name__}: {e}")
        if os.environ.get("DEBUG"):
            raise e
        raise HTTPException(status_code=500, detail="Internal server error")


def _status(service):
    return service.status()


def _model_update(service, update: ModelUpdateRequest):
    try:
        return service.handle_model_update(update.model_version, update.registry_uri)
    except FetchError as e:
        logger.warning(f"Nack v{update.model_version}: {e}")
        return JSONResponse(
            status_code=404,
            content=ModelUpdateAck(ack=False, old=service.model_version, error=str(e)).model_dump(),
        )
    except (FormatError, VersionError) as e:
        logger.warning(f"Nack v{update.model_version}: {e}")
        return JSONResponse(
            status_code=422,
            content=ModelUpdateAck(ack=False, old=service.model_version, error=str(e)).model_dump(),
        )


def create_app(service=None) -> FastAPI:
    """
    Build the control API.

    Args:
        service: DetectionService to expose; when None one is built from
            settings on startup

    Returns:
        FastAPI application
    """
    app = FastAPI(
        title="jamsense xApp",
        description="Control interface of the interference detection service",
        version=__version__,
    )
    app.state.service = service

    @app.on_event("startup")
    async def startup_event():
        if app.state.service is not None:
            return
        from ..config import get_settings
        from ..xapp.server import build_service

        logger.info("Initializing detection service from settings...")
        app.state.service = build_service(get_settings())

    @app.get("/", response_model=dict)
    async def root():
        """Root endpoint."""
        return {
            "message": "jamsense interference detection xApp",
            "version": __version__,
            "endpoints": {
                "health": "/health",
                "status": "/a1/status",
                "model_update": "/a1/model-update",
            },
        }

    @app.get("/health", response_model=HealthResponse)
    async def health_check(request: Request):
        """Health check endpoint."""
        svc = request.app.state.service
        return HealthResponse(
            status="healthy" if svc is not None else "Initializing",
            version=__version__,
            model_deployed=svc is not None and svc.model_version is not None,
        )

    @app.get("/a1/status", response_model=StatusResponse)
    async def status(request: Request):
        return await run_endpoint(request, _status, request.app.state.service, run_sync_in_thread=False)

    @app.post(
        "/a1/model-update",
        response_model=ModelUpdateAck,
        responses={404: {"model": ModelUpdateAck}, 422: {"model": ModelUpdateAck}, 500: {"model": ErrorResponse}},
    )
    async def model_update(update: ModelUpdateRequest, request: Request):
        return await run_endpoint(
            request, _model_update, request.app.state.service, update,
            run_sync_in_thread=True,
        )

    return app


app = create_app()
