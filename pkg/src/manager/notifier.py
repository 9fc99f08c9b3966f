"""
Client side of the model-update notification.
"""
import logging
from typing import Optional

import httpx
from pydantic import BaseModel, Field
from tenacity import (
    RetryError,
    Retrying,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
    wait_exponential,
)

from ..api.models import ModelUpdateAck, ModelUpdateRequest
from ..errors import NotifyTimeout
from .registry import registry_uri

logger = logging.getLogger(__name__)

MODEL_UPDATE_PATH = "/a1/model-update"


class NotifyConfig(BaseModel):
    timeout_s: float = Field(2.0, gt=0, description="Per-request timeout")
    attempts: int = Field(5, ge=1, description="Requests before giving up")
    backoff_min_s: float = Field(0.1, ge=0)
    backoff_max_s: float = Field(2.0, ge=0)


class _Unavailable(Exception):
    """Service answered with a retryable status."""


class ModelUpdateNotifier:
    """
    Posts model-update notifications to the detection service.

    Connection failures and 5xx answers are retried with exponential backoff;
    a 404/422 nack is returned as is.
    """

    def __init__(
        self,
        base_url: Optional[str] = None,
        cfg: Optional[NotifyConfig] = None,
        client: Optional[httpx.Client] = None,
    ):
        """
        Initialize the notifier.

        Args:
            base_url: Control endpoint of the service, e.g. http://127.0.0.1:8000
            cfg: Timeout and retry settings
            client: Preconfigured client (an in-process TestClient works too)
        """
        if client is None and base_url is None:
            raise ValueError("either base_url or client is required")
        self.cfg = cfg or NotifyConfig()
        self.client = client or httpx.Client(base_url=base_url, timeout=self.cfg.timeout_s)

    def _post(self, request: ModelUpdateRequest) -> ModelUpdateAck:
        response = self.client.post(MODEL_UPDATE_PATH, json=request.model_dump())
        if response.status_code >= 500:
            raise _Unavailable(f"HTTP {response.status_code}")
        body = response.json()
        if response.status_code >= 400 and "detail" in body and "ack" not in body:
            return ModelUpdateAck(ack=False, error=str(body["detail"]))
        return ModelUpdateAck.model_validate(body)

    def notify(self, version: int) -> ModelUpdateAck:
        """
        Tell the service that a version is ready.

        Returns:
            The service's ack or nack

        Raises:
            NotifyTimeout: service unreachable after all attempts
        """
        request = ModelUpdateRequest(model_version=version, registry_uri=registry_uri(version))
        retrying = Retrying(
            stop=stop_after_attempt(self.cfg.attempts),
            wait=wait_exponential(min=self.cfg.backoff_min_s, max=self.cfg.backoff_max_s),
            retry=retry_if_exception_type((httpx.TransportError, _Unavailable)),
            before_sleep=before_sleep_log(logger, logging.WARNING),
        )
        try:
            ack = retrying(self._post, request)
        except RetryError as e:
            cause = e.last_attempt.exception()
            raise NotifyTimeout(version, str(cause)) from cause
        if not ack.ack:
            logger.warning(f"Model update v{version} rejected: {ack.error}")
        return ack

    def close(self):
        self.client.close()
