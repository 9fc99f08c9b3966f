"""
Pydantic models for the A1-like control API.
"""

from typing import Optional
from pydantic import BaseModel, Field


class ModelUpdateRequest(BaseModel):
    """Notification that a new model version is ready in the registry."""
    model_version: int = Field(..., description="Registered model version", ge=1)
    registry_uri: str = Field(..., description="Registry URI of the model, e.g. 'registry://v3'")


class ModelUpdateAck(BaseModel):
    """Result of a model update."""
    ack: bool = Field(..., description="Whether the service now serves the requested version")
    old: Optional[int] = Field(None, description="Version served before the update")
    new: Optional[int] = Field(None, description="Version served after the update")
    error: Optional[str] = Field(None, description="Reason for a negative acknowledgement")


class StatusResponse(BaseModel):
    """Detection service counters."""
    model_version: Optional[int] = Field(None, description="Active model version")
    received: int = Field(..., description="Stream samples received")
    inferred: int = Field(..., description="Predictions emitted")
    dropped: int = Field(..., description="Samples lost; stays 0 across swaps")
    gaps: int = Field(0, description="Window buffer resets caused by timestamp gaps")
    decode_errors: int = Field(0, description="Malformed stream records")
    swaps: int = Field(0, description="Completed model swaps")


class HealthResponse(BaseModel):
    """Health check response."""
    status: str = Field(..., description="Service status")
    version: str = Field(..., description="API version")
    model_deployed: bool = Field(..., description="Whether a model is serving predictions")


class ErrorResponse(BaseModel):
    """Error response model."""
    error: str = Field(..., description="Error message")
    detail: Optional[str] = Field(None, description="Detailed error information")
