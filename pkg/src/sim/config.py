"""
Simulator configuration: noise and jammer coupling, link adaptation tables.
"""
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..errors import ConfigError

MCS_LEVELS = 29


def _default_mcs_table() -> List[float]:
    # SNR threshold (dB) of each MCS index 0..28
    return [-1.0 + float(m) for m in range(MCS_LEVELS)]


class SimConfig(BaseModel):
    """
    Generative model of the uplink KPIs.

    Per-sample SNR is the clean SNR minus the jammer degradation plus gaussian
    noise. MCS follows the trailing mean SNR through `mcs_table`; BLER follows a
    logistic curve over the margin the link adapter provisioned; bitrate scales
    with MCS and successful blocks.
    """
    model_config = ConfigDict(frozen=True)

    seed: int = Field(0, description="RNG seed")
    clean_snr_db: float = Field(25.0, description="SNR at the reference operating point")
    tx_power_db: float = Field(-4.5, description="UE transmit power")
    reference_tx_power_db: float = Field(-4.5, description="Transmit power of the clean point")
    noise_amp_to_sigma: float = Field(3.0, gt=0, description="dB of SNR std per unit noise amplitude")

    interference_coupling: float = Field(2.0, gt=0, description="SNR loss (dB) at the reference jammer power")
    interference_ref_db: float = Field(-40.0, description="Reference jammer power")
    interference_slope_db: float = Field(36.6, gt=0, description="Jammer dB per decade of SNR loss")

    mcs_table: List[float] = Field(default_factory=_default_mcs_table,
                                   description="SNR threshold of each MCS index")
    mcs_backoff_db: float = Field(1.5, ge=0, description="Headroom required above an MCS threshold")
    link_smoothing: int = Field(5, ge=1, description="Samples in the link adapter's SNR average")
    link_margin_db: float = Field(2.0, description="Margin the link adapter provisions")

    bler_midpoint_db: float = Field(1.08, description="Margin at which BLER is 0.5")
    bler_slope_db: float = Field(0.2, description="Logistic scale of the BLER curve")
    interference_bler_penalty: float = Field(
        0.02, ge=0, description="Margin lost per dB of jammer degradation"
    )

    reference_bitrate_mbps: float = Field(20.0, gt=0)
    reference_mcs: int = Field(24, ge=1, le=MCS_LEVELS - 1)

    def __init__(self, **data):
        try:
            super().__init__(**data)
        except ValidationError as e:
            raise ConfigError(f"Invalid simulator config: {e}") from e

    @model_validator(mode="after")
    def _monotone_tables(self) -> "SimConfig":
        table = np.asarray(self.mcs_table, dtype=np.float64)
        if len(table) != MCS_LEVELS:
            raise ConfigError(f"mcs_table needs {MCS_LEVELS} thresholds, got {len(table)}")
        if np.any(np.diff(table) < 0):
            raise ConfigError("mcs_table must be non-decreasing in SNR")
        if self.bler_slope_db <= 0:
            raise ConfigError("bler_curve must be non-increasing in margin (bler_slope_db > 0)")
        return self

    @property
    def clean_point_snr_db(self) -> float:
        return self.clean_snr_db + (self.tx_power_db - self.reference_tx_power_db)
