"""
Scalar radio math: free-space path loss, thermal noise, SNR and Shannon capacity.

All link arithmetic stays in the dB domain; the conversion to linear scale
happens only inside the Shannon step.
"""

import math

from pydantic import BaseModel, ConfigDict, computed_field
from scipy import constants

from smartem.errors import DomainError

SPEED_OF_LIGHT = constants.c

# Thermal noise density at 290 K, dBm/Hz
THERMAL_NOISE_DBM_PER_HZ = -174.0


class LinkBudgetTerms(BaseModel):
    """Additive dB ledger of one end-to-end path.

    ``rx_power_dbm`` is derived from the other terms, so the ledger identity
    holds exactly for every instance.
    """

    model_config = ConfigDict(frozen=True)

    eirp_dbm: float
    path_loss_db: float
    extra_gain_db: float = 0.0
    penetration_db: float = 0.0
    rx_gain_dbi: float = 0.0

    @computed_field
    @property
    def rx_power_dbm(self) -> float:
        return (
            self.eirp_dbm
            - self.path_loss_db
            + self.extra_gain_db
            - self.penetration_db
            + self.rx_gain_dbi
        )


def db_to_linear(value_db: float) -> float:
    """Convert a power ratio from dB to linear scale."""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    """Convert a linear power ratio to dB. Zero maps to -inf."""
    if value <= 0.0:
        return -math.inf
    return 10.0 * math.log10(value)


def wavelength_m(frequency_hz: float) -> float:
    """Free-space wavelength for ``frequency_hz``."""
    if frequency_hz <= 0:
        raise DomainError(f"frequency must be positive, got {frequency_hz}")
    return SPEED_OF_LIGHT / frequency_hz


def fspl_db(distance_m: float, frequency_hz: float) -> float:
    """
    Free-space path loss.

    Args:
        distance_m: Link length in meters, > 0.
        frequency_hz: Carrier frequency in Hz, > 0.

    Returns:
        20·log10(4π·d·f / c) in dB.

    Raises:
        DomainError: If distance or frequency is not positive.
    """
    if distance_m <= 0:
        raise DomainError(f"distance must be positive, got {distance_m}")
    if frequency_hz <= 0:
        raise DomainError(f"frequency must be positive, got {frequency_hz}")
    return 20.0 * math.log10(4.0 * math.pi * distance_m * frequency_hz / SPEED_OF_LIGHT)


def noise_power_dbm(bandwidth_hz: float, noise_figure_db: float) -> float:
    """
    Receiver noise power: -174 dBm/Hz + 10·log10(B) + NF.

    Raises:
        DomainError: If bandwidth is not positive.
    """
    if bandwidth_hz <= 0:
        raise DomainError(f"bandwidth must be positive, got {bandwidth_hz}")
    return THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def snr_db(
    rx_power_dbm: float,
    bandwidth_hz: float,
    noise_figure_db: float,
    penalty_db: float = 0.0,
) -> float:
    """SNR in dB, optionally reduced by a fixed penalty (repeater noise)."""
    return rx_power_dbm - noise_power_dbm(bandwidth_hz, noise_figure_db) - penalty_db


def shannon_capacity_bps(
    rx_power_dbm: float,
    bandwidth_hz: float,
    noise_figure_db: float,
    penalty_db: float = 0.0,
) -> float:
    """
    Shannon capacity B·log2(1 + SNR).

    Args:
        rx_power_dbm: Received power.
        bandwidth_hz: Channel bandwidth, > 0.
        noise_figure_db: Receiver noise figure.
        penalty_db: SNR penalty applied before the log (0 for clean paths).

    Returns:
        Capacity in bit/s, always >= 0.
    """
    snr = db_to_linear(snr_db(rx_power_dbm, bandwidth_hz, noise_figure_db, penalty_db))
    return bandwidth_hz * math.log2(1.0 + snr)
