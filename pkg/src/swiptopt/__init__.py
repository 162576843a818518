"""Gaussian-input optimization for joint information and power transfer
over frequency-selective block channels with a fourth-order harvester model."""

from .channel import ChannelMode, ChannelSpec, FreqChannel, build_freq_channel, flat_channel, validate_spec
from .power import (
    DiodeModel,
    GaussianInput,
    Moments,
    PowerCoeffs,
    coefficients,
    delivered_power,
    delivered_power_linear,
    delivered_power_wpt,
    gaussian_moments,
    grad_f_ib,
    rate,
)

__all__ = [
    "ChannelMode",
    "ChannelSpec",
    "FreqChannel",
    "build_freq_channel",
    "flat_channel",
    "validate_spec",
    "DiodeModel",
    "GaussianInput",
    "Moments",
    "PowerCoeffs",
    "coefficients",
    "delivered_power",
    "delivered_power_linear",
    "delivered_power_wpt",
    "gaussian_moments",
    "grad_f_ib",
    "rate",
]
