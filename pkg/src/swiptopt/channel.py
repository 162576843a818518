"""Frequency-domain channel construction for block transmission.

Builds the per-subcarrier response ``h`` and the half-sample-offset response
``h_u`` either from physical time-domain taps or from directly supplied
frequency coefficients. The half-sample response exists because the squared
envelope of a bandwidth-``f_w`` signal occupies ``2 f_w`` and therefore needs
samples at twice the symbol rate; ``h_u[l]`` is the channel seen by the
samples midway between ordinary symbol-rate samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    BadLengthError,
    EvenNError,
    NonPositiveBandwidthError,
    WindowTooSmallError,
)


class ChannelMode(str, Enum):
    TIME_TAPS = "time_taps"
    FREQ_COEFFS = "freq_coeffs"


@dataclass(frozen=True)
class ChannelSpec:
    """Physical description of an N-subcarrier frequency-selective channel.

    Exactly one of `taps` (time domain, length L <= N) or `coeffs`
    (frequency domain, length N) must be supplied, matching `mode`.
    `sinc_window` is the half-width used for half-sample tap interpolation
    in time-taps mode; None means the 8N default.
    """

    mode: ChannelMode
    n: int
    taps: np.ndarray | None = None
    coeffs: np.ndarray | None = None
    f_w: float = 1.0
    sigma_w2: float = 0.0
    sinc_window: int | None = None

    def __post_init__(self):
        if self.taps is not None:
            object.__setattr__(self, "taps", np.asarray(self.taps, dtype=np.complex128))
        if self.coeffs is not None:
            object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=np.complex128))


@dataclass(frozen=True)
class FreqChannel:
    """Per-subcarrier responses at integer (`h`) and half-sample (`h_u`) instants."""

    h: np.ndarray
    h_u: np.ndarray
    n: int
    f_w: float
    sigma_w2: float

    def __post_init__(self):
        object.__setattr__(self, "h", np.asarray(self.h, dtype=np.complex128))
        object.__setattr__(self, "h_u", np.asarray(self.h_u, dtype=np.complex128))


def centered_index(n: int) -> np.ndarray:
    """Subcarrier indices remapped to the centered range [-(n-1)/2, (n-1)/2]."""
    l = np.arange(n)
    return np.where(l <= (n - 1) // 2, l, l - n)


def validate_spec(spec: ChannelSpec) -> ChannelSpec:
    """Check all ChannelSpec invariants; return the spec unchanged if they hold."""
    if spec.n % 2 == 0 or spec.n < 3:
        raise EvenNError(
            f"subcarrier count must be odd and >= 3, got {spec.n}"
            " (the closed-form power model is derived for odd N)"
        )
    if spec.f_w <= 0:
        raise NonPositiveBandwidthError(f"f_w must be > 0, got {spec.f_w}")
    if spec.sigma_w2 < 0:
        raise BadLengthError(f"sigma_w2 must be >= 0, got {spec.sigma_w2}")
    if spec.mode == ChannelMode.TIME_TAPS:
        if spec.taps is None:
            raise BadLengthError("time-taps mode requires a taps vector")
        if len(spec.taps) > spec.n:
            raise BadLengthError(f"tap count {len(spec.taps)} exceeds N={spec.n}")
        window = spec.sinc_window if spec.sinc_window is not None else 8 * spec.n
        if window < spec.n:
            raise WindowTooSmallError(f"sinc_window {window} < N={spec.n}")
    elif spec.mode == ChannelMode.FREQ_COEFFS:
        if spec.coeffs is None:
            raise BadLengthError("freq-coeffs mode requires a coeffs vector")
        if len(spec.coeffs) != spec.n:
            raise BadLengthError(f"coeffs length {len(spec.coeffs)} != N={spec.n}")
    else:  # pragma: no cover - enum exhausts the cases
        raise BadLengthError(f"unknown channel mode {spec.mode!r}")
    return spec


def half_sample_taps(taps: np.ndarray, n: int, window: int) -> np.ndarray:
    """Time-domain channel seen by the half-sample-offset sampling grid.

    Evaluates h_u[l] = sum_d taps[d] * sinc(l + 1/2 - d) on the extended index
    range [-window, window] and folds the result modulo `n`, modeling the
    block-periodic structure the frequency-domain model assumes.
    """
    if window < n:
        raise WindowTooSmallError(f"window {window} < N={n}")
    taps = np.asarray(taps, dtype=np.complex128)
    l = np.arange(-window, window + 1)
    d = np.arange(len(taps))
    vals = (taps[None, :] * np.sinc(l[:, None] + 0.5 - d[None, :])).sum(axis=1)
    folded = np.zeros(n, dtype=np.complex128)
    np.add.at(folded, l % n, vals)
    return folded


def build_freq_channel(spec: ChannelSpec) -> FreqChannel:
    """Construct (h, h_u) from a validated channel description.

    Time-taps mode applies the unitary DFT to the zero-extended taps and to
    the half-sample tap interpolation. Frequency-coefficients mode uses the
    coefficients verbatim and models the half-sample response as a pure
    half-sample delay of the bandlimited interpolant, i.e. a phase ramp
    exp(j*pi*m(l)/N) over the centered subcarrier index m(l); this preserves
    |h_u| = |h| exactly.
    """
    validate_spec(spec)
    if spec.mode == ChannelMode.TIME_TAPS:
        window = spec.sinc_window if spec.sinc_window is not None else 8 * spec.n
        extended = np.zeros(spec.n, dtype=np.complex128)
        extended[: len(spec.taps)] = spec.taps
        h = np.fft.fft(extended, norm="ortho")
        h_u = np.fft.fft(half_sample_taps(spec.taps, spec.n, window), norm="ortho")
    else:
        h = spec.coeffs.copy()
        m = centered_index(spec.n)
        h_u = h * np.exp(1j * np.pi * m / spec.n)
    return FreqChannel(h=h, h_u=h_u, n=spec.n, f_w=spec.f_w, sigma_w2=spec.sigma_w2)


def flat_channel(n: int, sigma_w2: float, gain: float = 1.0, f_w: float = 1.0) -> FreqChannel:
    """Frequency-flat channel with |h_l| = gain on every subcarrier."""
    spec = ChannelSpec(
        mode=ChannelMode.FREQ_COEFFS,
        n=n,
        coeffs=np.full(n, gain, dtype=np.complex128),
        f_w=f_w,
        sigma_w2=sigma_w2,
    )
    return build_freq_channel(spec)
