"""BPSK over AWGN, channel LLRs and uniform saturating quantization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SNR_KINDS = ("ebn0", "esn0")


@dataclass(frozen=True)
class ChannelParams:
    """BI-AWGN parameters.

    ``snr_db`` is Eb/N0 by default (sigma^2 = 1 / (2 R Eb/N0)); with
    ``snr_kind="esn0"`` the rate normalization is dropped.
    """

    snr_db: float
    rate: float = 1.0
    snr_kind: str = "ebn0"

    def __post_init__(self):
        if self.snr_kind not in SNR_KINDS:
            raise ValueError(f"snr_kind must be one of {SNR_KINDS}")
        if not 0 < self.rate <= 1:
            raise ValueError("rate must lie in (0, 1]")
        if not math.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite")

    @property
    def ebn0_db(self) -> float:
        if self.snr_kind == "ebn0":
            return self.snr_db
        return self.snr_db - 10 * math.log10(self.rate)

    @property
    def sigma(self) -> float:
        lin = 10 ** (self.snr_db / 10)
        if self.snr_kind == "ebn0":
            lin *= self.rate
        return math.sqrt(1.0 / (2.0 * lin))

    @property
    def llr_scale(self) -> float:
        return 2.0 / self.sigma ** 2

    @property
    def llr_mean(self) -> float:
        """Mean of the channel LLR given bit 0 (its variance is twice this)."""
        return self.llr_scale

    @property
    def llr_std(self) -> float:
        return 2.0 / self.sigma


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def transmit(c, p: ChannelParams, seed=None, *, noiseless: bool = False) -> np.ndarray:
    """BPSK-map ``c`` (0 -> +1), add N(0, sigma^2) noise, return LLRs 2y/sigma^2.

    ``seed`` is an int, a SeedSequence or a ``numpy.random.Generator``. The
    Gaussian draws come from PCG64 + numpy's ziggurat ``standard_normal``.
    ``c`` may be one word or a batch of words.
    """
    x = 1.0 - 2.0 * np.asarray(c, dtype=np.float64)
    if noiseless:
        y = x
    else:
        y = x + p.sigma * _rng(seed).standard_normal(x.shape)
    return p.llr_scale * y


@dataclass(frozen=True)
class UniformQuantizer:
    """Symmetric saturating quantizer with ``bits`` bits and step ``step``.

    Output alphabet is {-max_level, ..., +max_level} with
    max_level = 2**(bits-1) - 1 (sign-magnitude, no -2**(bits-1)).
    """

    bits: int
    step: float

    def __post_init__(self):
        if self.bits < 2:
            raise ValueError("need at least 2 bits")
        if not self.step > 0:
            raise ValueError("step must be positive")

    @property
    def max_level(self) -> int:
        return 2 ** (self.bits - 1) - 1

    @classmethod
    def for_channel(cls, bits: int, p: ChannelParams, saturation_stds: float = 4.5):
        """Step chosen so saturation sits at ``saturation_stds`` LLR standard deviations."""
        return cls(bits, saturation_stds * p.llr_std / (2 ** (bits - 1) - 1))


def quantize_uniform(l, q: UniformQuantizer):
    """round(l / step), half away from zero, clamped to +-max_level.

    Returns an int for scalar input, an int array otherwise.
    """
    a = np.asarray(l, dtype=np.float64) / q.step
    r = np.sign(a) * np.floor(np.abs(a) + 0.5)
    r = np.clip(r, -q.max_level, q.max_level).astype(np.int64)
    return int(r) if r.ndim == 0 else r
