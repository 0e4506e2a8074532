"""Flooding min-sum, offset min-sum and fixed-point min-sum decoding.

Conventions: sign(0) = +1 everywhere, and a zero magnitude takes part in the
check-node minimum. Fixed-point messages live in the symmetric saturating
alphabet {-(2**(Q-1)-1), ..., +(2**(Q-1)-1)}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .code_model import TannerGraph


@dataclass(frozen=True)
class DecoderConfig:
    max_iters: int = 5
    early_stop: bool = True
    arithmetic: str = "float"  # "float" | "fixed"
    q_msg: int | None = None
    oms_offset: float = 0.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.arithmetic not in ("float", "fixed"):
            raise ValueError("arithmetic must be 'float' or 'fixed'")
        if self.arithmetic == "fixed":
            if self.q_msg is None or self.q_msg < 2:
                raise ValueError("fixed arithmetic needs q_msg >= 2")
            if self.oms_offset != int(self.oms_offset):
                raise ValueError("fixed-point offset must be an integer number of LSBs")
        if self.oms_offset < 0:
            raise ValueError("oms_offset must be >= 0")

    @property
    def max_level(self) -> int | None:
        return None if self.q_msg is None else 2 ** (self.q_msg - 1) - 1


# -- scalar node rules ---------------------------------------------------------

def _check_arity(values, expected, what):
    if expected is not None and len(values) != expected:
        raise ValueError(f"{what}: expected {expected} inputs, got {len(values)}")


def vn_update(L, incoming, *, max_level=None, arity=None):
    """L + sum(incoming), saturated to +-max_level when given."""
    _check_arity(incoming, arity, "vn_update")
    s = L + sum(incoming)
    if max_level is not None:
        s = max(-max_level, min(max_level, s))
    return s


def cn_update(incoming, *, offset=0.0, arity=None):
    """Product of signs times minimum magnitude, minus ``offset`` floored at 0."""
    _check_arity(incoming, arity, "cn_update")
    if not incoming:
        raise ValueError("cn_update needs at least one input")
    neg = sum(1 for x in incoming if x < 0) % 2
    mag = min(abs(x) for x in incoming)
    if offset:
        mag = max(mag - offset, 0)
    return -mag if neg else mag


def decide(L, incoming, *, arity=None) -> int:
    """Hard decision on L + sum(incoming); an exact zero decides 0."""
    _check_arity(incoming, arity, "decide")
    return 1 if L + sum(incoming) < 0 else 0


# -- vectorized decoder ---------------------------------------------------------

class MinSumDecoder:
    """Flooding decoder bound to one graph and configuration.

    One iteration is a full CN pass, then the hard decision (every iteration
    with early stopping, else only after the last), then a full VN pass.
    Iteration 1 starts from VN-to-CN messages equal to the channel values,
    so ``max_iters`` iterations run ``max_iters`` CN passes.
    """

    def __init__(self, g: TannerGraph, cfg: DecoderConfig):
        self.g = g
        self.cfg = cfg
        self._fixed = cfg.arithmetic == "fixed"
        self.peak_message = 0

    def _prepare(self, llrs):
        L = np.asarray(llrs)
        if L.ndim == 1:
            L = L[None, :]
        if L.ndim != 2 or L.shape[-1] != self.g.n_vns:
            raise ValueError(f"expected {self.g.n_vns} channel values per frame, got shape {L.shape}")
        if not self._fixed:
            return np.ascontiguousarray(L, dtype=np.float64)
        if not np.array_equal(L, np.round(L)):
            raise ValueError("fixed-point decoding needs integer channel values")
        if np.any(np.abs(L) > self.cfg.max_level):
            raise ValueError(f"channel values exceed the {self.cfg.q_msg}-bit alphabet")
        return np.ascontiguousarray(L, dtype=np.int64)

    def decode_batch(self, llrs, *, trace=None):
        """Decode a (B, N) batch. Returns (bits, iterations, converged).

        ``trace``, if given, is filled with frame 0's messages, shape
        (max_iters, 2, n_edges): row 0 CN->VN, row 1 VN->CN.
        """
        L = self._prepare(llrs)
        if trace is None:
            trace = np.zeros((0, 2, 0), dtype=L.dtype)
        g = self.g
        lim = self.cfg.max_level if self._fixed else 0
        bits, iters, conv, peak = _kernels.minsum_batch(
            L, g.cn_ptr, g.edge_vn, g.vn_ptr, g.vn_edges, self.cfg.max_iters,
            self.cfg.early_stop, float(self.cfg.oms_offset), lim, trace)
        if self._fixed:
            self.peak_message = max(self.peak_message, int(peak))
        return bits, iters, conv

    def decode(self, llrs):
        bits, iters, conv = self.decode_batch(np.asarray(llrs)[None, :])
        return bits[0], int(iters[0]), bool(conv[0])


def decode(g: TannerGraph, llrs, cfg: DecoderConfig):
    """Decode one frame. Returns (codeword, iterations_used, converged)."""
    return MinSumDecoder(g, cfg).decode(llrs)
