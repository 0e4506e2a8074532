"""Run-time finite-alphabet decoder: table VNs, label-domain min-sum CNs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .code_model import TannerGraph
from .lut_design import LutSet, LutTree, label_index, label_magnitude, label_sign


@dataclass(frozen=True)
class LabelMessage:
    """Sign-magnitude label; ``sign`` is +1 or -1, so -0 and +0 differ."""

    sign: int
    magnitude: int

    def __post_init__(self):
        if self.sign not in (1, -1) or self.magnitude < 0:
            raise ValueError("sign must be +-1 and magnitude >= 0")

    def __neg__(self):
        return LabelMessage(-self.sign, self.magnitude)

    def index(self, K: int) -> int:
        return label_index(self.sign, self.magnitude, K)

    @classmethod
    def from_index(cls, k: int, K: int) -> "LabelMessage":
        return cls(label_sign(k, K), label_magnitude(k, K))


def label_cn_update(incoming, *, arity=None) -> LabelMessage:
    """XOR of signs, minimum of magnitudes."""
    if arity is not None and len(incoming) != arity:
        raise ValueError(f"label_cn_update: expected {arity} inputs, got {len(incoming)}")
    if not incoming:
        raise ValueError("label_cn_update needs at least one input")
    neg = sum(1 for x in incoming if x.sign < 0) % 2
    return LabelMessage(-1 if neg else 1, min(x.magnitude for x in incoming))


class LutDegreeError(ValueError):
    pass


def _pack_trees(trees: list[LutTree], offset0: int):
    """Node rows (inputs, table offset, second-input size) for the kernel."""
    ins, offs, kbs, flat = [], [], [], []
    off = offset0
    for t in trees:
        sz = t.sizes()
        ins.append([list(nd.inputs) for nd in t.nodes])
        offs.append([off + sum(n.table.size for n in t.nodes[:j]) for j in range(len(t.nodes))])
        kbs.append([sz[nd.inputs[1]] for nd in t.nodes])
        flat.extend(nd.table for nd in t.nodes)
        off += sum(n.table.size for n in t.nodes)
    return ins, offs, kbs, flat, off


class LutDecoder:
    """Flooding decoder driven by a designed :class:`LutSet`.

    Iteration t runs a CN pass (channel alphabet at t = 1, message alphabet
    afterwards); iterations 1..I-1 are followed by VN stage t; the decision
    table closes the last iteration. Early stopping decides at iteration
    t < I with the set's stop table for t, i.e. the decision an I = t
    decoder would make.
    """

    def __init__(self, g: TannerGraph, luts: LutSet, *, early_stop: bool = False,
                 max_iters: int | None = None):
        if not g.is_regular:
            raise LutDegreeError("LUT decoding needs a regular graph")
        if (g.d_v, g.d_c) != (luts.d_v, luts.d_c):
            raise LutDegreeError(
                f"graph is ({g.d_v},{g.d_c})-regular, LUT set was designed for "
                f"({luts.d_v},{luts.d_c})")
        if max_iters is not None and max_iters != luts.iters:
            raise ValueError(f"LUT set covers {luts.iters} iterations, {max_iters} requested")
        if len(luts.vn_luts) != luts.iters - 1:
            raise ValueError("LUT set stage count does not match its iteration count")
        if early_stop and luts.iters > 1 and not luts.stop_luts:
            raise ValueError("LUT set has no per-iteration decision tables; "
                             "early stopping is unavailable")
        self.g = g
        self.luts = luts
        self.early_stop = early_stop
        dv = g.d_v
        k_ch = 2 ** luts.q_ch
        alph = luts.message_alphabets()
        for t, tr in enumerate(luts.vn_luts):
            if len(tr.input_sizes) != dv or len(tr.nodes) != dv - 1:
                raise LutDegreeError("VN table arity does not match d_v")
            if tuple(tr.input_sizes) != (k_ch,) + (alph[t],) * (dv - 1):
                raise ValueError(f"VN stage {t + 1} inputs do not match the message alphabet")
        dec_trees = list(luts.stop_luts) + [luts.decision_lut]
        for t, tr in enumerate(dec_trees):
            if len(tr.input_sizes) != dv + 1 or len(tr.nodes) != dv or tr.out_size != 2:
                raise LutDegreeError("decision table arity does not match d_v")
            if tuple(tr.input_sizes) != (k_ch,) + (alph[t - len(dec_trees)],) * dv:
                raise ValueError("decision table inputs do not match the message alphabet")
        for tr in luts.trees():
            tr.validate()
            n_in = len(tr.input_sizes)
            if [nd.node_id for nd in tr.nodes] != list(range(n_in, n_in + len(tr.nodes))):
                raise ValueError("table nodes must be numbered consecutively after the leaves")

        vin, voff, vkb, flat, off = _pack_trees(luts.vn_luts, 0)
        din, doff, dkb, dflat, _ = _pack_trees(dec_trees, off)
        n_vn = max(len(luts.vn_luts), 1)
        self._vn_in = np.zeros((n_vn, dv - 1, 2), dtype=np.int64)
        self._vn_off = np.zeros((n_vn, dv - 1), dtype=np.int64)
        self._vn_kb = np.zeros((n_vn, dv - 1), dtype=np.int64)
        for s in range(len(luts.vn_luts)):
            self._vn_in[s] = vin[s]
            self._vn_off[s] = voff[s]
            self._vn_kb[s] = vkb[s]
        # row t-1 decides at iteration t; without stop tables only the last row is used
        n_it = luts.iters
        self._dec_in = np.zeros((n_it, dv, 2), dtype=np.int64)
        self._dec_off = np.zeros((n_it, dv), dtype=np.int64)
        self._dec_kb = np.zeros((n_it, dv), dtype=np.int64)
        for s in range(len(dec_trees)):
            r = n_it - len(dec_trees) + s
            self._dec_in[r] = din[s]
            self._dec_off[r] = doff[s]
            self._dec_kb[r] = dkb[s]
        self._tables = np.concatenate(flat + dflat).astype(np.int64)
        self._k_per_iter = np.asarray(alph, dtype=np.int64)

    def channel_labels(self, llrs) -> np.ndarray:
        return self.luts.quantize_channel(llrs)

    def decode_batch(self, llrs, *, trace=None):
        """Decode a (B, N) batch of channel LLRs. Returns (bits, iterations, converged).

        ``trace`` (shape (I, 2, n_edges), integer) receives frame 0's label
        indices: row 0 CN->VN, row 1 VN->CN.
        """
        L = np.asarray(llrs, dtype=np.float64)
        if L.ndim == 1:
            L = L[None, :]
        if L.ndim != 2 or L.shape[1] != self.g.n_vns:
            raise ValueError(f"expected {self.g.n_vns} channel values per frame, got shape {L.shape}")
        ch = np.ascontiguousarray(self.channel_labels(L))
        return self.decode_labels(ch, trace=trace)

    def decode_labels(self, ch, *, trace=None):
        ch = np.ascontiguousarray(np.atleast_2d(ch), dtype=np.int64)
        if trace is None:
            trace = np.zeros((0, 2, 0), dtype=np.int64)
        g = self.g
        return _kernels.lut_batch(
            ch, g.cn_ptr, g.edge_vn, g.vn_ptr, g.vn_edges, self.luts.iters, self.early_stop,
            self._k_per_iter, self._vn_in, self._vn_off, self._vn_kb,
            self._dec_in, self._dec_off, self._dec_kb, self._tables, trace)

    def decode(self, llrs):
        bits, iters, conv = self.decode_batch(np.asarray(llrs)[None, :])
        return bits[0], int(iters[0]), bool(conv[0])


def lut_decode(g: TannerGraph, llrs, luts: LutSet, early_stop: bool = False):
    """Decode one frame. Returns (codeword, iterations_used, converged)."""
    return LutDecoder(g, luts, early_stop=early_stop).decode(llrs)
