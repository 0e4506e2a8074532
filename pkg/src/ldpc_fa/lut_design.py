"""Offline design of finite-alphabet (LUT) variable-node decoders.

Messages are labels 0..K-1 sorted by reliability: label k < K/2 is negative
with magnitude K/2-1-k, label k >= K/2 positive with magnitude k-K/2, and
label K-1-k is the negation of k. A symmetric pmf is stored only through
p(z | bit 0); p(z | bit 1) = p(K-1-z | bit 0).

The design runs discrete density evolution under the all-zero codeword
assumption: the CN rule is min-sum on labels, and each VN update is a chain
of two-input tables, every one of them the mutual-information-optimal
quantizer of its (input, input) product alphabet.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import ndtr

from .channel import ChannelParams

FORMAT_ID = "ldpc-fa-lutset"
FORMAT_VERSION = 1
PRUNE_BELOW = 1e-300
LLR_CAP = 1e4
MI_TIE_TOL = 1e-12


class LutDesignError(RuntimeError):
    pass


class UnsortedInputError(ValueError):
    pass


def mirror(k, K):
    return K - 1 - k


def label_sign(k, K) -> int:
    return 1 if k >= K // 2 else -1


def label_magnitude(k, K) -> int:
    return k - K // 2 if k >= K // 2 else K // 2 - 1 - k


def label_index(sign: int, magnitude: int, K: int) -> int:
    if not 0 <= magnitude < K // 2:
        raise ValueError(f"magnitude {magnitude} outside alphabet of size {K}")
    return K // 2 + magnitude if sign > 0 else K // 2 - 1 - magnitude


# -- information measures -------------------------------------------------------

def _xlogy_ratio(p, q):
    # sum p*log2(p/q) with 0 log 0 = 0
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    mask = p > 0
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def mi_joint(joint) -> float:
    """I(X;Z) in bits for a joint pmf array of shape (2, Z)."""
    joint = np.asarray(joint, dtype=np.float64)
    px = joint.sum(axis=1, keepdims=True)
    pz = joint.sum(axis=0, keepdims=True)
    return _xlogy_ratio(joint, px * pz * np.ones_like(joint))


@dataclass(frozen=True, eq=False)
class MessagePmf:
    """Symmetric message distribution over ``K`` sign-magnitude labels."""

    p_given_0: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p_given_0, dtype=np.float64)
        object.__setattr__(self, "p_given_0", p)
        if p.ndim != 1 or p.size < 2 or p.size % 2:
            raise ValueError("alphabet size must be even and >= 2")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("p_given_0 must be a probability vector")

    @property
    def size(self) -> int:
        return self.p_given_0.size

    @property
    def p_given_1(self) -> np.ndarray:
        return self.p_given_0[::-1]

    @property
    def joint(self) -> np.ndarray:
        return 0.5 * np.vstack([self.p_given_0, self.p_given_1])

    def signed_meaning(self):
        """(sign, magnitude) per label."""
        K = self.size
        return [(label_sign(k, K), label_magnitude(k, K)) for k in range(K)]

    def llrs(self) -> np.ndarray:
        """Label LLRs log p(z|0)/p(z|1), capped at +-LLR_CAP, exactly odd.

        Labels of zero probability under both hypotheses inherit the LLR of
        the next label towards the middle, which keeps the vector monotone.
        """
        K = self.size
        half = K // 2
        p0 = self.p_given_0[half:]
        p1 = self.p_given_1[half:]
        with np.errstate(divide="ignore", invalid="ignore"):
            llr = np.log(p0) - np.log(p1)
        llr = np.clip(llr, -LLR_CAP, LLR_CAP)
        for k in range(half):
            if np.isnan(llr[k]):
                llr[k] = llr[k - 1] if k else 0.0
        return np.concatenate([-llr[::-1], llr])

    def is_sorted(self, tol=1e-9) -> bool:
        llr = self.llrs()
        return bool(np.all(np.diff(llr) >= -tol * (1 + np.abs(llr[1:]))))

    def mutual_information(self) -> float:
        return mutual_information(self)


def mutual_information(pmf: MessagePmf) -> float:
    """I(X;Z) in bits with an equiprobable bit and sign-symmetric p(z|1)."""
    return mi_joint(pmf.joint)


def prune(p: np.ndarray) -> np.ndarray:
    p = np.where(p < PRUNE_BELOW, 0.0, p)
    s = p.sum()
    if s <= 0:
        raise LutDesignError("all probability mass pruned")
    return p / s


# -- MI-optimal contiguous quantizer ---------------------------------------------

class Quantization(NamedTuple):
    mapping: np.ndarray   # input label -> output label
    joint: np.ndarray     # (2, k_out) pushforward
    mi: float             # bits


def check_sorted(joint, tol=1e-9):
    """Raise if labels with mass are not in non-decreasing LLR order."""
    joint = np.asarray(joint, dtype=np.float64)
    live = joint.sum(axis=0) > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = np.log(joint[0, live]) - np.log(joint[1, live])
        d = np.diff(llr)
    finite = np.isfinite(llr[1:]) & np.isfinite(llr[:-1])
    bad = np.where(finite, d < -tol * (1 + np.abs(llr[1:])), np.nan_to_num(d, nan=0.0) < 0)
    if np.any(bad):
        raise UnsortedInputError("input labels are not sorted by LLR")


def quantize_mi_optimal(joint, k_out: int, *, check=True) -> Quantization:
    """Deterministic quantizer of LLR-sorted labels maximizing I(X; output).

    Dynamic program over contiguous partitions into exactly ``k_out`` groups.
    Ties (within MI_TIE_TOL bits) go to the partition with the smallest sum
    of squared group probabilities, then to the lexicographically smallest
    boundary vector.
    """
    joint = np.asarray(joint, dtype=np.float64)
    if joint.ndim != 2 or joint.shape[0] != 2:
        raise ValueError("joint must have shape (2, Z)")
    Z = joint.shape[1]
    if k_out < 1:
        raise ValueError("k_out must be >= 1")
    if k_out > Z:
        raise ValueError(f"k_out={k_out} exceeds input alphabet size {Z}")
    if check:
        check_sorted(joint)

    bounds = _contiguous_dp(joint, k_out)
    mapping = np.zeros(Z, dtype=np.int64)
    for g, (a, b) in enumerate(zip(bounds[:-1], bounds[1:])):
        mapping[a:b] = g
    out = np.zeros((2, k_out))
    np.add.at(out.T, mapping, joint.T)
    return Quantization(mapping, out, mi_joint(out))


def _contiguous_dp(joint, K):
    Z = joint.shape[1]
    c0 = np.concatenate(([0.0], np.cumsum(joint[0])))
    c1 = np.concatenate(([0.0], np.cumsum(joint[1])))
    # group [a, b) ; cost = sum_x P(x,g) log2 P(x,g)/P(g)  (= -H(X|G) share)
    P0 = np.maximum(c0[None, :] - c0[:, None], 0.0)
    P1 = np.maximum(c1[None, :] - c1[:, None], 0.0)
    P = P0 + P1
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = np.where(P0 > 0, P0 * np.log2(P0 / P), 0.0)
        t1 = np.where(P1 > 0, P1 * np.log2(P1 / P), 0.0)
    tri = np.triu(np.ones((Z + 1, Z + 1), dtype=bool), k=1)
    cost = np.where(tri, t0 + t1, -np.inf)
    sq = np.where(tri, P * P, np.inf)

    # suffix DP: F[k][a] = best value splitting [a, Z) into k groups
    F = np.full(Z + 1, -np.inf)
    F[Z] = 0.0
    G = np.where(np.isfinite(F), 0.0, np.inf)
    choice = np.zeros((K + 1, Z + 1), dtype=np.int64)
    for k in range(1, K + 1):
        val = cost + F[None, :]
        best = val.max(axis=1)
        with np.errstate(invalid="ignore"):
            cand = (val >= best[:, None] - MI_TIE_TOL) & np.isfinite(val)
        sec = np.where(cand, sq + G[None, :], np.inf)
        sbest = sec.min(axis=1)
        cand &= sec <= sbest[:, None] + MI_TIE_TOL
        pick = np.argmax(cand, axis=1)
        rows = np.arange(Z + 1)
        ok = cand[rows, pick]
        F = np.where(ok, val[rows, pick], -np.inf)
        G = np.where(ok, sec[rows, pick], np.inf)
        choice[k] = pick
    bounds = [0]
    a = 0
    for k in range(K, 0, -1):
        a = int(choice[k][a])
        bounds.append(a)
    assert bounds[-1] == Z
    return bounds


def quantize_symmetric(p0, keys, n_out: int) -> Quantization:
    """MI-optimal odd-symmetric quantizer of a symmetric composite alphabet.

    ``p0`` is p(z|0) over composites whose mirror is ``Z-1-z``; ``keys`` are
    their exactly odd LLRs (keys[Z-1-z] == -keys[z]). Composites with positive
    key, plus the upper-index member of each zero-key pair, form the positive
    half; the DP runs there and the result is mirrored.
    """
    p0 = np.asarray(p0, dtype=np.float64)
    keys = np.asarray(keys, dtype=np.float64)
    Z = p0.size
    if n_out % 2 or n_out < 2:
        raise ValueError("n_out must be even")
    idx = np.arange(Z)
    pos = (keys > 0) | ((keys == 0) & (idx >= Z - 1 - idx))
    pos_idx = idx[pos]
    pos_idx = pos_idx[np.lexsort((pos_idx, keys[pos_idx]))]
    h = n_out // 2
    if h > pos_idx.size:
        raise LutDesignError(f"cannot form {n_out} labels from {Z} composites")
    half = np.vstack([p0[pos_idx], p0[Z - 1 - pos_idx]])
    q = quantize_mi_optimal(half, h, check=False)
    mapping = np.empty(Z, dtype=np.int64)
    mapping[pos_idx] = h + q.mapping
    mapping[Z - 1 - pos_idx] = h - 1 - q.mapping
    out0 = np.zeros(n_out)
    np.add.at(out0, mapping, p0)
    out0 /= out0.sum()
    out = MessagePmf(out0)
    return Quantization(mapping, out.joint, mutual_information(out))


# -- density evolution ------------------------------------------------------------

def cn_pmf_update(pmf: MessagePmf, d_c: int) -> MessagePmf:
    """Distribution of sign-XOR / magnitude-min over d_c-1 i.i.d. labels."""
    if d_c < 2:
        raise ValueError("d_c must be >= 2")
    n = d_c - 1
    K = pmf.size
    half = K // 2
    p = pmf.p_given_0
    pos = p[half:]             # (+, j)
    neg = p[:half][::-1]       # (-, j)
    # tail sums over magnitudes >= j, with a zero tail past the top
    tp = np.concatenate((np.cumsum(pos[::-1])[::-1], [0.0]))
    tn = np.concatenate((np.cumsum(neg[::-1])[::-1], [0.0]))
    s = tp + tn
    d = tp - tn
    g_pos = 0.5 * (s ** n + d ** n)
    g_neg = 0.5 * (s ** n - d ** n)
    out_pos = np.maximum(g_pos[:-1] - g_pos[1:], 0.0)
    out_neg = np.maximum(g_neg[:-1] - g_neg[1:], 0.0)
    out = np.concatenate((out_neg[::-1], out_pos))
    return MessagePmf(out / out.sum())


# -- LUT trees -----------------------------------------------------------------------

@dataclass(eq=False)
class LutNode:
    node_id: int
    inputs: tuple[int, int]
    out_size: int
    table: np.ndarray  # flattened, row-major over the first input

    def __eq__(self, other):
        return (isinstance(other, LutNode) and self.node_id == other.node_id
                and self.inputs == other.inputs and self.out_size == other.out_size
                and np.array_equal(self.table, other.table))


@dataclass(eq=False)
class LutTree:
    """Binary tree of two-input tables.

    Leaves are ids 0..len(input_sizes)-1; internal node ids follow in
    evaluation order and the last node is the root.
    """

    input_sizes: tuple[int, ...]
    nodes: list[LutNode]

    @property
    def out_size(self) -> int:
        return self.nodes[-1].out_size

    def sizes(self) -> dict[int, int]:
        sz = dict(enumerate(self.input_sizes))
        for nd in self.nodes:
            sz[nd.node_id] = nd.out_size
        return sz

    def validate(self):
        sz = dict(enumerate(self.input_sizes))
        for nd in self.nodes:
            a, b = nd.inputs
            if a not in sz or b not in sz:
                raise ValueError(f"node {nd.node_id} references an undefined input")
            if nd.table.shape != (sz[a] * sz[b],):
                raise ValueError(f"node {nd.node_id}: table is not total over its inputs")
            if nd.table.min(initial=0) < 0 or nd.table.max(initial=0) >= nd.out_size:
                raise ValueError(f"node {nd.node_id}: output label out of range")
            sz[nd.node_id] = nd.out_size

    def evaluate(self, *leaves):
        """Vectorized evaluation; each leaf is a label (array)."""
        if len(leaves) != len(self.input_sizes):
            raise ValueError(f"expected {len(self.input_sizes)} inputs, got {len(leaves)}")
        sz = self.sizes()
        val = {i: np.asarray(x) for i, x in enumerate(leaves)}
        for nd in self.nodes:
            a, b = nd.inputs
            val[nd.node_id] = nd.table[val[a] * sz[b] + val[b]]
        return val[self.nodes[-1].node_id]

    def __eq__(self, other):
        return (isinstance(other, LutTree) and tuple(self.input_sizes) == tuple(other.input_sizes)
                and self.nodes == other.nodes)


def _design_chain(leaf_pmfs: list[MessagePmf], inter_size: int, root_size: int):
    """Left-deep chain over the leaves; returns (tree, root output pmf)."""
    sizes = tuple(p.size for p in leaf_pmfs)
    acc = leaf_pmfs[0]
    nodes = []
    for j, nxt in enumerate(leaf_pmfs[1:]):
        is_root = j == len(leaf_pmfs) - 2
        Ka, Kb = acc.size, nxt.size
        # composite (a, b) -> a*Kb + b; its mirror is (Ka-1-a, Kb-1-b) = Z-1-z
        p0 = np.outer(acc.p_given_0, nxt.p_given_0).ravel()
        keys = (acc.llrs()[:, None] + nxt.llrs()[None, :]).ravel()
        if is_root:
            n_out = root_size
        else:
            n_out = min(inter_size, Ka * Kb)
        q = quantize_symmetric(p0, keys, n_out)
        in_a = 0 if j == 0 else len(sizes) + j - 1
        nodes.append(LutNode(len(sizes) + j, (in_a, j + 1), n_out, q.mapping))
        acc = MessagePmf(prune(q.joint[0] * 2.0))
    return LutTree(sizes, nodes), acc


def bi_awgn_channel_quantizer(p: ChannelParams, q_ch: int, n_bins: int = 2000):
    """MI-optimal symmetric 2**q_ch-level thresholds on the channel LLR.

    Returns (thresholds, pmf): ``thresholds`` holds the 2**(q_ch-1)-1
    positive boundaries in increasing order; the full set is their negation,
    zero, and themselves.
    """
    mu = p.llr_mean
    sd = p.llr_std
    hi = mu + 10 * sd
    edges = np.linspace(0.0, hi, n_bins + 1)
    cdf = lambda x: ndtr((x - mu) / sd)  # noqa: E731  P(L <= x | bit 0)
    up = np.append(edges[1:-1], np.inf)
    p0 = cdf(up) - cdf(edges[:-1])
    p1 = cdf(-edges[:-1]) - cdf(-up)   # P(L in bin | bit 1) by symmetry
    h = 2 ** (q_ch - 1)
    q = quantize_mi_optimal(np.vstack([p0, p1]), h, check=False)
    starts = np.flatnonzero(np.diff(q.mapping)) + 1
    thresholds = edges[starts]
    full = np.concatenate((-thresholds[::-1], [0.0], thresholds))
    cdf_vals = np.concatenate(([0.0], cdf(full), [1.0]))
    probs = np.diff(cdf_vals)
    return thresholds, MessagePmf(prune(probs))


def channel_labels(llrs, thresholds, q_ch: int):
    """Map LLRs to channel labels via symmetric thresholds; L >= 0 is positive."""
    L = np.asarray(llrs, dtype=np.float64)
    h = 2 ** (q_ch - 1)
    mag = np.searchsorted(thresholds, np.abs(L), side="right")
    return np.where(L >= 0, h + mag, h - 1 - mag).astype(np.int64)


@dataclass(eq=False)
class LutSet:
    d_v: int
    d_c: int
    q_ch: int
    q_msg: int
    q_int: int
    iters: int
    design_snr_db: float
    snr_kind: str
    rate: float
    channel_thresholds: np.ndarray
    vn_luts: list[LutTree]
    decision_lut: LutTree
    mi_trace: dict = field(default_factory=dict)
    # decision tables for iterations 1..I-1, used only by early stopping
    stop_luts: list[LutTree] = field(default_factory=list)

    def __eq__(self, other):
        if not isinstance(other, LutSet):
            return NotImplemented
        scal = ("d_v", "d_c", "q_ch", "q_msg", "q_int", "iters", "design_snr_db",
                "snr_kind", "rate")
        return (all(getattr(self, a) == getattr(other, a) for a in scal)
                and np.array_equal(self.channel_thresholds, other.channel_thresholds)
                and self.vn_luts == other.vn_luts and self.decision_lut == other.decision_lut
                and self.stop_luts == other.stop_luts
                and self.mi_trace == other.mi_trace)

    @property
    def channel_pmf_size(self) -> int:
        return 2 ** self.q_ch

    def quantize_channel(self, llrs):
        return channel_labels(llrs, self.channel_thresholds, self.q_ch)

    def trees(self):
        return [*self.vn_luts, self.decision_lut, *self.stop_luts]

    def message_alphabets(self) -> list[int]:
        """CN input alphabet size at iterations 1..I."""
        return [2 ** self.q_ch] + [t.out_size for t in self.vn_luts]


def design_lut_set(d_v: int, d_c: int, q_ch: int = 4, q_msg: int = 3, iters: int = 5,
                   design_snr_db: float = 2.0, *, q_int: int | None = None,
                   snr_kind: str = "ebn0", rate: float | None = None,
                   n_bins: int = 2000) -> LutSet:
    """Run discrete density evolution and build all tables.

    ``q_int`` is the bit width of intermediate tree outputs (default
    2*q_msg); it is capped by the product alphabet of each node.
    """
    if d_v < 2 or d_c < 2:
        raise ValueError("need d_v >= 2 and d_c >= 2")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if q_msg > q_ch:
        warnings.warn("q_msg > q_ch: message alphabet finer than the channel's", stacklevel=2)
    q_int = 2 * q_msg if q_int is None else q_int
    if rate is None:
        rate = 1.0 - d_v / d_c
    p = ChannelParams(design_snr_db, rate, snr_kind)
    thresholds, ch_pmf = bi_awgn_channel_quantizer(p, q_ch, n_bins)

    mi = {"channel": mutual_information(ch_pmf), "vn": [], "cn": []}
    msg = ch_pmf
    vn_luts, stop_luts = [], []
    for _ in range(1, iters):
        cn = cn_pmf_update(msg, d_c)
        mi["cn"].append(mutual_information(cn))
        stop_luts.append(_design_chain([ch_pmf] + [cn] * d_v, 2 ** q_int, 2)[0])
        tree, msg = _design_chain([ch_pmf] + [cn] * (d_v - 1), 2 ** q_int, 2 ** q_msg)
        vn_luts.append(tree)
        mi["vn"].append(mutual_information(msg))
        if mi["vn"][-1] <= 0:
            raise LutDesignError("message mutual information collapsed to zero")
    cn = cn_pmf_update(msg, d_c)
    mi["cn"].append(mutual_information(cn))
    decision, out = _design_chain([ch_pmf] + [cn] * d_v, 2 ** q_int, 2)
    mi["decision"] = mutual_information(out)
    return LutSet(d_v, d_c, q_ch, q_msg, q_int, iters, float(design_snr_db), snr_kind,
                  float(rate), thresholds, vn_luts, decision, mi, stop_luts)


# -- serialization ----------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def dump_lutset(ls: LutSet) -> str:
    out = [f"{FORMAT_ID} {FORMAT_VERSION}",
           f"d_v {ls.d_v}", f"d_c {ls.d_c}", f"q_ch {ls.q_ch}", f"q_msg {ls.q_msg}",
           f"q_int {ls.q_int}", f"iters {ls.iters}",
           f"design_snr_db {_fmt(ls.design_snr_db)}", f"snr_kind {ls.snr_kind}",
           f"rate {_fmt(ls.rate)}",
           "channel_thresholds " + " ".join(_fmt(t) for t in ls.channel_thresholds)]
    for key in ("channel", "decision"):
        if key in ls.mi_trace:
            out.append(f"mi {key} {_fmt(ls.mi_trace[key])}")
    for key in ("cn", "vn"):
        if key in ls.mi_trace:
            out.append(f"mi {key} " + " ".join(_fmt(v) for v in ls.mi_trace[key]))

    def tree(name, t: LutTree):
        out.append(f"lut {name} inputs " + " ".join(map(str, t.input_sizes))
                   + f" nodes {len(t.nodes)}")
        for nd in t.nodes:
            out.append(f"node {nd.node_id} {nd.inputs[0]} {nd.inputs[1]} {nd.out_size} : "
                       + " ".join(map(str, nd.table.tolist())))

    for t, lut in enumerate(ls.vn_luts, start=1):
        tree(f"vn{t}", lut)
    tree("decision", ls.decision_lut)
    for t, lut in enumerate(ls.stop_luts, start=1):
        tree(f"stop{t}", lut)
    out.append("end")
    return "\n".join(out) + "\n"


class LutFormatError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__((f"line {line}: " if line else "") + message)


_INT_FIELDS = ("d_v", "d_c", "q_ch", "q_msg", "q_int", "iters")
_FLOAT_FIELDS = ("design_snr_db", "rate")


def load_lutset(text: str) -> LutSet:
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines or lines[0][1][:1] != [FORMAT_ID]:
        raise LutFormatError("missing format header", 1)
    if lines[0][1][1:] != [str(FORMAT_VERSION)]:
        raise LutFormatError(f"unsupported version {' '.join(lines[0][1][1:])}", 1)
    hdr = {}
    mi = {}
    trees: list[tuple[str, LutTree]] = []
    pos = 1
    try:
        while pos < len(lines):
            lineno, toks = lines[pos]
            pos += 1
            key = toks[0]
            if key == "end":
                break
            if key == "mi":
                vals = [float(v) for v in toks[2:]]
                mi[toks[1]] = vals if toks[1] in ("cn", "vn") else vals[0]
            elif key == "lut":
                name = toks[1]
                i_in = toks.index("inputs")
                i_nodes = toks.index("nodes")
                sizes = tuple(int(v) for v in toks[i_in + 1:i_nodes])
                nodes = []
                for _ in range(int(toks[i_nodes + 1])):
                    lineno, nt = lines[pos]
                    pos += 1
                    if nt[0] != "node" or nt[5] != ":":
                        raise LutFormatError("malformed node line", lineno)
                    nodes.append(LutNode(int(nt[1]), (int(nt[2]), int(nt[3])), int(nt[4]),
                                         np.array([int(v) for v in nt[6:]], dtype=np.int64)))
                t = LutTree(sizes, nodes)
                t.validate()
                trees.append((name, t))
            elif key == "channel_thresholds":
                hdr[key] = np.array([float(v) for v in toks[1:]])
            elif key in _INT_FIELDS:
                hdr[key] = int(toks[1])
            elif key in _FLOAT_FIELDS:
                hdr[key] = float(toks[1])
            else:
                hdr[key] = toks[1]
        else:
            raise LutFormatError("missing 'end' marker", lines[-1][0])
    except (IndexError, ValueError) as exc:
        if isinstance(exc, LutFormatError):
            raise
        raise LutFormatError(str(exc), lineno) from None

    need = ("d_v", "d_c", "q_ch", "q_msg", "q_int", "iters", "design_snr_db", "snr_kind",
            "rate", "channel_thresholds")
    missing = [k for k in need if k not in hdr]
    if missing:
        raise LutFormatError(f"missing header fields: {', '.join(missing)}")
    vn = [t for name, t in trees if name.startswith("vn")]
    dec = [t for name, t in trees if name == "decision"]
    if len(dec) != 1:
        raise LutFormatError("expected exactly one decision LUT")
    ls = LutSet(hdr["d_v"], hdr["d_c"], hdr["q_ch"], hdr["q_msg"], hdr["q_int"], hdr["iters"],
                hdr["design_snr_db"], hdr["snr_kind"], hdr["rate"], hdr["channel_thresholds"],
                vn, dec[0], mi, [t for name, t in trees if name.startswith("stop")])
    if len(vn) != ls.iters - 1:
        raise LutFormatError(f"{len(vn)} VN stages for {ls.iters} iterations")
    if ls.stop_luts and len(ls.stop_luts) != ls.iters - 1:
        raise LutFormatError(f"{len(ls.stop_luts)} stop tables for {ls.iters} iterations")
    if ls.channel_thresholds.size != 2 ** (ls.q_ch - 1) - 1:
        raise LutFormatError("channel threshold count does not match q_ch")
    return ls


def save_lutset(ls: LutSet, path):
    with open(path, "w") as f:
        f.write(dump_lutset(ls))


def read_lutset(path) -> LutSet:
    with open(path) as f:
        return load_lutset(f.read())


def is_odd_symmetric(tree: LutTree) -> bool:
    """Exhaustive check that negating every leaf negates the output, node by node."""
    sz = tree.sizes()
    for nd in tree.nodes:
        a, b = nd.inputs
        Ka, Kb = sz[a], sz[b]
        t = nd.table.reshape(Ka, Kb)
        if not np.array_equal(t[::-1, ::-1], nd.out_size - 1 - t):
            return False
    return True


def binary_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)
