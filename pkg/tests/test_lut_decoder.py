import itertools

import numpy as np
import pytest

from reference import ref_lut_decode
from ldpc_fa.channel import ChannelParams, transmit
from ldpc_fa.code_model import build_peg_regular, is_codeword
from ldpc_fa.lut_decoder import (LabelMessage, LutDecoder, LutDegreeError, label_cn_update,
                                 lut_decode)
from ldpc_fa.lut_design import design_lut_set
from ldpc_fa.ms_decoder import DecoderConfig, MinSumDecoder, cn_update

SNR = 3.5


@pytest.fixture(scope="module")
def luts():
    return design_lut_set(3, 6, 4, 3, 5, SNR)


@pytest.fixture(scope="module")
def peg():
    return build_peg_regular(96, 3, 6, seed=3)


def lm(s):
    """'+3' / '-0' -> LabelMessage."""
    return LabelMessage(-1 if s[0] == "-" else 1, int(s[1:]))


def test_label_cn_examples():
    assert label_cn_update([lm("+3"), lm("-0"), lm("+2")]) == lm("-0")
    assert label_cn_update([lm("+3")] * 5) == lm("+3")
    assert label_cn_update([lm("-3"), lm("-1")]) == lm("+1")
    with pytest.raises(ValueError):
        label_cn_update([lm("+1")], arity=2)
    with pytest.raises(ValueError):
        LabelMessage(0, 1)


def test_label_message_index_round_trip():
    for k in range(8):
        m = LabelMessage.from_index(k, 8)
        assert m.index(8) == k
        assert (-m).index(8) == 7 - k


def test_label_cn_equals_signed_min_sum_exhaustively():
    # signed value of a label: +-(magnitude + 1/2), so -0 and +0 stay distinct
    K = 8
    for a, b in itertools.product(range(K), repeat=2):
        ma, mb = LabelMessage.from_index(a, K), LabelMessage.from_index(b, K)
        va = ma.sign * (ma.magnitude + 0.5)
        vb = mb.sign * (mb.magnitude + 0.5)
        want = cn_update([va, vb])
        got = label_cn_update([ma, mb])
        assert got.sign * (got.magnitude + 0.5) == want


def test_kernel_matches_reference(peg, luts):
    rng = np.random.default_rng(11)
    p = ChannelParams(2.5, 0.5)
    for early in (False, True):
        dec = LutDecoder(peg, luts, early_stop=early)
        for _ in range(15):
            L = transmit(np.zeros(96, np.uint8), p, rng)
            ch = dec.channel_labels(L)
            bits, it, conv = dec.decode_labels(ch[None])
            rb, rit, rconv = ref_lut_decode(peg, list(ch), luts, early)
            assert np.array_equal(bits[0], rb) and it[0] == rit and conv[0] == rconv


def test_noiseless_one_iteration(peg, luts):
    L = np.full(96, 50.0)
    bits, it, conv = lut_decode(peg, L, luts, early_stop=True)
    assert not bits.any() and it == 1 and conv
    bits, it, conv = lut_decode(peg, L, luts)
    assert not bits.any() and it == 5 and conv


def test_converged_iff_codeword(peg, luts):
    rng = np.random.default_rng(2)
    L = transmit(np.zeros((300, 96), np.uint8), ChannelParams(2.0, 0.5), rng)
    bits, it, conv = LutDecoder(peg, luts, early_stop=True).decode_batch(L)
    for b, c in zip(bits, conv):
        assert is_codeword(peg, b) == c
    assert conv.any() and not conv.all()


def test_negation_complements_everything(peg, luts):
    rng = np.random.default_rng(5)
    dec = LutDecoder(peg, luts)
    p = ChannelParams(2.0, 0.5)
    L = transmit(np.zeros((200, 96), np.uint8), p, rng)
    a, _, _ = dec.decode_batch(L)
    b, _, _ = dec.decode_batch(-L)
    assert np.array_equal(a, 1 - b)
    ta = np.zeros((5, 2, peg.n_edges), np.int64)
    tb = np.zeros_like(ta)
    dec.decode_batch(L[:1], trace=ta)
    dec.decode_batch(-L[:1], trace=tb)
    k_cn = np.array([16, 8, 8, 8, 8])[:, None]
    assert np.array_equal(ta[:, 0], k_cn - 1 - tb[:, 0])
    assert np.array_equal(ta[:4, 1], 7 - tb[:4, 1])


def test_weak_flip_decision_agrees_with_float_ms(peg, luts):
    # one weakly flipped LLR per frame; compare the two decoders' decision on that bit
    rng = np.random.default_rng(8)
    p = ChannelParams(SNR, 0.5)
    L = transmit(np.zeros((10_000, 96), np.uint8), p, rng)
    pos = rng.integers(0, 96, L.shape[0])
    rows = np.arange(L.shape[0])
    L[rows, pos] = -rng.uniform(0.05, 0.5, L.shape[0]) * p.llr_std
    a, _, _ = LutDecoder(peg, luts).decode_batch(L)
    b, _, _ = MinSumDecoder(peg, DecoderConfig(5, False)).decode_batch(L)
    assert np.mean(a[rows, pos] == b[rows, pos]) >= 0.95


def test_stop_tables_match_shorter_design(peg):
    # the stop table of iteration t equals the final decision table of an I = t design
    full = design_lut_set(3, 6, 4, 3, 4, SNR)
    for t in (1, 2, 3):
        short = design_lut_set(3, 6, 4, 3, t, SNR)
        assert full.stop_luts[t - 1] == short.decision_lut
        assert full.vn_luts[:t - 1] == short.vn_luts


def test_early_stop_requires_stop_tables(peg, luts):
    import dataclasses
    bare = dataclasses.replace(luts, stop_luts=[])
    LutDecoder(peg, bare)
    with pytest.raises(ValueError):
        LutDecoder(peg, bare, early_stop=True)


def test_alphabet_mismatch_rejected(peg, luts):
    import dataclasses
    swapped = dataclasses.replace(luts, stop_luts=[luts.decision_lut] * 4)
    with pytest.raises(ValueError):
        LutDecoder(peg, swapped, early_stop=True)


def test_degree_and_iteration_mismatch(luts):
    with pytest.raises(LutDegreeError):
        LutDecoder(build_peg_regular(64, 4, 8), luts)
    from ldpc_fa.code_model import TannerGraph
    irregular = TannerGraph.from_cn_lists(4, [[0, 1, 2], [1, 3]])
    with pytest.raises(LutDegreeError):
        LutDecoder(irregular, luts)
    with pytest.raises(ValueError):
        LutDecoder(build_peg_regular(60, 3, 6), luts, max_iters=4)


def test_llr_length_checked(peg, luts):
    with pytest.raises(ValueError):
        LutDecoder(peg, luts).decode_batch(np.zeros((2, 95)))


def test_single_iteration_set(peg):
    ls = design_lut_set(3, 6, iters=1, design_snr_db=3.0)
    L = transmit(np.zeros((50, 96), np.uint8), ChannelParams(3.0, 0.5), 1)
    dec = LutDecoder(peg, ls)
    bits, it, _ = dec.decode_batch(L)
    assert np.all(it == 1)
    ch = dec.channel_labels(L[0])
    rb, _, _ = ref_lut_decode(peg, list(ch), ls)
    assert np.array_equal(bits[0], rb)
