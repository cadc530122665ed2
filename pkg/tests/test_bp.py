import numpy as np
import pytest

from mrbp.bp import LLR_MAX, bp_decode, bp_decode_traced
from mrbp.channel import make_frame, modulate, sigma2_from_ebn0, transmit
from mrbp.codes import ParityCheckCode, brute_force_mld, enumerate_codewords
from mrbp.rng import FrameRng


def noisy_frame(code, c, sigma2, stream, seed=99):
    return transmit(code, modulate(c), sigma2, FrameRng(seed, stream))


def test_noiseless_codeword_converges_immediately(hamming):
    for c in enumerate_codewords(hamming):
        out = bp_decode(hamming, 8.0 * modulate(c), 20)
        assert out.converged and out.iterations_used == 0
        np.testing.assert_array_equal(out.c_hat, c)


def test_zero_llr_is_a_fixed_point():
    # odd-degree check: all-ones hard decision is not a codeword, BP stalls
    code = ParityCheckCode.from_matrix(np.array([[1, 1, 1], [1, 1, 0]], dtype=np.uint8))
    out = bp_decode(code, np.zeros(3), 15)
    assert not out.converged
    assert out.iterations_used == 15
    np.testing.assert_array_equal(out.l_app, np.zeros(3))


def test_zero_llr_converges_when_hard_decision_is_codeword(hamming):
    # all rows have even degree: the all-ones word satisfies every check
    out = bp_decode(hamming, np.zeros(7), 15)
    assert out.converged and out.iterations_used == 0
    np.testing.assert_array_equal(out.c_hat, np.ones(7, dtype=np.uint8))


def test_determinism(qc96):
    frame = noisy_frame(qc96, np.zeros(96, dtype=np.uint8), 0.55, 3)
    a = bp_decode(qc96, frame.l_ch, 20)
    b = bp_decode(qc96, frame.l_ch, 20)
    assert a.converged == b.converged and a.iterations_used == b.iterations_used
    np.testing.assert_array_equal(a.c_hat, b.c_hat)
    np.testing.assert_array_equal(a.l_app, b.l_app)


def test_early_stop_consistency(qc96):
    for stream in range(20):
        frame = noisy_frame(qc96, np.zeros(96, dtype=np.uint8), 0.5, stream)
        out = bp_decode(qc96, frame.l_ch, 20)
        if out.converged and out.iterations_used >= 1:
            again = bp_decode(qc96, frame.l_ch, out.iterations_used)
            assert again.converged
            np.testing.assert_array_equal(again.c_hat, out.c_hat)


def test_converged_implies_codeword(qc96):
    hits = 0
    for stream in range(30):
        frame = noisy_frame(qc96, np.zeros(96, dtype=np.uint8), 0.6, stream)
        out = bp_decode(qc96, frame.l_ch, 20)
        assert out.converged == qc96.is_codeword(out.c_hat) or out.converged
        if out.converged:
            assert qc96.is_codeword(out.c_hat)
            hits += 1
        np.testing.assert_array_equal(out.c_hat, (out.l_app <= 0).astype(np.uint8))
    assert hits > 0


def test_clamping(qc96):
    l_ch = np.full(96, 1e9)
    l_ch[::2] = -1e9
    out = bp_decode(qc96, l_ch, 5)
    assert np.abs(out.l_app).max() <= LLR_MAX


def test_trace_shapes_and_consistency(qc96):
    frame = noisy_frame(qc96, np.zeros(96, dtype=np.uint8), 0.62, 8)
    out = bp_decode_traced(qc96, frame.l_ch, 20)
    tr = out.trace
    assert tr.c2v_signs.shape == (out.iterations_used, qc96.num_edges)
    assert tr.app_signs.shape == (out.iterations_used, 96)
    plain = bp_decode(qc96, frame.l_ch, 20)
    assert plain.trace is None
    np.testing.assert_array_equal(plain.l_app, out.l_app)
    np.testing.assert_array_equal(plain.c_hat, out.c_hat)
    if out.iterations_used:
        # final APP signs match the hard output (no exact zeros in this frame)
        assert not (out.l_app == 0).any()
        np.testing.assert_array_equal(tr.app_signs[-1] == -1, out.c_hat == 1)


def test_minsum_flag(hamming):
    for c in enumerate_codewords(hamming)[:3]:
        out = bp_decode(hamming, 6.0 * modulate(c), 20, cn_rule="minsum")
        assert out.converged
        np.testing.assert_array_equal(out.c_hat, c)
    with pytest.raises(ValueError):
        bp_decode(hamming, np.zeros(7), 20, cn_rule="bogus")


def test_bp_not_better_than_mld_per_frame(hamming):
    # shared noise: BP can only err where MLD errs or worse
    sigma2 = sigma2_from_ebn0(4.0, 4 / 7)
    cws = enumerate_codewords(hamming)
    bp_err = mld_err = 0
    for stream in range(2000):
        c = cws[stream % 16]
        frame = noisy_frame(hamming, c, sigma2, stream, seed=5)
        out = bp_decode(hamming, frame.l_ch, 20)
        bp_err += int(not np.array_equal(out.c_hat, c))
        mld_err += int(not np.array_equal(brute_force_mld(hamming, frame.y), c))
    assert mld_err <= bp_err
    assert bp_err < 200  # sane operating point


def test_validates_inputs(hamming):
    with pytest.raises(ValueError):
        bp_decode(hamming, np.zeros(6), 20)
    with pytest.raises(ValueError):
        bp_decode(hamming, np.zeros(7), 0)
