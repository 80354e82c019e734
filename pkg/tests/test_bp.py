"""Min-sum BP decoder units.

The strongest checks are implementation-independent: a hand-derived N=2
fixture, the sign-symmetry property of min-sum (flipping channel signs by a
codeword XORs the decision by its message word), and noiseless round trips.
A straight per-butterfly loop reference guards the vectorized sweeps.
"""

import numpy as np
import pytest

from polarbf import bp
from polarbf.bp import DecoderConfig, channel_llrs, hard_decision, minsum, run_bp, run_bp_batch
from polarbf.channel import ChannelConfig, transmit
from polarbf.polar import assemble_u, bit_reversal_permutation, construct_code, encode


def loop_iteration(L, R, N, m):
    """One flooding iteration with explicit per-butterfly loops.

    Pairs are derived from the grid description directly: between columns s
    and s+1, index j (with j mod N/2^s < N/2^(s+1)) pairs with j + N/2^(s+1).
    """
    n = N.bit_length() - 1
    for s in range(n - 1, -1, -1):
        d = N >> (s + 1)
        for j in range(N):
            if j % (2 * d) >= d:
                continue
            a, b = j, j + d
            lc, le = L[s + 1, a], L[s + 1, b]
            ra, rb = R[s, a], R[s, b]
            L[s, a] = minsum(lc, le + rb)
            L[s, b] = minsum(ra, lc) + le
        np.clip(L[s], -m, m, out=L[s])
    for s in range(n):
        d = N >> (s + 1)
        for j in range(N):
            if j % (2 * d) >= d:
                continue
            a, b = j, j + d
            lc, le = L[s + 1, a], L[s + 1, b]
            ra, rb = R[s, a], R[s, b]
            R[s + 1, a] = minsum(ra, le + rb)
            R[s + 1, b] = minsum(ra, lc) + rb
        np.clip(R[s + 1], -m, m, out=R[s + 1])
    return L, R


def test_minsum_definition(rng):
    assert minsum(3.0, -2.0) == -2.0
    assert minsum(-3.0, -2.0) == 2.0
    assert minsum(0.0, 5.0) == 0.0
    x = rng.normal(size=100)
    y = rng.normal(size=100)
    out = minsum(x, y)
    assert np.allclose(np.abs(out), np.minimum(np.abs(x), np.abs(y)))
    assert np.allclose(np.sign(out), np.sign(x) * np.sign(y))
    # odd in each argument
    assert np.allclose(minsum(-x, y), -out)
    assert np.allclose(minsum(x, -y), -out)


def test_channel_llrs_formula(rng):
    y = rng.normal(size=50)
    var = 0.63
    assert np.allclose(channel_llrs(y, var, llr_max=1e9), 2.0 * y / var)
    clipped = channel_llrs(y * 1e6, var, llr_max=100.0)
    assert np.abs(clipped).max() <= 100.0
    with pytest.raises(ValueError):
        channel_llrs(y, 0.0)


def test_decoder_config_validation():
    with pytest.raises(ValueError):
        DecoderConfig(iterations=0)
    with pytest.raises(ValueError):
        DecoderConfig(llr_max=0.0)


# -- N = 2 by hand ---------------------------------------------------------------


def test_n2_single_iteration_by_hand():
    """One stage, frozen u0: after one iteration
        L[0,0] = minsum(l0, l1),     L[0,1] = minsum(m, l0) + l1
        R[1,0] = minsum(m, l1),      R[1,1] = minsum(m, l0)
    and the information decision is the repetition rule u1 = [l0 + l1 < 0].
    """
    code = construct_code(2, 1, crc_degree=0)
    assert code.frozen_set.tolist() == [0]
    m = 100.0
    for l0, l1 in ((2.5, -1.0), (-3.0, -4.0), (0.5, 0.25), (-7.0, 7.0)):
        dec = DecoderConfig(iterations=1, llr_max=m)
        u_hat, trace, info = run_bp(np.array([l0, l1]), code, dec)
        L, R = trace[0, 0], trace[0, 1]
        assert L[0, 0] == pytest.approx(minsum(l0, l1))
        assert L[0, 1] == pytest.approx(minsum(m, l0) + l1)
        assert R[1, 0] == pytest.approx(minsum(m, l1))
        assert R[1, 1] == pytest.approx(minsum(m, l0))
        assert R[0, 0] == m and R[0, 1] == 0.0
        assert u_hat[0] == 0
        assert u_hat[1] == (1 if l0 + l1 < 0 else 0)
        assert info.tolist() == [u_hat[1]]


def test_hard_decision_tie_is_zero():
    state = bp.BPState(L=np.zeros((1, 2, 4)), R=np.zeros((1, 2, 4)))
    assert not hard_decision(state).any()


# -- vectorized sweeps vs loop reference ------------------------------------------


def test_iteration_matches_loop_reference(rng):
    for N in (4, 8, 32):
        code = construct_code(N, N // 2, crc_degree=0)
        dec = DecoderConfig(iterations=3, llr_max=10.0)
        llrs = rng.normal(scale=4.0, size=N)
        _, trace, _ = run_bp(llrs, code, dec)
        # replay with loops
        brp = bit_reversal_permutation(N)
        n = code.n
        L = np.zeros((n + 1, N))
        R = np.zeros((n + 1, N))
        L[n] = np.clip(llrs[brp], -10, 10)
        R[0][code.frozen_set] = 10.0
        for t in range(dec.iterations):
            L, R = loop_iteration(L, R, N, 10.0)
            assert np.array_equal(trace[t, 0], L), f"L mismatch at t={t}, N={N}"
            assert np.array_equal(trace[t, 1], R), f"R mismatch at t={t}, N={N}"


# -- whole-decoder properties ------------------------------------------------------


def test_noiseless_round_trip(code64, dec5, rng):
    for _ in range(20):
        payload = rng.integers(0, 2, code64.payload_len, dtype=np.uint8)
        u = assemble_u(payload, code64)
        x = encode(u, code64)
        llrs = 100.0 * (1.0 - 2.0 * x.astype(np.float64))
        u_hat, _, info = run_bp(llrs, code64, dec5)
        assert np.array_equal(u_hat, u)
        assert np.array_equal(info[: code64.payload_len], payload)


def test_sign_symmetry(code64, dec5, rng):
    """XORing the transmitted codeword by enc(v) (v supported on the
    information set) flips channel LLR signs; min-sum must respond by
    XORing its decision by v exactly."""
    for _ in range(10):
        llrs = rng.normal(scale=3.0, size=64)
        v = np.zeros(64, dtype=np.uint8)
        v[code64.info_set] = rng.integers(0, 2, 32, dtype=np.uint8)
        c = encode(v, code64)
        u1, _, _ = run_bp(llrs, code64, dec5)
        u2, _, _ = run_bp(llrs * (1.0 - 2.0 * c), code64, dec5)
        assert np.array_equal(u2, u1 ^ v)


def test_all_ones_special_case(code64, dec5, rng):
    """Global sign negation = XOR by the all-ones codeword = flip exactly
    bit N-1 of the decision."""
    llrs = rng.normal(scale=3.0, size=64)
    u1, _, _ = run_bp(llrs, code64, dec5)
    u2, _, _ = run_bp(-llrs, code64, dec5)
    diff = np.nonzero(u1 ^ u2)[0]
    assert diff.tolist() == [63]


def test_batch_matches_single(code64, dec5, rng):
    rows = rng.normal(scale=3.0, size=(7, 64))
    bu, btr, binfo = run_bp_batch(rows, code64, dec5, want_trace=True)
    for i in range(7):
        u, tr, info = run_bp(rows[i], code64, dec5)
        assert np.array_equal(bu[i], u)
        assert np.array_equal(binfo[i], info)
        assert np.array_equal(btr[i], tr)


def test_batch_flip_matches_single_flip(code64, dec5, rng):
    rows = rng.normal(scale=3.0, size=(5, 64))
    prev, _, _ = run_bp_batch(rows, code64, dec5)
    flips = np.array([15, 23, -1, 63, 31], dtype=np.int64)
    bu, _, _ = run_bp_batch(rows, code64, dec5, prev_estimates=prev, flip_positions=flips)
    for i in range(5):
        if flips[i] < 0:
            u, _, _ = run_bp(rows[i], code64, dec5)
        else:
            fdec = DecoderConfig(iterations=5, flip_set=(int(flips[i]),))
            u, _, _ = run_bp(rows[i], code64, fdec, prev_estimate=prev[i])
        assert np.array_equal(bu[i], u)


def test_flip_forces_complement(code64, dec5):
    """At moderate LLR magnitudes the saturated flip prior always wins the
    flipped position's decision."""
    chan = ChannelConfig(ebn0_db=2.0, rate=0.5, master_seed=99)
    rng = np.random.default_rng(5)
    checked = 0
    frame = 0
    while checked < 25:
        frame += 1
        payload = rng.integers(0, 2, code64.payload_len, dtype=np.uint8)
        x = encode(assemble_u(payload, code64), code64)
        _, llrs = transmit(x, chan, frame)
        u_hat, _, info = run_bp(llrs, code64, dec5)
        pos = int(code64.info_set[checked % 32])
        fdec = DecoderConfig(iterations=5, flip_set=(pos,))
        u2, _, _ = run_bp(llrs, code64, fdec, prev_estimate=u_hat)
        assert u2[pos] == 1 - u_hat[pos]
        checked += 1


def test_flip_requires_prev_estimate(code64):
    fdec = DecoderConfig(flip_set=(15,))
    with pytest.raises(ValueError):
        bp.init_priors(code64, fdec)


def test_flip_rejects_frozen_position(code64):
    frozen_pos = int(code64.frozen_set[0])
    fdec = DecoderConfig(flip_set=(frozen_pos,))
    with pytest.raises(ValueError):
        bp.init_priors(code64, fdec, np.zeros(64, np.uint8))


def test_trace_shape_and_fixed_rows(code64, rng):
    dec = DecoderConfig(iterations=4)
    llrs = rng.normal(scale=3.0, size=64)
    _, trace, _ = run_bp(llrs, code64, dec)
    assert trace.shape == (4, 2, 7, 64)
    brp = bit_reversal_permutation(64)
    expected_chan = np.clip(llrs[brp], -dec.llr_max, dec.llr_max)
    priors = bp.init_priors(code64, dec)
    for t in range(4):
        # column n of L is the channel attachment; column 0 of R the priors;
        # neither is ever rewritten by the sweeps
        assert np.array_equal(trace[t, 0, 6], expected_chan)
        assert np.array_equal(trace[t, 1, 0], priors)
    assert np.abs(trace).max() <= dec.llr_max


def test_messages_respect_clamp(code64, rng):
    dec = DecoderConfig(iterations=8, llr_max=7.5)
    llrs = rng.normal(scale=50.0, size=(3, 64))
    _, trace, _ = run_bp_batch(llrs, code64, dec, want_trace=True)
    assert np.abs(trace).max() <= 7.5
    assert np.isfinite(trace).all()


def test_decode_is_deterministic(code64, dec5, rng):
    llrs = rng.normal(scale=3.0, size=64)
    a = run_bp(llrs, code64, dec5)
    b = run_bp(llrs, code64, dec5)
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1])


def test_more_snr_fewer_errors(code64, dec5):
    """Crude decoding-gain smoke: same payloads, higher SNR, fewer failures."""
    errors = {}
    for ebn0 in (0.0, 3.0):
        chan = ChannelConfig(ebn0_db=ebn0, rate=0.5, master_seed=1234)
        rng = np.random.default_rng(77)
        bad = 0
        for frame in range(120):
            payload = rng.integers(0, 2, code64.payload_len, dtype=np.uint8)
            u = assemble_u(payload, code64)
            x = encode(u, code64)
            _, llrs = transmit(x, chan, frame)
            u_hat, _, _ = run_bp(llrs, code64, dec5)
            bad += not np.array_equal(u_hat, u)
        errors[ebn0] = bad
    assert errors[3.0] < errors[0.0]


# -- trace files -------------------------------------------------------------------


def test_trace_save_load_round_trip(code16, tmp_path, rng):
    dec = DecoderConfig(iterations=3)
    _, trace, _ = run_bp(rng.normal(scale=3.0, size=16), code16, dec)
    path = tmp_path / "frame.pbpt"
    bp.save_trace(path, trace)
    loaded = bp.load_trace(path)
    assert loaded.dtype == np.float32
    assert loaded.shape == trace.shape
    assert np.array_equal(loaded, trace.astype(np.float32))


def test_load_trace_rejects_corruption(code16, tmp_path, rng):
    dec = DecoderConfig(iterations=2)
    _, trace, _ = run_bp(rng.normal(size=16), code16, dec)
    path = tmp_path / "frame.pbpt"
    bp.save_trace(path, trace)
    blob = path.read_bytes()
    (tmp_path / "bad_magic.pbpt").write_bytes(b"XXXX" + blob[4:])
    with pytest.raises(ValueError):
        bp.load_trace(tmp_path / "bad_magic.pbpt")
    (tmp_path / "truncated.pbpt").write_bytes(blob[:-8])
    with pytest.raises(ValueError):
        bp.load_trace(tmp_path / "truncated.pbpt")
