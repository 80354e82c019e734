"""Bit-flipping around a failed BP decode.

When plain BP produces an information word that fails its CRC, a second
chance comes from re-running BP with one information bit's prior saturated
to the complement of the first estimate.  The candidates for that flip come
either from the critical set (the lowest-index leaf of every maximal
all-information subtree, tried least-reliable first) or from a trained
predictor scoring every information position from the decoder trace.

All re-decodes start from the ORIGINAL plain-BP estimate, never from an
intermediate attempt, and stop at the first CRC pass.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import bp
from .features import build_input_tensor
from .polar import bhattacharyya_parameters, crc_check


def build_critical_set(config):
    """Lowest-index leaf of every maximal rate-1 (all-information) subtree.

    Returns a sorted int64 array; empty when every position is frozen.
    """
    info = np.zeros(config.N, dtype=bool)
    info[config.info_set] = True
    frozen_counts = [(~info).astype(np.int64)]
    while frozen_counts[-1].size > 1:
        prev = frozen_counts[-1]
        frozen_counts.append(prev[0::2] + prev[1::2])
    out = []

    def walk(level, block):
        if frozen_counts[level][block] == 0:
            out.append(block << level)
            return
        if level == 0:
            return
        walk(level - 1, 2 * block)
        walk(level - 1, 2 * block + 1)

    walk(len(frozen_counts) - 1, 0)
    return np.array(sorted(out), dtype=np.int64)


def cs_attempt_order(config, critical_set=None, order="reliability"):
    """Critical-set indices in flip-attempt order.

    "reliability" tries the least reliable member first (largest
    Bhattacharyya parameter, ties broken by ascending index); "index" tries
    ascending positions.
    """
    cs = build_critical_set(config) if critical_set is None else critical_set
    if order == "index":
        return np.sort(cs)
    if order != "reliability":
        raise ValueError(f"unknown attempt order {order!r}")
    z = bhattacharyya_parameters(config.N, config.design_param)[cs]
    return cs[np.argsort(-z, kind="stable")]


def flip_order(scores):
    """Candidate order for predictor scores: descending, ties by index."""
    scores = np.asarray(scores)
    if scores.ndim != 1:
        raise ValueError("scores must be one-dimensional")
    return np.argsort(-scores, kind="stable")


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of a flip-assisted decode.

    attempts counts flip re-decodes only (0 when plain BP already passed);
    u_hat / info_bits are the final estimate, which on failure is the last
    attempt's output.
    """

    passed: bool
    attempts: int
    u_hat: np.ndarray
    info_bits: np.ndarray


def _attempt_flip(channel_row, config, dec, position, prev_estimate):
    flip_dec = replace(dec, flip_set=(int(position),))
    u_hat, _, info = bp.run_bp(
        channel_row, config, flip_dec, prev_estimate=prev_estimate, want_trace=False
    )
    return u_hat, info


def _try_candidates(channel_row, config, dec, candidates, t_max, prev_estimate):
    u_hat, info = prev_estimate, prev_estimate[config.info_set]
    attempts = 0
    for position in candidates[: max(t_max, 0)]:
        attempts += 1
        u_hat, info = _attempt_flip(channel_row, config, dec, position, prev_estimate)
        if crc_check(info, config.crc_poly):
            return DecodeOutcome(True, attempts, u_hat, info)
    return DecodeOutcome(False, attempts, u_hat, info)


def cs_bf_decode(channel_row, config, dec, t_max, order="reliability"):
    """Plain BP, then critical-set flips until CRC passes or budget runs out."""
    if t_max < 0:
        raise ValueError(f"t_max must be >= 0, got {t_max}")
    u_hat, _, info = bp.run_bp(channel_row, config, dec, want_trace=False)
    if crc_check(info, config.crc_poly):
        return DecodeOutcome(True, 0, u_hat, info)
    candidates = cs_attempt_order(config, order=order)
    return _try_candidates(channel_row, config, dec, candidates, t_max, u_hat)


def cnn_bf_decode(channel_row, config, dec, model, t_max, clip=30.0):
    """Plain BP, then predictor-ordered flips until CRC passes or budget ends.

    ``model`` needs a ``predict(batch) -> (B, K)`` method scoring every
    information position; scores are computed once from the plain-BP trace
    and candidates are tried in descending-score order.
    """
    if t_max < 0:
        raise ValueError(f"t_max must be >= 0, got {t_max}")
    u_hat, trace, info = bp.run_bp(channel_row, config, dec, want_trace=True)
    if crc_check(info, config.crc_poly):
        return DecodeOutcome(True, 0, u_hat, info)
    tensor = build_input_tensor(trace, clip=clip)
    scores = np.asarray(model.predict(tensor[None]))[0]
    if scores.shape != (config.K,):
        raise ValueError(
            f"model scored {scores.shape} positions, expected ({config.K},)"
        )
    candidates = config.info_set[flip_order(scores)]
    return _try_candidates(channel_row, config, dec, candidates, t_max, u_hat)


def label_frame(channel_row, config, dec):
    """Exhaustive single-flip labels for one frame.

    Runs plain BP; returns None when the frame already passes CRC.
    Otherwise returns (labels, u_hat) where labels[k] == 1 iff flipping the
    k-th information position (ascending info_set order) and re-decoding
    passes the CRC.
    """
    u_hat, _, info = bp.run_bp(channel_row, config, dec, want_trace=False)
    if crc_check(info, config.crc_poly):
        return None
    labels = np.zeros(config.K, dtype=np.uint8)
    for k, position in enumerate(config.info_set):
        _, flipped_info = _attempt_flip(channel_row, config, dec, position, u_hat)
        labels[k] = crc_check(flipped_info, config.crc_poly)
    return labels, u_hat


def label_frames_batch(channel_rows, config, dec, u_hats):
    """Labels for a batch of frames already known to fail CRC.

    One batched re-decode per information position: labels[i, k] == 1 iff
    flipping info position k of frame i passes the CRC.
    """
    rows = np.asarray(channel_rows)
    B = rows.shape[0]
    labels = np.zeros((B, config.K), dtype=np.uint8)
    for k, position in enumerate(config.info_set):
        flips = np.full(B, position, dtype=np.int64)
        _, _, info = bp.run_bp_batch(
            rows, config, dec, prev_estimates=u_hats, flip_positions=flips
        )
        labels[:, k] = [crc_check(info[i], config.crc_poly) for i in range(B)]
    return labels


def run_flip_attempts(channel_rows, config, dec, candidates, t_max, u_hats):
    """Batched flip sequences for frames whose plain BP failed.

    Parameters
    ----------
    candidates : ndarray (B, C) of int64
        Per-frame candidate positions in attempt order, -1 padding for
        exhausted lists (rows may have fewer than C real candidates).
    u_hats : ndarray (B, N)
        Plain-BP estimates; every attempt re-initializes from these.

    Returns
    -------
    dict with per-frame arrays:
        pass_attempt  : attempt number of the first CRC pass, 0 = never
        attempts_used : re-decodes consumed (= pass_attempt when passed,
                        else the number of real candidates tried, <= t_max)
        final_info    : info bits of the passing attempt, or of the last
                        attempt tried (plain-BP info bits if no candidates)
    """
    rows = np.asarray(channel_rows)
    B = rows.shape[0]
    candidates = np.asarray(candidates, dtype=np.int64)
    pass_attempt = np.zeros(B, dtype=np.int64)
    attempts_used = np.zeros(B, dtype=np.int64)
    final_info = u_hats[:, config.info_set].astype(np.uint8).copy()
    active = np.arange(B)
    for t in range(min(t_max, candidates.shape[1])):
        cand_t = candidates[active, t]
        live = active[cand_t >= 0]
        if live.size == 0:
            break
        _, _, info = bp.run_bp_batch(
            rows[live],
            config,
            dec,
            prev_estimates=u_hats[live],
            flip_positions=candidates[live, t],
        )
        attempts_used[live] += 1
        final_info[live] = info
        passed = np.array(
            [crc_check(info[i], config.crc_poly) for i in range(live.size)],
            dtype=bool,
        )
        pass_attempt[live[passed]] = t + 1
        # Frames with a -1 candidate here are exhausted for good (padding
        # sits at the tail), so only the still-failing live frames go on.
        active = live[~passed]
        if active.size == 0:
            break
    return {
        "pass_attempt": pass_attempt,
        "attempts_used": attempts_used,
        "final_info": final_info,
    }
