"""BPSK over AWGN with reproducible per-frame noise streams.

Bit 0 maps to +1.  The SNR knob is Eb/N0 in dB by default, so the noise
variance accounts for the code rate; set ``es_n0`` to interpret the same
number as Es/N0 instead.  Every frame draws from its own generator seeded by
(master_seed, frame_index), which makes results independent of batching and
worker scheduling.
"""

from dataclasses import dataclass

import numpy as np

from .bp import LLR_MAX_DEFAULT

# Third seed word separating draw purposes within one frame's stream.
NOISE_STREAM = 0
PAYLOAD_STREAM = 1


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    rate: float
    master_seed: int
    es_n0: bool = False
    noiseless: bool = False

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")


def noise_sigma(cfg):
    """Noise standard deviation for unit-energy BPSK symbols."""
    snr_lin = 10.0 ** (cfg.ebn0_db / 10.0)
    var = 1.0 / (2.0 * snr_lin) if cfg.es_n0 else 1.0 / (2.0 * cfg.rate * snr_lin)
    return float(np.sqrt(var))


def frame_rng(master_seed, frame_index, stream=NOISE_STREAM):
    """Generator for one frame's draws; fully determined by its arguments."""
    return np.random.default_rng([master_seed, frame_index, stream])


def transmit(codeword, cfg, frame_index, llr_max=LLR_MAX_DEFAULT):
    """Modulate, add noise, and compute channel LLRs for one frame.

    Returns
    -------
    (y, llrs)
        y    : float64 received samples, length N
        llrs : float32 channel LLRs 2y/sigma^2 clamped to [-llr_max, llr_max]
               (float32 is the dataset storage type; decoding this exact
               vector is what makes stored frames bit-reproducible)
    """
    bits = np.asarray(codeword, dtype=np.uint8)
    s = 1.0 - 2.0 * bits.astype(np.float64)
    if cfg.noiseless:
        y = s
        llrs = (llr_max * s).astype(np.float32)
        return y, llrs
    sigma = noise_sigma(cfg)
    rng = frame_rng(cfg.master_seed, frame_index, NOISE_STREAM)
    y = s + sigma * rng.standard_normal(bits.size)
    llrs = np.clip(2.0 * y / (sigma * sigma), -llr_max, llr_max)
    return y, llrs.astype(np.float32)


def transmit_batch(codewords, cfg, frame_indices, llr_max=LLR_MAX_DEFAULT):
    """Per-frame :func:`transmit` over a batch; streams stay per-frame."""
    codewords = np.asarray(codewords, dtype=np.uint8)
    B, N = codewords.shape
    y = np.empty((B, N), dtype=np.float64)
    llrs = np.empty((B, N), dtype=np.float32)
    for i in range(B):
        y[i], llrs[i] = transmit(codewords[i], cfg, int(frame_indices[i]), llr_max)
    return y, llrs


def random_payloads(master_seed, frame_indices, payload_len):
    """Per-frame payload bits from the payload sub-stream."""
    out = np.empty((len(frame_indices), payload_len), dtype=np.uint8)
    for i, fi in enumerate(frame_indices):
        rng = frame_rng(master_seed, int(fi), PAYLOAD_STREAM)
        out[i] = rng.integers(0, 2, payload_len, dtype=np.uint8)
    return out
