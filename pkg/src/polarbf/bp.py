"""Min-sum belief propagation over the polar code factor graph.

The graph has n+1 columns of N nodes.  Column 0 carries the priors on u,
column n the channel values; between columns s and s+1 sit N/2 butterflies
pairing index j with j + N/2**(s+1).  Left-going messages L and right-going
messages R live on the same grid, stored as float64 arrays with shape
(..., n+1, N) so a leading batch axis is supported everywhere.

One iteration is a full L sweep (column n-1 down to 0) followed by a full R
sweep (column 1 up to n); each update reads the currently stored values, and
all messages are clamped to [-llr_max, llr_max] after every column update.
Saturated values stand in for the infinities of the idealised algorithm.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .polar import bit_reversal_permutation

LLR_MAX_DEFAULT = 100.0


@dataclass(frozen=True)
class DecoderConfig:
    """Decode-time knobs.

    flip_set lists information-bit indices whose column-0 prior is forced to
    the saturated complement of a previous hard decision (supplied separately
    to :func:`init_priors` / :func:`run_bp` as ``prev_estimate``).
    """

    iterations: int = 5
    llr_max: float = LLR_MAX_DEFAULT
    flip_set: tuple = ()

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not self.llr_max > 0:
            raise ValueError(f"llr_max must be positive, got {self.llr_max}")


@dataclass
class BPState:
    """Live message arrays; owned by a single decode call, never shared."""

    L: np.ndarray
    R: np.ndarray


@lru_cache(maxsize=None)
def _stage_pairs(N):
    """Per-stage (top, bot) index arrays: stage s pairs j with j + N/2**(s+1)."""
    n = N.bit_length() - 1
    pairs = []
    for s in range(n):
        d = N >> (s + 1)
        top = np.nonzero((np.arange(N) & d) == 0)[0]
        pairs.append((top, top + d))
    return pairs


def minsum(x, y):
    """sign(x) * sign(y) * min(|x|, |y|), with sign(0) = 0."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return np.sign(x) * np.sign(y) * np.minimum(np.abs(x), np.abs(y))


def channel_llrs(y, noise_var, llr_max=LLR_MAX_DEFAULT):
    """LLRs of BPSK observations under AWGN: 2y / sigma^2, clamped."""
    if not noise_var > 0:
        raise ValueError(f"noise variance must be positive, got {noise_var}")
    llr = 2.0 * np.asarray(y, dtype=np.float64) / noise_var
    return np.clip(llr, -llr_max, llr_max)


def init_priors(config, dec, prev_estimate=None):
    """Column-0 prior row for one frame.

    Frozen positions get +llr_max, information positions 0; positions in
    ``dec.flip_set`` get llr_max * (2*u_hat - 1), the saturated prior that
    pushes the hard decision to the complement of ``prev_estimate``.
    """
    row = np.zeros(config.N, dtype=np.float64)
    row[config.frozen_set] = dec.llr_max
    if dec.flip_set:
        if prev_estimate is None:
            raise ValueError("flip_set given but prev_estimate missing")
        prev = np.asarray(prev_estimate)
        if prev.shape != (config.N,):
            raise ValueError(
                f"prev_estimate must cover all {config.N} positions, got {prev.shape}"
            )
        info = set(config.info_set.tolist())
        for j in dec.flip_set:
            if j not in info:
                raise ValueError(f"flip index {j} is not an information position")
            row[j] = dec.llr_max * (2.0 * prev[j] - 1.0)
    return row


def _flip_prior_rows(config, dec, flip_positions, prev_estimates):
    """Batched priors: one flip position per frame (-1 for no flip)."""
    B = flip_positions.shape[0]
    rows = np.zeros((B, config.N), dtype=np.float64)
    rows[:, config.frozen_set] = dec.llr_max
    active = np.nonzero(flip_positions >= 0)[0]
    j = flip_positions[active]
    rows[active, j] = dec.llr_max * (2.0 * prev_estimates[active, j] - 1.0)
    return rows


def _init_state(config, dec, channel_rows, prior_rows):
    N = config.N
    n = config.n
    shape = channel_rows.shape[:-1] + (n + 1, N)
    L = np.zeros(shape, dtype=np.float64)
    R = np.zeros(shape, dtype=np.float64)
    brp = bit_reversal_permutation(N)
    # Codeword bit j sits at the bit-reversed column-n position, so the
    # channel row attaches through the same permutation the encoder applied.
    L[..., n, :] = np.clip(channel_rows[..., brp], -dec.llr_max, dec.llr_max)
    R[..., 0, :] = prior_rows
    return BPState(L=L, R=R)


def bp_iterate(state, config, dec):
    """One flooding iteration, in place: L sweep then R sweep."""
    L, R = state.L, state.R
    m = dec.llr_max
    for s in range(config.n - 1, -1, -1):
        top, bot = _stage_pairs(config.N)[s]
        Lc = L[..., s + 1, top]
        Le = L[..., s + 1, bot]
        Ra = R[..., s, top]
        Rb = R[..., s, bot]
        L[..., s, top] = minsum(Lc, Le + Rb)
        L[..., s, bot] = minsum(Ra, Lc) + Le
        np.clip(L[..., s, :], -m, m, out=L[..., s, :])
    for s in range(config.n):
        top, bot = _stage_pairs(config.N)[s]
        Ra = R[..., s, top]
        Rb = R[..., s, bot]
        Lc = L[..., s + 1, top]
        Le = L[..., s + 1, bot]
        R[..., s + 1, top] = minsum(Ra, Le + Rb)
        R[..., s + 1, bot] = minsum(Ra, Lc) + Rb
        np.clip(R[..., s + 1, :], -m, m, out=R[..., s + 1, :])
    return state


def hard_decision(state):
    """Eq.-style decision on column 0: bit = 0 iff L + R >= 0."""
    total = state.L[..., 0, :] + state.R[..., 0, :]
    return (total < 0).astype(np.uint8)


def run_bp(channel_row, config, dec, prev_estimate=None, want_trace=True):
    """Decode one frame.

    Parameters
    ----------
    channel_row : ndarray, shape (N,)
        Channel LLRs in transmitted (codeword) index order.
    config : CodeConfig
    dec : DecoderConfig
    prev_estimate : ndarray or None
        Length-N previous hard decision; required when dec.flip_set is set.
    want_trace : bool
        When True, record a snapshot of (L, R) after every iteration.

    Returns
    -------
    (u_hat, trace, info_bits)
        u_hat   : length-N hard decisions after the final iteration
        trace   : float64 array (T, 2, n+1, N) of per-iteration snapshots
                  (index 0 = L, 1 = R), or None when want_trace is False
        info_bits : u_hat restricted to config.info_set, ascending
    """
    channel_row = np.asarray(channel_row, dtype=np.float64)
    if channel_row.shape != (config.N,):
        raise ValueError(f"channel_row must have shape ({config.N},)")
    priors = init_priors(config, dec, prev_estimate)
    state = _init_state(config, dec, channel_row, priors)
    T = dec.iterations
    trace = (
        np.empty((T, 2, config.n + 1, config.N), dtype=np.float64)
        if want_trace
        else None
    )
    for t in range(T):
        bp_iterate(state, config, dec)
        if want_trace:
            trace[t, 0] = state.L
            trace[t, 1] = state.R
    u_hat = hard_decision(state)
    return u_hat, trace, u_hat[config.info_set]


def run_bp_batch(
    channel_rows,
    config,
    dec,
    prev_estimates=None,
    flip_positions=None,
    want_trace=False,
):
    """Decode a batch of frames at once.

    flip_positions, when given, is a per-frame flip index (-1 = plain decode
    for that frame) applied with ``prev_estimates`` exactly like a
    single-element flip_set.  Results are identical to frame-by-frame
    :func:`run_bp` calls; batching only vectorizes the sweeps.

    Returns (u_hat (B, N), trace (B, T, 2, n+1, N) or None, info_bits (B, K)).
    """
    rows = np.asarray(channel_rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != config.N:
        raise ValueError(f"channel_rows must have shape (B, {config.N})")
    B = rows.shape[0]
    if flip_positions is None:
        priors = np.tile(init_priors(config, dec), (B, 1))
    else:
        flip_positions = np.asarray(flip_positions, dtype=np.int64)
        if prev_estimates is None:
            raise ValueError("flip_positions given but prev_estimates missing")
        priors = _flip_prior_rows(config, dec, flip_positions, prev_estimates)
    state = _init_state(config, dec, rows, priors)
    T = dec.iterations
    trace = (
        np.empty((B, T, 2, config.n + 1, config.N), dtype=np.float64)
        if want_trace
        else None
    )
    for t in range(T):
        bp_iterate(state, config, dec)
        if want_trace:
            trace[:, t, 0] = state.L
            trace[:, t, 1] = state.R
    u_hat = hard_decision(state)
    return u_hat, trace, u_hat[:, config.info_set]


TRACE_MAGIC = b"PBPT"
TRACE_VERSION = 1


def save_trace(path, trace):
    """Dump one frame's trace: header (magic, version, N, n, T) + float32 data."""
    trace = np.asarray(trace)
    if trace.ndim != 4 or trace.shape[1] != 2:
        raise ValueError("trace must have shape (T, 2, n+1, N)")
    T, _, rows, N = trace.shape
    header = np.array([TRACE_VERSION, N, rows - 1, T], dtype="<u4")
    with open(path, "wb") as fh:
        fh.write(TRACE_MAGIC)
        fh.write(header.tobytes())
        fh.write(trace.astype("<f4").tobytes())


def load_trace(path):
    """Read a trace dump; returns a float32 array (T, 2, n+1, N)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != TRACE_MAGIC:
            raise ValueError(f"bad trace magic {magic!r}")
        version, N, n, T = np.frombuffer(fh.read(16), dtype="<u4")
        if version != TRACE_VERSION:
            raise ValueError(f"unsupported trace version {version}")
        data = np.frombuffer(fh.read(), dtype="<f4")
    expect = T * 2 * (n + 1) * N
    if data.size != expect:
        raise ValueError(f"trace payload has {data.size} floats, expected {expect}")
    return data.reshape(T, 2, n + 1, N).copy()
