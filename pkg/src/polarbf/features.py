"""Decoder-trace features for the flip predictor.

A BP trace (T iterations of L and R snapshots over the (n+1) x N grid) is
folded into a 4T-channel image: for each iteration, in order, the channels
are |L| clipped and scaled to [0, 1], sign(L) in {-1, 0, +1}, then the same
two for R.  The image height is n+1 and the width N, so the network sees the
whole message history of a frame at once.
"""

import numpy as np


def build_input_tensor(trace, clip=30.0):
    """Fold a trace into a float32 (4T, n+1, N) feature image.

    Accepts a single trace (T, 2, n+1, N) or a batch (B, T, 2, n+1, N) and
    returns (4T, H, W) or (B, 4T, H, W) accordingly.
    """
    trace = np.asarray(trace)
    if trace.ndim not in (4, 5) or trace.shape[-3] != 2:
        raise ValueError(
            f"trace must be (T, 2, n+1, N) or batched, got {trace.shape}"
        )
    if trace.shape[-4] == 0 or trace.size == 0:
        raise ValueError("empty trace")
    if not clip > 0:
        raise ValueError(f"clip must be positive, got {clip}")
    mag = np.minimum(np.abs(trace), clip) / clip
    sgn = np.sign(trace)
    # (..., T, 2, H, W) -> (..., T, 2, 2, H, W): feature axis after message
    # type, so row-major flattening yields L_abs, L_sign, R_abs, R_sign per t.
    feats = np.stack([mag, sgn], axis=-3).astype(np.float32)
    lead = trace.shape[:-4]
    T = trace.shape[-4]
    H, W = trace.shape[-2:]
    return feats.reshape(lead + (4 * T, H, W))
