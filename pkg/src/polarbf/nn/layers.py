"""Building blocks for the flip-prediction network.

Everything here is plain numpy.  Layers are small classes holding their
parameters (float32 by default, float64 available for gradient checking)
plus a ``forward(x)`` / ``backward(grad_out)`` pair; ``forward`` stashes
whatever the backward pass needs on the instance, so one layer object
serves one forward/backward round at a time.  Batches travel in the
leading axis throughout.

Convolutions are stride-1 cross-correlations with zero "same" padding,
implemented as im2col + a single GEMM; the input gradient is scattered
back with one slice-add per kernel tap.
"""

import numpy as np

BCE_EPS = 1e-7


def relu(x):
    """max(0, x) elementwise."""
    return np.maximum(x, 0.0)


def sigmoid(x):
    """Numerically stable logistic function."""
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def bce_loss(labels, probs):
    """Mean binary cross-entropy over every element of the batch.

    Probabilities are clamped to [BCE_EPS, 1 - BCE_EPS] before the logs;
    the reduction runs in float64 regardless of storage dtype.
    """
    p = np.clip(probs.astype(np.float64), BCE_EPS, 1.0 - BCE_EPS)
    b = labels.astype(np.float64)
    per_element = b * np.log(p) + (1.0 - b) * np.log1p(-p)
    return -per_element.mean()


def bce_logit_grad(labels, probs):
    """Gradient of :func:`bce_loss` w.r.t. the pre-sigmoid logits.

    The sigmoid and cross-entropy derivatives fuse to (p - b) / n, which
    stays finite even when the sigmoid saturates.
    """
    n = probs.size
    return (probs - labels.astype(probs.dtype)) / n


class Dense:
    """Affine map ``x @ W + b`` for inputs of shape (batch, fan_in)."""

    def __init__(self, fan_in, fan_out, rng, init="he", dtype=np.float32):
        if init == "he":
            limit = np.sqrt(6.0 / fan_in)
        elif init == "glorot":
            limit = np.sqrt(6.0 / (fan_in + fan_out))
        else:
            raise ValueError(f"unknown init {init!r}")
        self.W = rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(dtype)
        self.b = np.zeros(fan_out, dtype=dtype)
        self._x = None

    def forward(self, x):
        self._x = x
        return x @ self.W + self.b

    def backward(self, grad_out):
        self.gW = (self._x.T @ grad_out).astype(self.W.dtype)
        self.gb = grad_out.sum(axis=0, dtype=np.float64).astype(self.b.dtype)
        return grad_out @ self.W.T

    def parameters(self):
        return [("W", self.W), ("b", self.b)]

    def gradients(self):
        return [("W", self.gW), ("b", self.gb)]


class Conv2D:
    """Stride-1 same-padded cross-correlation.

    Weights have shape (filters, in_channels, kh, kw); inputs are
    (batch, in_channels, H, W) and outputs (batch, filters, H, W).
    Odd kernel sides keep "same" unambiguous; that is all the network
    uses, so even sides are rejected outright.
    """

    def __init__(self, in_channels, filters, kernel, rng, dtype=np.float32):
        kh, kw = kernel
        if kh % 2 == 0 or kw % 2 == 0:
            raise ValueError(f"kernel sides must be odd, got {kernel}")
        fan_in = in_channels * kh * kw
        limit = np.sqrt(6.0 / fan_in)
        self.W = rng.uniform(-limit, limit, size=(filters, in_channels, kh, kw)).astype(dtype)
        self.b = np.zeros(filters, dtype=dtype)
        self.kernel = (kh, kw)
        self._cols = None
        self._in_shape = None

    def forward(self, x):
        batch, cin, h, w = x.shape
        kh, kw = self.kernel
        ph, pw = kh // 2, kw // 2
        xp = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
        # windows: (batch, cin, h, w, kh, kw) -> columns (batch*h*w, cin*kh*kw)
        windows = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3))
        cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(batch * h * w, cin * kh * kw)
        cols = np.ascontiguousarray(cols)
        flat = cols @ self.W.reshape(len(self.b), -1).T + self.b
        self._cols = cols
        self._in_shape = x.shape
        return flat.reshape(batch, h, w, len(self.b)).transpose(0, 3, 1, 2)

    def backward(self, grad_out):
        batch, cin, h, w = self._in_shape
        kh, kw = self.kernel
        ph, pw = kh // 2, kw // 2
        nf = len(self.b)
        gflat = grad_out.transpose(0, 2, 3, 1).reshape(batch * h * w, nf)
        self.gW = (gflat.T @ self._cols).reshape(self.W.shape).astype(self.W.dtype)
        self.gb = gflat.sum(axis=0, dtype=np.float64).astype(self.b.dtype)
        gcols = (gflat @ self.W.reshape(nf, -1)).reshape(batch, h, w, cin, kh, kw)
        gxp = np.zeros((batch, cin, h + 2 * ph, w + 2 * pw), dtype=grad_out.dtype)
        for i in range(kh):
            for j in range(kw):
                gxp[:, :, i:i + h, j:j + w] += gcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
        return gxp[:, :, ph:ph + h, pw:pw + w]

    def parameters(self):
        return [("W", self.W), ("b", self.b)]

    def gradients(self):
        return [("W", self.gW), ("b", self.gb)]


class ReLU:
    """Elementwise max(0, x); the derivative at exactly 0 is taken as 0."""

    def forward(self, x):
        self._gate = x > 0
        return np.where(self._gate, x, 0.0).astype(x.dtype)

    def backward(self, grad_out):
        return np.where(self._gate, grad_out, 0.0).astype(grad_out.dtype)

    def parameters(self):
        return []

    def gradients(self):
        return []


class Dropout:
    """Inverted dropout: zero with probability ``rate``, scale survivors.

    Outside training (``training=False`` or rate 0) the layer is the
    identity.  The mask generator is passed per call so the training loop
    owns all randomness.
    """

    def __init__(self, rate):
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self._mask = None

    def forward(self, x, rng=None, training=False):
        if not training or self.rate == 0.0:
            self._mask = None
            return x
        if rng is None:
            raise ValueError("training-mode dropout needs an rng")
        keep = 1.0 - self.rate
        self._mask = (rng.random(x.shape) >= self.rate).astype(x.dtype) / keep
        return x * self._mask

    def backward(self, grad_out):
        if self._mask is None:
            return grad_out
        return grad_out * self._mask

    def parameters(self):
        return []

    def gradients(self):
        return []
