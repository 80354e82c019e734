"""The flip-prediction CNN: configuration, forward/backward, serialization.

Topology (fixed shape, configurable sizes): three same-padded conv layers
with ReLU, a flatten, two ReLU dense layers each followed by dropout, and
a final dense layer squashed by a sigmoid into per-bit flip probabilities.

Weight files are a single JSON document: a header with format version,
model configuration and per-array shapes, plus the parameter tensors
embedded as base64-encoded little-endian row-major blobs in declaration
order.  Round-trips are bit-exact.
"""

import base64
import json
from dataclasses import dataclass, replace

import numpy as np

from .layers import Conv2D, Dense, Dropout, ReLU, bce_logit_grad, bce_loss, sigmoid

WEIGHTS_FORMAT_VERSION = 1

_DTYPES = {"float32": np.float32, "float64": np.float64}


@dataclass(frozen=True)
class ModelConfig:
    """Network hyperparameters.

    input_shape is (channels, height, width) of one metadata tensor;
    conv_specs lists (filters, kernel_h, kernel_w) triples and
    dense_widths ends with the number of predicted bits.  The three-conv,
    three-dense shape is fixed; only the sizes move.
    """

    input_shape: tuple
    conv_specs: tuple = ((16, 3, 3), (32, 3, 3), (64, 3, 3))
    dense_widths: tuple = (256, 128, 32)
    dropout_rate: float = 0.5
    seed: int = 0
    dtype: str = "float32"

    def __post_init__(self):
        if len(self.input_shape) != 3 or any(int(d) < 1 for d in self.input_shape):
            raise ValueError(f"input_shape must be 3 positive dims, got {self.input_shape}")
        if len(self.conv_specs) != 3:
            raise ValueError(f"expected 3 conv specs, got {len(self.conv_specs)}")
        if len(self.dense_widths) != 3:
            raise ValueError(f"expected 3 dense widths, got {len(self.dense_widths)}")
        if any(len(s) != 3 for s in self.conv_specs):
            raise ValueError("each conv spec is (filters, kernel_h, kernel_w)")
        if any(int(w) < 1 for w in self.dense_widths):
            raise ValueError(f"dense widths must be positive, got {self.dense_widths}")
        if self.dtype not in _DTYPES:
            raise ValueError(f"dtype must be one of {sorted(_DTYPES)}, got {self.dtype!r}")
        # normalise nested sequences so configs compare and serialise cleanly
        object.__setattr__(self, "input_shape", tuple(int(d) for d in self.input_shape))
        object.__setattr__(self, "conv_specs", tuple(tuple(int(v) for v in s) for s in self.conv_specs))
        object.__setattr__(self, "dense_widths", tuple(int(w) for w in self.dense_widths))

    @property
    def output_dim(self):
        return self.dense_widths[-1]

    @property
    def np_dtype(self):
        return _DTYPES[self.dtype]

    @classmethod
    def for_code(cls, code, iterations, **overrides):
        """Defaults sized for a given CodeConfig and trace depth."""
        shape = (4 * iterations, code.n + 1, code.N)
        widths = overrides.pop("dense_widths", (256, 128, code.K))
        if widths[-1] != code.K:
            raise ValueError(f"output width {widths[-1]} != K={code.K}")
        return cls(input_shape=shape, dense_widths=widths, **overrides)


class FlipPredictor:
    """Forward/backward implementation of the prediction network.

    One instance holds its parameters and the caches of the most recent
    forward pass, so share instances across threads only for inference
    after training has finished (predict() touches no caches).
    """

    def __init__(self, config):
        self.config = config
        dt = config.np_dtype
        rng = np.random.default_rng(config.seed)
        c, h, w = config.input_shape
        self._convs = []
        cin = c
        for filters, kh, kw in config.conv_specs:
            self._convs.append(Conv2D(cin, filters, (kh, kw), rng, dtype=dt))
            cin = filters
        flat = cin * h * w
        d1, d2, k = config.dense_widths
        self._dense = [
            Dense(flat, d1, rng, init="he", dtype=dt),
            Dense(d1, d2, rng, init="he", dtype=dt),
            Dense(d2, k, rng, init="glorot", dtype=dt),
        ]
        self._relus = [ReLU() for _ in range(len(self._convs) + 2)]
        self._drops = [Dropout(config.dropout_rate), Dropout(config.dropout_rate)]

    # -- forward / backward ------------------------------------------------

    def forward(self, x, training=False, rng=None):
        """Flip probabilities of shape (batch, K); accepts a single (C,H,W) too."""
        single = x.ndim == 3
        if single:
            x = x[None]
        if x.shape[1:] != self.config.input_shape:
            raise ValueError(
                f"input shape {x.shape[1:]} != configured {self.config.input_shape}"
            )
        z = np.ascontiguousarray(x, dtype=self.config.np_dtype)
        for conv, act in zip(self._convs, self._relus):
            z = act.forward(conv.forward(z))
        z = z.reshape(len(z), -1)
        for dense, act, drop in zip(self._dense, self._relus[len(self._convs):], self._drops):
            z = drop.forward(act.forward(dense.forward(z)), rng=rng, training=training)
        z = self._dense[-1].forward(z)
        probs = sigmoid(z)
        return probs[0] if single else probs

    def loss_and_gradients(self, x, labels, rng=None, training=True):
        """Mean BCE plus parameter gradients for one mini-batch.

        Gradients land on the layers (collect via :meth:`gradients`); the
        fused sigmoid/BCE logit gradient keeps saturated outputs stable.
        """
        if x.ndim == 3:
            x = x[None]
        labels = np.atleast_2d(labels)
        probs = self.forward(x, training=training, rng=rng)
        loss = bce_loss(labels, probs)
        g = bce_logit_grad(labels, probs).astype(self.config.np_dtype)
        g = self._dense[-1].backward(g)
        for dense, act, drop in zip(
            reversed(self._dense[:-1]),
            reversed(self._relus[len(self._convs):]),
            reversed(self._drops),
        ):
            g = dense.backward(act.backward(drop.backward(g)))
        g = g.reshape((len(g),) + self._conv_out_shape())
        for conv, act in zip(reversed(self._convs), reversed(self._relus[: len(self._convs)])):
            g = conv.backward(act.backward(g))
        return loss, self.gradients()

    def predict(self, x):
        """Inference-mode forward (dropout off)."""
        return self.forward(x, training=False)

    def _conv_out_shape(self):
        _, h, w = self.config.input_shape
        return (self.config.conv_specs[-1][0], h, w)

    # -- parameter plumbing --------------------------------------------------

    def _layer_items(self):
        for i, conv in enumerate(self._convs, start=1):
            yield f"conv{i}", conv
        for i, dense in enumerate(self._dense, start=1):
            yield f"dense{i}", dense

    def parameters(self):
        """(name, array) pairs in declaration order; arrays are live views."""
        return [
            (f"{lname}/{pname}", arr)
            for lname, layer in self._layer_items()
            for pname, arr in layer.parameters()
        ]

    def gradients(self):
        return [
            (f"{lname}/{pname}", arr)
            for lname, layer in self._layer_items()
            for pname, arr in layer.gradients()
        ]

    def set_parameters(self, named_arrays):
        """Overwrite parameters in place from (name, array) pairs."""
        current = dict(self.parameters())
        if set(current) != {name for name, _ in named_arrays}:
            raise ValueError("parameter names do not match this model")
        for name, arr in named_arrays:
            dst = current[name]
            if dst.shape != arr.shape:
                raise ValueError(f"{name}: shape {arr.shape} != expected {dst.shape}")
            dst[...] = arr

    def copy_parameters(self):
        return [(name, arr.copy()) for name, arr in self.parameters()]


# -- serialization -----------------------------------------------------------

def save_weights(model, path):
    """Write config + parameters to ``path`` as a single JSON document."""
    cfg = model.config
    arrays = []
    for name, arr in model.parameters():
        le = np.ascontiguousarray(arr, dtype=np.dtype(cfg.np_dtype).newbyteorder("<"))
        arrays.append(
            {
                "name": name,
                "shape": list(arr.shape),
                "data": base64.b64encode(le.tobytes()).decode("ascii"),
            }
        )
    doc = {
        "format_version": WEIGHTS_FORMAT_VERSION,
        "config": {
            "input_shape": list(cfg.input_shape),
            "conv_specs": [list(s) for s in cfg.conv_specs],
            "dense_widths": list(cfg.dense_widths),
            "dropout_rate": cfg.dropout_rate,
            "seed": cfg.seed,
            "dtype": cfg.dtype,
        },
        "arrays": arrays,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_weights(path):
    """Rebuild a :class:`FlipPredictor` from a weight file."""
    with open(path) as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != WEIGHTS_FORMAT_VERSION:
        raise ValueError(f"unsupported weight format version {version!r}")
    c = doc["config"]
    config = ModelConfig(
        input_shape=tuple(c["input_shape"]),
        conv_specs=tuple(tuple(s) for s in c["conv_specs"]),
        dense_widths=tuple(c["dense_widths"]),
        dropout_rate=c["dropout_rate"],
        seed=c["seed"],
        dtype=c["dtype"],
    )
    model = FlipPredictor(config)
    named = []
    for entry in doc["arrays"]:
        raw = base64.b64decode(entry["data"])
        arr = np.frombuffer(raw, dtype=np.dtype(config.np_dtype).newbyteorder("<"))
        named.append((entry["name"], arr.reshape(entry["shape"]).astype(config.np_dtype)))
    model.set_parameters(named)
    return model
