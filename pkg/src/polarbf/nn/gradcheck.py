"""Central finite-difference verification of analytic gradients.

Used by the test suite, and handy interactively when touching a layer.
Two tools:

* :func:`check_layer_gradients` probes a single layer through a smooth
  linear scalarization of its output (no kinks, representative element
  magnitudes).

* :func:`check_model_gradients` verifies the composed network through
  the training loss.

Either way the numeric side differences a float64 twin holding the same
parameter values: finite differences of a float32 forward pass drown in
rounding noise long before reaching the 1e-3 regime, so the float64 twin
supplies the accurate derivative against which the analytic (possibly
float32) backward under test is judged.

Relative error uses a denominator floor: elements smaller than the floor
are effectively compared absolutely, which keeps dead-ReLU-path elements
(true gradient ~1e-9) from amplifying difference noise.
"""

import copy

import numpy as np

from .model import FlipPredictor, ModelConfig


def central_difference(fn, array, eps):
    """Numeric d(fn)/d(array), perturbing one element at a time in place."""
    grad = np.zeros(array.shape, dtype=np.float64)
    flat = array.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        saved = flat[i]
        flat[i] = saved + eps
        hi = fn()
        flat[i] = saved - eps
        lo = fn()
        flat[i] = saved
        gflat[i] = (hi - lo) / (2.0 * eps)
    return grad


def max_relative_error(analytic, numeric, floor=1e-6):
    """max |a - n| / max(|a|, |n|, floor) over all elements."""
    a = np.asarray(analytic, dtype=np.float64)
    b = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float((np.abs(a - b) / denom).max())


def check_layer_gradients(layer, x, eps=1e-5, rng=None, floor=1e-6):
    """Worst relative error over the layer's parameters and its input.

    The scalar under differentiation is sum(forward(x) * c) for fixed
    random coefficients c, so the analytic output gradient is just c and
    the probe never crosses an activation kink inside the layer.  Raise
    ``floor`` (to ~1e-4) when the layer under test runs in float32: its
    own accumulation noise on near-cancelling sums sits well above the
    float64 default.
    """
    rng = rng or np.random.default_rng(0)
    out = layer.forward(x)
    c = rng.normal(size=out.shape).astype(out.dtype)
    gx = layer.backward(c)
    analytic = dict(layer.gradients())

    twin = copy.copy(layer)
    for name, param in layer.parameters():
        setattr(twin, name, param.astype(np.float64))
    x64 = np.asarray(x, dtype=np.float64)
    c64 = c.astype(np.float64)

    def loss():
        return float((twin.forward(x64) * c64).sum())

    worst = max_relative_error(gx, central_difference(loss, x64, eps), floor)
    for name, param in twin.parameters():
        numeric = central_difference(loss, param, eps)
        worst = max(worst, max_relative_error(analytic[name], numeric, floor))
    return worst


def _float64_twin(model):
    if model.config.dtype == "float64":
        return model
    twin = FlipPredictor(
        ModelConfig(
            input_shape=model.config.input_shape,
            conv_specs=model.config.conv_specs,
            dense_widths=model.config.dense_widths,
            dropout_rate=model.config.dropout_rate,
            seed=model.config.seed,
            dtype="float64",
        )
    )
    twin.set_parameters(model.parameters())
    return twin


def check_model_gradients(model, x, labels, eps=1e-5, floor=1e-6):
    """Worst relative error across every parameter of ``model``.

    Analytic gradients come from the model itself; numeric ones from
    central differences on a float64 twin sharing its parameter values.
    Both run the deterministic path (no dropout) so the probes see a
    smooth function of the parameters.  See :func:`check_layer_gradients`
    for when to raise ``floor``.
    """
    _, analytic = model.loss_and_gradients(x, labels, training=False)
    analytic = dict(analytic)

    twin = _float64_twin(model)
    x64 = np.asarray(x, dtype=np.float64)
    y64 = np.asarray(labels, dtype=np.float64)

    def loss():
        value, _ = twin.loss_and_gradients(x64, y64, training=False)
        return value

    worst = 0.0
    for name, param in twin.parameters():
        numeric = central_difference(loss, param, eps)
        worst = max(worst, max_relative_error(analytic[name], numeric, floor))
    return worst
