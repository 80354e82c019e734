"""Mini-batch training loop with Adam and best-validation checkpointing.

The loop talks to its data through a tiny protocol: ``len(dataset)`` and
``dataset.batch(indices) -> (inputs, labels)``.  :class:`ArrayDataset`
wraps in-memory arrays; the benchmark pipeline supplies a provider that
rebuilds metadata tensors from stored channel rows on demand, which keeps
dataset files small at the cost of re-running the decoder per batch.
"""

from dataclasses import dataclass, field

import numpy as np

from .layers import bce_loss


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 500
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    epochs: int = 50
    validation_ratio: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0.0 < self.validation_ratio < 1.0:
            raise ValueError(
                f"validation_ratio must be in (0, 1), got {self.validation_ratio}"
            )
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


class AdamState:
    """First/second moment estimates mirroring a parameter list."""

    def __init__(self, named_params):
        self.step = 0
        self.m = {name: np.zeros_like(arr) for name, arr in named_params}
        self.v = {name: np.zeros_like(arr) for name, arr in named_params}


def adam_step(named_params, named_grads, state, cfg):
    """One in-place Adam update with bias correction."""
    state.step += 1
    t = state.step
    b1, b2 = cfg.beta1, cfg.beta2
    scale1 = 1.0 / (1.0 - b1 ** t)
    scale2 = 1.0 / (1.0 - b2 ** t)
    grads = dict(named_grads)
    for name, param in named_params:
        g = grads[name]
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * np.square(g)
        param -= cfg.learning_rate * (m * scale1) / (np.sqrt(v * scale2) + cfg.epsilon)


class ArrayDataset:
    """In-memory (inputs, labels) pair behind the batch protocol."""

    def __init__(self, inputs, labels):
        if len(inputs) != len(labels):
            raise ValueError(f"{len(inputs)} inputs vs {len(labels)} labels")
        self.inputs = inputs
        self.labels = labels

    def __len__(self):
        return len(self.inputs)

    def batch(self, indices):
        return self.inputs[indices], self.labels[indices]


@dataclass
class TrainLog:
    """Per-epoch mean training loss and validation loss."""

    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = float("inf")


def _eval_loss(model, dataset, indices, batch_size):
    total = 0.0
    for start in range(0, len(indices), batch_size):
        x, y = dataset.batch(indices[start:start + batch_size])
        probs = model.forward(x, training=False)
        total += bce_loss(y, probs) * len(x)
    return total / len(indices)


def train(model, dataset, cfg):
    """Train in place; the model ends up holding the best-validation weights.

    The dataset is split once (seeded permutation, last ``validation_ratio``
    slice held out), then each epoch reshuffles the training part, walks it
    in mini-batches, and scores the held-out slice with dropout disabled.
    Returns a :class:`TrainLog`.
    """
    n = len(dataset)
    if n < 2:
        raise ValueError("need at least 2 samples to split train/validation")
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(n)
    n_val = max(1, int(round(n * cfg.validation_ratio)))
    if n_val >= n:
        n_val = n - 1
    val_idx = order[n - n_val:]
    train_idx = order[: n - n_val]

    state = AdamState(model.parameters())
    log = TrainLog()
    best = model.copy_parameters()
    for epoch in range(cfg.epochs):
        perm = train_idx[rng.permutation(len(train_idx))]
        running = 0.0
        for start in range(0, len(perm), cfg.batch_size):
            x, y = dataset.batch(perm[start:start + cfg.batch_size])
            loss, grads = model.loss_and_gradients(x, y, rng=rng, training=True)
            adam_step(model.parameters(), grads, state, cfg)
            running += loss * len(x)
        log.train_loss.append(running / len(perm))
        vloss = _eval_loss(model, dataset, val_idx, cfg.batch_size)
        log.val_loss.append(vloss)
        if vloss < log.best_val_loss:
            log.best_val_loss = vloss
            log.best_epoch = epoch
            best = model.copy_parameters()
    model.set_parameters(best)
    return log
