"""Client-side local optimization.

Mini-batch SGD on the mean cross-entropy, optionally anchored to the global
parameters by a proximal term (mu/2) * ||w - w_g||^2 whose squared norm runs
over weights and bias alike.  The anchor is the round's incoming global
parameter vector, held fixed across the client's local steps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ClientSplit, Dataset
from .model import Batch, ParamVector, _loss_grad_arrays, cross_entropy_loss
from .seeds import SeedKey, derive, key_rng

__all__ = [
    "OBJECTIVES",
    "HyperParams",
    "LocalUpdate",
    "local_objective",
    "local_train",
    "proximal_penalty",
]

OBJECTIVES = ("fedavg", "fedprox")


@dataclass(frozen=True)
class HyperParams:
    """Local-training knobs shared by every client in a run.

    ``mu`` only takes effect when ``objective == "fedprox"``; under "fedavg"
    the proximal term is identically zero no matter what mu holds.  A zero
    learning rate is accepted so no-op limit checks can run; configs reject it.
    """

    learning_rate: float = 0.01
    batch_size: int = 64
    local_epochs: int = 2
    mu: float = 0.2
    objective: str = "fedavg"

    def __post_init__(self) -> None:
        if not np.isfinite(self.learning_rate) or self.learning_rate < 0:
            raise ValueError(
                f"learning_rate must be >= 0 and finite, got {self.learning_rate}"
            )
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.local_epochs < 1:
            raise ValueError(f"local_epochs must be >= 1, got {self.local_epochs}")
        if not np.isfinite(self.mu) or self.mu < 0:
            raise ValueError(f"mu must be >= 0 and finite, got {self.mu}")
        if self.objective not in OBJECTIVES:
            raise ValueError(
                f"objective must be one of {OBJECTIVES}, got {self.objective!r}"
            )


@dataclass(frozen=True)
class LocalUpdate:
    """What a client sends back: new parameters, sample count, last-epoch loss."""

    params: ParamVector
    n_samples: int
    mean_final_epoch_loss: float

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")


def proximal_penalty(w: ParamVector, w_g: ParamVector, mu: float) -> float:
    """(mu/2) * squared l2 distance between w and the anchor, bias included."""
    if not np.isfinite(mu) or mu < 0:
        raise ValueError(f"mu must be >= 0 and finite, got {mu}")
    if w.weights.shape != w_g.weights.shape:
        raise ValueError(
            f"parameter shapes differ: {w.weights.shape} vs {w_g.weights.shape}"
        )
    dw = w.weights - w_g.weights
    db = w.bias - w_g.bias
    return 0.5 * mu * float((dw * dw).sum() + (db * db).sum())


def local_objective(
    w: ParamVector, w_g: ParamVector, batch: Batch, h: HyperParams
) -> float:
    """Cross-entropy on the batch, plus the proximal penalty under fedprox."""
    loss = cross_entropy_loss(w, batch)
    if h.objective == "fedprox":
        loss += proximal_penalty(w, w_g, h.mu)
    return loss


def local_train(
    w_g: ParamVector,
    data: Dataset,
    split: ClientSplit,
    h: HyperParams,
    seed: SeedKey,
) -> LocalUpdate:
    """Run ``h.local_epochs`` epochs of mini-batch SGD from a copy of ``w_g``.

    Each epoch reshuffles the split's indices with its own stream,
    ``derive(seed, epoch)``, then walks batches of ``h.batch_size`` in order,
    keeping the final partial batch.  Gradients are means over the batch; the
    fedprox gradient adds ``mu * (w - w_g)``.  The reported loss is the mean
    per-batch objective of the final epoch, measured before each step.  Pure
    function of its arguments: identical inputs give bit-identical updates.
    """
    idx = split.indices
    if int(idx[-1]) >= data.n_samples:
        raise ValueError(
            f"client {split.client_id}: index {int(idx[-1])} out of range "
            f"for {data.n_samples} samples"
        )
    if data.feature_dim != w_g.feature_dim:
        raise ValueError(
            f"dataset feature_dim {data.feature_dim} does not match "
            f"parameters ({w_g.feature_dim})"
        )
    if data.n_classes > w_g.n_classes:
        raise ValueError(
            f"dataset has {data.n_classes} classes but parameters cover "
            f"{w_g.n_classes}"
        )
    use_prox = h.objective == "fedprox" and h.mu != 0.0
    lr = h.learning_rate
    w = w_g.weights.copy()
    b = w_g.bias.copy()
    last_losses: list[float] = []
    for epoch in range(h.local_epochs):
        order = key_rng(derive(seed, epoch)).permutation(idx)
        record = epoch == h.local_epochs - 1
        for start in range(0, order.size, h.batch_size):
            sel = order[start : start + h.batch_size]
            loss, gw, gb = _loss_grad_arrays(w, b, data.features[sel], data.labels[sel])
            if use_prox:
                gw += h.mu * (w - w_g.weights)
                gb += h.mu * (b - w_g.bias)
                if record:
                    dw = w - w_g.weights
                    db = b - w_g.bias
                    loss += 0.5 * h.mu * float((dw * dw).sum() + (db * db).sum())
            if record:
                last_losses.append(loss)
            w -= lr * gw
            b -= lr * gb
    return LocalUpdate(
        params=ParamVector(w, b),
        n_samples=int(idx.size),
        mean_final_epoch_loss=float(np.mean(last_losses)),
    )
