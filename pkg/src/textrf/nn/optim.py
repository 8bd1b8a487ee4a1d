"""Adam optimizer, deterministic training loop and finite-difference checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from textrf.errors import InvalidArgument
from textrf.nn.tensor import Tensor


class Adam:
    def __init__(
        self,
        params: Sequence[Tensor],
        lr: float,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ):
        if lr < 0:
            raise InvalidArgument("learning rate must be >= 0")
        self.params = list(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.step_count = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        self.step_count += 1
        for i, p in enumerate(self.params):
            g = p.grad if p.grad is not None else np.zeros_like(p.data)
            self.m[i] = self.beta1 * self.m[i] + (1 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1 - self.beta2) * g * g
            m_hat = self.m[i] / (1 - self.beta1**self.step_count)
            v_hat = self.v[i] / (1 - self.beta2**self.step_count)
            p.data = p.data - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class TrainConfig:
    lr: float = 0.01
    epochs: int = 50
    batch_size: int = 20
    decay_every: int = 40  # halve the learning rate every this many epochs
    decay_factor: float = 0.5
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8


@dataclass
class TrainResult:
    loss_curve: list[float] = field(default_factory=list)
    metric_curve: list[float] = field(default_factory=list)  # accuracy or mAP per epoch

    def to_csv(self) -> str:
        lines = ["epoch,loss,metric"]
        for e, loss in enumerate(self.loss_curve):
            metric = self.metric_curve[e] if e < len(self.metric_curve) else float("nan")
            lines.append(f"{e},{loss:.6f},{metric:.6f}")
        return "\n".join(lines) + "\n"


def train(
    model,
    examples: Sequence,
    cfg: TrainConfig,
    seed: int,
    make_batch: Callable | None = None,
    epoch_metric: Callable | None = None,
) -> TrainResult:
    """Shuffled minibatch training, fully determined by (model init, data, cfg, seed).

    examples: an indexable dataset; make_batch turns a list of indices into the
    batch object fed to model.loss (defaults to treating examples as an (X, y)
    array pair).  epoch_metric, when given, is called with the model after each
    epoch and recorded alongside the loss.
    """
    n_check = len(examples[0]) if isinstance(examples, tuple) else len(examples)
    if n_check == 0:
        raise InvalidArgument("dataset must be non-empty")
    if cfg.lr < 0:
        raise InvalidArgument("learning rate must be >= 0")

    if make_batch is None:
        x_all, y_all = examples
        n = len(x_all)

        def make_batch(idx):
            return x_all[idx], np.asarray(y_all)[idx]

    else:
        n = len(examples)

    opt = Adam(model.parameters(), lr=cfg.lr, betas=cfg.betas, eps=cfg.eps)
    shuffle_rng = np.random.default_rng(np.random.SeedSequence((seed, 0x5AFE)))
    result = TrainResult()
    for epoch in range(cfg.epochs):
        if epoch > 0 and cfg.decay_every > 0 and epoch % cfg.decay_every == 0:
            opt.lr *= cfg.decay_factor
        order = shuffle_rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            batch = make_batch(idx)
            opt.zero_grad()
            loss = model.loss(batch)
            value = loss.item()
            if not np.isfinite(value):
                raise RuntimeError(
                    f"non-finite loss {value} at epoch {epoch}, batch {start // cfg.batch_size}"
                )
            loss.backward()
            opt.step()
            epoch_losses.append(value)
        result.loss_curve.append(float(np.mean(epoch_losses)))
        if epoch_metric is not None:
            result.metric_curve.append(float(epoch_metric(model)))
    return result


def finite_difference_check(
    loss_fn: Callable[[], Tensor],
    params: Sequence[Tensor],
    epsilon: float = 1e-5,
    rng: np.random.Generator | None = None,
    entries_per_param: int = 5,
) -> float:
    """Max relative error between reverse-mode and central-difference gradients.

    Checks a random subset of entries of each parameter; relative error uses
    max(|a|, |b|, 1e-3) in the denominator so near-zero gradients do not blow
    up the ratio.
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise InvalidArgument(f"epsilon must be in [1e-7, 1e-3], got {epsilon}")
    rng = rng or np.random.default_rng(0)
    for p in params:
        p.zero_grad()
    loss = loss_fn()
    loss.backward()
    analytic = [np.array(p.grad) if p.grad is not None else np.zeros_like(p.data) for p in params]

    worst = 0.0
    for p, grad in zip(params, analytic):
        flat_size = p.data.size
        count = min(entries_per_param, flat_size)
        picks = rng.choice(flat_size, size=count, replace=False)
        flat = p.data.reshape(-1)
        for j in picks:
            original = flat[j]
            flat[j] = original + epsilon
            up = loss_fn().item()
            flat[j] = original - epsilon
            down = loss_fn().item()
            flat[j] = original
            numeric = (up - down) / (2 * epsilon)
            a = grad.reshape(-1)[j]
            err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-3)
            worst = max(worst, err)
    return worst


def grad_check(model, batch, epsilon: float = 1e-5, seed: int = 0) -> float:
    """finite_difference_check over a model's parameters on one batch."""
    return finite_difference_check(
        lambda: model.loss(batch),
        model.parameters(),
        epsilon=epsilon,
        rng=np.random.default_rng(seed),
    )
