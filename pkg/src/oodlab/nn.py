"""A small ReLU multilayer perceptron with explicit reverse-mode gradients.

The model maps 2-D inputs to K logits (K+1 when the extra-head regularizer
is selected). The combined objective is

    loss = mean cross-entropy over the labeled batch + omega * L_aux

where L_aux is one of three outlier regularizers (see
:func:`oodlab.oodcore.reg_loss` for the value-only counterpart):

* ``energy``: squared hinges pushing labeled-batch log-sum-exp above m_in
  and outlier log-sum-exp below m_out;
* ``oe``: cross-entropy between outlier softmax and the uniform
  distribution over the K classes;
* ``kplus1``: cross-entropy pushing outliers toward the extra (last) head.

Gradients are exact reverse-mode; cross-entropy is fused from logits (no
probability materialization in the loss path).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from .errors import CheckpointError, ConfigError, InvalidInputError, TrainingDivergenceError
from .numerics import RngState, logsumexp_rows, relu, softmax_rows

if TYPE_CHECKING:
    from .oodcore import RegLossSpec

__all__ = [
    "MlpModel",
    "Gradients",
    "OptimState",
    "LossTerms",
    "init_mlp",
    "forward",
    "cross_entropy_from_logits",
    "loss_and_grad",
    "init_optim",
    "sgd_step",
    "save_checkpoint",
    "load_checkpoint",
]


@dataclass
class MlpModel:
    """Parameter container: weights[i] is (in, out), biases[i] is (out,)."""

    weights: list
    biases: list

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.biases) or not self.weights:
            raise InvalidInputError("MlpModel: need one bias vector per weight matrix")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.ndim != 1 or w.shape[1] != b.shape[0]:
                raise InvalidInputError(f"MlpModel: layer {i} shapes inconsistent")
            if i > 0 and self.weights[i - 1].shape[1] != w.shape[0]:
                raise InvalidInputError(f"MlpModel: layer {i-1}->{i} dimensions do not chain")

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def output_dim(self) -> int:
        return self.weights[-1].shape[1]

    @property
    def layer_dims(self) -> tuple:
        return (self.input_dim,) + tuple(w.shape[1] for w in self.weights)

    def copy(self) -> "MlpModel":
        return MlpModel([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(w)) for w in self.weights) and all(
            np.all(np.isfinite(b)) for b in self.biases
        )


@dataclass
class Gradients:
    """Same shape tree as the model parameters it was computed for."""

    weights: list
    biases: list

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(w)) for w in self.weights) and all(
            np.all(np.isfinite(b)) for b in self.biases
        )


class LossTerms(NamedTuple):
    """total = ce + omega * reg; reg is the unweighted regularizer value."""

    total: float
    ce: float
    reg: float


def init_mlp(layer_dims, rng: RngState) -> MlpModel:
    """Uniform init in +-sqrt(6/(fan_in+fan_out)); zero biases."""
    dims = [int(d) for d in layer_dims]
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise InvalidInputError("init_mlp: need at least input and output dims, all >= 1")
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        w = (2.0 * rng.uniform(size=(fan_in, fan_out)) - 1.0) * bound
        weights.append(w)
        biases.append(np.zeros(fan_out))
    return MlpModel(weights, biases)


def _forward_cache(model: MlpModel, batch: np.ndarray):
    """Returns (logits, activations); activations[0] is the input batch."""
    acts = [batch]
    h = batch
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        h = h @ w + b
        if i < last:
            h = relu(h)
            acts.append(h)
    return h, acts


def forward(model: MlpModel, batch) -> np.ndarray:
    """Logits for each row; pure function of (model, batch)."""
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != model.input_dim:
        raise InvalidInputError(
            f"forward: batch must be (n, {model.input_dim}), got {batch.shape}"
        )
    logits, _ = _forward_cache(model, batch)
    return logits


def cross_entropy_from_logits(logits: np.ndarray, labels: np.ndarray) -> float:
    """Mean cross-entropy, fused from logits via log-sum-exp."""
    labels = np.asarray(labels)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise InvalidInputError("cross_entropy_from_logits: need (n, K) logits and (n,) labels")
    if logits.shape[0] == 0:
        raise InvalidInputError("cross_entropy_from_logits: empty batch")
    lse = logsumexp_rows(logits)
    picked = logits[np.arange(logits.shape[0]), labels]
    return float(np.mean(lse - picked))


def _backprop(model: MlpModel, acts, dlogits: np.ndarray, grads: Gradients) -> None:
    """Accumulate parameter gradients for one batch into grads."""
    delta = dlogits
    for i in range(len(model.weights) - 1, -1, -1):
        grads.weights[i] += acts[i].T @ delta
        grads.biases[i] += delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (acts[i] > 0.0)


def loss_and_grad(
    model: MlpModel,
    id_points,
    id_labels,
    outlier_points,
    reg: "RegLossSpec",
    score_kind: str = "energy",
    num_classes: int | None = None,
):
    """Objective value and exact gradients for one training step.

    Returns (LossTerms, Gradients). The outlier batch may be empty (its
    regularizer contribution is then zero); the labeled batch may not.
    score_kind participates only in validation (the regularizer choice
    fixes the training-time score function).
    """
    id_points = np.asarray(id_points, dtype=np.float64)
    id_labels = np.asarray(id_labels, dtype=np.int64)
    outlier_points = np.asarray(outlier_points, dtype=np.float64)
    if id_points.ndim != 2 or id_points.shape[0] == 0:
        raise InvalidInputError("loss_and_grad: labeled batch must be non-empty")
    if id_labels.shape != (id_points.shape[0],):
        raise InvalidInputError("loss_and_grad: one label per labeled row")
    if outlier_points.size and outlier_points.shape[1] != model.input_dim:
        raise InvalidInputError("loss_and_grad: outlier batch width mismatch")

    out_dim = model.output_dim
    if reg.variant == "kplus1":
        expected_classes = out_dim - 1 if num_classes is None else int(num_classes)
        if out_dim != expected_classes + 1:
            raise ConfigError(
                f"kplus1 regularizer needs output_dim = K+1; got {out_dim} for K={expected_classes}"
            )
        n_classes = expected_classes
    else:
        n_classes = out_dim if num_classes is None else int(num_classes)
        if score_kind == "kplus1":
            raise ConfigError("kplus1 scoring requires the kplus1 regularizer head")
    if np.any(id_labels < 0) or np.any(id_labels >= n_classes):
        raise InvalidInputError("loss_and_grad: labels out of range")

    n_id = id_points.shape[0]
    n_out = outlier_points.shape[0]
    grads = Gradients(
        [np.zeros_like(w) for w in model.weights],
        [np.zeros_like(b) for b in model.biases],
    )

    logits_id, acts_id = _forward_cache(model, id_points)
    ce = cross_entropy_from_logits(logits_id, id_labels)
    soft_id = softmax_rows(logits_id)
    dlogits_id = soft_id.copy()
    dlogits_id[np.arange(n_id), id_labels] -= 1.0
    dlogits_id /= n_id

    reg_value = 0.0
    dlogits_out = None
    logits_out = acts_out = None
    if n_out:
        logits_out, acts_out = _forward_cache(model, outlier_points)

    if reg.variant == "energy":
        s_id = logsumexp_rows(logits_id)
        gap_in = np.maximum(0.0, reg.m_in - s_id)
        reg_value += float(np.mean(gap_in**2))
        if reg.omega != 0.0:
            # d/dlogits mean(gap_in^2) = (-2 gap_in / n) * softmax(logits)
            dlogits_id += reg.omega * (-2.0 * gap_in / n_id)[:, None] * soft_id
        if n_out:
            s_out = logsumexp_rows(logits_out)
            gap_out = np.maximum(0.0, s_out - reg.m_out)
            reg_value += float(np.mean(gap_out**2))
            if reg.omega != 0.0:
                dlogits_out = reg.omega * (2.0 * gap_out / n_out)[:, None] * softmax_rows(logits_out)
    elif reg.variant == "oe":
        if n_out:
            reg_value = float(np.mean(logsumexp_rows(logits_out) - logits_out.mean(axis=1)))
            if reg.omega != 0.0:
                dlogits_out = reg.omega * (softmax_rows(logits_out) - 1.0 / out_dim) / n_out
    elif reg.variant == "kplus1":
        if n_out:
            reg_value = float(np.mean(logsumexp_rows(logits_out) - logits_out[:, -1]))
            if reg.omega != 0.0:
                d = softmax_rows(logits_out)
                d[:, -1] -= 1.0
                dlogits_out = reg.omega * d / n_out
    else:
        raise ConfigError(f"unknown regularizer variant {reg.variant!r}")

    _backprop(model, acts_id, dlogits_id, grads)
    if dlogits_out is not None:
        _backprop(model, acts_out, dlogits_out, grads)

    total = ce + reg.omega * reg_value
    return LossTerms(total=float(total), ce=ce, reg=reg_value), grads


@dataclass
class OptimState:
    """SGD-with-momentum state: v <- momentum*v + g; theta <- theta - lr*v.

    Optional step decay: after completing iteration m for each milestone m,
    the effective rate is learning_rate * decay_factor**(milestones passed).
    """

    learning_rate: float
    momentum: float = 0.9
    velocity_w: list = field(default_factory=list)
    velocity_b: list = field(default_factory=list)
    milestones: tuple = ()
    decay_factor: float = 0.1
    step_count: int = 0

    def __post_init__(self) -> None:
        # learning_rate = 0 is legal and makes sgd_step a no-op
        if not np.isfinite(self.learning_rate) or self.learning_rate < 0:
            raise InvalidInputError("OptimState: learning_rate must be >= 0")
        if not 0.0 <= self.momentum < 1.0:
            raise InvalidInputError("OptimState: momentum must be in [0, 1)")
        self.milestones = tuple(sorted(int(m) for m in self.milestones))

    def effective_lr(self) -> float:
        passed = sum(1 for m in self.milestones if self.step_count >= m)
        return self.learning_rate * self.decay_factor**passed


def init_optim(
    model: MlpModel,
    learning_rate: float,
    momentum: float = 0.9,
    milestones=(),
    decay_factor: float = 0.1,
) -> OptimState:
    return OptimState(
        learning_rate=float(learning_rate),
        momentum=float(momentum),
        velocity_w=[np.zeros_like(w) for w in model.weights],
        velocity_b=[np.zeros_like(b) for b in model.biases],
        milestones=milestones,
        decay_factor=float(decay_factor),
    )


def sgd_step(model: MlpModel, grads: Gradients, opt: OptimState):
    """One in-place momentum step; returns (model, opt).

    Raises TrainingDivergenceError if the gradients are non-finite, or if
    any parameter is non-finite after the update.
    """
    if len(grads.weights) != len(model.weights):
        raise InvalidInputError("sgd_step: gradient/model layer count mismatch")
    if not grads.all_finite():
        raise TrainingDivergenceError(
            "non-finite gradient", iteration=opt.step_count, details={"stage": "gradient"}
        )
    lr = opt.effective_lr()
    for w, b, gw, gb, vw, vb in zip(
        model.weights, model.biases, grads.weights, grads.biases, opt.velocity_w, opt.velocity_b
    ):
        vw *= opt.momentum
        vw += gw
        vb *= opt.momentum
        vb += gb
        w -= lr * vw
        b -= lr * vb
    opt.step_count += 1
    if not model.all_finite():
        raise TrainingDivergenceError(
            "non-finite parameter after update",
            iteration=opt.step_count,
            details={"stage": "post-step"},
        )
    return model, opt


_CHECKPOINT_MAGIC = b"oodlab-mlp-checkpoint v1\n"


def save_checkpoint(path, model: MlpModel) -> None:
    """Binary checkpoint: magic line, JSON dims line, little-endian float64
    payload (each layer's weight matrix row-major, then its bias vector).
    Round trips are bit-exact."""
    path = Path(path)
    header = json.dumps({"layer_dims": list(model.layer_dims)}).encode() + b"\n"
    with open(path, "wb") as fh:
        fh.write(_CHECKPOINT_MAGIC)
        fh.write(header)
        for w, b in zip(model.weights, model.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_checkpoint(path) -> MlpModel:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint: {exc}") from exc
    if not raw.startswith(_CHECKPOINT_MAGIC):
        raise CheckpointError(f"{path}: not a recognized checkpoint (bad magic)")
    body = raw[len(_CHECKPOINT_MAGIC):]
    newline = body.find(b"\n")
    if newline < 0:
        raise CheckpointError(f"{path}: truncated header")
    try:
        dims = json.loads(body[:newline])["layer_dims"]
        dims = [int(d) for d in dims]
    except (ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"{path}: malformed dimension header") from exc
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise CheckpointError(f"{path}: invalid layer dimensions {dims}")
    payload = body[newline + 1:]
    expected = sum(fi * fo + fo for fi, fo in zip(dims[:-1], dims[1:])) * 8
    if len(payload) != expected:
        raise CheckpointError(
            f"{path}: payload is {len(payload)} bytes, dims {dims} require {expected}"
        )
    weights, biases, offset = [], [], 0
    for fi, fo in zip(dims[:-1], dims[1:]):
        w = np.frombuffer(payload, dtype="<f8", count=fi * fo, offset=offset).reshape(fi, fo)
        offset += fi * fo * 8
        b = np.frombuffer(payload, dtype="<f8", count=fo, offset=offset)
        offset += fo * 8
        weights.append(w.astype(np.float64).copy())
        biases.append(b.astype(np.float64).copy())
    return MlpModel(weights, biases)
