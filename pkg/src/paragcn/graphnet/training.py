"""Weighted cross-entropy loss, minibatching and the training loop."""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..geometry.graph import PageGraph
from .model import (GcnModel, GraphIndex, _backward, _check_features, _forward, _p64)
from .optim import AdamState, apply_update

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 8
    epochs: int = 100
    patience: int = 30
    positive_weight: float = 1.0
    negative_weight: float = 1.0
    dont_care_weight: float = 0.0
    balance_classes: bool = True
    max_pos_weight: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.dont_care_weight != 0.0:
            raise ValueError("dont_care_weight: must be exactly 0")
        if self.batch_size < 1:
            raise ValueError("batch_size: must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate: must be > 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("beta1/beta2: must lie in [0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Sample:
    """One page worth of graph, features and targets.

    ``labels`` is (nodes, 2) for the node head or (edges,) for the edge head;
    ``weights`` has the same shape, 0 marking don't-care items.
    """

    features: np.ndarray
    graph: PageGraph
    labels: np.ndarray
    weights: np.ndarray
    _index: GraphIndex | None = field(default=None, repr=False)

    @property
    def index(self) -> GraphIndex:
        if self._index is None:
            self._index = GraphIndex(self.graph)
        return self._index


def merge_samples(samples: list[Sample]) -> Sample:
    """Disjoint union of several pages into one graph."""
    if len(samples) == 1:
        return samples[0]
    offs = np.cumsum([0] + [s.graph.node_count for s in samples])
    edges = np.concatenate([s.graph.edges + o for s, o in zip(samples, offs)])
    lengths = np.concatenate([s.graph.lengths for s in samples])
    g = PageGraph(int(offs[-1]), edges, lengths)
    return Sample(np.concatenate([s.features for s in samples]), g,
                  np.concatenate([s.labels for s in samples]),
                  np.concatenate([s.weights for s in samples]))


def class_weights(samples: list[Sample], config: TrainConfig) -> np.ndarray:
    """Positive-class weight per output: #neg / #pos, capped."""
    lab = np.concatenate([np.asarray(s.labels, np.float64).reshape(len(s.labels), -1) for s in samples])
    w = np.concatenate([np.asarray(s.weights, np.float64).reshape(len(s.weights), -1) for s in samples])
    active = w > 0
    pos = np.sum((lab > 0.5) & active, axis=0)
    neg = np.sum((lab <= 0.5) & active, axis=0)
    ratio = np.where(pos > 0, neg / np.maximum(pos, 1), 1.0)
    out = np.clip(ratio, 1.0, config.max_pos_weight) if config.balance_classes else np.ones_like(ratio)
    return out * config.positive_weight / config.negative_weight


def _bce_logits(z, y):
    return np.maximum(z, 0.0) - y * z + np.log1p(np.exp(-np.abs(z)))


def _targets(model: GcnModel, s: Sample):
    y = np.asarray(s.labels, dtype=np.float64).reshape(-1, model.config.outputs)
    w = np.asarray(s.weights, dtype=np.float64).reshape(-1, model.config.outputs)
    expected = s.graph.node_count if model.config.head_type == "node_binary_pair" else s.graph.edge_count
    if len(y) != expected or len(w) != expected:
        raise ValueError(f"labels/weights have {len(y)}/{len(w)} rows, expected {expected}")
    return y, w


def loss_and_gradients(model: GcnModel, batch: Sample | list[Sample], config: TrainConfig | None = None,
                       pos_weight=None) -> tuple[float, dict[str, np.ndarray]]:
    """Weighted binary cross-entropy averaged over the nonzero-weight items."""
    s = merge_samples(batch) if isinstance(batch, list) else batch
    y, w = _targets(model, s)
    gi = s.index
    X = _check_features(model, s.features, gi.n)
    p = _p64(model)
    count = int(np.count_nonzero(w > 0))
    if count == 0:
        return 0.0, {k: np.zeros(v.shape) for k, v in p.items()}
    pw = 1.0 if pos_weight is None else np.asarray(pos_weight, np.float64)
    item_w = w * np.where(y > 0.5, pw, 1.0)
    logits, cache = _forward(p, model.config, X, gi)
    loss = float(np.sum(item_w * _bce_logits(logits, y)) / count)
    sig = 0.5 * (1.0 + np.tanh(0.5 * logits))
    dlogits = item_w * (sig - y) / count
    return loss, _backward(p, model.config, cache, gi, dlogits)


def evaluate_loss(model: GcnModel, samples: list[Sample], pos_weight=None, chunk: int = 32) -> float:
    """Mean weighted loss over ``samples`` (weighted by active item count)."""
    total, count = 0.0, 0
    for i in range(0, len(samples), chunk):
        s = merge_samples(samples[i:i + chunk])
        y, w = _targets(model, s)
        n = int(np.count_nonzero(w > 0))
        if n == 0:
            continue
        logits, _ = _forward(_p64(model), model.config, _check_features(model, s.features, s.graph.node_count), s.index)
        pw = 1.0 if pos_weight is None else np.asarray(pos_weight, np.float64)
        total += float(np.sum(w * np.where(y > 0.5, pw, 1.0) * _bce_logits(logits, y)))
        count += n
    return total / count if count else 0.0


def fit_normalization(model: GcnModel, samples: list[Sample]) -> GcnModel:
    """Set the fixed input shift/scale from training features."""
    X = np.concatenate([np.asarray(s.features, np.float64) for s in samples])
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    scale = np.where(std > 1e-6, 1.0 / np.maximum(std, 1e-6), 1.0)
    out = model.copy()
    dt = model.params["input.shift"].dtype
    out.params["input.shift"] = mean.astype(dt)
    out.params["input.scale"] = scale.astype(dt)
    return out


@dataclass
class TrainResult:
    model: GcnModel
    history: list[dict]
    best_epoch: int
    pos_weight: list[float]


def train(model: GcnModel, train_set: list[Sample], val_set: list[Sample] | None,
          config: TrainConfig, progress=None) -> TrainResult:
    """Minibatch Adam with early stopping on held-out loss.

    Batch order is drawn from ``config.seed`` so runs are reproducible.
    """
    if not train_set:
        raise ValueError("empty training set")
    model = fit_normalization(model, train_set)
    pw = class_weights(train_set, config)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0x7472]))
    state = AdamState(config.learning_rate, config.beta1, config.beta2, config.eps)
    best, best_loss, best_epoch, stale = model, math.inf, -1, 0
    history = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(train_set))
        losses = []
        for i in range(0, len(order), config.batch_size):
            batch = [train_set[j] for j in order[i:i + config.batch_size]]
            loss, grads = loss_and_gradients(model, batch, config, pw)
            model, state = apply_update(model, grads, state)
            losses.append(loss)
        rec = {"epoch": epoch, "train_loss": float(np.mean(losses))}
        if val_set:
            rec["val_loss"] = evaluate_loss(model, val_set, pw)
        score = rec.get("val_loss", rec["train_loss"])
        history.append(rec)
        log.info("epoch %d train %.5f val %s", epoch, rec["train_loss"],
                 f"{rec['val_loss']:.5f}" if "val_loss" in rec else "-")
        if progress is not None:
            progress(rec)
        if score < best_loss:
            best, best_loss, best_epoch, stale = model, score, epoch, 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    return TrainResult(best, history, best_epoch, [float(x) for x in np.ravel(pw)])
