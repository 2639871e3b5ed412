"""Adaptive-moment (Adam) updates applied functionally to a :class:`GcnModel`."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .model import FROZEN, GcnModel

log = logging.getLogger(__name__)


@dataclass
class AdamState:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    skipped: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def apply_update(model: GcnModel, grads: dict[str, np.ndarray],
                 state: AdamState) -> tuple[GcnModel, AdamState]:
    """One bias-corrected Adam step.  Returns a new model and the same state
    object, advanced.  A step with any non-finite gradient is skipped."""
    for name, g in grads.items():
        if name not in model.params:
            raise KeyError(f"gradient for unknown tensor {name!r}")
        if g.shape != model.params[name].shape:
            raise ValueError(f"{name}: gradient shape {g.shape} != {model.params[name].shape}")
    bad = [k for k, g in grads.items() if not np.all(np.isfinite(g))]
    if bad:
        state.skipped += 1
        log.warning("skipping update %d: non-finite gradient in %s", state.step + 1, ", ".join(sorted(bad)))
        return model, state

    state.step += 1
    t = state.step
    c1 = 1.0 - state.beta1 ** t
    c2 = 1.0 - state.beta2 ** t
    params = {}
    for name, w in model.params.items():
        g = grads.get(name)
        if g is None or name in FROZEN:
            params[name] = w
            continue
        g = np.asarray(g, dtype=np.float64)
        m = state.m.get(name, np.zeros_like(g))
        v = state.v.get(name, np.zeros_like(g))
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * g * g
        state.m[name], state.v[name] = m, v
        upd = state.learning_rate * (m / c1) / (np.sqrt(v / c2) + state.eps)
        params[name] = (w.astype(np.float64) - upd).astype(w.dtype)
    return GcnModel(model.config, params), state
