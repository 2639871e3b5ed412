"""Message-passing network over page graphs, forward and backward by hand.

Each step sends M(h_v, h_w) = relu([h_v | h_w] W_m + b_m) along every
directed edge w -> v, pools the messages at v (plain mean, or a per-head
softmax over scaled dot-product logits), and updates
h_v <- relu([h_v | m_v] W_u + b_u).  The node head reads two sigmoid
outputs per node; the edge head first symmetrizes endpoint states with
its own message function M' and reads one sigmoid output per edge.

Parameters may be stored as float32 or float64; all arithmetic runs in
float64.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import sparse

from ..geometry.graph import PageGraph

POOLINGS = ("average", "attention")
HEAD_TYPES = ("node_binary_pair", "edge_binary")


@dataclass(frozen=True)
class GcnConfig:
    steps: int = 8
    hidden_width: int = 32
    heads: int = 4
    pooling: str = "attention"
    head_type: str = "node_binary_pair"
    input_width: int = 29

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps: must be >= 1")
        if self.hidden_width < 1:
            raise ValueError("hidden_width: must be >= 1")
        if self.heads < 1 or self.hidden_width % self.heads:
            raise ValueError(f"heads: hidden_width {self.hidden_width} is not divisible by {self.heads}")
        if self.pooling not in POOLINGS:
            raise ValueError(f"pooling: expected one of {POOLINGS}, got {self.pooling!r}")
        if self.head_type not in HEAD_TYPES:
            raise ValueError(f"head_type: expected one of {HEAD_TYPES}, got {self.head_type!r}")
        if self.input_width < 1:
            raise ValueError("input_width: must be >= 1")

    @property
    def outputs(self) -> int:
        return 2 if self.head_type == "node_binary_pair" else 1

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class GcnModel:
    config: GcnConfig
    params: dict[str, np.ndarray] = field(default_factory=dict)

    def copy(self) -> "GcnModel":
        return GcnModel(self.config, {k: v.copy() for k, v in self.params.items()})

    @property
    def dtype(self):
        return next(iter(self.params.values())).dtype

    def astype(self, dtype) -> "GcnModel":
        return GcnModel(self.config, {k: v.astype(dtype) for k, v in self.params.items()})

    def step_weights(self, t: int) -> dict[str, np.ndarray]:
        pre = f"step{t}."
        return {k[len(pre):]: v for k, v in self.params.items() if k.startswith(pre)}


def param_shapes(cfg: GcnConfig) -> dict[str, tuple[int, ...]]:
    H = cfg.hidden_width
    shapes: dict[str, tuple[int, ...]] = {
        "input.shift": (cfg.input_width,),
        "input.scale": (cfg.input_width,),
        "input.W": (cfg.input_width, H),
        "input.b": (H,),
    }
    for t in range(cfg.steps):
        shapes[f"step{t}.msg.W"] = (2 * H, H)
        shapes[f"step{t}.msg.b"] = (H,)
        if cfg.pooling == "attention":
            shapes[f"step{t}.att.Wq"] = (H, H)
            shapes[f"step{t}.att.Wk"] = (H, H)
        shapes[f"step{t}.upd.W"] = (2 * H, H)
        shapes[f"step{t}.upd.b"] = (H,)
    if cfg.head_type == "edge_binary":
        shapes["edge.W"] = (2 * H, H)
        shapes["edge.b"] = (H,)
    shapes["out.W"] = (H, cfg.outputs)
    shapes["out.b"] = (cfg.outputs,)
    return shapes


# fixed input normalization, set from data rather than trained
FROZEN = ("input.shift", "input.scale")


def init_model(config: GcnConfig, seed: int, dtype=np.float32) -> GcnModel:
    """He-normal ReLU layers, small attention and output layers, zero biases."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x6C6E]))
    params = {}
    for name, shape in param_shapes(config).items():
        if name == "input.shift" or name.endswith(".b"):
            w = np.zeros(shape)
        elif name == "input.scale":
            w = np.ones(shape)
        elif ".att." in name or name.startswith("out."):
            w = rng.normal(0.0, 1.0 / np.sqrt(shape[0]), shape)
        else:
            w = rng.normal(0.0, np.sqrt(2.0 / shape[0]), shape)
        params[name] = w.astype(dtype)
    return GcnModel(config, params)


class GraphIndex:
    """Directed-edge bookkeeping for segment sums over a :class:`PageGraph`.

    Sums go through sparse incidence matrices; rows accumulate in edge order,
    so results do not depend on thread count.
    """

    def __init__(self, graph: PageGraph):
        self.n = graph.node_count
        self.edges = graph.edges
        self.src, self.dst = graph.directed()
        E = len(self.src)
        self.deg = np.bincount(self.dst, minlength=self.n).astype(np.float64)
        self.has_in = self.deg > 0
        self._dst_starts = np.searchsorted(self.dst, np.flatnonzero(self.has_in))
        ones = np.ones(E)
        cols = np.arange(E)
        self._to_dst = sparse.csr_matrix((ones, (self.dst, cols)), shape=(self.n, E))
        self._to_src = sparse.csr_matrix((ones, (self.src, cols)), shape=(self.n, E))

    @staticmethod
    def _apply(mat, values: np.ndarray) -> np.ndarray:
        if len(values) == 0:
            return np.zeros((mat.shape[0],) + values.shape[1:])
        flat = values.reshape(len(values), -1)
        return np.asarray(mat @ flat).reshape((mat.shape[0],) + values.shape[1:])

    def sum_to_dst(self, values: np.ndarray) -> np.ndarray:
        return self._apply(self._to_dst, values)

    def sum_to_src(self, values: np.ndarray) -> np.ndarray:
        return self._apply(self._to_src, values)

    def max_to_dst(self, values: np.ndarray) -> np.ndarray:
        out = np.zeros((self.n,) + values.shape[1:])
        if len(values):
            out[self.has_in] = np.maximum.reduceat(values, self._dst_starts, axis=0)
        return out


def _relu(x):
    return np.maximum(x, 0.0)


def _p64(model: GcnModel) -> dict[str, np.ndarray]:
    return {k: np.asarray(v, dtype=np.float64) for k, v in model.params.items()}


def _step_forward(h, gi: GraphIndex, W, pooling: str, heads: int):
    n, H = h.shape
    # [h_dst | h_src] W split into per-node products, then gathered per edge
    Wm = W["msg.W"]
    pre_m = (h @ Wm[:H])[gi.dst] + (h @ Wm[H:])[gi.src] + W["msg.b"]
    msg = _relu(pre_m)
    cache = {"h": h, "pre_m": pre_m, "msg": msg}
    if pooling == "average":
        m = gi.sum_to_dst(msg)
        m[gi.has_in] /= gi.deg[gi.has_in, None]
    else:
        dh = H // heads
        q = h @ W["att.Wq"]
        k = h @ W["att.Wk"]
        qe = q[gi.dst].reshape(-1, heads, dh)
        ke = k[gi.src].reshape(-1, heads, dh)
        logits = np.sum(qe * ke, axis=2) / np.sqrt(dh)
        ex = np.exp(logits - gi.max_to_dst(logits)[gi.dst])
        S = gi.sum_to_dst(ex[:, :, None] * msg.reshape(-1, heads, dh))
        Z = gi.sum_to_dst(ex)
        m = np.zeros((n, heads, dh))
        m[gi.has_in] = S[gi.has_in] / Z[gi.has_in, :, None]
        m = m.reshape(n, H)
        cache.update(qe=qe, ke=ke, ex=ex, S=S, Z=Z)
    zu = np.concatenate([h, m], axis=1)
    pre_u = zu @ W["upd.W"] + W["upd.b"]
    cache.update(m=m, zu=zu, pre_u=pre_u)
    return _relu(pre_u), cache


def _step_backward(dout, c, gi: GraphIndex, W, pooling: str, heads: int):
    n, H = c["h"].shape
    g = {}
    dpre_u = dout * (c["pre_u"] > 0)
    g["upd.W"] = c["zu"].T @ dpre_u
    g["upd.b"] = dpre_u.sum(axis=0)
    dzu = dpre_u @ W["upd.W"].T
    dh = dzu[:, :H].copy()
    dm = dzu[:, H:]
    if pooling == "average":
        dm_in = np.zeros_like(dm)
        dm_in[gi.has_in] = dm[gi.has_in] / gi.deg[gi.has_in, None]
        dmsg = dm_in[gi.dst]
    else:
        d = H // heads
        dm3 = dm.reshape(n, heads, d)
        S, Z, ex = c["S"], c["Z"], c["ex"]
        Zs = np.where(Z > 0, Z, 1.0)
        dS = dm3 / Zs[:, :, None]
        dZ = -np.sum(dm3 * S, axis=2) / Zs ** 2
        msg3 = c["msg"].reshape(-1, heads, d)
        dS_e = dS[gi.dst]
        dmsg = (ex[:, :, None] * dS_e).reshape(-1, H)
        dex = np.sum(dS_e * msg3, axis=2) + dZ[gi.dst]
        dlog = dex * ex / np.sqrt(d)
        dqe = (dlog[:, :, None] * c["ke"]).reshape(-1, H)
        dke = (dlog[:, :, None] * c["qe"]).reshape(-1, H)
        dq = gi.sum_to_dst(dqe)
        dk = gi.sum_to_src(dke)
        g["att.Wq"] = c["h"].T @ dq
        g["att.Wk"] = c["h"].T @ dk
        dh += dq @ W["att.Wq"].T + dk @ W["att.Wk"].T
    dpre_m = dmsg * (c["pre_m"] > 0)
    to_dst, to_src = gi.sum_to_dst(dpre_m), gi.sum_to_src(dpre_m)
    g["msg.W"] = np.concatenate([c["h"].T @ to_dst, c["h"].T @ to_src])
    g["msg.b"] = to_dst.sum(axis=0)
    dh += to_dst @ W["msg.W"][:H].T + to_src @ W["msg.W"][H:].T
    return dh, g


def message_pass_step(h: np.ndarray, graph: PageGraph | GraphIndex, step_weights: dict,
                      pooling: str, heads: int = 4) -> np.ndarray:
    """One pooling-and-update step on hidden states ``h``."""
    gi = graph if isinstance(graph, GraphIndex) else GraphIndex(graph)
    if h.shape[0] != gi.n:
        raise ValueError(f"hidden states have {h.shape[0]} rows for {gi.n} nodes")
    W = {k: np.asarray(v, dtype=np.float64) for k, v in step_weights.items()}
    out, _ = _step_forward(np.asarray(h, dtype=np.float64), gi, W, pooling, heads)
    return out


def attention_weights(h: np.ndarray, graph: PageGraph | GraphIndex, step_weights: dict,
                      heads: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per directed edge (src -> dst) softmax weights, shape (E, heads)."""
    gi = graph if isinstance(graph, GraphIndex) else GraphIndex(graph)
    h = np.asarray(h, dtype=np.float64)
    d = h.shape[1] // heads
    q = (h @ np.asarray(step_weights["att.Wq"], np.float64))[gi.dst].reshape(-1, heads, d)
    k = (h @ np.asarray(step_weights["att.Wk"], np.float64))[gi.src].reshape(-1, heads, d)
    logits = np.sum(q * k, axis=2) / np.sqrt(d)
    ex = np.exp(logits - gi.max_to_dst(logits)[gi.dst])
    return ex / gi.sum_to_dst(ex)[gi.dst], gi.src, gi.dst


def node_to_edge(h: np.ndarray, graph: PageGraph, weights: dict) -> np.ndarray:
    """Symmetrized edge states (M'(h_v, h_w) + M'(h_w, h_v)) / 2."""
    h = np.asarray(h, dtype=np.float64)
    W = np.asarray(weights["edge.W"], np.float64)
    b = np.asarray(weights["edge.b"], np.float64)
    e = graph.edges
    a = _relu(np.concatenate([h[e[:, 0]], h[e[:, 1]]], axis=1) @ W + b)
    r = _relu(np.concatenate([h[e[:, 1]], h[e[:, 0]]], axis=1) @ W + b)
    return 0.5 * (a + r)


def _forward(p, cfg: GcnConfig, X: np.ndarray, gi: GraphIndex):
    xn = (X - p["input.shift"]) * p["input.scale"]
    pre0 = xn @ p["input.W"] + p["input.b"]
    h = _relu(pre0)
    caches = []
    for t in range(cfg.steps):
        W = {k[len(f"step{t}."):]: v for k, v in p.items() if k.startswith(f"step{t}.")}
        h, c = _step_forward(h, gi, W, cfg.pooling, cfg.heads)
        caches.append(c)
    cache = {"xn": xn, "pre0": pre0, "steps": caches, "hT": h}
    if cfg.head_type == "node_binary_pair":
        feats = h
    else:
        e = gi.edges
        za = np.concatenate([h[e[:, 0]], h[e[:, 1]]], axis=1)
        zb = np.concatenate([h[e[:, 1]], h[e[:, 0]]], axis=1)
        pa = za @ p["edge.W"] + p["edge.b"]
        pb = zb @ p["edge.W"] + p["edge.b"]
        feats = 0.5 * (_relu(pa) + _relu(pb))
        cache.update(za=za, zb=zb, pa=pa, pb=pb)
    cache["feats"] = feats
    logits = feats @ p["out.W"] + p["out.b"]
    return logits, cache


def _backward(p, cfg: GcnConfig, cache, gi: GraphIndex, dlogits: np.ndarray):
    H = cfg.hidden_width
    g = {"out.W": cache["feats"].T @ dlogits, "out.b": dlogits.sum(axis=0)}
    dfeats = dlogits @ p["out.W"].T
    if cfg.head_type == "node_binary_pair":
        dh = dfeats
    else:
        e = gi.edges
        dpa = 0.5 * dfeats * (cache["pa"] > 0)
        dpb = 0.5 * dfeats * (cache["pb"] > 0)
        g["edge.W"] = cache["za"].T @ dpa + cache["zb"].T @ dpb
        g["edge.b"] = dpa.sum(axis=0) + dpb.sum(axis=0)
        dza = dpa @ p["edge.W"].T
        dzb = dpb @ p["edge.W"].T
        dh = np.zeros((gi.n, H))
        np.add.at(dh, e[:, 0], dza[:, :H] + dzb[:, H:])
        np.add.at(dh, e[:, 1], dza[:, H:] + dzb[:, :H])
    for t in reversed(range(cfg.steps)):
        W = {k[len(f"step{t}."):]: v for k, v in p.items() if k.startswith(f"step{t}.")}
        dh, gs = _step_backward(dh, cache["steps"][t], gi, W, cfg.pooling, cfg.heads)
        for k, v in gs.items():
            g[f"step{t}.{k}"] = v
    dpre0 = dh * (cache["pre0"] > 0)
    g["input.W"] = cache["xn"].T @ dpre0
    g["input.b"] = dpre0.sum(axis=0)
    for k in FROZEN:
        g[k] = np.zeros_like(p[k])
    return g


def _check_features(model: GcnModel, X: np.ndarray, n: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.config.input_width:
        raise ValueError(f"feature width {X.shape[-1]} does not match input_width "
                         f"{model.config.input_width}")
    if X.shape[0] != n:
        raise ValueError(f"{X.shape[0]} feature rows for {n} graph nodes")
    return X


def forward_logits(model: GcnModel, features: np.ndarray, graph: PageGraph | GraphIndex) -> np.ndarray:
    gi = graph if isinstance(graph, GraphIndex) else GraphIndex(graph)
    X = _check_features(model, features, gi.n)
    logits, _ = _forward(_p64(model), model.config, X, gi)
    return logits


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def forward(model: GcnModel, features: np.ndarray, graph: PageGraph | GraphIndex) -> np.ndarray:
    """Probabilities: (nodes, 2) [line start, line end] or (edges,) per edge."""
    p = sigmoid(forward_logits(model, features, graph))
    return p[:, 0] if model.config.head_type == "edge_binary" else p
