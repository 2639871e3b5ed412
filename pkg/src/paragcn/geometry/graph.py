from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..unionfind import connected_components


@dataclass(eq=False)
class PageGraph:
    """Undirected graph over page boxes (or points) with per-edge lengths.

    ``edges`` is kept canonical: each row ``(i, j)`` has ``i < j`` and rows
    are sorted lexicographically, so two graphs with the same edge set
    compare equal array-wise.
    """

    node_count: int
    edges: np.ndarray
    lengths: np.ndarray
    triangles: np.ndarray | None = field(default=None, repr=False)
    _neighbors: list | None = field(default=None, repr=False)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        ln = np.asarray(self.lengths, dtype=np.float64).reshape(-1)
        if len(e) != len(ln):
            raise ValueError("edges and lengths differ in length")
        if len(e):
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loop in PageGraph")
            if e.min() < 0 or e.max() >= self.node_count:
                raise ValueError("edge endpoint out of range")
            e = np.sort(e, axis=1)
            order = np.lexsort((e[:, 1], e[:, 0]))
            e, ln = e[order], ln[order]
            if np.any(np.all(e[1:] == e[:-1], axis=1)):
                raise ValueError("duplicate edge in PageGraph")
        self.edges = e
        self.lengths = ln

    @classmethod
    def from_pairs(cls, node_count: int, pairs, lengths=None) -> "PageGraph":
        """Build from possibly repeated pairs, keeping the shortest length."""
        best: dict[tuple[int, int], float] = {}
        pairs = list(pairs)
        if lengths is None:
            lengths = [0.0] * len(pairs)
        for (a, b), ln in zip(pairs, lengths):
            a, b = int(a), int(b)
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            if key not in best or ln < best[key]:
                best[key] = float(ln)
        keys = sorted(best)
        return cls(node_count, np.array(keys, dtype=np.int64).reshape(-1, 2),
                   np.array([best[k] for k in keys], dtype=np.float64))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.edges}

    def neighbors(self) -> list[np.ndarray]:
        if self._neighbors is None:
            adj: list[list[int]] = [[] for _ in range(self.node_count)]
            for a, b in self.edges:
                adj[a].append(int(b))
                adj[b].append(int(a))
            self._neighbors = [np.array(sorted(x), dtype=np.int64) for x in adj]
        return self._neighbors

    def components(self) -> list[list[int]]:
        return connected_components(self.node_count, self.edges)

    def is_connected(self) -> bool:
        return self.node_count <= 1 or len(self.components()) == 1

    def directed(self) -> tuple[np.ndarray, np.ndarray]:
        """Both orientations of every edge as (source, target) arrays,
        sorted by target then source."""
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        order = np.lexsort((src, dst))
        return src[order], dst[order]

    def permuted(self, perm: np.ndarray) -> "PageGraph":
        """Relabel node ``i`` as ``perm[i]``."""
        perm = np.asarray(perm)
        return PageGraph(self.node_count, perm[self.edges], self.lengths.copy())
