"""Flat array form of a model shared by enumeration and the sampling kernels.

Distinct laws are stored as padded rows of ``values``/``probs``/``cum``.
History-specific laws live in a trie over support indices: node 0 is the
empty history, ``child[node, j]`` is the node reached by drawing index ``j``
(or -1), and ``node_dist[node]`` overrides ``step_default[depth]`` when set.
"""
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["CompiledModel", "compile_model"]


@dataclass(frozen=True)
class CompiledModel:
    values: np.ndarray  # (n_dists, width)
    probs: np.ndarray  # (n_dists, width)
    cum: np.ndarray  # (n_dists, width), inf from sizes[d]-1 onwards
    sizes: np.ndarray  # (n_dists,)
    step_default: np.ndarray  # (n_steps,)
    node_dist: np.ndarray  # (n_nodes,)
    child: np.ndarray  # (n_nodes, width)
    initial: float

    @property
    def n_steps(self):
        return len(self.step_default)


def compile_model(model):
    dists, index = [], {}

    def dist_id(br):
        key = (tuple(br.support), tuple(br.probs))
        if key not in index:
            index[key] = len(dists)
            dists.append(key)
        return index[key]

    step_default = [dist_id(st.default) for st in model.steps]
    nodes = {(): 0}
    node_dist = [-1]
    for st in model.steps:
        for key, br in st.branches:
            for depth in range(len(key) + 1):
                pre = key[:depth]
                if pre not in nodes:
                    nodes[pre] = len(node_dist)
                    node_dist.append(-1)
            node_dist[nodes[key]] = dist_id(br)

    width = max(len(v) for v, _ in dists)
    nd = len(dists)
    values = np.zeros((nd, width))
    probs = np.zeros((nd, width))
    cum = np.full((nd, width), np.inf)
    sizes = np.zeros(nd, dtype=np.int64)
    for d, (vals, prs) in enumerate(dists):
        k = len(vals)
        values[d, :k] = vals
        probs[d, :k] = prs
        sizes[d] = k
        for j in range(k - 1):
            cum[d, j] = math.fsum(prs[: j + 1])

    child = np.full((len(node_dist), width), -1, dtype=np.int64)
    for pre, nid in nodes.items():
        if pre:
            child[nodes[pre[:-1]], pre[-1]] = nid

    return CompiledModel(
        values=values,
        probs=probs,
        cum=cum,
        sizes=sizes,
        step_default=np.asarray(step_default, dtype=np.int64),
        node_dist=np.asarray(node_dist, dtype=np.int64),
        child=child,
        initial=float(model.initial),
    )
