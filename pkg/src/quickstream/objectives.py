"""Concrete objectives: graph max cover, concave-graph revenue, and the hard pair (f, g).

Graphs are stored in CSR form, symmetrized, without self-loops or duplicate
edges.  Node ids from the input file are remapped to dense indices in sorted
order; the original ids are kept in ``GraphInstance.labels``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .oracle import Session, ValueOracle


@dataclass(frozen=True)
class GraphInstance:
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray = field(repr=False)

    @property
    def edge_count(self) -> int:
        return int(self.indices.size // 2)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(u).tolist() for u in range(self.n)]

    @classmethod
    def from_edges(cls, n: int, edges, labels=None) -> "GraphInstance":
        """Build from an (m, 2) array of dense endpoints; symmetrizes and dedups."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint outside 0..n-1")
        edges = edges[edges[:, 0] != edges[:, 1]]
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        und = np.unique(np.stack([lo, hi], axis=1), axis=0) if edges.size else np.empty((0, 2), np.int64)
        src = np.concatenate([und[:, 0], und[:, 1]])
        dst = np.concatenate([und[:, 1], und[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        return cls(n=int(n), indptr=indptr, indices=dst.astype(np.int64), labels=np.asarray(labels))


def load_edge_list(path: str | os.PathLike) -> GraphInstance:
    """Read a SNAP-style edge list ('#' comments, two integer ids per line)."""
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two node ids, got {text!r}")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: node ids must be integers, got {text!r}") from None
    if not pairs:
        raise ValueError(f"{path}: no edges found")
    raw = np.asarray(pairs, dtype=np.int64)
    labels, dense = np.unique(raw, return_inverse=True)
    graph = GraphInstance.from_edges(labels.size, dense.reshape(-1, 2), labels=labels)
    if graph.edge_count == 0:
        raise ValueError(f"{path}: graph has no edges after removing self-loops")
    return graph


def random_graph(n: int, avg_degree: float, seed: int) -> GraphInstance:
    """Uniform random graph with about ``n * avg_degree / 2`` edges."""
    rng = np.random.default_rng(seed)
    m = int(round(n * avg_degree / 2))
    edges = rng.integers(0, n, size=(m, 2)) if n > 0 else np.empty((0, 2), np.int64)
    return GraphInstance.from_edges(n, edges)


def random_small_graph(n: int, p: float, rng: np.random.Generator) -> GraphInstance:
    """Erdos-Renyi G(n, p); used for exhaustively checkable instances."""
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return GraphInstance.from_edges(n, np.stack([iu[keep], ju[keep]], axis=1))


class MaxCoverOracle(ValueOracle):
    """f(S) = number of vertices incident with an edge incident with S.

    An isolated vertex in S contributes nothing.
    """

    def __init__(self, graph: GraphInstance):
        super().__init__(graph.n)
        self.graph = graph
        self._deg = graph.degrees()
        self._assert_normalized()

    def evaluate(self, elements: Iterable[int]) -> float:
        g = self.graph
        covered = set()
        for v in elements:
            if self._deg[v]:
                covered.add(v)
                covered.update(g.indices[g.indptr[v]:g.indptr[v + 1]].tolist())
        return float(len(covered))

    def closed_neighborhood(self, v: int) -> np.ndarray:
        if not self._deg[v]:
            return np.empty(0, dtype=np.int64)
        g = self.graph
        return np.append(g.indices[g.indptr[v]:g.indptr[v + 1]], v)

    def session(self) -> Session:
        return _CoverSession(self)


class _CoverSession(Session):
    def __init__(self, oracle: MaxCoverOracle):
        super().__init__(oracle)
        self.count = np.zeros(oracle.n, dtype=np.int32)

    def _touched(self, block) -> np.ndarray:
        parts = [self.oracle.closed_neighborhood(v) for v in block]
        return np.concatenate(parts) if len(parts) > 1 else parts[0]

    def _value_with(self, new):
        touched = self._touched(new)
        if len(new) > 1:
            touched = np.unique(touched)
        return self.value + float(np.count_nonzero(self.count[touched] == 0))

    def _add(self, new):
        touched = self._touched(new)
        np.add.at(self.count, touched, 1)
        self.value = float(np.count_nonzero(self.count))

    def _remove(self, gone):
        touched = self._touched(gone)
        np.subtract.at(self.count, touched, 1)
        self.value = float(np.count_nonzero(self.count))


def max_cover_eval(graph: GraphInstance, elements: Iterable[int]) -> int:
    return int(MaxCoverOracle(graph).evaluate(elements))


@dataclass(frozen=True)
class RevenueInstance:
    graph: GraphInstance
    weights: np.ndarray  # aligned with graph.indices
    alphas: np.ndarray
    seed: int


def draw_alphas(n: int, seed: int) -> np.ndarray:
    """Exponents in the open interval (0, 1), keyed by (seed, node).

    Philox is counter based, so node u always receives the u-th draw of the
    stream for ``seed`` regardless of how many nodes follow it.
    """
    gen = np.random.Generator(np.random.Philox(key=seed))
    bits = gen.integers(0, 2**53, size=n, dtype=np.uint64)
    return (bits.astype(np.float64) + 0.5) / 2.0**53


def make_revenue_instance(graph: GraphInstance, seed: int, weights=None) -> RevenueInstance:
    if graph.n == 0:
        raise ValueError("revenue instance needs a non-empty graph")
    if weights is None:
        weights = np.ones(graph.indices.size, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != graph.indices.shape or np.any(weights < 0):
        raise ValueError("weights must be non-negative and aligned with graph.indices")
    return RevenueInstance(graph=graph, weights=weights, alphas=draw_alphas(graph.n, seed), seed=seed)


class RevenueOracle(ValueOracle):
    """f(S) = sum over all u of (sum_{v in S} w_uv) ** alpha_u."""

    def __init__(self, instance: RevenueInstance):
        super().__init__(instance.graph.n)
        self.instance = instance
        self._assert_normalized()

    def _incidence(self, block):
        g, w = self.instance.graph, self.instance.weights
        idx = [g.indices[g.indptr[v]:g.indptr[v + 1]] for v in block]
        wts = [w[g.indptr[v]:g.indptr[v + 1]] for v in block]
        if len(idx) == 1:
            return idx[0], wts[0]
        return np.concatenate(idx), np.concatenate(wts)

    def evaluate(self, elements: Iterable[int]) -> float:
        block = list(dict.fromkeys(elements))
        if not block:
            return 0.0
        nodes, wts = self._incidence(block)
        if nodes.size == 0:
            return 0.0
        u, inv = np.unique(nodes, return_inverse=True)
        sums = np.bincount(inv, weights=wts)
        return float(np.sum(sums ** self.instance.alphas[u]))

    def session(self) -> Session:
        return _RevenueSession(self)


class _RevenueSession(Session):
    def __init__(self, oracle: RevenueOracle):
        super().__init__(oracle)
        self.sums = np.zeros(oracle.n, dtype=np.float64)
        self.member_mask = np.zeros(oracle.n, dtype=bool)

    def _delta(self, block):
        nodes, wts = self.oracle._incidence(block)
        if nodes.size == 0:
            return nodes, nodes.astype(np.float64), 0.0
        u, inv = np.unique(nodes, return_inverse=True)
        add = np.bincount(inv, weights=wts)
        alpha = self.oracle.instance.alphas[u]
        old = self.sums[u]
        gain = float(np.sum((old + add) ** alpha - old ** alpha))
        return u, add, gain

    def _value_with(self, new):
        return self.value + self._delta(new)[2]

    def _add(self, new):
        u, add, gain = self._delta(new)
        self.sums[u] += add
        self.member_mask[new] = True
        self.value += gain

    def _remove(self, gone):
        g, w = self.oracle.instance.graph, self.oracle.instance.weights
        self.member_mask[gone] = False
        nodes, _ = self.oracle._incidence(gone)
        # recompute affected sums from members so no float residue is left behind
        for u in np.unique(nodes).tolist():
            lo, hi = g.indptr[u], g.indptr[u + 1]
            self.sums[u] = float(np.sum(w[lo:hi][self.member_mask[g.indices[lo:hi]]]))
        self.value = float(np.sum(self.sums ** self.oracle.instance.alphas))


def revenue_eval(instance: RevenueInstance, elements: Iterable[int]) -> float:
    return RevenueOracle(instance).evaluate(elements)


class AdversarialOracle(ValueOracle):
    """The pair used by the query lower bound.

    Without ``hidden`` this is f(A) = min(|A|, ck).  With a hidden element a it
    is g, equal to ck whenever a is in A and to f otherwise.  With
    ``record=True`` the oracle collects the union of all queried sets of size
    at most ck - 1 in ``small_union``; that makes it single-run state.
    """

    def __init__(self, n: int, c: int, k: int, hidden: int | None = None, record: bool = False):
        super().__init__(n)
        if c < 1 or k < 1:
            raise ValueError("c and k must be positive")
        if hidden is not None and not 0 <= hidden < n:
            raise ValueError("hidden element outside ground set")
        self.c, self.k, self.hidden = c, k, hidden
        self.cap = c * k
        self.record = record
        self.small_union: set[int] = set()
        self._assert_normalized()

    @property
    def variant(self) -> str:
        return "plain_f" if self.hidden is None else "hidden_g"

    @property
    def distinguished(self) -> bool:
        return self.hidden is not None and self.hidden in self.small_union

    def _value(self, size: int, has_hidden: bool) -> float:
        if has_hidden:
            return float(self.cap)
        return float(min(size, self.cap))

    def evaluate(self, elements: Iterable[int]) -> float:
        s = set(elements)
        if self.record and len(s) <= self.cap - 1:
            self.small_union.update(s)
        return self._value(len(s), self.hidden is not None and self.hidden in s)

    def session(self) -> Session:
        return _AdversarialSession(self)


class _AdversarialSession(Session):
    def _value_with(self, new):
        o = self.oracle
        size = len(self.members) + len(new)
        if o.record and size <= o.cap - 1:
            o.small_union.update(self.members)
            o.small_union.update(new)
        hit = o.hidden is not None and (o.hidden in self.members or o.hidden in new)
        return o._value(size, hit)

    def _add(self, new):
        self._sync(len(self.members) + len(new), new)

    def _remove(self, gone):
        self._sync(len(self.members), ())

    def _sync(self, size, new):
        o = self.oracle
        hit = o.hidden is not None and (o.hidden in self.members or o.hidden in new)
        self.value = o._value(size, hit)


def adversarial_eval(n: int, c: int, k: int, elements: Iterable[int], hidden: int | None = None) -> float:
    return AdversarialOracle(n, c, k, hidden=hidden).evaluate(elements)


class ModularOracle(ValueOracle):
    """Additive objective f(S) = sum of per-element weights (weights >= 0)."""

    def __init__(self, weights: Sequence[float]):
        w = np.asarray(weights, dtype=np.float64)
        if np.any(w < 0):
            raise ValueError("modular weights must be non-negative")
        super().__init__(w.size)
        self.weights = w
        self._assert_normalized()

    def evaluate(self, elements: Iterable[int]) -> float:
        return float(sum(self.weights[e] for e in set(elements)))

    def session(self) -> Session:
        return _ModularSession(self)


class _ModularSession(Session):
    def _value_with(self, new):
        return self.value + float(sum(self.oracle.weights[e] for e in new))

    def _add(self, new):
        self.value += float(sum(self.oracle.weights[e] for e in new))

    def _remove(self, gone):
        self.value = self.oracle.evaluate(self.members)
