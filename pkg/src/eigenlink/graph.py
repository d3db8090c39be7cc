"""Simple undirected graphs in compressed sparse row form.

Parsing of whitespace edge lists, structural statistics and the
degree-preserving (link-crossing) null model live here.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import DataError

__all__ = [
    "Graph",
    "StatsRecord",
    "parse_edge_list",
    "read_edge_list",
    "network_stats",
    "rewire_degree_preserving",
    "complete_graph",
    "ring_graph",
    "star_graph",
    "path_graph",
    "erdos_renyi",
]


def _canonical_edges(n: int, edges) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise ValueError("edge endpoint out of range")
    arr = arr[arr[:, 0] != arr[:, 1]]
    arr = np.sort(arr, axis=1)
    if len(arr):
        arr = np.unique(arr, axis=0)
    return arr


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph over node ids ``0..n-1``.

    ``edges`` holds each link once as ``(u, v)`` with ``u < v`` in
    lexicographic order; ``indptr``/``indices`` are the symmetric CSR
    adjacency with strictly increasing columns per row.
    """

    n: int
    edges: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    degrees: np.ndarray
    labels: tuple[str, ...] = field(default=())

    @classmethod
    def from_edges(cls, n: int, edges, labels: Sequence[str] | None = None) -> "Graph":
        """Build a graph, dropping self-loops and merging duplicate links."""
        n = int(n)
        if n < 0:
            raise ValueError("n must be non-negative")
        e = _canonical_edges(n, edges)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        degrees = np.bincount(rows, minlength=n).astype(np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degrees, out=indptr[1:])
        if labels is None:
            labels = tuple(str(i) for i in range(n))
        else:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise ValueError("labels must have one entry per node")
        for a in (e, cols, degrees, indptr):
            a.setflags(write=False)
        g = cls(n=n, edges=e, indptr=indptr, indices=cols, degrees=degrees, labels=labels)
        g.check()
        return g

    def check(self) -> None:
        """Assert the structural invariants; raises ``AssertionError``."""
        assert len(self.indptr) == self.n + 1
        assert np.array_equal(np.diff(self.indptr), self.degrees)
        assert int(self.degrees.sum()) == 2 * self.m
        rows = np.repeat(np.arange(self.n), self.degrees)
        same_row = rows[1:] == rows[:-1]
        assert np.all(np.diff(self.indices)[same_row] > 0), "row columns must strictly increase"
        assert not np.any(rows == self.indices), "self-loop"
        # symmetry: transposed coordinate list equals itself
        key = rows * max(self.n, 1) + self.indices
        tkey = np.sort(self.indices * max(self.n, 1) + rows)
        assert np.array_equal(key, tkey), "adjacency not symmetric"

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, x: int) -> np.ndarray:
        return self.indices[self.indptr[x]:self.indptr[x + 1]]

    def has_edge(self, x: int, y: int) -> bool:
        row = self.neighbors(x)
        i = np.searchsorted(row, y)
        return bool(i < len(row) and row[i] == y)

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Adjacency as a float64 ``scipy.sparse.csr_matrix`` (read-only use)."""
        data = np.ones(len(self.indices), dtype=np.float64)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    @cached_property
    def edge_keys(self) -> np.ndarray:
        """Sorted ``u * n + v`` codes of the links, for fast membership tests."""
        return self.edges[:, 0] * self.n + self.edges[:, 1]

    def with_edges(self, edges) -> "Graph":
        """Same node set and labels, different link set."""
        return Graph.from_edges(self.n, edges, self.labels)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with node ``x`` renamed ``perm[x]``."""
        perm = np.asarray(perm, dtype=np.int64)
        labels = [""] * self.n
        for old, new in enumerate(perm):
            labels[new] = self.labels[old]
        return Graph.from_edges(self.n, perm[self.edges], labels)


@dataclass(frozen=True)
class StatsRecord:
    n_nodes: int
    n_edges: int
    density: float
    avg_degree: float
    avg_clustering: float
    avg_path_length: float
    assortativity: float
    lcc_size: int

    def as_row(self) -> dict:
        return {
            "N": self.n_nodes,
            "M": self.n_edges,
            "rho": self.density,
            "k": self.avg_degree,
            "c": self.avg_clustering,
            "l": self.avg_path_length,
            "sigma": self.assortativity,
            "lcc": self.lcc_size,
        }


def parse_edge_list(text: str | TextIO, ignore_weights: bool = True,
                    ignore_direction: bool = True) -> Graph:
    """Parse a whitespace-separated edge list.

    Lines starting with ``#`` or ``%`` are comments. Extra tokens after the
    two endpoints (weights, timestamps) are ignored. Node labels are mapped
    to ids in order of first appearance.
    """
    if not ignore_weights or not ignore_direction:
        raise NotImplementedError("only undirected, unweighted graphs are supported")
    stream = io.StringIO(text) if isinstance(text, str) else text
    ids: dict[str, int] = {}
    pairs: list[tuple[int, int]] = []
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        tok = s.split()
        if len(tok) < 2:
            raise DataError(f"line {lineno}: expected at least two tokens, got {s!r}")
        a = ids.setdefault(tok[0], len(ids))
        b = ids.setdefault(tok[1], len(ids))
        pairs.append((a, b))
    if not pairs:
        raise DataError("no edges")
    labels = [None] * len(ids)
    for lab, i in ids.items():
        labels[i] = lab
    return Graph.from_edges(len(ids), pairs, labels)


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh)


def _local_clustering(g: Graph) -> np.ndarray:
    A = g.adjacency
    tri = np.asarray((A @ A).multiply(A).sum(axis=1)).ravel()
    k = g.degrees.astype(np.float64)
    denom = k * (k - 1)
    out = np.zeros(g.n)
    mask = denom > 0
    out[mask] = tri[mask] / denom[mask]
    return out


def _lcc_mean_distance(g: Graph, block: int = 256) -> tuple[float, int]:
    ncomp, comp = csgraph.connected_components(g.adjacency, directed=False)
    sizes = np.bincount(comp)
    big = int(np.argmax(sizes))
    nodes = np.flatnonzero(comp == big)
    if len(nodes) < 2:
        return math.nan, len(nodes)
    sub = g.adjacency[nodes][:, nodes]
    total = 0.0
    for start in range(0, len(nodes), block):
        src = np.arange(start, min(start + block, len(nodes)))
        d = csgraph.shortest_path(sub, method="D", unweighted=True, directed=False, indices=src)
        total += float(d.sum())
    npairs = len(nodes) * (len(nodes) - 1)
    return total / npairs, len(nodes)


def _assortativity(g: Graph) -> float:
    if g.m == 0:
        return math.nan
    k = g.degrees.astype(np.float64)
    u, v = g.edges[:, 0], g.edges[:, 1]
    x = np.concatenate([k[u], k[v]])
    y = np.concatenate([k[v], k[u]])
    xc = x - x.mean()
    yc = y - y.mean()
    var = float(np.sqrt((xc * xc).sum() * (yc * yc).sum()))
    if var == 0.0:
        return math.nan
    return float((xc * yc).sum() / var)


def network_stats(g: Graph) -> StatsRecord:
    """Structural statistics: density, mean degree, clustering, mean
    shortest-path length on the largest component, and degree assortativity
    (``nan`` when every link joins equal degrees)."""
    if g.n < 2:
        raise DataError("statistics need at least two nodes")
    n, m = g.n, g.m
    avg_l, lcc = _lcc_mean_distance(g)
    return StatsRecord(
        n_nodes=n,
        n_edges=m,
        density=m / (n * (n - 1) / 2),
        avg_degree=2 * m / n,
        avg_clustering=float(_local_clustering(g).mean()),
        avg_path_length=avg_l,
        assortativity=_assortativity(g),
        lcc_size=lcc,
    )


def rewire_degree_preserving(g: Graph, n_swaps: int | None = None, seed: int = 0,
                             return_accepted: bool = False):
    """Link-crossing randomization keeping every node degree.

    Makes ``n_swaps`` attempts (default ``10 * M``). Each picks two links
    ``(a, b)``, ``(c, d)`` in random orientation and replaces them with
    ``(a, d)``, ``(c, b)`` unless that creates a self-loop or an existing
    link, in which case the attempt is skipped.
    """
    if n_swaps is None:
        n_swaps = 10 * g.m
    if n_swaps < 0:
        raise ValueError("n_swaps must be >= 0")
    edges = [tuple(map(int, e)) for e in g.edges]
    present = set(edges)
    rng = np.random.default_rng(seed)
    accepted = 0
    if g.m >= 2 and n_swaps:
        picks = rng.integers(0, g.m, size=(n_swaps, 2))
        flips = rng.integers(0, 2, size=(n_swaps, 2))
        for (i, j), (fi, fj) in zip(picks, flips):
            if i == j:
                continue
            a, b = edges[i] if not fi else edges[i][::-1]
            c, d = edges[j] if not fj else edges[j][::-1]
            if a == d or c == b:
                continue
            e1 = (a, d) if a < d else (d, a)
            e2 = (c, b) if c < b else (b, c)
            if e1 in present or e2 in present or e1 == e2:
                continue
            present.discard(edges[i])
            present.discard(edges[j])
            present.add(e1)
            present.add(e2)
            edges[i], edges[j] = e1, e2
            accepted += 1
    out = g.with_edges(edges if edges else np.empty((0, 2), dtype=np.int64))
    return (out, accepted) if return_accepted else out


# synthetic generators

def complete_graph(n: int) -> Graph:
    iu = np.triu_indices(n, 1)
    return Graph.from_edges(n, np.column_stack(iu))


def ring_graph(n: int) -> Graph:
    x = np.arange(n)
    return Graph.from_edges(n, np.column_stack([x, (x + 1) % n]))


def star_graph(leaves: int) -> Graph:
    """Node 0 joined to ``leaves`` leaf nodes."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def path_graph(n: int) -> Graph:
    x = np.arange(n - 1)
    return Graph.from_edges(n, np.column_stack([x, x + 1]))


def erdos_renyi(n: int, m: int, seed: int = 0) -> Graph:
    """Uniform random graph with exactly ``m`` links (G(n, m))."""
    total = n * (n - 1) // 2
    if m > total:
        raise ValueError("too many links for n nodes")
    rng = np.random.default_rng(seed)
    if m > total // 3:
        codes = rng.choice(total, size=m, replace=False)
        iu = np.triu_indices(n, 1)
        return Graph.from_edges(n, np.column_stack([iu[0][codes], iu[1][codes]]))
    chosen: set[int] = set()
    while len(chosen) < m:
        a = rng.integers(0, n, size=2 * (m - len(chosen)) + 8)
        b = rng.integers(0, n, size=len(a))
        for u, v in zip(a.tolist(), b.tolist()):
            if u == v:
                continue
            if u > v:
                u, v = v, u
            chosen.add(u * n + v)
            if len(chosen) == m:
                break
    codes = np.array(sorted(chosen), dtype=np.int64)
    return Graph.from_edges(n, np.column_stack([codes // n, codes % n]))


def edges_from_pairs(pairs: Iterable[tuple[int, int]]) -> np.ndarray:
    return np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
