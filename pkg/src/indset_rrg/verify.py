"""Solution checks and an exact maximum-independent-set oracle.

``exact_mis`` is a plain branch and bound over Python-int bitsets: branch on
a vertex of maximum degree in the remaining graph, include it (dropping its
closed neighbourhood) or exclude it.  Vertices of degree 0 or 1 are taken
greedily, which is always safe.  A branch is cut when the current size plus
``n' - m'/Δ'`` (an upper bound on the independence number of the remaining
graph, from counting edges against the maximum degree) cannot beat the best
size found so far.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .pairing import read_edge_list

EXACT_LIMIT = 40


@dataclass(frozen=True)
class StaticGraph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges) -> "StaticGraph":
        nbrs = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @classmethod
    def from_edge_file(cls, path, n: int | None = None) -> "StaticGraph":
        edges = read_edge_list(path)
        if n is None:
            n = 1 + max((v for _, v in edges), default=-1)
        return cls.from_edges(n, edges)

    def edges(self):
        for u, row in enumerate(self.adjacency):
            for v in row:
                if u < v:
                    yield u, v

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


def verify_solution(g: StaticGraph, independent, cover) -> str:
    """``"ok"`` or a description of the first violation found."""
    ind = {int(v) for v in independent}
    cov = {int(v) for v in cover}
    both = ind & cov
    if both:
        return f"vertex {min(both)} is in both I and V"
    everything = set(range(g.n))
    missing = everything - ind - cov
    if missing:
        return f"vertex {min(missing)} is in neither I nor V"
    stray = (ind | cov) - everything
    if stray:
        return f"vertex {min(stray)} is not a vertex of the graph"
    for u, v in g.edges():
        if u in ind and v in ind:
            return f"edge ({u}, {v}) inside I"
    return "ok"


def _bitset_rows(g: StaticGraph) -> list[int]:
    rows = []
    for row in g.adjacency:
        mask = 0
        for v in row:
            mask |= 1 << v
        rows.append(mask)
    return rows


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def exact_mis(g: StaticGraph) -> int:
    """Size of a maximum independent set (n <= 40)."""
    if g.n > EXACT_LIMIT:
        raise ValueError(f"exact_mis is limited to {EXACT_LIMIT} vertices, got {g.n}")
    rows = _bitset_rows(g)
    best = 0

    def search(alive: int, size: int) -> None:
        nonlocal best
        # take isolated and pendant vertices greedily
        changed = True
        while changed and alive:
            changed = False
            for v in _bits(alive):
                if not (alive >> v) & 1:
                    continue
                nb = rows[v] & alive
                if nb & (nb - 1) == 0:
                    alive &= ~(nb | (1 << v))
                    size += 1
                    changed = True
        if not alive:
            best = max(best, size)
            return
        count = alive.bit_count()
        pick, top, edges2 = -1, -1, 0
        for v in _bits(alive):
            k = (rows[v] & alive).bit_count()
            edges2 += k
            if k > top:
                pick, top = v, k
        bound = count - (edges2 // 2) / top
        if size + bound <= best:
            return
        search(alive & ~(rows[pick] | (1 << pick)), size + 1)
        search(alive & ~(1 << pick), size)

    search((1 << g.n) - 1, 0)
    return best


def naive_mis(g: StaticGraph) -> int:
    """Largest independent set by checking subsets, largest first (small n only)."""
    if g.n > 20:
        raise ValueError("naive_mis is meant for at most 20 vertices")
    edges = np.array(list(g.edges()), dtype=np.int64).reshape(-1, 2)
    for size in range(g.n, 0, -1):
        for subset in combinations(range(g.n), size):
            chosen = np.zeros(g.n, dtype=bool)
            chosen[list(subset)] = True
            if not np.any(chosen[edges[:, 0]] & chosen[edges[:, 1]]):
                return size
    return 0


def check_labels(n: int, u: np.ndarray, v: np.ndarray, independent: np.ndarray, cover: np.ndarray) -> str:
    """Vectorized :func:`verify_solution` for large graphs.

    ``u``/``v`` list every edge once; ``independent``/``cover`` are boolean
    masks of length ``n``.
    """
    both = np.flatnonzero(independent & cover)
    if both.size:
        return f"vertex {both[0]} is in both I and V"
    missing = np.flatnonzero(~(independent | cover))
    if missing.size:
        return f"vertex {missing[0]} is in neither I nor V"
    bad = np.flatnonzero(independent[u] & independent[v])
    if bad.size:
        k = bad[0]
        return f"edge ({u[k]}, {v[k]}) inside I"
    return "ok"


def _directed_edges(pairing):
    pr = pairing.arrays
    n, d = pairing.n, pairing.d
    deg = pr.deg.astype(np.int64)
    slot = np.arange(d)[None, :] < deg[:, None]
    u = np.repeat(np.arange(n, dtype=np.int64), deg)
    v = pr.adj.reshape(n, d)[slot].astype(np.int64)
    return u, v


def graph_problems(pairing) -> str:
    """``"ok"`` unless a :class:`~indset_rrg.pairing.PairingState` is not simple and symmetric."""
    pr = pairing.arrays
    n, d = pairing.n, pairing.d
    total = pr.deg.astype(np.int64) + pr.antideg
    # vertices hit by the terminal fixup lost their discarded points
    bad = np.flatnonzero(np.where(pr.excluded != 0, total > d, total != d))
    if bad.size:
        return f"deg + antideg of vertex {bad[0]} is {total[bad[0]]}, expected {d}"
    u, v = _directed_edges(pairing)
    if np.any(u == v):
        return f"self-loop on vertex {u[np.argmax(u == v)]}"
    key = np.minimum(u, v) * n + np.maximum(u, v)
    key.sort()
    # each undirected edge must appear exactly twice (once per endpoint)
    if key.size % 2 or np.any(key[0::2] != key[1::2]):
        return "adjacency is not symmetric"
    if key.size > 2 and np.any(key[2::2] == key[1:-1:2]):
        return "duplicate edge"
    return "ok"


def check_run(state) -> str:
    """Verify a finished :class:`~indset_rrg.deferred.AlgState`."""
    from .deferred import I, V

    problem = graph_problems(state.pairing)
    if problem != "ok":
        return problem
    if not state.pairing.is_complete():
        return f"{state.pairing.pool_size} points left unpaired"
    u, v = _directed_edges(state.pairing)
    once = u < v
    labels = state.labels
    return check_labels(state.n, u[once], v[once], labels == I, labels == V)
