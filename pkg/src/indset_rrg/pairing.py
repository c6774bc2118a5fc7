"""Incremental random d-regular graphs in the pairing (configuration) model.

Every vertex ``v`` owns ``d`` points with ids ``v*d .. v*d + d - 1``.  The
unpaired points live in ``pool`` (a swap-with-last array, ``ppos`` maps point
id to slot) so that uniform sampling and deletion are O(1).  A vertex always
consumes its lowest unpaired point first, hence its free points are exactly
``v*d + (d - antideg[v]) .. v*d + d - 1``; when a random draw lands on a
different point of the same urn the two ids are swapped in the pool first.

Partners are drawn uniformly from the admissible unpaired points (not in the
completing urn, not in an urn already adjacent to it).  Rejection sampling is
used for a bounded number of tries, after which the pool is scanned.  If no
admissible point exists at all the completion is *exhausted* and the caller
must run :func:`terminal_loop_fixup`.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from ._jit import inline_kernel, kernel

from . import rng

# slots of Pairing.ints
N_VERT = 0
DEGREE = 1
POOL_SIZE = 2
LINKS = 3
STAMP = 4
PENDING = 5
FIXUPS = 6
SCANS = 7
N_INTS = 8

REJECTION_TRIES = 64

Pairing = namedtuple(
    "Pairing",
    ["ints", "rng", "pool", "ppos", "adj", "deg", "antideg", "mark", "excluded"],
)


class PairingExhausted(RuntimeError):
    """No admissible partner point is left for the vertex being completed."""

    def __init__(self, vertex: int, edges: list[tuple[int, int]]):
        super().__init__(f"no admissible partner left for vertex {vertex}")
        self.vertex = vertex
        self.edges = edges


@dataclass(frozen=True)
class GraphConfig:
    n_vertices: int
    degree: int
    seed: int = 0

    def __post_init__(self):
        n, d = self.n_vertices, self.degree
        if d < 3:
            raise ValueError(f"degree must be at least 3, got {d}")
        if n <= d:
            raise ValueError(f"need more than d={d} vertices for a simple {d}-regular graph, got {n}")
        if (n * d) % 2:
            raise ValueError(f"d*N must be even (d={d}, N={n})")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def allocate(config: GraphConfig) -> Pairing:
    n, d = config.n_vertices, config.degree
    points = n * d
    ints = np.zeros(N_INTS, dtype=np.int64)
    ints[N_VERT] = n
    ints[DEGREE] = d
    ints[POOL_SIZE] = points
    ints[PENDING] = -1
    idx = np.arange(points, dtype=np.int32)
    return Pairing(
        ints=ints,
        rng=rng.new_state(config.seed),
        pool=idx,
        ppos=idx.copy(),
        adj=np.full(points, -1, dtype=np.int32),
        deg=np.zeros(n, dtype=np.int32),
        antideg=np.full(n, d, dtype=np.int32),
        mark=np.zeros(n, dtype=np.int64),
        excluded=np.zeros(n, dtype=np.uint8),
    )


# --------------------------------------------------------------------------
# jitted primitives, shared with the labeling kernel


@inline_kernel
def _drop_slot(pr, p):
    pool, ppos, ints = pr.pool, pr.ppos, pr.ints
    pos = ppos[p]
    last = pool[ints[POOL_SIZE] - 1]
    pool[pos] = last
    ppos[last] = pos
    ppos[p] = -1
    ints[POOL_SIZE] -= 1


@inline_kernel
def take_point(pr, v, p):
    """Remove one unpaired point of urn ``v``; ``p`` is the drawn point or -1."""
    d = pr.ints[DEGREE]
    q = v * d + d - pr.antideg[v]
    if p >= 0 and p != q:
        pool, ppos = pr.pool, pr.ppos
        a, b = ppos[p], ppos[q]
        pool[a] = q
        pool[b] = p
        ppos[q] = a
        ppos[p] = b
    _drop_slot(pr, q)
    pr.antideg[v] -= 1


@inline_kernel
def begin_completion(pr, i):
    """Stamp ``i`` and its neighbours so admissibility is an O(1) test."""
    d = pr.ints[DEGREE]
    pr.ints[STAMP] += 1
    s = pr.ints[STAMP]
    pr.mark[i] = s
    base = i * d
    for k in range(pr.deg[i]):
        pr.mark[pr.adj[base + k]] = s


@kernel
def draw_partner(pr, i):
    """Uniform admissible point for the completion of ``i``, or -1."""
    ints = pr.ints
    d = ints[DEGREE]
    s = ints[STAMP]
    size = ints[POOL_SIZE]
    if size == 0:
        return -1
    for _ in range(REJECTION_TRIES):
        p = pr.pool[rng.below(pr.rng, size)]
        if pr.mark[p // d] != s:
            return p
    # two passes over the pool: count the admissible points, then pick one
    ints[SCANS] += 1
    count = 0
    for k in range(size):
        if pr.mark[pr.pool[k] // d] != s:
            count += 1
    if count == 0:
        return -1
    target = rng.below(pr.rng, count)
    for k in range(size):
        p = pr.pool[k]
        if pr.mark[p // d] != s:
            if target == 0:
                return p
            target -= 1
    return -1


@inline_kernel
def link(pr, i, p):
    """Pair a point of ``i`` with pool point ``p`` and record the edge."""
    d = pr.ints[DEGREE]
    v = p // d
    take_point(pr, v, p)
    take_point(pr, i, -1)
    pr.adj[i * d + pr.deg[i]] = v
    pr.deg[i] += 1
    pr.adj[v * d + pr.deg[v]] = i
    pr.deg[v] += 1
    pr.mark[v] = pr.ints[STAMP]
    pr.ints[LINKS] += 1
    return v


@kernel
def discard_points(pr, i):
    """Drop every remaining point of ``i`` and flag it as excluded from I."""
    removed = pr.antideg[i]
    while pr.antideg[i] > 0:
        take_point(pr, i, -1)
    pr.excluded[i] = 1
    pr.ints[FIXUPS] += 1
    return removed


@kernel
def complete_plain(pr, i, out):
    """Subroutine GA on the bare pairing; partners are written to ``out``.

    Returns the number of edges added, or ``-(added + 1)`` on exhaustion, in
    which case ``i`` is recorded as the pending vertex.
    """
    added = 0
    if pr.antideg[i] == 0:
        return 0
    begin_completion(pr, i)
    while pr.antideg[i] > 0:
        p = draw_partner(pr, i)
        if p < 0:
            pr.ints[PENDING] = i
            return -(added + 1)
        out[added] = link(pr, i, p)
        added += 1
    return added


# --------------------------------------------------------------------------
# Python-facing API


class PairingState:
    """Mutable pairing-model state for one graph.

    Confined to one thread; independent runs use independent states.
    """

    def __init__(self, config: GraphConfig, arrays: Pairing | None = None):
        self.config = config
        self.arrays = arrays if arrays is not None else allocate(config)

    @property
    def n(self) -> int:
        return self.config.n_vertices

    @property
    def d(self) -> int:
        return self.config.degree

    @property
    def pool_size(self) -> int:
        return int(self.arrays.ints[POOL_SIZE])

    @property
    def deg(self) -> np.ndarray:
        return self.arrays.deg

    @property
    def antideg(self) -> np.ndarray:
        return self.arrays.antideg

    @property
    def links(self) -> int:
        return int(self.arrays.ints[LINKS])

    def neighbors(self, i: int) -> list[int]:
        d = self.d
        return [int(v) for v in self.arrays.adj[i * d: i * d + self.arrays.deg[i]]]

    def unpaired_points(self) -> list[int]:
        return [int(p) for p in self.arrays.pool[: self.pool_size]]

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, sorted."""
        out = []
        for u in range(self.n):
            for v in self.neighbors(u):
                if u < v:
                    out.append((u, v))
        out.sort()
        return out

    def excluded(self) -> list[int]:
        return [int(v) for v in np.flatnonzero(self.arrays.excluded)]

    def is_complete(self) -> bool:
        return self.pool_size == 0

    def connect(self, u: int, v: int) -> None:
        """Force the pairing of one free point of ``u`` with one of ``v``.

        Used to stage specific configurations; simplicity is still enforced.
        """
        if u == v:
            raise ValueError("loops are not allowed")
        if self.antideg[u] == 0 or self.antideg[v] == 0:
            raise ValueError(f"no free point left on {u if self.antideg[u] == 0 else v}")
        if v in self.neighbors(u):
            raise ValueError(f"edge ({u}, {v}) already present")
        begin_completion(self.arrays, u)
        d = self.d
        link(self.arrays, u, v * d + d - int(self.antideg[v]))

    def write_edge_list(self, path) -> None:
        write_edge_list(self.edges(), path)


def new_pairing(config: GraphConfig) -> PairingState:
    """Fresh state: every urn holds ``d`` free points, no edges yet."""
    return PairingState(config)


def subroutine_ga(state: PairingState, i: int) -> list[tuple[int, int]]:
    """Complete all free connections of vertex ``i`` with random partners.

    Returns the created edges ``(i, partner)`` in creation order.  Raises
    :class:`PairingExhausted` (carrying the edges made so far) when only
    inadmissible points remain; :func:`terminal_loop_fixup` resolves it.
    """
    out = np.empty(state.d, dtype=np.int64)
    r = complete_plain(state.arrays, i, out)
    added = r if r >= 0 else -r - 1
    edges = [(i, int(v)) for v in out[:added]]
    if r < 0:
        raise PairingExhausted(i, edges)
    return edges


def terminal_loop_fixup(state: PairingState) -> list[int]:
    """Discard the points of the vertex whose completion got exhausted.

    The vertex is flagged as excluded from the independent set; the labeling
    layer turns it into a cover vertex.  Returns the excluded ids (empty if
    no exhaustion is pending).
    """
    ints = state.arrays.ints
    v = int(ints[PENDING])
    if v < 0:
        return []
    ints[PENDING] = -1
    discard_points(state.arrays, v)
    return [v]


def generate(config: GraphConfig) -> PairingState:
    """Generate a whole graph on its own, without labeling.

    The next urn to complete is the urn of a uniformly drawn unpaired point,
    so the process treats all vertices alike.  Exhausted urns go through the
    terminal fixup and the process continues.
    """
    state = new_pairing(config)
    out = np.empty(config.degree, dtype=np.int64)
    _generate(state.arrays, out)
    return state


@kernel
def _generate(pr, out):
    d = pr.ints[DEGREE]
    while pr.ints[POOL_SIZE] > 0:
        i = pr.pool[rng.below(pr.rng, pr.ints[POOL_SIZE])] // d
        if complete_plain(pr, i, out) < 0:
            pr.ints[PENDING] = -1
            discard_points(pr, i)


def write_edge_list(edges, path) -> None:
    """One ``u v`` line per edge (``u < v``), 0-based ids, LF endings."""
    with open(path, "w", newline="\n") as fh:
        for u, v in edges:
            if u > v:
                u, v = v, u
            fh.write(f"{u} {v}\n")


def read_edge_list(path) -> list[tuple[int, int]]:
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            u, v = int(parts[0]), int(parts[1])
            edges.append((min(u, v), max(u, v)))
    return edges
