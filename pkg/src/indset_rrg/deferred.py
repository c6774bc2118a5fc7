"""Deferred-decision prioritized construction of independent sets.

The graph is generated by the pairing model *while* vertices are labeled.
Labels are ``U`` (unlabeled), ``P`` (deferred independent-set candidate),
``C`` (deferred cover candidate), ``I`` and ``V`` (final).  ``P``/``C``
vertices are grouped into virtual sites whose anti-degree is the number of
free points of their members; a site is eventually dissolved (``P`` -> I,
``C`` -> V), optionally after flipping every member label (SWAP).

All hot loops are numba kernels operating on :class:`Alg`, a namedtuple of
flat arrays.  :class:`AlgState` wraps one run for Python callers and tests.

Bookkeeping structures
----------------------
* unlabeled vertices sit in FIFO doubly linked buckets keyed by anti-degree
  (used to pick a minimum anti-degree vertex);
* the candidate queue collects unlabeled vertices whose anti-degree dropped
  to 2 or less; ``harvest`` turns them into ``P`` and fills three FIFO
  buckets (anti-degree 0, 1, 2), drained in that order;
* sites live in FIFO doubly linked buckets keyed by anti-degree, with every
  anti-degree >= ``SITE_BUCKET_CAP`` sharing the top bucket, plus a
  max-pointer for the largest-anti-degree query.  Members form a singly
  linked list; merging re-tags the smaller site (union by size).  Members
  that become ``V`` while their site survives are detached lazily.
"""

from __future__ import annotations

import time
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
from ._jit import inline_kernel, kernel

from . import rng
from .pairing import (
    FIXUPS,
    LINKS,
    GraphConfig,
    PairingState,
    allocate,
    begin_completion,
    discard_points,
    draw_partner,
    link,
)

U, P, C, I, V = 0, 1, 2, 3, 4
LABEL_NAMES = "UPCIV"

# set ids understood by op_move
SET_N, SET_I, SET_V = 0, 1, 2

# schedules for the site rules once no P candidate is pending
SCHEDULE_SWEEP = 0     # every rule loop, then one largest-site deletion
SCHEDULE_PRIORITY = 1  # one rule application per outer iteration

SITE_BUCKET_CAP = 4096

# slots of Alg.cnt
N_DONE = 0
N_IN_I = 1
P_NOW = 2
P_EVENTS = 3
SWAPS = 4
CONFLICTS = 5
GUARDED = 6
A_COUNT = 7
A_MAX = 8
CAND_HEAD = 9
CAND_TAIL = 10
SITES_MADE = 11
MERGES = 12
TRACE_LEN = 13
TRACE_EVERY = 14
OPEN_P = 15
BUILD_DELS = 16
RESEEDS = 17
N_CNT = 20

Alg = namedtuple(
    "Alg",
    [
        "pr", "label", "cnt",
        "u_prev", "u_next", "u_head", "u_tail",
        "cand", "queued", "pq", "pq_len",
        "site_of", "m_next", "s_head", "s_tail", "s_size", "s_adeg",
        "s_bkt", "b_prev", "b_next", "b_head", "b_tail",
        "buf", "trace_x", "trace_p",
    ],
)


class LogicFault(AssertionError):
    """A precondition of a labeling operation was violated."""


def allocate_alg(config: GraphConfig, trace: bool = False) -> Alg:
    n, d = config.n_vertices, config.degree
    pr = allocate(config)
    cnt = np.zeros(N_CNT, dtype=np.int64)
    if trace:
        every = -(-d * n // 2000)
        cnt[TRACE_EVERY] = every
        cap = (d * n // 2) // every + 2
    else:
        cap = 1
    # every vertex starts in the anti-degree-d bucket, in index order
    u_prev = np.arange(-1, n - 1, dtype=np.int32)
    u_next = np.arange(1, n + 1, dtype=np.int32)
    u_next[-1] = -1
    u_head = np.full(d + 1, -1, dtype=np.int32)
    u_tail = np.full(d + 1, -1, dtype=np.int32)
    u_head[d] = 0
    u_tail[d] = n - 1
    return Alg(
        pr=pr,
        label=np.zeros(n, dtype=np.int8),
        cnt=cnt,
        u_prev=u_prev,
        u_next=u_next,
        u_head=u_head,
        u_tail=u_tail,
        cand=np.empty(n + 1, dtype=np.int32),
        queued=np.zeros(n, dtype=np.uint8),
        pq=np.empty((3, n), dtype=np.int32),
        pq_len=np.zeros(3, dtype=np.int64),
        site_of=np.full(n, -1, dtype=np.int32),
        m_next=np.full(n, -1, dtype=np.int32),
        s_head=np.full(n, -1, dtype=np.int32),
        s_tail=np.full(n, -1, dtype=np.int32),
        s_size=np.zeros(n, dtype=np.int32),
        s_adeg=np.zeros(n, dtype=np.int64),
        s_bkt=np.full(n, -1, dtype=np.int32),
        b_prev=np.full(n, -1, dtype=np.int32),
        b_next=np.full(n, -1, dtype=np.int32),
        b_head=np.full(SITE_BUCKET_CAP + 1, -1, dtype=np.int32),
        b_tail=np.full(SITE_BUCKET_CAP + 1, -1, dtype=np.int32),
        buf=np.empty(n, dtype=np.int32),
        trace_x=np.zeros(cap, dtype=np.int64),
        trace_p=np.zeros(cap, dtype=np.int64),
    )


# --------------------------------------------------------------------------
# unlabeled buckets


@inline_kernel
def _u_unlink(st, v, b):
    p, q = st.u_prev[v], st.u_next[v]
    if p >= 0:
        st.u_next[p] = q
    else:
        st.u_head[b] = q
    if q >= 0:
        st.u_prev[q] = p
    else:
        st.u_tail[b] = p


@inline_kernel
def _u_append(st, v, b):
    t = st.u_tail[b]
    st.u_prev[v] = t
    st.u_next[v] = -1
    if t >= 0:
        st.u_next[t] = v
    else:
        st.u_head[b] = v
    st.u_tail[b] = v


@kernel
def min_unlabeled(st):
    d = st.pr.ints[1]
    for b in range(d + 1):
        if st.u_head[b] >= 0:
            return st.u_head[b]
    return -1


# --------------------------------------------------------------------------
# site buckets (the ordered set of virtual sites)


@inline_kernel
def _bucket_of(adeg):
    return adeg if adeg < SITE_BUCKET_CAP else SITE_BUCKET_CAP


@inline_kernel
def a_insert(st, s):
    b = _bucket_of(st.s_adeg[s])
    t = st.b_tail[b]
    st.b_prev[s] = t
    st.b_next[s] = -1
    if t >= 0:
        st.b_next[t] = s
    else:
        st.b_head[b] = s
    st.b_tail[b] = s
    st.s_bkt[s] = b
    st.cnt[A_COUNT] += 1
    if b > st.cnt[A_MAX]:
        st.cnt[A_MAX] = b


@inline_kernel
def a_remove(st, s):
    b = st.s_bkt[s]
    if b < 0:
        return
    p, q = st.b_prev[s], st.b_next[s]
    if p >= 0:
        st.b_next[p] = q
    else:
        st.b_head[b] = q
    if q >= 0:
        st.b_prev[q] = p
    else:
        st.b_tail[b] = p
    st.s_bkt[s] = -1
    st.cnt[A_COUNT] -= 1


@inline_kernel
def a_update(st, s):
    b = st.s_bkt[s]
    if b < 0 or b == _bucket_of(st.s_adeg[s]):
        return
    a_remove(st, s)
    a_insert(st, s)


@kernel
def a_argmax(st):
    """Site with the largest anti-degree (earliest inserted among ties)."""
    b = st.cnt[A_MAX]
    while b >= 0 and st.b_head[b] < 0:
        b -= 1
    st.cnt[A_MAX] = max(b, 0)
    if b < 0:
        return -1
    s = st.b_head[b]
    if b < SITE_BUCKET_CAP:
        return s
    best = s
    while s >= 0:
        if st.s_adeg[s] > st.s_adeg[best]:
            best = s
        s = st.b_next[s]
    return best


# --------------------------------------------------------------------------
# labels and moves


@inline_kernel
def relabel(st, v, new):
    old = st.label[v]
    if old == new:
        return
    if old == I or old == V:
        raise LogicFault("I and V labels are final")
    if old == U:
        _u_unlink(st, v, st.pr.antideg[v])
    if old == P:
        st.cnt[P_NOW] -= 1
    if new == P:
        st.cnt[P_NOW] += 1
    if new == I or new == V:
        st.cnt[N_DONE] += 1
        if new == I:
            st.cnt[N_IN_I] += 1
        s = st.site_of[v]
        if s >= 0:
            st.site_of[v] = -1
            st.s_size[s] -= 1
    st.label[v] = new


@kernel
def op_move(st, i, src, dst):
    """Move ``i`` between the sets N (U/P/C), I and V, relabeling it."""
    lab = st.label[i]
    in_src = (lab <= C) if src == SET_N else (lab == I if src == SET_I else lab == V)
    in_dst = (lab <= C) if dst == SET_N else (lab == I if dst == SET_I else lab == V)
    if not in_src or in_dst or src == dst:
        raise LogicFault("op_move precondition violated")
    if dst == SET_I:
        relabel(st, i, I)
    elif dst == SET_V:
        relabel(st, i, V)
    else:
        raise LogicFault("vertices never return to N")


@kernel
def place_independent(st, v):
    """Move ``v`` to I unless it is excluded or already touches I."""
    pr = st.pr
    d = pr.ints[1]
    blocked = pr.excluded[v] != 0
    if not blocked:
        base = v * d
        for k in range(pr.deg[v]):
            if st.label[pr.adj[base + k]] == I:
                blocked = True
                break
    if blocked:
        st.cnt[GUARDED] += 1
        op_move(st, v, SET_N, SET_V)
    else:
        op_move(st, v, SET_N, SET_I)


# --------------------------------------------------------------------------
# graph growth with labeling hooks


@inline_kernel
def _consumed(st, v):
    """Bookkeeping after one free point of ``v`` was paired or discarded."""
    lab = st.label[v]
    if lab == U:
        a = st.pr.antideg[v]
        _u_unlink(st, v, a + 1)
        _u_append(st, v, a)
        if a <= 2 and st.queued[v] == 0:
            st.queued[v] = 1
            n = st.label.shape[0]
            st.cand[st.cnt[CAND_TAIL] % (n + 1)] = v
            st.cnt[CAND_TAIL] += 1
    elif lab == P or lab == C:
        s = st.site_of[v]
        if s >= 0:
            st.s_adeg[s] -= 1
            a_update(st, s)


@kernel
def complete(st, i):
    """Subroutine GA with labeling hooks; returns the number of new edges.

    On exhaustion the remaining points of ``i`` are discarded and ``i`` is
    flagged excluded (it will never be placed in I).
    """
    pr = st.pr
    if pr.antideg[i] == 0:
        return 0
    begin_completion(pr, i)
    added = 0
    every = st.cnt[TRACE_EVERY]
    while pr.antideg[i] > 0:
        p = draw_partner(pr, i)
        if p < 0:
            k = discard_points(pr, i)
            # replay the bucket moves one point at a time
            a = pr.antideg[i]
            pr.antideg[i] = k
            for _ in range(k):
                pr.antideg[i] -= 1
                _consumed(st, i)
            pr.antideg[i] = a
            break
        v = link(pr, i, p)
        _consumed(st, i)
        _consumed(st, v)
        added += 1
        if every > 0 and pr.ints[LINKS] % every == 0:
            t = st.cnt[TRACE_LEN]
            if t < st.trace_x.shape[0]:
                st.trace_x[t] = pr.ints[LINKS]
                st.trace_p[t] = st.cnt[P_NOW]
                st.cnt[TRACE_LEN] = t + 1
    return added


@kernel
def cover(st, j):
    """Complete ``j`` and put it in V."""
    complete(st, j)
    if st.label[j] <= C:
        op_move(st, j, SET_N, SET_V)


# --------------------------------------------------------------------------
# virtual sites


@kernel
def site_new(st, v):
    s = v
    st.s_head[s] = v
    st.s_tail[s] = v
    st.m_next[v] = -1
    st.s_size[s] = 1
    st.s_adeg[s] = st.pr.antideg[v]
    st.s_bkt[s] = -1
    st.site_of[v] = s
    st.cnt[SITES_MADE] += 1
    return s


@kernel
def site_add(st, s, v):
    st.m_next[v] = -1
    st.m_next[st.s_tail[s]] = v
    st.s_tail[s] = v
    st.s_size[s] += 1
    st.s_adeg[s] += st.pr.antideg[v]
    st.site_of[v] = s
    a_update(st, s)


@kernel
def site_merge(st, a, b):
    """Union of two sites; the larger keeps its id."""
    if st.s_size[a] < st.s_size[b]:
        a, b = b, a
    x = st.s_head[b]
    while x >= 0:
        if st.site_of[x] == b:
            st.site_of[x] = a
        x = st.m_next[x]
    st.m_next[st.s_tail[a]] = st.s_head[b]
    st.s_tail[a] = st.s_tail[b]
    st.s_size[a] += st.s_size[b]
    st.s_adeg[a] += st.s_adeg[b]
    st.s_head[b] = -1
    st.s_tail[b] = -1
    st.s_size[b] = 0
    st.s_adeg[b] = 0
    a_remove(st, b)
    a_update(st, a)
    st.cnt[MERGES] += 1
    return a


@kernel
def absorb(st, c, old_deg):
    """Attach the neighbours created since ``old_deg`` to the site of ``c``.

    Fresh and candidate neighbours become ``C`` members; ``C`` neighbours
    bring their whole site along (merge).  A ``P`` neighbour inside the same
    site is relabeled ``C``.  The resulting site is (re)inserted in the
    ordered set.  Returns the site id.
    """
    pr = st.pr
    d = pr.ints[1]
    base = c * d
    s = st.site_of[c]
    for k in range(old_deg, pr.deg[c]):
        j = pr.adj[base + k]
        if st.label[j] == C:
            t = st.site_of[j]
            if t >= 0 and t != s:
                if s < 0:
                    s = t
                    site_add(st, s, c)
                else:
                    s = site_merge(st, s, t)
    if s < 0:
        s = site_new(st, c)
    for k in range(old_deg, pr.deg[c]):
        j = pr.adj[base + k]
        lab = st.label[j]
        if lab == U or (lab == P and st.site_of[j] < 0):
            relabel(st, j, C)
            site_add(st, s, j)
        elif lab == P and st.site_of[j] == s:
            relabel(st, j, C)
            st.cnt[CONFLICTS] += 1
    if st.s_bkt[s] < 0:
        a_insert(st, s)
    else:
        a_update(st, s)
    return s


@kernel
def swap_op(st, s):
    """Flip P <-> C on every member of site ``s``."""
    x = st.s_head[s]
    while x >= 0:
        if st.site_of[x] == s:
            lab = st.label[x]
            if lab == P:
                relabel(st, x, C)
            elif lab == C:
                relabel(st, x, P)
            else:
                raise LogicFault("site member is neither P nor C")
        x = st.m_next[x]
    st.cnt[SWAPS] += 1


@kernel
def op_del(st, s):
    """Dissolve site ``s``: P members go to I, C members to V."""
    a_remove(st, s)
    x = st.s_head[s]
    while x >= 0:
        nxt = st.m_next[x]
        if st.site_of[x] == s:
            lab = st.label[x]
            if lab == P:
                place_independent(st, x)
            elif lab == C:
                op_move(st, x, SET_N, SET_V)
            else:
                raise LogicFault("site member is neither P nor C")
        x = nxt
    st.s_head[s] = -1
    st.s_tail[s] = -1
    st.s_size[s] = 0
    st.s_adeg[s] = 0


@kernel
def _open_members(st, s, want):
    """Copy attached members with free points (label ``want``, or any if -1)."""
    count = 0
    x = st.s_head[s]
    while x >= 0:
        if st.site_of[x] == s and st.pr.antideg[x] > 0:
            if want < 0 or st.label[x] == want:
                st.buf[count] = x
                count += 1
        x = st.m_next[x]
    return count


# --------------------------------------------------------------------------
# algorithm steps


@kernel
def harvest(st):
    """Label every pending candidate with anti-degree <= 2 as P."""
    n = st.label.shape[0]
    pr = st.pr
    while st.cnt[CAND_HEAD] < st.cnt[CAND_TAIL]:
        v = st.cand[st.cnt[CAND_HEAD] % (n + 1)]
        st.cnt[CAND_HEAD] += 1
        st.queued[v] = 0
        a = pr.antideg[v]
        if st.label[v] == U and a <= 2:
            relabel(st, v, P)
            st.cnt[P_EVENTS] += 1
            st.pq[a, st.pq_len[a]] = v
            st.pq_len[a] += 1


@kernel
def drain_one(st, l):
    """Process one P candidate taken from the front of the ordered set."""
    pr = st.pr
    if pr.antideg[l] == 0:
        place_independent(st, l)
        return
    old = pr.deg[l]
    complete(st, l)
    if pr.deg[l] == old:
        op_move(st, l, SET_N, SET_V)
    else:
        absorb(st, l, old)


@kernel
def drain(st):
    for a in range(3):
        for k in range(st.pq_len[a]):
            v = st.pq[a, k]
            if st.label[v] == P and st.site_of[v] < 0:
                drain_one(st, v)
        st.pq_len[a] = 0


@kernel
def rule_zero(st, s):
    """Closed site: SWAP then dissolve."""
    a_remove(st, s)
    swap_op(st, s)
    op_del(st, s)


@kernel
def rule_one(st, s):
    """One free point left: SWAP, close it, cover the new neighbour, dissolve."""
    pr = st.pr
    d = pr.ints[1]
    a_remove(st, s)
    swap_op(st, s)
    count = _open_members(st, s, -1)
    for k in range(count):
        i = st.buf[k]
        old = pr.deg[i]
        complete(st, i)
        if pr.deg[i] > old:
            j = pr.adj[i * d + pr.deg[i] - 1]
            cover(st, j)
    op_del(st, s)


@kernel
def rule_two(st, s):
    """Two free points: SWAP, complete the new P members, grow the site."""
    pr = st.pr
    swap_op(st, s)
    count = _open_members(st, s, -1)
    for k in range(count):
        i = st.buf[k]
        if st.label[i] > C or pr.antideg[i] == 0:
            continue
        if st.label[i] == C:
            st.cnt[OPEN_P] += 1
        old = pr.deg[i]
        complete(st, i)
        if pr.deg[i] > old:
            absorb(st, i, old)


@kernel
def rule_max(st, s):
    """Complete every open member of the largest site, then dissolve it."""
    a_remove(st, s)
    count = _open_members(st, s, -1)
    for k in range(count):
        x = st.buf[k]
        if st.label[x] == P:
            st.cnt[OPEN_P] += 1
        complete(st, x)
    op_del(st, s)


@kernel
def build_del(st, i):
    """Complete ``i``, put it in I, then complete and cover each neighbour."""
    pr = st.pr
    d = pr.ints[1]
    complete(st, i)
    place_independent(st, i)
    base = i * d
    for k in range(pr.deg[i]):
        j = pr.adj[base + k]
        if st.label[j] <= C:
            cover(st, j)
    st.cnt[BUILD_DELS] += 1


@kernel
def seed_cover(st, i):
    """Start of the d=3 process: complete ``i`` and put it in V."""
    complete(st, i)
    op_move(st, i, SET_N, SET_V)
    st.cnt[RESEEDS] += 1


@kernel
def site_rules_sweep(st):
    while st.b_head[0] >= 0:
        rule_zero(st, st.b_head[0])
    while st.b_head[1] >= 0:
        rule_one(st, st.b_head[1])
    while st.b_head[2] >= 0:
        rule_two(st, st.b_head[2])
    if st.cnt[A_COUNT] > 0:
        rule_max(st, a_argmax(st))


@kernel
def site_rules_priority(st):
    if st.b_head[0] >= 0:
        rule_zero(st, st.b_head[0])
    elif st.b_head[1] >= 0:
        rule_one(st, st.b_head[1])
    elif st.b_head[2] >= 0:
        rule_two(st, st.b_head[2])
    else:
        rule_max(st, a_argmax(st))


@kernel
def step(st, cubic, schedule):
    """One outer iteration; returns False once every vertex is in I or V."""
    n = st.label.shape[0]
    if st.cnt[N_DONE] >= n:
        return False
    harvest(st)
    if st.pq_len[0] + st.pq_len[1] + st.pq_len[2] > 0:
        drain(st)
    elif st.cnt[A_COUNT] > 0:
        if schedule == SCHEDULE_SWEEP:
            site_rules_sweep(st)
        else:
            site_rules_priority(st)
    else:
        t = min_unlabeled(st)
        if t < 0:
            raise LogicFault("vertices left in N but nothing to process")
        if cubic:
            seed_cover(st, t)
        else:
            build_del(st, t)
    return True


@kernel
def run_kernel(st, cubic, schedule):
    n = st.label.shape[0]
    first = rng.below(st.pr.rng, n)
    if cubic:
        seed_cover(st, first)
    else:
        build_del(st, first)
    while step(st, cubic, schedule):
        pass
    return st.cnt[N_IN_I]


# --------------------------------------------------------------------------
# Python-facing API


@dataclass(frozen=True)
class RunResult:
    d: int
    n: int
    seed: int
    i_size: int
    alpha: float
    wall_ms: float
    stats: dict = field(default_factory=dict, compare=False, repr=False)

    CSV_HEADER = "d,N,seed,i_size,alpha,wall_ms"

    def csv_row(self) -> str:
        return f"{self.d},{self.n},{self.seed},{self.i_size},{self.alpha:.9g},{self.wall_ms:.3f}"


_STAT_SLOTS = {
    "p_events": P_EVENTS,
    "swaps": SWAPS,
    "conflicts": CONFLICTS,
    "guarded": GUARDED,
    "sites_created": SITES_MADE,
    "merges": MERGES,
    "open_p_completions": OPEN_P,
    "build_dels": BUILD_DELS,
    "reseeds": RESEEDS,
}


class AlgState:
    """One labeling run: the pairing state plus all label bookkeeping.

    Besides :meth:`run`, the individual operations are exposed so that
    specific configurations can be staged and inspected.
    """

    def __init__(self, config: GraphConfig, trace: bool = False, schedule: int = SCHEDULE_SWEEP):
        self.config = config
        self.schedule = schedule
        self.arrays = allocate_alg(config, trace=trace)
        self.pairing = PairingState(config, self.arrays.pr)
        self.finished = False

    @property
    def n(self) -> int:
        return self.config.n_vertices

    @property
    def d(self) -> int:
        return self.config.degree

    @property
    def labels(self) -> np.ndarray:
        return self.arrays.label

    def label(self, v: int) -> str:
        return LABEL_NAMES[self.arrays.label[v]]

    def counter(self, slot: int) -> int:
        return int(self.arrays.cnt[slot])

    def stats(self) -> dict:
        out = {k: self.counter(slot) for k, slot in _STAT_SLOTS.items()}
        out["fixups"] = int(self.arrays.pr.ints[FIXUPS])
        out["links"] = int(self.arrays.pr.ints[LINKS])
        return out

    def independent_set(self) -> np.ndarray:
        return np.flatnonzero(self.arrays.label == I)

    def cover_set(self) -> np.ndarray:
        return np.flatnonzero(self.arrays.label == V)

    # ---- staging helpers -------------------------------------------------

    def connect(self, u: int, v: int) -> None:
        """Force an edge ``u``-``v`` with the usual anti-degree bookkeeping."""
        self.pairing.connect(u, v)
        _consumed(self.arrays, u)
        _consumed(self.arrays, v)

    def set_label(self, v: int, lab: str) -> None:
        relabel(self.arrays, v, LABEL_NAMES.index(lab))

    # ---- ordered sets ------------------------------------------------------

    def site_of(self, v: int) -> int:
        return int(self.arrays.site_of[v])

    def site_members(self, s: int) -> list[int]:
        out = []
        x = int(self.arrays.s_head[s])
        while x >= 0:
            if self.arrays.site_of[x] == s:
                out.append(x)
            x = int(self.arrays.m_next[x])
        return out

    def site_antidegree(self, s: int) -> int:
        return int(self.arrays.s_adeg[s])

    def site_degree(self, s: int) -> int:
        return self.d * len(self.site_members(s)) - self.site_antidegree(s)

    def sites(self) -> list[int]:
        """Sites in the ordered set, by ascending anti-degree (FIFO ties)."""
        a = self.arrays
        out = []
        for b in range(SITE_BUCKET_CAP + 1):
            s = int(a.b_head[b])
            while s >= 0:
                out.append(s)
                s = int(a.b_next[s])
        return out

    def candidates(self) -> list[int]:
        """P candidates still waiting to be processed, in processing order."""
        a = self.arrays
        out = []
        for k in range(3):
            for idx in range(int(a.pq_len[k])):
                v = int(a.pq[k, idx])
                if a.label[v] == P and a.site_of[v] < 0:
                    out.append(v)
        return out

    # ---- operations --------------------------------------------------------

    def op_move(self, i: int, src: int, dst: int) -> None:
        op_move(self.arrays, i, src, dst)

    def op_del(self, s: int) -> None:
        if self.arrays.s_bkt[s] < 0:
            raise LogicFault(f"site {s} is not in the ordered set")
        op_del(self.arrays, s)

    def swap_op(self, s: int) -> None:
        if self.arrays.s_bkt[s] < 0:
            raise LogicFault(f"site {s} is not in the ordered set")
        swap_op(self.arrays, s)

    def subroutine_ga(self, i: int) -> list[tuple[int, int]]:
        old = int(self.pairing.deg[i])
        complete(self.arrays, i)
        return [(i, v) for v in self.pairing.neighbors(i)[old:]]

    def create_or_update_virtual(self, p_site: int, new_edges) -> int:
        """Fold the freshly completed ``p_site`` and its new partners into a site."""
        nbrs = self.pairing.neighbors(p_site)
        old = len(nbrs) - len(new_edges)
        if [v for _, v in new_edges] != nbrs[old:]:
            raise LogicFault("new_edges must be the latest edges of p_site")
        return int(absorb(self.arrays, p_site, old))

    def op_build_del(self, i: int) -> None:
        if self.arrays.label[i] != U:
            raise LogicFault(f"build-del needs an unlabeled vertex, {i} is {self.label(i)}")
        build_del(self.arrays, i)

    def harvest(self) -> None:
        harvest(self.arrays)

    def step(self) -> bool:
        return bool(step(self.arrays, self.d == 3, self.schedule))

    def run(self) -> int:
        run_kernel(self.arrays, self.d == 3, self.schedule)
        self.finished = True
        return int(self.arrays.cnt[N_IN_I])

    def trace(self) -> tuple[np.ndarray, np.ndarray]:
        t = int(self.arrays.cnt[TRACE_LEN])
        return self.arrays.trace_x[:t].copy(), self.arrays.trace_p[:t] / self.n


def _result(state: AlgState, size: int, elapsed: float) -> RunResult:
    cfg = state.config
    return RunResult(
        d=cfg.degree,
        n=cfg.n_vertices,
        seed=cfg.seed,
        i_size=size,
        alpha=size / cfg.n_vertices,
        wall_ms=elapsed * 1e3,
        stats=state.stats(),
    )


def execute(config: GraphConfig, schedule: int = SCHEDULE_SWEEP, trace: bool = False) -> AlgState:
    state = AlgState(config, trace=trace, schedule=schedule)
    state.run()
    return state


def run_d3(config: GraphConfig, schedule: int = SCHEDULE_SWEEP) -> RunResult:
    """Deferred-decision algorithm for cubic graphs."""
    if config.degree != 3:
        raise ValueError("run_d3 needs degree 3")
    return run(config, schedule)


def run_general(config: GraphConfig, schedule: int = SCHEDULE_SWEEP) -> RunResult:
    """Deferred-decision algorithm for d > 3 (build-del seeding and fallback)."""
    if config.degree <= 3:
        raise ValueError("run_general needs degree > 3")
    return run(config, schedule)


def run(config: GraphConfig, schedule: int = SCHEDULE_SWEEP, keep_state: bool = False):
    t0 = time.perf_counter()
    state = AlgState(config, schedule=schedule)
    size = state.run()
    res = _result(state, size, time.perf_counter() - t0)
    return (res, state) if keep_state else res


def p_fraction_trace(config: GraphConfig, schedule: int = SCHEDULE_SWEEP):
    """Fraction of P-labeled vertices versus inserted links.

    Returns ``(links, fraction, total_fraction)`` where ``total_fraction`` is
    the number of P labelings over the run divided by N.
    """
    state = execute(config, schedule=schedule, trace=True)
    links, frac = state.trace()
    # samples are taken as links are made; close with the state after the run
    links = np.append(links, state.pairing.links)
    frac = np.append(frac, state.counter(P_NOW) / state.n)
    return links, frac, state.counter(P_EVENTS) / state.n
