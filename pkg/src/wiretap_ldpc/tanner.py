"""Tanner graph sampling for irregular LDPC ensembles.

Configuration-model construction: node degrees are rounded from the target
distribution, sockets are matched by a random permutation, and length-4
cycles (including doubled edges) are removed by random edge swaps.

Ensembles with a heavy degree-2 fraction carry weight-t codewords on
cycles through degree-2 variables; those dominate the frame-error floor of
sampled instances.  Sampling therefore also expurgates short cycles made
only of degree-2 variables (up to an auto-scaled length), again by edge
swaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from numba import njit

from .degrees import DegreeDistribution

SWAP_BUDGET_PER_EDGE = 100
DEG2_GIRTH_CAP = 12


class UnrealizableDegreeSequenceError(ValueError):
    """No integer degree sequence close to the target fractions exists."""


class SwapBudgetExhaustedError(RuntimeError):
    """Cycle removal did not finish within the swap budget."""


@dataclass
class TannerGraph:
    """Bipartite graph of n_var variable nodes and n_chk check nodes.

    chk_adj[c] lists the variable indices adjacent to check c (sorted).
    """

    n_var: int
    n_chk: int
    chk_adj: list[np.ndarray]

    @property
    def n_edges(self) -> int:
        return int(sum(len(a) for a in self.chk_adj))

    def var_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_var, dtype=np.int64)
        for a in self.chk_adj:
            np.add.at(deg, a, 1)
        return deg

    def chk_degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.chk_adj], dtype=np.int64)

    def to_dense(self) -> np.ndarray:
        """Dense parity-check matrix; intended for small graphs and tests."""
        h = np.zeros((self.n_chk, self.n_var), dtype=np.uint8)
        for c, a in enumerate(self.chk_adj):
            h[c, a] ^= 1
        return h

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(check index, variable index) per edge, grouped by check."""
        ec = np.concatenate(
            [np.full(len(a), c, dtype=np.int64) for c, a in enumerate(self.chk_adj)]
        )
        ev = np.concatenate(self.chk_adj).astype(np.int64)
        return ec, ev


def _largest_remainder(total: int, fractions: dict[int, float]) -> dict[int, int]:
    degrees = sorted(fractions)
    raw = {d: fractions[d] * total for d in degrees}
    counts = {d: int(np.floor(raw[d])) for d in degrees}
    short = total - sum(counts.values())
    by_frac = sorted(degrees, key=lambda d: raw[d] - counts[d], reverse=True)
    for d in by_frac[:short]:
        counts[d] += 1
    return counts


def _absorb_deficit(counts: dict[int, int], deficit: int, degrees: list[int]) -> bool:
    """Add nodes absorbing `deficit` edges, changing each class by at most
    one node; at most one extra node lands at an off-target degree >= 2."""
    if deficit == 0:
        return True
    subsets = sorted(
        range(1 << len(degrees)),
        key=lambda m: -sum(degrees[i] for i in range(len(degrees)) if m >> i & 1),
    )
    for mask in subsets:
        chosen = [degrees[i] for i in range(len(degrees)) if mask >> i & 1]
        rem = deficit - sum(chosen)
        if rem == 0 or (rem >= 2 and rem not in chosen):
            for d in chosen:
                counts[d] = counts.get(d, 0) + 1
            if rem:
                counts[rem] = counts.get(rem, 0) + 1
            return True
    return False


def _check_counts(n_edges: int, dist: DegreeDistribution) -> dict[int, int]:
    """Integer check-degree counts whose edge total is exactly n_edges,
    each within about one node of the proportional target."""
    targets = {d: n_edges * f / d for d, f in dist.rho.items()}
    counts = {d: int(np.floor(t)) for d, t in targets.items()}
    deficit = n_edges - sum(d * c for d, c in counts.items())
    if deficit < 0:
        raise UnrealizableDegreeSequenceError("edge count too small for rounding")
    degrees = sorted(targets)

    if _absorb_deficit(counts, deficit, degrees):
        return {d: c for d, c in counts.items() if c > 0}
    # open up more sums by taking one node from a populated class
    for j in degrees:
        if counts[j] > 0:
            counts[j] -= 1
            if _absorb_deficit(counts, deficit + j, degrees):
                return {d: c for d, c in counts.items() if c > 0}
            counts[j] += 1
    raise UnrealizableDegreeSequenceError(
        f"cannot realize check degrees {sorted(dist.rho)} with {n_edges} edges"
    )


def _degree_list(counts: dict[int, int]) -> np.ndarray:
    out = np.concatenate(
        [np.full(c, d, dtype=np.int64) for d, c in sorted(counts.items())]
    )
    return out


def _find_offenders(ec: np.ndarray, ev: np.ndarray, n_var: int) -> np.ndarray:
    """Edge positions involved in a doubled edge or a 4-cycle (one per clash)."""
    order = np.lexsort((ev, ec))
    sc, sv = ec[order], ev[order]

    offenders = []
    # doubled edges: same (check, var) twice
    dup = np.flatnonzero((sc[1:] == sc[:-1]) & (sv[1:] == sv[:-1]))
    offenders.append(order[dup + 1])

    # 4-cycles: a variable pair shared by two checks
    keys = []
    pos = []
    deg = np.bincount(sc)
    max_deg = int(deg.max()) if deg.size else 0
    starts = np.concatenate([[0], np.cumsum(deg)])
    idx = np.arange(len(sc))
    grp_start = starts[sc]
    grp_deg = deg[sc]
    off_in_grp = idx - grp_start
    for gap in range(1, max_deg):
        sel = off_in_grp + gap < grp_deg
        i = idx[sel]
        j = i + gap
        a = np.minimum(sv[i], sv[j])
        b = np.maximum(sv[i], sv[j])
        keys.append(a * n_var + b)
        pos.append(order[j])
    if keys:
        keys = np.concatenate(keys)
        pos = np.concatenate(pos)
        korder = np.argsort(keys, kind="stable")
        ks = keys[korder]
        clash = np.flatnonzero(ks[1:] == ks[:-1])
        offenders.append(pos[korder][clash + 1])

    if not offenders:
        return np.empty(0, dtype=np.int64)
    out = np.unique(np.concatenate(offenders))
    return out


@njit(cache=True)
def _deg2_cycle_offenders(indptr, nbr_chk, nbr_edge, edge_u, edge_v, max_path):
    """Edge ids of the degree-2 check graph closing a cycle of length
    <= max_path + 1: depth-limited BFS u->v around each edge."""
    n_chk = indptr.size - 1
    n_e = edge_u.size
    stamp = np.full(n_chk, -1, dtype=np.int64)
    dist = np.empty(n_chk, dtype=np.int64)
    queue = np.empty(n_chk, dtype=np.int64)
    out = np.empty(n_e, dtype=np.int64)
    n_out = 0
    for e in range(n_e):
        u, v = edge_u[e], edge_v[e]
        stamp[u] = e
        dist[u] = 0
        queue[0] = u
        head, tail = 0, 1
        found = False
        while head < tail and not found:
            x = queue[head]
            head += 1
            if dist[x] >= max_path:
                break
            for t in range(indptr[x], indptr[x + 1]):
                if nbr_edge[t] == e:
                    continue
                y = nbr_chk[t]
                if y == v:
                    found = True
                    break
                if stamp[y] != e:
                    stamp[y] = e
                    dist[y] = dist[x] + 1
                    queue[tail] = y
                    tail += 1
        if found:
            out[n_out] = e
            n_out += 1
    return out[:n_out]


def _deg2_offender_sockets(
    ec: np.ndarray, ev: np.ndarray, n_var: int, girth: int
) -> np.ndarray:
    """Socket positions whose degree-2 variable closes a short cycle in the
    check graph induced by degree-2 variables."""
    deg = np.bincount(ev, minlength=n_var)
    is2 = deg[ev] == 2
    pos2 = np.flatnonzero(is2)
    if pos2.size == 0:
        return pos2
    order = np.argsort(ev[pos2], kind="stable")
    pairs = pos2[order].reshape(-1, 2)  # two sockets per degree-2 variable
    edge_u = ec[pairs[:, 0]]
    edge_v = ec[pairs[:, 1]]

    n_e = edge_u.size
    both = np.concatenate([edge_u, edge_v])
    counts = np.bincount(both, minlength=ec.max() + 1)
    indptr = np.concatenate([[0], np.cumsum(counts)])
    nbr_chk = np.empty(2 * n_e, dtype=np.int64)
    nbr_edge = np.empty(2 * n_e, dtype=np.int64)
    fill = indptr[:-1].copy()
    for i in range(n_e):
        u, v = edge_u[i], edge_v[i]
        nbr_chk[fill[u]] = v
        nbr_edge[fill[u]] = i
        fill[u] += 1
        nbr_chk[fill[v]] = u
        nbr_edge[fill[v]] = i
        fill[v] += 1

    bad = _deg2_cycle_offenders(
        indptr, nbr_chk, nbr_edge, edge_u, edge_v, girth - 1
    )
    return pairs[bad, 0]


def auto_deg2_girth(dist: DegreeDistribution, n_chk: int) -> int:
    """Largest feasible expurgation length for degree-2-only cycles.

    The branching ratio of the degree-2 check graph is lam_2 * rho'(1);
    cycles up to roughly log_branching(n_chk) can be removed.
    """
    branching = dist.lam.get(2, 0.0) * sum(
        f * (d - 1) for d, f in dist.rho.items()
    )
    if branching <= 1.05:
        return 0
    limit = int(math.log(max(n_chk, 2) * 0.5) / math.log(branching))
    return max(0, min(DEG2_GIRTH_CAP, limit - 1))


def sample_graph(
    dist: DegreeDistribution,
    n_var: int,
    seed,
    remove_cycles: bool = True,
    deg2_girth: int | str = "auto",
) -> TannerGraph:
    """Sample a girth >= 6 Tanner graph with n_var variable nodes.

    Deterministic given the seed.  deg2_girth sets the expurgation length
    for cycles running only through degree-2 variables ("auto" scales it
    with the graph; 0 disables).  Raises SwapBudgetExhaustedError when
    cycle removal cannot finish within 100 swaps per edge (some tiny dense
    graphs admit no girth-6 realization at all; remove_cycles=False skips
    all cleanup for those).
    """
    rng = np.random.default_rng(seed)

    var_counts = _largest_remainder(n_var, dist.lam_node_fractions())
    var_deg = _degree_list(var_counts)
    n_edges = int(var_deg.sum())
    chk_counts = _check_counts(n_edges, dist)
    chk_deg = _degree_list(chk_counts)
    n_chk = len(chk_deg)

    ev = np.repeat(np.arange(n_var, dtype=np.int64), var_deg)
    ec = np.repeat(np.arange(n_chk, dtype=np.int64), chk_deg)
    ev = ev[rng.permutation(n_edges)]

    if deg2_girth == "auto":
        deg2_girth = auto_deg2_girth(dist, n_chk) if remove_cycles else 0

    budget = SWAP_BUDGET_PER_EDGE * n_edges
    used = 0
    while remove_cycles:
        offenders = _find_offenders(ec, ev, n_var)
        if offenders.size == 0 and deg2_girth:
            offenders = _deg2_offender_sockets(ec, ev, n_var, deg2_girth)
        if offenders.size == 0:
            break
        used += offenders.size
        if used > budget:
            raise SwapBudgetExhaustedError(
                f"cycle removal exceeded {budget} swaps; graph too dense"
            )
        partners = rng.integers(0, n_edges, size=offenders.size)
        for e, f in zip(offenders, partners):
            ev[e], ev[f] = ev[f], ev[e]

    chk_adj = []
    starts = np.concatenate([[0], np.cumsum(chk_deg)])
    for c in range(n_chk):
        chk_adj.append(np.sort(ev[starts[c] : starts[c + 1]]).astype(np.int32))
    return TannerGraph(n_var=n_var, n_chk=n_chk, chk_adj=chk_adj)


def count_4cycles(graph: TannerGraph) -> int:
    """Exhaustive 4-cycle count (pairs of checks sharing a variable pair).

    Quadratic in check degree; meant for verification on small graphs.
    """
    seen: dict[tuple[int, int], int] = {}
    cycles = 0
    for adj in graph.chk_adj:
        uniq = np.unique(adj)
        if len(uniq) != len(adj):
            cycles += len(adj) - len(uniq)  # doubled edges count as 2-cycles
        for a, b in combinations(uniq.tolist(), 2):
            cycles += seen.get((a, b), 0)
            seen[a, b] = seen.get((a, b), 0) + 1
    return cycles
