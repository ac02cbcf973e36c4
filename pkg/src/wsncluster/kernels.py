"""Hot per-round kernels, in paired numba and pure-numpy implementations.

Both implementations are always importable (see IMPLEMENTATIONS); the active
set is picked once at import time. Set WSNCLUSTER_NUMBA=0 (or "off"/"false")
to force the numpy path; by default the numba path is used when numba imports
cleanly. The two paths perform the same floating-point operations in the same
order per element, so their outputs are bit-identical; reductions that would
be order-sensitive (energy totals) happen outside the kernels.

Benchmark comparing the two: benchmarks/bench_kernels.py.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "USING_NUMBA",
    "IMPLEMENTATIONS",
    "assign_nearest",
    "farthest_audience",
    "route_next_hop",
    "tx_energy_vec",
    "poi_coverage",
    "bfs_levels",
]

_OFF_VALUES = {"0", "off", "false", "no"}


def _numba_requested() -> bool:
    return os.environ.get("WSNCLUSTER_NUMBA", "").strip().lower() not in _OFF_VALUES


# --- pure numpy implementations --------------------------------------------


def _assign_nearest_numpy(xs, ys, member_ids, head_ids):
    """Nearest head per member (squared-distance argmin, ties to lower head id).

    Returns (choice, dist): choice[i] indexes into head_ids, dist[i] is the
    euclidean distance from member i to its chosen head.
    """
    mx = xs[member_ids][:, None]
    my = ys[member_ids][:, None]
    hx = xs[head_ids][None, :]
    hy = ys[head_ids][None, :]
    dx = mx - hx
    dy = my - hy
    d2 = dx * dx + dy * dy
    choice = np.argmin(d2, axis=1)
    dist = np.sqrt(d2[np.arange(len(member_ids)), choice])
    return choice.astype(np.int64), dist


def _farthest_audience_numpy(xs, ys, src_ids, audience_ids):
    """Distance from each source to its farthest listener (self excluded).

    Sources with no other listener get -1.0.
    """
    n_src = len(src_ids)
    out = np.full(n_src, -1.0)
    if len(audience_ids) == 0:
        return out
    sx = xs[src_ids][:, None]
    sy = ys[src_ids][:, None]
    ax = xs[audience_ids][None, :]
    ay = ys[audience_ids][None, :]
    dx = sx - ax
    dy = sy - ay
    d2 = dx * dx + dy * dy
    d2[src_ids[:, None] == audience_ids[None, :]] = -1.0
    best = d2.max(axis=1)
    np.sqrt(best, out=out, where=best >= 0.0)
    return out


def _route_next_hop_numpy(head_x, head_y, d2_bs):
    """Relay choice per head: nearest head that is strictly closer to the
    sink, taken only when that hop is shorter than transmitting straight to
    the sink.

    Returns indices into the head arrays, -1 where the sink itself is the
    cheapest next hop (no strictly-closer head is nearer than the sink).
    Ties between heads go to the lower index; a head/sink distance tie goes
    to the sink.
    """
    dx = head_x[:, None] - head_x[None, :]
    dy = head_y[:, None] - head_y[None, :]
    d2 = dx * dx + dy * dy
    closer = d2_bs[None, :] < d2_bs[:, None]
    d2 = np.where(closer, d2, np.inf)
    nxt = np.argmin(d2, axis=1).astype(np.int64)
    best = d2[np.arange(len(head_x)), nxt]
    nxt[best >= d2_bs] = -1
    return nxt


def _tx_energy_vec_numpy(bits, dists, e_elec, e_fs, e_mp, d_crossover):
    """Vector transmit cost: free-space below the crossover, multi-path above."""
    ee = e_elec * bits
    ef = e_fs * bits
    em = e_mp * bits
    d2 = dists * dists
    return np.where(dists < d_crossover, ee + ef * d2, ee + em * (d2 * d2))


def _poi_coverage_numpy(xs, ys, alive, sensing, px, py):
    """Per-node POI coverage counts: (total covered, exclusively covered).

    A point is covered when its distance is <= the node's sensing range and
    the node is alive; exclusive means no other alive node covers it.
    """
    dx = xs[:, None] - px[None, :]
    dy = ys[:, None] - py[None, :]
    d2 = dx * dx + dy * dy
    cover = (d2 <= (sensing * sensing)[:, None]) & alive[:, None]
    per_poi = cover.sum(axis=0)
    total = cover.sum(axis=1).astype(np.int64)
    exclusive = (cover & (per_poi == 1)[None, :]).sum(axis=1).astype(np.int64)
    return total, exclusive


def _bfs_levels_numpy(xs, ys, alive, root, comm_range):
    """Hop levels from the root over alive nodes within comm_range; -1 if unreachable."""
    n = len(xs)
    levels = np.full(n, -1, dtype=np.int64)
    if not alive[root]:
        return levels
    levels[root] = 0
    r2 = comm_range * comm_range
    frontier = np.zeros(n, dtype=np.bool_)
    frontier[root] = True
    level = 0
    while frontier.any():
        fx = xs[frontier][:, None]
        fy = ys[frontier][:, None]
        dx = fx - xs[None, :]
        dy = fy - ys[None, :]
        reach = ((dx * dx + dy * dy) <= r2).any(axis=0)
        nxt = reach & alive & (levels < 0)
        level += 1
        levels[nxt] = level
        frontier = nxt
    return levels


_NUMPY_IMPLS = {
    "assign_nearest": _assign_nearest_numpy,
    "farthest_audience": _farthest_audience_numpy,
    "route_next_hop": _route_next_hop_numpy,
    "tx_energy_vec": _tx_energy_vec_numpy,
    "poi_coverage": _poi_coverage_numpy,
    "bfs_levels": _bfs_levels_numpy,
}


# --- numba implementations ---------------------------------------------------

def _build_numba_impls():
    import numba

    @numba.njit(cache=True)
    def assign_nearest_nb(xs, ys, member_ids, head_ids):
        m = len(member_ids)
        k = len(head_ids)
        choice = np.empty(m, dtype=np.int64)
        dist = np.empty(m, dtype=np.float64)
        for i in range(m):
            mx = xs[member_ids[i]]
            my = ys[member_ids[i]]
            best = np.inf
            best_j = 0
            for j in range(k):
                dx = mx - xs[head_ids[j]]
                dy = my - ys[head_ids[j]]
                d2 = dx * dx + dy * dy
                if d2 < best:
                    best = d2
                    best_j = j
            choice[i] = best_j
            dist[i] = np.sqrt(best)
        return choice, dist

    @numba.njit(cache=True)
    def farthest_audience_nb(xs, ys, src_ids, audience_ids):
        n_src = len(src_ids)
        out = np.full(n_src, -1.0)
        for i in range(n_src):
            s = src_ids[i]
            best = -1.0
            for j in range(len(audience_ids)):
                a = audience_ids[j]
                if a == s:
                    continue
                dx = xs[s] - xs[a]
                dy = ys[s] - ys[a]
                d2 = dx * dx + dy * dy
                if d2 > best:
                    best = d2
            if best >= 0.0:
                out[i] = np.sqrt(best)
        return out

    @numba.njit(cache=True)
    def route_next_hop_nb(head_x, head_y, d2_bs):
        k = len(head_x)
        nxt = np.empty(k, dtype=np.int64)
        for i in range(k):
            best = np.inf
            best_j = -1
            for j in range(k):
                if d2_bs[j] < d2_bs[i]:
                    dx = head_x[i] - head_x[j]
                    dy = head_y[i] - head_y[j]
                    d2 = dx * dx + dy * dy
                    if d2 < best:
                        best = d2
                        best_j = j
            if best >= d2_bs[i]:
                best_j = -1
            nxt[i] = best_j
        return nxt

    @numba.njit(cache=True)
    def tx_energy_vec_nb(bits, dists, e_elec, e_fs, e_mp, d_crossover):
        ee = e_elec * bits
        ef = e_fs * bits
        em = e_mp * bits
        out = np.empty(len(dists), dtype=np.float64)
        for i in range(len(dists)):
            d2 = dists[i] * dists[i]
            if dists[i] < d_crossover:
                out[i] = ee + ef * d2
            else:
                out[i] = ee + em * (d2 * d2)
        return out

    @numba.njit(cache=True)
    def poi_coverage_nb(xs, ys, alive, sensing, px, py):
        n = len(xs)
        p = len(px)
        owners = np.full(p, -2, dtype=np.int64)  # -2 none, -1 shared, >=0 sole owner
        total = np.zeros(n, dtype=np.int64)
        exclusive = np.zeros(n, dtype=np.int64)
        for i in range(n):
            if not alive[i]:
                continue
            r2 = sensing[i] * sensing[i]
            for q in range(p):
                dx = xs[i] - px[q]
                dy = ys[i] - py[q]
                if dx * dx + dy * dy <= r2:
                    total[i] += 1
                    if owners[q] == -2:
                        owners[q] = i
                    else:
                        owners[q] = -1
        for q in range(p):
            if owners[q] >= 0:
                exclusive[owners[q]] += 1
        return total, exclusive

    @numba.njit(cache=True)
    def bfs_levels_nb(xs, ys, alive, root, comm_range):
        n = len(xs)
        levels = np.full(n, -1, dtype=np.int64)
        if not alive[root]:
            return levels
        levels[root] = 0
        r2 = comm_range * comm_range
        queue = np.empty(n, dtype=np.int64)
        queue[0] = root
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            for v in range(n):
                if alive[v] and levels[v] < 0:
                    dx = xs[u] - xs[v]
                    dy = ys[u] - ys[v]
                    if dx * dx + dy * dy <= r2:
                        levels[v] = levels[u] + 1
                        queue[tail] = v
                        tail += 1
        return levels

    return {
        "assign_nearest": assign_nearest_nb,
        "farthest_audience": farthest_audience_nb,
        "route_next_hop": route_next_hop_nb,
        "tx_energy_vec": tx_energy_vec_nb,
        "poi_coverage": poi_coverage_nb,
        "bfs_levels": bfs_levels_nb,
    }


_NUMBA_IMPLS = None
if _numba_requested():
    try:
        _NUMBA_IMPLS = _build_numba_impls()
    except ImportError:
        _NUMBA_IMPLS = None

USING_NUMBA = _NUMBA_IMPLS is not None

IMPLEMENTATIONS: dict[str, dict | None] = {
    "numpy": _NUMPY_IMPLS,
    "numba": _NUMBA_IMPLS,
}

_active = _NUMBA_IMPLS if USING_NUMBA else _NUMPY_IMPLS

assign_nearest = _active["assign_nearest"]
farthest_audience = _active["farthest_audience"]
route_next_hop = _active["route_next_hop"]
tx_energy_vec = _active["tx_energy_vec"]
poi_coverage = _active["poi_coverage"]
bfs_levels = _active["bfs_levels"]
