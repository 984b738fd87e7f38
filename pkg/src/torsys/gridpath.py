"""Shortest weighted stencil paths on the universal cover of a grid torus.

Nodes are grid points of the N x M torus lifted to the plane; the edge set
is the 16-neighbor stencil (king moves plus knight moves).  An edge costs
its Euclidean step length in the unit-covolume flat chart times the
arithmetic mean of the conformal factor at its endpoints, so a path length
is the trapezoid quadrature of f along the polyline.

The closed loop of homotopy class (p, q) through a base point b is the
shortest path from a lift of b to its translate by p*b1 + q*b2.  Every
loop with q != 0 lands on torus rows {0, 1} (stencil steps change the row
index by at most 2), and symmetrically for columns when q == 0, so the
minimum over all base points equals the minimum over that transversal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

# (di, dj) offsets: king moves plus knight moves.
STENCIL = np.array(
    [
        (0, 1), (0, -1), (1, 0), (-1, 0),
        (1, 1), (1, -1), (-1, 1), (-1, -1),
        (1, 2), (1, -2), (-1, 2), (-1, -2),
        (2, 1), (2, -1), (-2, 1), (-2, -1),
    ],
    dtype=np.int64,
)

# Tie tolerance: improvements below this relative size are not chased.
TIE_RTOL = 1e-12

_MAX_WINDOW_NODES = 16_000_000


@dataclass
class LoopSearchResult:
    """Outcome of a per-class search; length is +inf when censored by the incumbent."""

    length: float
    base: tuple[int, int] | None
    path_offsets: np.ndarray | None  # (K, 2) cover offsets (di, dj) from base
    sources_evaluated: int


def step_lengths(basis: np.ndarray, n: int, m: int, moves: np.ndarray = STENCIL) -> np.ndarray:
    """Flat-chart length of each stencil move on an n x m grid."""
    steps = (moves[:, 1:2] / m) * basis[0][None, :] + (moves[:, 0:1] / n) * basis[1][None, :]
    return np.linalg.norm(steps, axis=1)


def stencil_overhead(basis: np.ndarray, n: int, m: int) -> float:
    """Worst-case relative excess of stencil paths over straight segments.

    For each pair of angularly adjacent stencil directions a, b the extremal
    ratio over directions in their cone is |kappa| with <a, kappa> = |a| and
    <b, kappa> = |b|; the constant is the maximum over all pairs minus 1.
    """
    dirs = (STENCIL[:, 1:2] / m) * basis[0][None, :] + (STENCIL[:, 0:1] / n) * basis[1][None, :]
    order = np.argsort(np.arctan2(dirs[:, 1], dirs[:, 0]))
    dirs = dirs[order]
    worst = 1.0
    k = len(dirs)
    for t in range(k):
        a = dirs[t]
        b = dirs[(t + 1) % k]
        mat = np.array([a, b])
        det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
        if abs(det) < 1e-15:
            continue
        kappa = np.linalg.solve(mat, np.array([np.linalg.norm(a), np.linalg.norm(b)]))
        worst = max(worst, float(np.linalg.norm(kappa)))
    return worst - 1.0


@njit(cache=True)
def _dijkstra(samples, nrows, ncols, i0, j0, di_lo, wi, dj_lo, wj,
              tgt_di, tgt_dj, moves, steplen, limit, dist, pred,
              heap_key, heap_node):
    """Windowed single-source Dijkstra; returns the target distance or inf.

    Window nodes are cover offsets (di, dj) relative to the source, with
    di in [di_lo, di_lo + wi) and dj in [dj_lo, dj_lo + wj); node id is
    (di - di_lo) * wj + (dj - dj_lo).  Returns inf when every path to the
    target exceeds ``limit``.
    """
    n_nodes = wi * wj
    for t in range(n_nodes):
        dist[t] = np.inf
        pred[t] = -1
    src = (0 - di_lo) * wj + (0 - dj_lo)
    tgt = (tgt_di - di_lo) * wj + (tgt_dj - dj_lo)
    dist[src] = 0.0
    heap_key[0] = 0.0
    heap_node[0] = src
    heap_size = 1
    nmoves = moves.shape[0]
    cap = heap_key.shape[0]
    while heap_size > 0:
        key = heap_key[0]
        node = heap_node[0]
        heap_size -= 1
        heap_key[0] = heap_key[heap_size]
        heap_node[0] = heap_node[heap_size]
        pos = 0
        while True:
            child = 2 * pos + 1
            if child >= heap_size:
                break
            if child + 1 < heap_size and heap_key[child + 1] < heap_key[child]:
                child += 1
            if heap_key[child] < heap_key[pos]:
                heap_key[pos], heap_key[child] = heap_key[child], heap_key[pos]
                heap_node[pos], heap_node[child] = heap_node[child], heap_node[pos]
                pos = child
            else:
                break
        if key > dist[node]:
            continue
        if node == tgt:
            return key
        if key > limit:
            return np.inf
        di = node // wj + di_lo
        dj = node % wj + dj_lo
        ia = (i0 + di) % nrows
        ja = (j0 + dj) % ncols
        fa = samples[ia, ja]
        for t in range(nmoves):
            ndi = di + moves[t, 0]
            ndj = dj + moves[t, 1]
            if ndi < di_lo or ndi >= di_lo + wi or ndj < dj_lo or ndj >= dj_lo + wj:
                continue
            nb = (ndi - di_lo) * wj + (ndj - dj_lo)
            ib = (i0 + ndi) % nrows
            jb = (j0 + ndj) % ncols
            nd = key + steplen[t] * 0.5 * (fa + samples[ib, jb])
            if nd < dist[nb]:
                dist[nb] = nd
                pred[nb] = node
                if heap_size >= cap:
                    # drop stale heap entries (at most one live entry per node)
                    w = 0
                    for r in range(heap_size):
                        if heap_key[r] <= dist[heap_node[r]]:
                            heap_key[w] = heap_key[r]
                            heap_node[w] = heap_node[r]
                            w += 1
                    heap_size = w
                    for r in range(heap_size // 2 - 1, -1, -1):
                        pos = r
                        while True:
                            child = 2 * pos + 1
                            if child >= heap_size:
                                break
                            if child + 1 < heap_size and heap_key[child + 1] < heap_key[child]:
                                child += 1
                            if heap_key[child] < heap_key[pos]:
                                heap_key[pos], heap_key[child] = heap_key[child], heap_key[pos]
                                heap_node[pos], heap_node[child] = heap_node[child], heap_node[pos]
                                pos = child
                            else:
                                break
                pos = heap_size
                heap_key[pos] = nd
                heap_node[pos] = nb
                heap_size += 1
                while pos > 0:
                    par = (pos - 1) // 2
                    if heap_key[pos] < heap_key[par]:
                        heap_key[pos], heap_key[par] = heap_key[par], heap_key[pos]
                        heap_node[pos], heap_node[par] = heap_node[par], heap_node[pos]
                        pos = par
                    else:
                        break
    return np.inf


def _king_staircase(delta_i: int, delta_j: int) -> np.ndarray:
    """Digital straight path from (0, 0) to (delta_i, delta_j) using king moves."""
    ai, aj = abs(delta_i), abs(delta_j)
    si = 1 if delta_i >= 0 else -1
    sj = 1 if delta_j >= 0 else -1
    pts = np.zeros((max(ai, aj) + 1, 2), dtype=np.int64)
    i = j = err = 0
    if aj >= ai:
        for k in range(1, aj + 1):
            j += sj
            err += ai
            if 2 * err >= aj:
                i += si
                err -= aj
            pts[k, 0] = i
            pts[k, 1] = j
    else:
        for k in range(1, ai + 1):
            i += si
            err += aj
            if 2 * err >= ai:
                j += sj
                err -= ai
            pts[k, 0] = i
            pts[k, 1] = j
    return pts


def _staircase_bounds(samples: np.ndarray, basis: np.ndarray, sources: np.ndarray,
                      delta_i: int, delta_j: int) -> np.ndarray:
    """Length of the king-staircase loop for every source (a discrete upper bound)."""
    n, m = samples.shape
    pts = _king_staircase(delta_i, delta_j)
    steps = (np.diff(pts[:, 1])[:, None] / m) * basis[0][None, :] + (
        np.diff(pts[:, 0])[:, None] / n
    ) * basis[1][None, :]
    seglen = np.linalg.norm(steps, axis=1)
    ii = (sources[:, 0:1] + pts[None, :, 0]) % n
    jj = (sources[:, 1:2] + pts[None, :, 1]) % m
    vals = samples[ii, jj]
    return ((vals[:, :-1] + vals[:, 1:]) * 0.5 * seglen[None, :]).sum(axis=1)


def _transversal(samples: np.ndarray, q: int) -> np.ndarray:
    """Base points covering every loop of the class: rows {0,1} when q != 0,
    else columns {0,1} (stencil row/column jumps are at most 2)."""
    n, m = samples.shape
    if q != 0:
        rows = np.repeat(np.array([0, 1]), m)
        cols = np.tile(np.arange(m), 2)
    else:
        rows = np.tile(np.arange(n), 2)
        cols = np.repeat(np.array([0, 1]), n)
    return np.stack([rows, cols], axis=1).astype(np.int64)


def _source_move_costs(samples: np.ndarray, basis: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-source transversal step costs used for the Lipschitz source bound.

    Returns (along, hop): ``along[k]`` is the edge weight from transversal
    point k to point k+1 along its line (periodic), ``hop[k]`` the weight of
    the jump between the two parallel transversal lines at that position.
    """
    n, m = samples.shape
    if q != 0:
        step_along = np.linalg.norm(basis[0] / m)
        step_hop = np.linalg.norm(basis[1] / n)
        f0, f1 = samples[0], samples[1]
        along = np.stack([
            0.5 * (f0 + np.roll(f0, -1)) * step_along,
            0.5 * (f1 + np.roll(f1, -1)) * step_along,
        ])
        hop = 0.5 * (f0 + f1) * step_hop
    else:
        step_along = np.linalg.norm(basis[1] / n)
        step_hop = np.linalg.norm(basis[0] / m)
        f0, f1 = samples[:, 0], samples[:, 1]
        along = np.stack([
            0.5 * (f0 + np.roll(f0, -1)) * step_along,
            0.5 * (f1 + np.roll(f1, -1)) * step_along,
        ])
        hop = 0.5 * (f0 + f1) * step_hop
    return along, hop


def _pair_distance_bound(along: np.ndarray, hop: np.ndarray, a: tuple[int, int],
                         b: tuple[int, int]) -> float:
    """Upper bound on the graph distance between two transversal points."""
    la, ka = a
    lb, kb = b
    size = along.shape[1]
    lo, hi = sorted((ka, kb))
    fwd = float(along[0, lo:hi].sum())
    bwd = float(along[0].sum() - along[0, lo:hi].sum())
    d = min(fwd, bwd)
    if la != lb:
        d += float(hop[kb])
    elif la == 1:
        d = min(float(along[1, lo:hi].sum()),
                float(along[1].sum() - along[1, lo:hi].sum()))
    return d


def shortest_loop(samples: np.ndarray, basis: np.ndarray, p: int, q: int,
                  incumbent: float = math.inf) -> LoopSearchResult:
    """Minimum discrete loop length in homotopy class (p, q).

    Runs a windowed Dijkstra from every transversal base point to its
    (p, q)-translate in the cover, with sound pruning: sources are skipped
    only when a triangle-inequality bound proves they cannot beat the
    current best, and the scan stops once the best hits the floor
    min(f) * flat_length.  With ``incumbent`` set, the search is censored
    at that value and may return inf, meaning no loop in this class is
    shorter than the incumbent.
    """
    n, m = samples.shape
    delta_i, delta_j = q * n, p * m
    w = p * basis[0] + q * basis[1]
    flat_len = float(np.linalg.norm(w))
    min_f = float(samples.min())
    floor = min_f * flat_len

    steplen = step_lengths(basis, n, m)
    sources = _transversal(samples, q)
    bounds = _staircase_bounds(samples, basis, sources, delta_i, delta_j)
    order = np.argsort(bounds, kind="stable")
    along, hop = _source_move_costs(samples, basis, q)

    # window geometry: a loop of length <= R stays in the flat ellipse with
    # foci 0 and w and major axis R / min_f
    det = abs(basis[0, 0] * basis[1, 1] - basis[0, 1] * basis[1, 0])
    row_per_flat = n * float(np.linalg.norm(basis[0])) / det
    col_per_flat = m * float(np.linalg.norm(basis[1])) / det

    best = math.inf
    best_base = None
    best_path = None
    evaluated: list[tuple[int, float]] = []  # (source index in `sources`, distance)
    n_eval = 0

    # lazily grown scratch buffers shared across sources
    buf_nodes = 0
    dist = pred = heap_key = heap_node = None

    def source_tuple(idx: int) -> tuple[int, int]:
        if q != 0:
            return int(sources[idx, 0]), int(sources[idx, 1])
        return int(sources[idx, 1]), int(sources[idx, 0])

    for idx in order:
        idx = int(idx)
        cap = min(best, incumbent)
        if floor >= cap:
            break
        if bounds[idx] > cap and evaluated:
            lb = max(
                d - 2.0 * _pair_distance_bound(along, hop, source_tuple(e), source_tuple(idx))
                for e, d in evaluated
            )
            if lb >= cap:
                continue
        limit = min(bounds[idx] * (1.0 + TIE_RTOL), cap)
        radius = limit / min_f
        pad_i = 0.5 * radius * row_per_flat
        pad_j = 0.5 * radius * col_per_flat
        di_lo = int(math.floor(delta_i / 2.0 - pad_i)) - 2
        di_hi = int(math.ceil(delta_i / 2.0 + pad_i)) + 2
        dj_lo = int(math.floor(delta_j / 2.0 - pad_j)) - 2
        dj_hi = int(math.ceil(delta_j / 2.0 + pad_j)) + 2
        wi = di_hi - di_lo + 1
        wj = dj_hi - dj_lo + 1
        n_nodes = wi * wj
        if n_nodes > _MAX_WINDOW_NODES:
            raise RuntimeError("shortest-path window too large; refine the incumbent bound")
        if n_nodes > buf_nodes:
            buf_nodes = n_nodes
            dist = np.empty(buf_nodes, dtype=np.float64)
            pred = np.empty(buf_nodes, dtype=np.int64)
            heap_key = np.empty(4 * buf_nodes, dtype=np.float64)
            heap_node = np.empty(4 * buf_nodes, dtype=np.int64)
        i0, j0 = int(sources[idx, 0]), int(sources[idx, 1])
        d = _dijkstra(
            samples, n, m, i0, j0, di_lo, wi, dj_lo, wj, delta_i, delta_j,
            STENCIL, steplen, limit, dist, pred, heap_key, heap_node,
        )
        n_eval += 1
        if math.isfinite(d):
            evaluated.append((idx, d))
            if d < best:
                best = d
                best_base = (i0, j0)
                best_path = _unwind(pred, di_lo, wi, dj_lo, wj, delta_i, delta_j)
        # censored runs (d = inf) certify d(source) > limit and teach us nothing more

    return LoopSearchResult(length=best, base=best_base, path_offsets=best_path,
                            sources_evaluated=n_eval)


def _unwind(pred: np.ndarray, di_lo: int, wi: int, dj_lo: int, wj: int,
            tgt_di: int, tgt_dj: int) -> np.ndarray:
    node = (tgt_di - di_lo) * wj + (tgt_dj - dj_lo)
    out = []
    while node >= 0:
        out.append((node // wj + di_lo, node % wj + dj_lo))
        node = pred[node]
    out.reverse()
    return np.array(out, dtype=np.int64)
