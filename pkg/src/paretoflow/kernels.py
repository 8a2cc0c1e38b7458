"""Hot numeric kernels, each with a numba loop and a vectorised numpy twin.

The public functions dispatch on :func:`paretoflow._accel.get_backend`. Both
paths return identical results (integers exactly, floats to rounding), which
``tests/test_kernels.py`` checks on random inputs.
"""

import numpy as np

from ._accel import get_backend, optional_njit

__all__ = ["dominance_layers", "min_sq_dist", "edit_distance", "hypervolume_2d", "hypervolume_3d"]


# --------------------------------------------------------------------------
# non-dominated layer peeling (maximisation)


@optional_njit(cache=True)
def _layers_nb(F, max_layers):
    n, d = F.shape
    dom = np.zeros((n, n), dtype=np.bool_)
    count = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            i_ge = True
            j_ge = True
            for k in range(d):
                if F[i, k] < F[j, k]:
                    i_ge = False
                elif F[i, k] > F[j, k]:
                    j_ge = False
            if i_ge and not j_ge:
                dom[i, j] = True
                count[j] += 1
            elif j_ge and not i_ge:
                dom[j, i] = True
                count[i] += 1

    layers = np.full(n, -1, dtype=np.int64)
    front = np.empty(n, dtype=np.int64)
    nf = 0
    for i in range(n):
        if count[i] == 0:
            front[nf] = i
            nf += 1
    nxt = np.empty(n, dtype=np.int64)
    layer = 0
    assigned = 0
    while nf > 0:
        if max_layers >= 0 and layer == max_layers:
            for i in range(n):
                if layers[i] < 0:
                    layers[i] = max_layers
            return layers
        nn = 0
        for t in range(nf):
            layers[front[t]] = layer
        assigned += nf
        for t in range(nf):
            p = front[t]
            for q in range(n):
                if dom[p, q]:
                    count[q] -= 1
                    if count[q] == 0:
                        nxt[nn] = q
                        nn += 1
        front, nxt = nxt, front
        nf = nn
        layer += 1
    return layers


def _layers_np(F, max_layers):
    n = F.shape[0]
    ge = (F[:, None, :] >= F[None, :, :]).all(axis=-1)
    gt = (F[:, None, :] > F[None, :, :]).any(axis=-1)
    dom = ge & gt
    count = dom.sum(axis=0)
    layers = np.full(n, -1, dtype=np.int64)
    remaining = np.ones(n, dtype=bool)
    layer = 0
    while remaining.any():
        if max_layers >= 0 and layer == max_layers:
            layers[remaining] = max_layers
            break
        front = remaining & (count == 0)
        layers[front] = layer
        count = count - dom[front].sum(axis=0)
        remaining &= ~front
        layer += 1
    return layers


def dominance_layers(F, max_layers=-1):
    """Layer index of every row of ``F`` under repeated Pareto-front peeling.

    Layer 0 is the non-dominated set. With ``max_layers >= 0`` peeling stops
    after that many layers and every leftover row gets index ``max_layers``.
    """
    F = np.ascontiguousarray(F, dtype=np.float64)
    if F.ndim != 2:
        raise ValueError("expected a 2-D array of objective vectors")
    if F.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if get_backend() == "numba":
        return _layers_nb(F, int(max_layers))
    return _layers_np(F, int(max_layers))


# --------------------------------------------------------------------------
# nearest-neighbour squared distances


@optional_njit(cache=True)
def _min_sq_dist_nb(X, Y, plus):
    n, d = X.shape
    m = Y.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        best = np.inf
        for j in range(m):
            acc = 0.0
            for k in range(d):
                diff = Y[j, k] - X[i, k]
                if plus and diff < 0.0:
                    diff = 0.0
                acc += diff * diff
                if acc >= best:
                    break
            if acc < best:
                best = acc
        out[i] = best
    return out


def _min_sq_dist_np(X, Y, plus, chunk=2048):
    out = np.empty(X.shape[0], dtype=np.float64)
    for start in range(0, X.shape[0], chunk):
        diff = Y[None, :, :] - X[start : start + chunk, None, :]
        if plus:
            np.maximum(diff, 0.0, out=diff)
        out[start : start + chunk] = np.einsum("ijk,ijk->ij", diff, diff).min(axis=1)
    return out


def min_sq_dist(X, Y, plus=False):
    """For each row x of X: ``min_y sum_k g(y_k - x_k)**2``.

    ``g`` is the identity, or the positive part when ``plus`` is true.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    if X.shape[1] != Y.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    if Y.shape[0] == 0:
        raise ValueError("empty reference set")
    if get_backend() == "numba":
        return _min_sq_dist_nb(X, Y, bool(plus))
    return _min_sq_dist_np(X, Y, bool(plus))


# --------------------------------------------------------------------------
# Levenshtein distance between integer-coded sequences


@optional_njit(cache=True)
def _edit_nb(a, b):
    n = a.shape[0]
    m = b.shape[0]
    prev = np.arange(m + 1)
    cur = np.empty(m + 1, dtype=prev.dtype)
    for i in range(1, n + 1):
        cur[0] = i
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            v = prev[j - 1] + cost
            if prev[j] + 1 < v:
                v = prev[j] + 1
            if cur[j - 1] + 1 < v:
                v = cur[j - 1] + 1
            cur[j] = v
        prev, cur = cur, prev
    return prev[m]


def _edit_np(a, b):
    # row-by-row DP; the insertion chain within a row is a running minimum
    m = b.shape[0]
    prev = np.arange(m + 1)
    offs = np.arange(m + 1)
    for i in range(1, a.shape[0] + 1):
        sub = prev[:-1] + (b != a[i - 1])
        cur = np.empty(m + 1, dtype=prev.dtype)
        cur[0] = i
        cur[1:] = np.minimum(sub, prev[1:] + 1)
        cur = np.minimum.accumulate(cur - offs) + offs
        prev = cur
    return prev[m]


def edit_distance(a, b):
    """Levenshtein distance between two sequences of hashable-as-int symbols."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if get_backend() == "numba":
        return int(_edit_nb(a, b))
    return int(_edit_np(a, b))


# --------------------------------------------------------------------------
# exact hypervolume (maximisation, reference point below the set)


@optional_njit(cache=True)
def _hv2d_nb(P, rx, ry):
    order = np.argsort(-P[:, 0], kind="mergesort")
    area = 0.0
    ymax = ry
    for t in range(order.shape[0]):
        x = P[order[t], 0]
        y = P[order[t], 1]
        if x <= rx:
            break
        if y > ymax:
            area += (x - rx) * (y - ymax)
            ymax = y
    return area


def _hv2d_np(P, rx, ry):
    P = P[(P[:, 0] > rx) & (P[:, 1] > ry)]
    if P.shape[0] == 0:
        return 0.0
    P = P[np.argsort(-P[:, 0], kind="mergesort")]
    top = np.maximum.accumulate(P[:, 1])
    below = np.concatenate(([ry], top[:-1]))
    return float(np.sum((P[:, 0] - rx) * (top - below)))


@optional_njit(cache=True)
def _hv3d_nb(P, ref):
    order = np.argsort(-P[:, 2], kind="mergesort")
    Q = P[order]
    n = Q.shape[0]
    vol = 0.0
    k = 0
    while k < n:
        z = Q[k, 2]
        if z <= ref[2]:
            break
        while k + 1 < n and Q[k + 1, 2] == z:
            k += 1
        z_next = Q[k + 1, 2] if k + 1 < n else ref[2]
        if z_next < ref[2]:
            z_next = ref[2]
        vol += _hv2d_nb(Q[: k + 1, :2], ref[0], ref[1]) * (z - z_next)
        k += 1
    return vol


def _hv3d_np(P, ref):
    Q = P[np.argsort(-P[:, 2], kind="mergesort")]
    levels = np.unique(Q[:, 2])[::-1]
    levels = levels[levels > ref[2]]
    vol = 0.0
    for t, z in enumerate(levels):
        z_next = levels[t + 1] if t + 1 < len(levels) else ref[2]
        active = Q[Q[:, 2] >= z]
        vol += _hv2d_np(active[:, :2], ref[0], ref[1]) * (z - z_next)
    return vol


def hypervolume_2d(P, ref):
    P = np.ascontiguousarray(P, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if P.shape[0] == 0:
        return 0.0
    if get_backend() == "numba":
        return float(_hv2d_nb(P, float(ref[0]), float(ref[1])))
    return _hv2d_np(P, float(ref[0]), float(ref[1]))


def hypervolume_3d(P, ref):
    P = np.ascontiguousarray(P, dtype=np.float64)
    ref = np.ascontiguousarray(ref, dtype=np.float64)
    if P.shape[0] == 0:
        return 0.0
    if get_backend() == "numba":
        return float(_hv3d_nb(P, ref))
    return float(_hv3d_np(P, ref))
