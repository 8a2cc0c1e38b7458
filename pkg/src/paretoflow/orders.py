"""Global scores consistent with Pareto dominance, and reward transforms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .kernels import dominance_layers, min_sq_dist
from .pareto import PointSet, as_pointset, pareto_mask

TIE_TOL = 1e-9
RAW_SHIFT_EPS = 1e-6


@dataclass(frozen=True)
class RankAssignment:
    """Scores aligned with ``ids``.

    ``aux`` carries the provenance of each score: the peeled layer index for
    the rank methods (trimmed points carry ``max_rank``) and the distance to
    the front for the nearest-neighbour methods.
    """

    ids: np.ndarray
    scores: np.ndarray
    method: str
    aux: np.ndarray

    def as_dict(self) -> dict:
        return {int(i): float(s) for i, s in zip(self.ids, self.scores)}

    def __getitem__(self, key):
        return self.as_dict()[key]


def _check_nonempty(xs: PointSet):
    if len(xs) == 0:
        raise ValueError("cannot rank an empty point set")


def global_rank(xs, max_rank: int | None = None) -> RankAssignment:
    """Peel fronts, then invert layer indices so the first front scores highest.

    With ``max_rank`` peeling stops after that many layers and every leftover
    point scores 0, one below the worst peeled layer.
    """
    xs = as_pointset(xs)
    _check_nonempty(xs)
    if max_rank is not None and max_rank < 1:
        raise ValueError("max_rank must be >= 1")
    layers = dominance_layers(xs.points, -1 if max_rank is None else max_rank)
    trimmed = layers == max_rank if max_rank is not None else np.zeros(len(xs), dtype=bool)
    peeled = int(layers[~trimmed].max()) + 1 if (~trimmed).any() else 0
    scores = np.where(trimmed, 0, peeled - layers).astype(np.float64)
    method = "GlobalRank" if max_rank is None else f"GlobalRankTrimmed({max_rank})"
    return RankAssignment(xs.ids.copy(), scores, method, layers)


def cheap_global_rank(xs, reference=None) -> RankAssignment:
    """Two-level score: 1 on the Pareto front, 0 elsewhere.

    When ``reference`` (for example a replay-buffer front) is given, a point
    scores 1 iff no reference point dominates it. An empty or missing
    reference reduces to ``global_rank(xs, max_rank=1)``.
    """
    xs = as_pointset(xs)
    _check_nonempty(xs)
    ref = None if reference is None else np.asarray(getattr(reference, "points", reference), dtype=np.float64)
    if ref is None or ref.size == 0:
        on_front = pareto_mask(xs.points)
    else:
        ref = ref.reshape(-1, xs.dim)
        ge = (ref[None, :, :] >= xs.points[:, None, :]).all(axis=-1)
        gt = (ref[None, :, :] > xs.points[:, None, :]).any(axis=-1)
        on_front = ~(ge & gt).any(axis=1)
    scores = on_front.astype(np.float64)
    return RankAssignment(xs.ids.copy(), scores, "CheapGR", np.where(on_front, 0, 1))


def minmax_normalize(points, lo=None, hi=None) -> np.ndarray:
    """Rescale each axis to [0, 1]; a degenerate axis maps to all zeros."""
    points = np.asarray(points, dtype=np.float64)
    lo = points.min(axis=0) if lo is None else np.asarray(lo, dtype=np.float64)
    hi = points.max(axis=0) if hi is None else np.asarray(hi, dtype=np.float64)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    return np.where(span > 0, (points - lo) / safe, 0.0)


def _front_distances(X, P, metric):
    if callable(metric) or metric not in ("euclidean", "sqeuclidean"):
        return cdist(X, P, metric=metric).min(axis=1)
    d2 = min_sq_dist(X, P)
    return d2 if metric == "sqeuclidean" else np.sqrt(d2)


def nn_order(xs, metric="euclidean", normalize: bool = True) -> RankAssignment:
    """Score each point by minus its distance to the nearest front point.

    ``metric`` is any name or callable accepted by ``scipy.spatial.distance.cdist``.
    """
    xs = as_pointset(xs)
    _check_nonempty(xs)
    X = minmax_normalize(xs.points) if normalize else xs.points
    on_front = pareto_mask(xs.points)
    dist = np.zeros(len(xs))
    if (~on_front).any():
        dist[~on_front] = _front_distances(X[~on_front], X[on_front], metric)
    return RankAssignment(xs.ids.copy(), -dist, "NNOrder", dist)


def point_segment_distance(X, A, B) -> np.ndarray:
    """Euclidean distance of every row of X to the segment [A, B]."""
    X = np.atleast_2d(X)
    AB = B - A
    denom = float(AB @ AB)
    if denom == 0.0:
        return np.linalg.norm(X - A, axis=1)
    t = np.clip((X - A) @ AB / denom, 0.0, 1.0)
    return np.linalg.norm(X - (A + t[:, None] * AB), axis=1)


def polyline_distance(X, front) -> np.ndarray:
    """Distance to the piecewise-linear curve through ``front`` sorted by axis 0."""
    F = np.unique(np.asarray(front, dtype=np.float64), axis=0)
    F = F[np.lexsort((-F[:, 1], F[:, 0]))]
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if len(F) == 1:
        return np.linalg.norm(X - F[0], axis=1)
    best = np.full(len(X), np.inf)
    for a, b in zip(F[:-1], F[1:]):
        np.minimum(best, point_segment_distance(X, a, b), out=best)
    return best


def nn_interp_order(xs, metric="euclidean", normalize: bool = True) -> RankAssignment:
    """Like :func:`nn_order` but measured to the linearly interpolated 2-D front."""
    xs = as_pointset(xs)
    _check_nonempty(xs)
    if xs.dim != 2:
        raise ValueError("front interpolation is only defined for two objectives; use nn_order")
    if metric != "euclidean":
        raise ValueError("front interpolation supports the euclidean metric only")
    X = minmax_normalize(xs.points) if normalize else xs.points
    on_front = pareto_mask(xs.points)
    dist = np.zeros(len(xs))
    if (~on_front).any():
        dist[~on_front] = polyline_distance(X[~on_front], X[on_front])
    return RankAssignment(xs.ids.copy(), -dist, "NNInterpOrder", dist)


@dataclass(frozen=True)
class RewardTransform:
    kind: str = "raw"  # raw | softmax | indicator
    temperature: float = 1.0

    def __post_init__(self):
        if self.kind not in ("raw", "softmax", "indicator"):
            raise ValueError(f"unknown reward transform {self.kind!r}")
        if not (np.isfinite(self.temperature) and self.temperature > 0):
            raise ValueError("temperature must be finite and positive")


def shift_positive(scores, eps: float = RAW_SHIFT_EPS) -> np.ndarray:
    """Order-preserving shift making every score strictly positive."""
    scores = np.asarray(scores, dtype=np.float64)
    lo = scores.min()
    return scores - lo + eps if lo <= 0 else scores.copy()


def transform_scores(scores, t: RewardTransform) -> np.ndarray:
    scores = np.asarray(scores, dtype=np.float64)
    if t.kind == "raw":
        if np.any(scores <= 0):
            raise ValueError("raw rewards must be positive; shift scores first")
        return scores.copy()
    if t.kind == "softmax":
        z = t.temperature * scores
        z = np.exp(z - z.max())
        return z / z.sum()
    return (np.abs(scores - scores.max()) <= TIE_TOL).astype(np.float64)


def transform_rewards(ranks: RankAssignment, t: RewardTransform) -> dict:
    """Map scores to nonnegative rewards keyed by id."""
    out = transform_scores(ranks.scores, t)
    return {int(i): float(v) for i, v in zip(ranks.ids, out)}


def rank_points(xs, method: str, max_rank: int | None = None, reference=None, normalize=True) -> RankAssignment:
    """Dispatch on the method names used by the CLI and the trainer."""
    if method == "gr":
        return global_rank(xs)
    if method == "gr-k":
        if max_rank is None:
            raise ValueError("gr-k needs max_rank")
        return global_rank(xs, max_rank)
    if method in ("cheap", "cheap-gr"):
        return cheap_global_rank(xs, reference)
    if method == "nn":
        return nn_order(xs, normalize=normalize)
    if method == "nn-int":
        return nn_interp_order(xs, normalize=normalize)
    raise ValueError(f"unknown ranking method {method!r}")
