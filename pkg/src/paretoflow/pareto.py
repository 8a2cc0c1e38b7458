"""Pareto dominance, front extraction and non-dominated sorting.

All routines use the maximisation convention: larger is better in every
objective.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .kernels import dominance_layers


@dataclass(frozen=True)
class PointSet:
    """Objective vectors with stable integer ids (row order by default)."""

    points: np.ndarray
    ids: np.ndarray = field(default=None)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise ValueError(f"points must be an (n, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("objective vectors must be finite")
        ids = np.arange(len(pts)) if self.ids is None else np.asarray(self.ids, dtype=np.int64)
        if ids.shape != (len(pts),):
            raise ValueError("one id per point required")
        if len(np.unique(ids)) != len(ids):
            raise ValueError("ids must be unique")
        pts.setflags(write=False)
        ids = ids.copy()
        ids.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "ids", ids)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def subset(self, mask_or_index) -> "PointSet":
        return PointSet(self.points[mask_or_index], self.ids[mask_or_index])


def as_pointset(xs) -> PointSet:
    return xs if isinstance(xs, PointSet) else PointSet(xs)


@dataclass(frozen=True)
class FrontResult:
    front_indices: frozenset
    dominated_indices: frozenset
    trimmed: bool = False

    @property
    def ids(self) -> frozenset:
        return self.front_indices | self.dominated_indices


def dominates(a, b) -> bool:
    """True iff ``a`` is >= ``b`` everywhere and > somewhere."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return bool(np.all(a >= b) and np.any(a > b))


def pareto_mask(points) -> np.ndarray:
    """Boolean mask of the non-dominated rows of an (n, d) array."""
    points = np.asarray(points, dtype=np.float64)
    if points.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    return dominance_layers(points, 1) == 0


def pareto_front(xs) -> FrontResult:
    """Split a point set into its non-dominated and dominated ids.

    Duplicates of a non-dominated vector are all kept on the front.
    """
    xs = as_pointset(xs)
    if len(xs) == 0:
        raise ValueError("pareto_front of an empty set")
    mask = pareto_mask(xs.points)
    return FrontResult(frozenset(xs.ids[mask].tolist()), frozenset(xs.ids[~mask].tolist()))


def nondominated_sort(xs, max_fronts: int | None = None) -> list[FrontResult]:
    """Peel successive Pareto fronts.

    Layer ``k`` is the front of whatever is left after removing layers
    ``0..k-1``. If ``max_fronts`` is given and points remain after that many
    layers, they come back as one extra layer with ``trimmed=True``.
    """
    xs = as_pointset(xs)
    if len(xs) == 0:
        raise ValueError("nondominated_sort of an empty set")
    if max_fronts is not None and max_fronts < 1:
        raise ValueError("max_fronts must be >= 1")
    layers = dominance_layers(xs.points, -1 if max_fronts is None else max_fronts)
    out = []
    for k in range(int(layers.max()) + 1):
        members = frozenset(xs.ids[layers == k].tolist())
        rest = frozenset(xs.ids[layers > k].tolist())
        out.append(FrontResult(members, rest, trimmed=max_fronts is not None and k == max_fronts))
    return out


def read_points_csv(path) -> PointSet:
    """Read a points file: one row per point, numeric columns, optional header.

    A header whose first column is ``id`` makes that column the point ids;
    otherwise ids are the row numbers.
    """
    rows = []
    with_ids = False
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                if rows:
                    raise
                with_ids = row[0].strip().lower() == "id"
    if not rows:
        raise ValueError(f"{path}: no points")
    A = np.array(rows)
    if with_ids:
        return PointSet(A[:, 1:], A[:, 0].astype(np.int64))
    return PointSet(A)


def write_points_csv(path, points, header=None):
    points = np.asarray(points, dtype=np.float64)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header is not None:
            w.writerow(header)
        for row in points:
            w.writerow([repr(float(v)) for v in row])
