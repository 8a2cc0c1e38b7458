"""Quality indicators for a candidate set against a reference Pareto front.

Conventions: maximisation, squared distances inside the generational
distances, and the hypervolume reference point sitting below the set.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field

import numpy as np

from .kernels import edit_distance, hypervolume_2d, hypervolume_3d, min_sq_dist
from .orders import minmax_normalize
from .pareto import pareto_mask


def _arr(xs, name="points"):
    a = np.asarray(getattr(xs, "points", xs), dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2:
        raise ValueError(f"{name} must be an (n, d) array")
    return a


def _pair(S, P):
    S, P = _arr(S, "S"), _arr(P, "P")
    if S.shape[1] != P.shape[1]:
        raise ValueError(f"dimension mismatch: {S.shape[1]} vs {P.shape[1]}")
    if len(S) == 0 or len(P) == 0:
        raise ValueError("both sets must be non-empty")
    return S, P


def igd_plus(S, P, plus: bool = True) -> float:
    """Mean over reference points of the squared distance to the closest candidate.

    With ``plus`` only the shortfall ``max(p_i - s_i, 0)`` counts, so a
    candidate beating the reference point is not penalised.
    """
    S, P = _pair(S, P)
    # min_sq_dist(X, Y) uses g(y - x); negating both sides gives g(p - s)
    return float(min_sq_dist(-P, -S, plus).mean())


def gd_plus(S, P, plus: bool = True) -> float:
    """Mean over candidates of the squared distance to the closest reference point."""
    S, P = _pair(S, P)
    return float(min_sq_dist(S, P, plus).mean())


def hausdorff(S, P, plus: bool = False) -> float:
    """Averaged Hausdorff distance ``max(GD, IGD)``; the plus variant when asked."""
    return max(gd_plus(S, P, plus), igd_plus(S, P, plus))


def hypervolume(S, r) -> float:
    """Exact dominated hypervolume of ``S`` above the reference point ``r`` (d = 2 or 3)."""
    S = _arr(S, "S")
    r = np.asarray(r, dtype=np.float64).ravel()
    if S.shape[0] == 0:
        return 0.0
    if S.shape[1] != r.shape[0]:
        raise ValueError("reference point dimension mismatch")
    S = S[np.all(S > r, axis=1)]
    if len(S) == 0:
        return 0.0
    S = S[pareto_mask(S)]
    if r.shape[0] == 1:
        return float(S.max() - r[0])
    if r.shape[0] == 2:
        return hypervolume_2d(S, r)
    if r.shape[0] == 3:
        return hypervolume_3d(S, r)
    raise ValueError("exact hypervolume is implemented for d <= 3 only")


def pc_entropy(Pref, Pgen, normalize_axes: bool = True, denominator: str = "generated") -> float:
    """Entropy of the assignment of generated front points to reference clusters.

    Each generated point joins the cluster of its nearest reference point.
    ``denominator="generated"`` divides cluster sizes by the number of
    generated points (a proper entropy, bounded by ``log |Pref|``);
    ``"reference"`` divides by ``|Pref|`` instead.
    """
    Pref = _arr(Pref, "Pref")
    Pgen = np.asarray(getattr(Pgen, "points", Pgen), dtype=np.float64)
    if Pgen.size == 0:
        return 0.0
    Pgen = Pgen.reshape(-1, Pref.shape[1])
    if normalize_axes:
        both = np.vstack([Pref, Pgen])
        lo, hi = both.min(axis=0), both.max(axis=0)
        A, B = minmax_normalize(Pref, lo, hi), minmax_normalize(Pgen, lo, hi)
    else:
        A, B = Pref, Pgen
    d2 = ((B[:, None, :] - A[None, :, :]) ** 2).sum(axis=-1)
    counts = np.bincount(d2.argmin(axis=1), minlength=len(A))
    counts = counts[counts > 0]
    if denominator == "generated":
        frac = counts / len(B)
    elif denominator == "reference":
        frac = counts / len(A)
    else:
        raise ValueError(f"unknown denominator {denominator!r}")
    return float(-(frac * np.log(frac)).sum()) + 0.0  # no -0.0


def simplex_lattice(d: int, divisions: int) -> np.ndarray:
    """All weight vectors with entries in {0, 1/k, ..., 1} summing to one."""
    out = []
    for c in itertools.combinations(range(divisions + d - 1), d - 1):
        parts = np.diff((-1,) + c + (divisions + d - 1,)) - 1
        out.append(parts / divisions)
    return np.array(out, dtype=np.float64)


def default_weights(d: int) -> np.ndarray:
    if d == 2:
        i = np.arange(101) / 100.0
        return np.column_stack([i, 1.0 - i])
    if d == 3:
        return simplex_lattice(3, 13)
    return simplex_lattice(d, 6)


def r2_indicator(S, weights, z_star) -> float:
    """Mean over weight vectors of the best weighted-Chebyshev gap to the utopian point."""
    S = _arr(S, "S")
    W = np.asarray(weights, dtype=np.float64)
    if W.ndim != 2 or len(W) == 0:
        raise ValueError("need at least one weight vector")
    if np.any(W < 0):
        raise ValueError("weights must be nonnegative")
    gap = np.abs(np.asarray(z_star, dtype=np.float64) - S)
    # (|W|, |S|) matrix of max_i w_i |z_i - s_i|
    cheb = (W[:, None, :] * gap[None, :, :]).max(axis=-1)
    return float(cheb.min(axis=1).mean())


def _linf_hits(A, B, tol):
    return (np.abs(A[:, None, :] - B[None, :, :]).max(axis=-1) <= tol).any(axis=1)


def coverage(Pref, S, tol: float = 1e-9) -> float:
    """Share of reference points matched (L-inf within ``tol``) by some candidate."""
    Pref, S = _arr(Pref), _arr(S)
    return float(_linf_hits(Pref, S, tol).mean())


def samples_in_front(Pref, S, tol: float = 1e-9) -> float:
    """Share of candidates that match some reference point."""
    Pref, S = _arr(Pref), _arr(S)
    return float(_linf_hits(S, Pref, tol).mean())


def topk_diversity(samples, scores, k: int, distance=None) -> float:
    """Mean pairwise distance among the ``k`` best-scoring samples.

    Ties keep insertion order. ``distance`` defaults to edit distance for
    sequences and L1 for numeric vectors.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if len(samples) != len(scores):
        raise ValueError("one score per sample")
    order = np.argsort(-scores, kind="stable")[:k]
    top = [samples[i] for i in order]
    if len(top) < 2:
        return 0.0
    if distance is None:
        distance = _default_distance(top[0])
    total = 0.0
    pairs = 0
    for a, b in itertools.combinations(top, 2):
        total += distance(a, b)
        pairs += 1
    return total / pairs


def _default_distance(example):
    if isinstance(example, str):
        return lambda a, b: edit_distance([ord(c) for c in a], [ord(c) for c in b])
    return lambda a, b: float(np.abs(np.asarray(a, float) - np.asarray(b, float)).sum())


def hypercube_reference(d: int, grid: int = 64) -> np.ndarray:
    """Points on the upper faces {x_i = 1} of the unit hypercube, ``grid`` per axis."""
    ticks = np.linspace(0.0, 1.0, grid)
    pts = []
    for i in range(d):
        others = np.array(list(itertools.product(ticks, repeat=d - 1))).reshape(-1, d - 1)
        face = np.insert(others, i, 1.0, axis=1)
        pts.append(face)
    return np.unique(np.vstack(pts), axis=0)


def unique_front(S) -> np.ndarray:
    """Distinct non-dominated vectors of ``S``."""
    S = _arr(S)
    return np.unique(S[pareto_mask(S)], axis=0)


@dataclass
class MetricReport:
    hv: float | None = None
    r2: float | None = None
    pc_ent: float | None = None
    igd_plus: float | None = None
    igd: float | None = None
    gd_plus: float | None = None
    gd: float | None = None
    d_h: float | None = None
    d_h_plus: float | None = None
    coverage: float | None = None
    samples_in_front: float | None = None
    topk_diversity: float | None = None
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def metric_items(self):
        return [(k, v) for k, v in asdict(self).items() if k != "config"]


def compute_report(
    S,
    P,
    ref_point=None,
    z_star=None,
    weights=None,
    tol: float = 1e-9,
    samples=None,
    scores=None,
    k: int = 10,
    distance=None,
    true_front: bool = True,
) -> MetricReport:
    """Every indicator for candidates ``S`` against reference front ``P``.

    The distance-to-front columns are computed on ``P'``, the distinct
    non-dominated candidates. Coverage and samples-in-front are only filled
    when ``P`` is an actual front (``true_front``).
    """
    S, P = _pair(S, P)
    d = S.shape[1]
    ref_point = np.zeros(d) if ref_point is None else np.asarray(ref_point, dtype=np.float64)
    z_star = np.ones(d) if z_star is None else np.asarray(z_star, dtype=np.float64)
    weights = default_weights(d) if weights is None else np.asarray(weights, dtype=np.float64)
    Pp = unique_front(S)
    rep = MetricReport(
        hv=hypervolume(Pp, ref_point) if d <= 3 else None,
        r2=r2_indicator(S, weights, z_star),
        pc_ent=pc_entropy(P, Pp),
        igd_plus=igd_plus(S, P, True),
        igd=igd_plus(S, P, False),
        gd_plus=gd_plus(Pp, P, True),
        gd=gd_plus(Pp, P, False),
        d_h=hausdorff(Pp, P, False),
        d_h_plus=hausdorff(Pp, P, True),
    )
    if true_front:
        rep.coverage = coverage(P, S, tol)
        rep.samples_in_front = samples_in_front(P, S, tol)
    if samples is not None and scores is not None:
        rep.topk_diversity = topk_diversity(samples, scores, k, distance)
    rep.config = {
        "reference_point": ref_point.tolist(),
        "utopian": z_star.tolist(),
        "n_weights": int(len(weights)),
        "tol": tol,
        "k": k,
        "n_candidates": int(len(S)),
        "n_reference": int(len(P)),
        "n_generated_front": int(len(Pp)),
    }
    return rep
