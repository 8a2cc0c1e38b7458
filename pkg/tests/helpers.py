"""Independent oracles and generators shared by the tests."""

import numpy as np


def brute_front_mask(F):
    """All-pairs dominance filter written with plain loops."""
    n = len(F)
    keep = [True] * n
    for i in range(n):
        for j in range(n):
            if i != j and all(F[j][k] >= F[i][k] for k in range(len(F[i]))) and any(
                F[j][k] > F[i][k] for k in range(len(F[i]))
            ):
                keep[i] = False
                break
    return np.array(keep)


def random_sets(rng, count, max_n=200, max_d=4, discrete=True):
    """Random point sets; integer-valued ones produce ties and duplicates."""
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        d = int(rng.integers(1, max_d + 1))
        if discrete and rng.random() < 0.5:
            yield rng.integers(0, 6, size=(n, d)).astype(float)
        else:
            yield rng.random((n, d))


def brute_gd(S, P, plus):
    """Mean over s in S of min over p in P of the squared (positive-part) distance."""
    total = 0.0
    for s in S:
        best = float("inf")
        for p in P:
            acc = 0.0
            for k in range(len(s)):
                diff = p[k] - s[k]
                if plus:
                    diff = max(diff, 0.0)
                acc += diff * diff
            best = min(best, acc)
        total += best
    return total / len(S)


def brute_igd(S, P, plus):
    """Mean over p in P of min over s in S of the squared (positive-part) distance."""
    total = 0.0
    for p in P:
        best = float("inf")
        for s in S:
            acc = 0.0
            for k in range(len(s)):
                diff = p[k] - s[k]
                if plus:
                    diff = max(diff, 0.0)
                acc += diff * diff
            best = min(best, acc)
        total += best
    return total / len(P)


def inclusion_exclusion_hv(S, r):
    """Exact union volume of the boxes [r, s] by inclusion-exclusion (small sets only)."""
    import itertools

    S = [np.maximum(np.asarray(s, float), r) for s in S]
    vol = 0.0
    for k in range(1, len(S) + 1):
        for combo in itertools.combinations(S, k):
            corner = np.min(combo, axis=0)
            vol += (-1) ** (k + 1) * float(np.prod(corner - r))
    return vol


def monte_carlo_hv(S, r, n, rng):
    """Estimate and standard error of the dominated volume from uniform samples in the bounding box."""
    S = np.asarray(S, float)
    hi = S.max(axis=0)
    box = float(np.prod(hi - r))
    hits = 0
    chunk = 100_000
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        U = r + rng.random((m, len(r))) * (hi - r)
        hit = np.zeros(m, dtype=bool)
        for s in S:
            hit |= (U <= s).all(axis=1)
        hits += int(hit.sum())
    p = hits / n
    return box * p, box * np.sqrt(p * (1 - p) / n)
