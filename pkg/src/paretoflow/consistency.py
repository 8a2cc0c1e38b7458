"""Does some joint distribution reproduce every subset's uniform-on-front target?

Each subset that contains a globally non-dominated point is *active*: its
mass cannot vanish, so its target conditional pins the joint down. Front
members of an active subset must share equal mass and its dominated members
must get none. Globally non-dominated points must keep positive mass. The
system is decided exactly with union-find plus zero propagation.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .pareto import PointSet, as_pointset, dominates, pareto_mask


@dataclass
class DilemmaInstance:
    points: PointSet
    subsets: list

    def __post_init__(self):
        self.points = as_pointset(self.points)
        known = set(self.points.ids.tolist())
        subs = []
        for s in self.subsets:
            s = tuple(sorted(int(i) for i in s))
            if not s:
                raise ValueError("subsets must be non-empty")
            if not set(s) <= known:
                raise ValueError(f"subset {s} references unknown ids")
            subs.append(s)
        self.subsets = subs


@dataclass
class ConsistencyVerdict:
    feasible: bool
    witness: dict | None = None
    contradiction: list = field(default_factory=list)
    active: list = field(default_factory=list)

    def describe(self) -> str:
        if self.feasible:
            return "feasible: " + ", ".join(f"P(x{i})={p:.4g}" for i, p in sorted(self.witness.items()))
        return "infeasible: " + " ; ".join(link_text(link) for link in self.contradiction)


def link_text(link) -> str:
    if link["kind"] == "zero":
        return (
            f"P(x{link['id']})=0 [dominated by x{link['dominated_by']} in subset {link['subset']},"
            f" active via x{link['active_via']}]"
        )
    if link["kind"] == "equal":
        return f"P(x{link['a']})=P(x{link['b']}) [front of subset {link['subset']}]"
    return f"P(x{link['id']})>0 [globally non-dominated]"


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def check_consistency(inst: DilemmaInstance, include_full_set: bool = False) -> ConsistencyVerdict:
    """Decide the constraint system; emit a witness or a contradiction chain."""
    pts = inst.points
    row = {int(i): r for r, i in enumerate(pts.ids)}
    F = pts.points
    glob = {int(i) for i in pts.ids[pareto_mask(F)]}
    subsets = list(inst.subsets)
    if include_full_set:
        subsets.append(tuple(sorted(row)))

    uf = _UnionFind(row)
    edges = {i: [] for i in row}
    zero = {}  # id -> (subset index, dominator, activity witness)
    active = []
    for k, sub in enumerate(subsets):
        hits = [i for i in sub if i in glob]
        if not hits:
            continue
        active.append(k)
        sub_pts = F[[row[i] for i in sub]]
        on = pareto_mask(sub_pts)
        front = [i for i, f in zip(sub, on) if f]
        for a, b in zip(front, front[1:]):
            uf.union(a, b)
        for a, b in itertools.combinations(front, 2):
            edges[a].append((b, k))
            edges[b].append((a, k))
        for i, f in zip(sub, on):
            if not f and i not in zero:
                dom = next(j for j in front if dominates(F[row[j]], F[row[i]]))
                zero[i] = (k, dom, hits[0])

    zero_roots = {uf.find(i) for i in zero}
    clash = sorted(g for g in glob if uf.find(g) in zero_roots)
    if not clash:
        live = [i for i in row if uf.find(i) not in zero_roots]
        w = 1.0 / len(live)
        witness = {i: (w if i in live else 0.0) for i in row}
        return ConsistencyVerdict(True, witness, [], active)

    g = clash[0]
    root = uf.find(g)
    z = min(i for i in zero if uf.find(i) == root)
    k, dom, via = zero[z]
    # end at the point that keeps the zero-forcing subset active when possible
    target = via if uf.find(via) == root else g
    chain = [{"kind": "zero", "id": z, "subset": k, "dominated_by": dom, "active_via": via}]
    for a, b, sk in _bfs(edges, z, target):
        chain.append({"kind": "equal", "a": a, "b": b, "subset": sk})
    chain.append({"kind": "positive", "id": target})
    return ConsistencyVerdict(False, None, chain, active)


def _bfs(edges, src, dst):
    """Shortest equality path from src to dst as (a, b, subset) links."""
    prev = {src: None}
    q = deque([src])
    while q and dst not in prev:
        u = q.popleft()
        for v, k in sorted(edges[u]):
            if v not in prev:
                prev[v] = (u, k)
                q.append(v)
    links = []
    node = dst
    while prev[node] is not None:
        u, k = prev[node]
        links.append((u, node, k))
        node = u
    return links[::-1]


def enumerate_dilemmas(points, subset_size: int, limit: int, max_results: int | None = None) -> list:
    """Minimal infeasible families of ``subset_size``-subsets, up to ``limit`` subsets per family.

    Families are searched by increasing size and supersets of a known
    infeasible family are skipped, so every reported family is minimal.
    """
    pts = as_pointset(points)
    ids = [int(i) for i in pts.ids]
    pool = list(itertools.combinations(ids, subset_size))
    found: list[frozenset] = []
    out = []
    for size in range(1, limit + 1):
        for fam in itertools.combinations(range(len(pool)), size):
            fs = frozenset(fam)
            if any(f <= fs for f in found):
                continue
            inst = DilemmaInstance(pts, [pool[i] for i in fam])
            if not check_consistency(inst).feasible:
                found.append(fs)
                out.append(inst)
                if max_results is not None and len(out) >= max_results:
                    return out
    return out


def verify_witness(inst: DilemmaInstance, witness: dict, include_full_set=False, atol=1e-12) -> bool:
    """Check a witness against every active subset's target conditional."""
    pts = inst.points
    row = {int(i): r for r, i in enumerate(pts.ids)}
    glob = {int(i) for i in pts.ids[pareto_mask(pts.points)]}
    p = np.array([witness[i] for i in row])
    if abs(p.sum() - 1.0) > atol or np.any(p < 0):
        return False
    if any(witness[g] <= 0 for g in glob):
        return False
    subsets = list(inst.subsets) + ([tuple(row)] if include_full_set else [])
    for sub in subsets:
        if not any(i in glob for i in sub):
            continue
        mass = np.array([witness[i] for i in sub])
        on = pareto_mask(pts.points[[row[i] for i in sub]])
        cond = mass / mass.sum()
        target = on / on.sum()
        if np.max(np.abs(cond - target)) > atol:
            return False
    return True
