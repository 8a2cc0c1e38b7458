"""Replay buffer that tracks the Pareto front of everything it stores."""

from __future__ import annotations

import json
import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .pareto import PointSet


class BufferWarmingUp(RuntimeError):
    """Raised by :meth:`ReplayBuffer.sample_batch` before the warm-up size is reached."""


@dataclass(frozen=True)
class ReplayConfig:
    capacity: int = 10_000
    warmup: int = 1_000
    pareto_ratio: float = 0.1
    min_pareto_k: int = 1

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if not 0.0 < self.pareto_ratio < 1.0:
            raise ValueError("pareto_ratio must be in (0, 1)")
        if self.min_pareto_k < 0 or self.warmup < 0:
            raise ValueError("warmup and min_pareto_k must be nonnegative")


@dataclass
class Entry:
    id: int
    trajectory: object
    objectives: np.ndarray


def _dominates_any(F, x):
    """Mask of rows of F that dominate x."""
    return (F >= x).all(axis=1) & (F > x).any(axis=1)


def _dominated_by(F, x):
    """Mask of rows of F that x dominates."""
    return (x >= F).all(axis=1) & (x > F).any(axis=1)


class ReplayBuffer:
    """Bounded store of (trajectory, objective vector) entries.

    The non-dominated subset is maintained on every insert. When full, the
    oldest non-front entry is evicted; if every entry is on the front, a
    dominated newcomer is dropped and otherwise the oldest entry goes.
    """

    def __init__(self, capacity=10_000, warmup=1_000, pareto_ratio=0.1, min_pareto_k=1):
        self.config = ReplayConfig(capacity, warmup, pareto_ratio, min_pareto_k)
        self._entries: OrderedDict[int, Entry] = OrderedDict()
        self._front: OrderedDict[int, None] = OrderedDict()
        self._next_id = 0
        self._F = None  # cached front matrix, rebuilt lazily

    @classmethod
    def from_config(cls, cfg: ReplayConfig):
        return cls(cfg.capacity, cfg.warmup, cfg.pareto_ratio, cfg.min_pareto_k)

    def __len__(self):
        return len(self._entries)

    @property
    def capacity(self):
        return self.config.capacity

    @property
    def front_ids(self) -> list:
        return list(self._front)

    def entries(self) -> list:
        return list(self._entries.values())

    def _front_matrix(self):
        if not self._front:
            return None
        if self._F is None:
            self._F = np.array([self._entries[i].objectives for i in self._front])
        return self._F

    def insert(self, trajectory, objectives) -> bool:
        """Store an entry; returns False when it was dropped instead."""
        x = np.asarray(objectives, dtype=np.float64).ravel()
        F = self._front_matrix()
        dominated = F is not None and bool(_dominates_any(F, x).any())
        if len(self._entries) >= self.capacity:
            victim = next((i for i in self._entries if i not in self._front), None)
            if victim is None:
                if dominated:
                    return False
                victim = next(iter(self._entries))
                del self._front[victim]
                self._F = None
            del self._entries[victim]
            F = self._front_matrix()
        eid = self._next_id
        self._next_id += 1
        self._entries[eid] = Entry(eid, trajectory, x)
        if not dominated:
            if F is not None:
                ids = list(self._front)
                for i in np.nonzero(_dominated_by(F, x))[0]:
                    del self._front[ids[i]]
            self._front[eid] = None
            self._F = None
        return True

    def ready(self) -> bool:
        return len(self._entries) >= self.config.warmup and len(self._entries) > 0

    def front_quota(self, batch_size: int) -> int:
        k = math.ceil(self.config.pareto_ratio * batch_size - 1e-9)
        return min(batch_size, max(k, self.config.min_pareto_k))

    def sample_batch(self, batch_size: int, rng) -> list:
        """Front quota drawn from the front, the rest from the whole buffer (with replacement)."""
        if not self.ready():
            raise BufferWarmingUp(f"{len(self)} stored < warm-up {self.config.warmup}")
        rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
        ids = list(self._entries)
        front = list(self._front)
        if len(front) == len(ids):
            pick = rng.integers(len(front), size=batch_size)
            return [self._entries[front[i]] for i in pick]
        nf = self.front_quota(batch_size)
        out = [self._entries[front[i]] for i in rng.integers(len(front), size=nf)]
        out += [self._entries[ids[i]] for i in rng.integers(len(ids), size=batch_size - nf)]
        return out

    def front_snapshot(self) -> PointSet:
        """Isolated copy of the current front's objective vectors (ids are entry ids)."""
        if not self._front:
            return PointSet(np.zeros((0, 1)), np.zeros(0, dtype=np.int64))
        ids = np.array(list(self._front), dtype=np.int64)
        return PointSet(np.array([self._entries[i].objectives for i in ids]), ids)

    # ------------------------------------------------------------------ io

    def dump(self, path):
        """Write entries as JSON lines (trajectory states and actions only)."""
        with open(path, "w") as fh:
            for e in self._entries.values():
                t = e.trajectory
                rec = {"id": e.id, "objectives": e.objectives.tolist()}
                if t is not None:
                    rec["states"] = np.asarray(t.states).tolist()
                    rec["actions"] = np.asarray(t.actions).tolist()
                    rec["log_pb"] = np.asarray(t.log_pb).tolist()
                fh.write(json.dumps(rec) + "\n")

    @classmethod
    def restore(cls, path, config: ReplayConfig | None = None):
        from .gflownet import Trajectory

        buf = cls.from_config(config or ReplayConfig())
        with open(path) as fh:
            for line in fh:
                rec = json.loads(line)
                traj = None
                if "states" in rec:
                    acts = np.array(rec["actions"], dtype=np.int64)
                    traj = Trajectory(
                        np.array(rec["states"], dtype=np.int64),
                        acts,
                        np.full(len(acts), np.nan),
                        np.array(rec["log_pb"], dtype=np.float64),
                    )
                buf.insert(traj, rec["objectives"])
        return buf
