"""HyperGrid and N-Grams environments with exact enumeration helpers.

Environments are batched: states are integer arrays of shape ``(batch, k)``.
Every environment exposes the same small surface used by the sampler, the
trainer and the exact dynamic program::

    initial_states(n)   masks(states)   step(states, actions)
    encode(states)      log_pb(children)   objectives(states)
    transition_table()  (enumerable environments only)
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field

import numpy as np

from .pareto import pareto_mask

# --------------------------------------------------------------------------
# synthetic objectives on [0, 1]^2


def _check_unit(*us):
    for u in us:
        u = np.asarray(u, dtype=np.float64)
        if np.any(u < 0) or np.any(u > 1) or not np.all(np.isfinite(u)):
            raise ValueError("inputs must lie in [0, 1]")


def branin(u1, u2):
    _check_unit(u1, u2)
    x1 = 15.0 * np.asarray(u1, dtype=np.float64) - 5.0
    x2 = 15.0 * np.asarray(u2, dtype=np.float64)
    a, b, c, r, s, t = 1.0, 5.1 / (4 * np.pi**2), 5.0 / np.pi, 6.0, 10.0, 1.0 / (8 * np.pi)
    return a * (x2 - b * x1**2 + c * x1 - r) ** 2 + s * (1 - t) * np.cos(x1) + s


def currin(u1, u2):
    _check_unit(u1, u2)
    x1 = np.asarray(u1, dtype=np.float64)
    x2 = np.asarray(u2, dtype=np.float64)
    num = 2300 * x1**3 + 1900 * x1**2 + 2092 * x1 + 60
    den = 13.77 * (100 * x1**3 + 500 * x1**2 + 4 * x1 + 20)
    return (1 - np.exp(-0.5 * x2)) * num / den


def shubert(u1, u2):
    _check_unit(u1, u2)
    x1 = np.asarray(u1, dtype=np.float64)
    x2 = np.asarray(u2, dtype=np.float64)
    s1 = sum(i * np.cos((i + 1) * x1 + i) for i in range(1, 6))
    s2 = sum(i * np.cos((i + 1) * x2 + i) for i in range(1, 6))
    return s1 * s2 / 397.0 + 186.8 / 397.0


def beale(u1, u2, literal: bool = False):
    """Scaled Beale function; ``literal`` squares the last term's x2 instead of cubing it."""
    _check_unit(u1, u2)
    x1 = np.asarray(u1, dtype=np.float64)
    x2 = np.asarray(u2, dtype=np.float64)
    last = x2**2 if literal else x2**3
    return ((1.5 - x1 + x1 * x2) ** 2 + (2.25 - x1 + x1 * x2**2) ** 2 + (2.625 - x1 + x1 * last) ** 2) / 38.8


def bump(u):
    """Single-peak 1-D test objective with its maximum at u = 0.65."""
    u = np.asarray(u, dtype=np.float64)
    return np.exp(-((u - 0.65) ** 2) / 0.02)


NAMED_2D = {"branin": branin, "currin": currin, "shubert": shubert, "beale": beale}


# --------------------------------------------------------------------------
# HyperGrid


@dataclass
class HyperGridEnv:
    """``d``-dimensional grid with coordinates in ``1..H``.

    Actions ``0..d-1`` increment a coordinate, action ``d`` stops. Named
    objectives read the first two unit coordinates ``u = (s - 1) / (H - 1)``;
    ``"bump"`` reads the first one. Callables receive the full ``(n, d)``
    unit-coordinate array.
    """

    d: int = 2
    H: int = 32
    objectives: list = field(default_factory=lambda: ["branin", "currin"])
    beale_literal: bool = False

    def __post_init__(self):
        if self.H < 2:
            raise ValueError("H must be >= 2")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        for obj in self.objectives:
            if isinstance(obj, str):
                if obj in NAMED_2D and self.d < 2:
                    raise ValueError(f"{obj} needs d >= 2")
                if obj not in NAMED_2D and obj != "bump":
                    raise ValueError(f"unknown objective {obj!r}")
        self.n_actions = self.d + 1
        self.stop = self.d
        self.state_dim = self.d
        self.input_dim = self.d * self.H
        self.max_steps = self.d * (self.H - 1) + 1
        self._norm = None

    @property
    def n_objectives(self):
        return len(self.objectives)

    @property
    def n_states(self):
        return self.H**self.d

    def initial_states(self, n=1):
        return np.ones((n, self.d), dtype=np.int64)

    def masks(self, states):
        states = np.atleast_2d(states)
        m = np.ones((len(states), self.n_actions), dtype=bool)
        m[:, : self.d] = states < self.H
        return m

    def mask(self, state):
        return self.masks(np.asarray(state)[None, :])[0]

    def step(self, states, actions):
        states = np.array(np.atleast_2d(states), dtype=np.int64)
        actions = np.asarray(actions).ravel()
        if np.any(actions == self.stop):
            raise ValueError("the stop action has no successor state")
        rows = np.arange(len(states))
        if np.any(states[rows, actions] >= self.H):
            raise ValueError("increment would leave the grid")
        states[rows, actions] += 1
        return states

    def step_one(self, state, action):
        return self.step(np.asarray(state)[None, :], [action])[0]

    def encode(self, states):
        states = np.atleast_2d(states)
        out = np.zeros((len(states), self.input_dim))
        cols = (states - 1) + np.arange(self.d) * self.H
        np.put_along_axis(out, cols, 1.0, axis=1)
        return out

    def n_parents(self, states):
        """Parent count of a (non-terminal) grid state: coordinates above 1."""
        return (np.atleast_2d(states) > 1).sum(axis=1)

    def log_pb(self, children):
        """Uniform backward log-probability of the increment that produced each child."""
        return -np.log(self.n_parents(children))

    def unit(self, states):
        return (np.atleast_2d(states) - 1) / (self.H - 1)

    def objectives_of_unit(self, u):
        cols = []
        for obj in self.objectives:
            if callable(obj):
                cols.append(obj(u))
            elif obj == "bump":
                cols.append(bump(u[:, 0]))
            elif obj == "beale":
                cols.append(beale(u[:, 0], u[:, 1], literal=self.beale_literal))
            else:
                cols.append(NAMED_2D[obj](u[:, 0], u[:, 1]))
        return np.column_stack(cols).astype(np.float64)

    def objective_values(self, states):
        return self.objectives_of_unit(self.unit(states))

    def all_states(self):
        """Every grid state, ordered by coordinate sum (a topological order)."""
        grid = np.array(list(itertools.product(range(1, self.H + 1), repeat=self.d)), dtype=np.int64)
        return grid[np.argsort(grid.sum(axis=1), kind="stable")]

    def state_index(self, states):
        # mixed-radix code, then map into the all_states() order
        codes = ((np.atleast_2d(states) - 1) * (self.H ** np.arange(self.d)[::-1])).sum(axis=1)
        return self._code_to_pos()[codes]

    def _code_to_pos(self):
        if getattr(self, "_c2p", None) is None:
            S = self.all_states()
            codes = ((S - 1) * (self.H ** np.arange(self.d)[::-1])).sum(axis=1)
            c2p = np.empty(len(S), dtype=np.int64)
            c2p[codes] = np.arange(len(S))
            self._c2p = c2p
        return self._c2p

    def transition_table(self, max_states=100_000):
        if self.n_states > max_states:
            raise ValueError(f"state space too large for exact enumeration: {self.n_states} > {max_states}")
        S = self.all_states()
        child = np.full((len(S), self.n_actions), -1, dtype=np.int64)
        for a in range(self.d):
            ok = S[:, a] < self.H
            nxt = S[ok].copy()
            nxt[:, a] += 1
            child[ok, a] = self.state_index(nxt)
        return S, child, S.sum(axis=1)

    def terminal_key(self, state):
        return tuple(int(v) for v in state)

    def image(self):
        """Objective vectors of every grid state, in ``all_states()`` order."""
        return self.objective_values(self.all_states())

    def normalizer(self):
        """Per-axis (min, max) of the enumerated image."""
        if self._norm is None:
            img = self.image()
            self._norm = (img.min(axis=0), img.max(axis=0))
        return self._norm

    def true_front(self):
        """States and objective vectors of the exact Pareto front by enumeration."""
        S = self.all_states()
        F = self.objective_values(S)
        m = pareto_mask(F)
        return S[m], F[m]


def hypergrid_true_front(env: HyperGridEnv):
    from .pareto import PointSet

    return PointSet(env.true_front()[1])


# --------------------------------------------------------------------------
# N-Grams

UNIGRAMS = {2: ["A", "C"], 3: ["A", "C", "V"], 4: ["A", "C", "V", "W"]}
BIGRAMS = {2: ["AC", "CV"], 3: ["AC", "CV", "VA"], 4: ["AC", "CV", "VA", "AW"]}


def count_overlapping(seq: str, pattern: str) -> int:
    n = len(pattern)
    return sum(1 for i in range(len(seq) - n + 1) if seq[i : i + n] == pattern)


def ngram_reward(seq: str, patterns, L: int) -> np.ndarray:
    """Occurrence counts (overlapping) scaled by the most that fit in length ``L``."""
    return np.array([count_overlapping(seq, p) / (L - len(p) + 1) for p in patterns], dtype=np.float64)


@dataclass
class NGramEnv:
    """Strings of length ``1..L`` built left to right over ``vocab``.

    A state is a length-``L`` integer array of symbol codes padded with
    ``len(vocab)``. Actions ``0..V-1`` append a symbol, action ``V`` stops.
    """

    patterns: list = field(default_factory=lambda: list(UNIGRAMS[3]))
    L: int = 18
    vocab: str = string.ascii_uppercase

    def __post_init__(self):
        if len(set(self.vocab)) != len(self.vocab):
            raise ValueError("vocabulary symbols must be distinct")
        for p in self.patterns:
            if not p or any(c not in self.vocab for c in p) or len(p) > self.L:
                raise ValueError(f"bad pattern {p!r}")
        self.V = len(self.vocab)
        self.pad = self.V
        self.n_actions = self.V + 1
        self.stop = self.V
        self.state_dim = self.L
        self.input_dim = self.L * (self.V + 1) + 1
        self.max_steps = self.L + 1
        self._sym = {c: i for i, c in enumerate(self.vocab)}

    @property
    def n_objectives(self):
        return len(self.patterns)

    def initial_states(self, n=1):
        return np.full((n, self.L), self.pad, dtype=np.int64)

    def lengths(self, states):
        return (np.atleast_2d(states) != self.pad).sum(axis=1)

    def masks(self, states):
        lens = self.lengths(states)
        m = np.empty((len(lens), self.n_actions), dtype=bool)
        m[:, : self.V] = (lens < self.L)[:, None]
        m[:, self.V] = lens >= 1
        return m

    def mask(self, state):
        return self.masks(np.asarray(state)[None, :])[0]

    def step(self, states, actions):
        states = np.array(np.atleast_2d(states), dtype=np.int64)
        actions = np.asarray(actions).ravel()
        if np.any(actions == self.stop):
            raise ValueError("the stop action has no successor state")
        lens = self.lengths(states)
        if np.any(lens >= self.L):
            raise ValueError("string already at maximum length")
        states[np.arange(len(states)), lens] = actions
        return states

    def step_one(self, state, action):
        return self.step(np.asarray(state)[None, :], [action])[0]

    def encode(self, states):
        states = np.atleast_2d(states)
        out = np.zeros((len(states), self.input_dim))
        cols = np.arange(self.L) * (self.V + 1) + states
        np.put_along_axis(out, cols, 1.0, axis=1)
        out[:, -1] = self.lengths(states) / self.L
        return out

    def log_pb(self, children):
        # every string has exactly one parent
        return np.zeros(len(np.atleast_2d(children)))

    def to_string(self, state) -> str:
        return "".join(self.vocab[c] for c in state if c != self.pad)

    def from_string(self, s: str) -> np.ndarray:
        st = self.initial_states(1)[0]
        st[: len(s)] = [self._sym[c] for c in s]
        return st

    def objective_values(self, states):
        return np.array([ngram_reward(self.to_string(s), self.patterns, self.L) for s in np.atleast_2d(states)])

    def terminal_key(self, state):
        return self.to_string(state)

    def transition_table(self, max_states=100_000):
        n = sum(self.V**k for k in range(self.L + 1))
        if n > max_states:
            raise ValueError(f"state space too large for exact enumeration: {n} > {max_states}")
        states, level = [], []
        for k in range(self.L + 1):
            for word in itertools.product(range(self.V), repeat=k):
                st = np.full(self.L, self.pad, dtype=np.int64)
                st[:k] = word
                states.append(st)
                level.append(k)
        S = np.array(states)
        pos = {tuple(s): i for i, s in enumerate(S)}
        child = np.full((len(S), self.n_actions), -1, dtype=np.int64)
        for i, (s, k) in enumerate(zip(S, level)):
            if k < self.L:
                for a in range(self.V):
                    c = s.copy()
                    c[k] = a
                    child[i, a] = pos[tuple(c)]
        return S, child, np.array(level)

    def true_front(self):
        """Exact objective-space front, available for distinct unigram patterns.

        Achievable unigram count vectors are ``{c : sum(c) <= L}``, so the
        front is the lattice with ``sum(c) == L``. Returns ``None`` otherwise.
        """
        if not all(len(p) == 1 for p in self.patterns) or len(set(self.patterns)) != len(self.patterns):
            return None
        k = len(self.patterns)
        pts = []
        for c in itertools.combinations(range(self.L + k - 1), k - 1):
            parts = np.diff((-1,) + c + (self.L + k - 1,)) - 1
            pts.append(parts / self.L)
        return np.array(pts, dtype=np.float64)


def make_env(spec: dict):
    """Build an environment from config keys (``env``, ``objectives``/``patterns``, ``d``, ``H``, ``L``)."""
    kind = spec.get("env", "hypergrid")
    if kind == "hypergrid":
        return HyperGridEnv(
            d=int(spec.get("d", 2)),
            H=int(spec.get("H", 32)),
            objectives=list(spec.get("objectives", ["branin", "currin"])),
            beale_literal=bool(spec.get("beale_literal", False)),
        )
    if kind == "ngrams":
        patterns = spec.get("patterns")
        if patterns is None:
            n = int(spec.get("n_objectives", 3))
            patterns = (BIGRAMS if spec.get("ngram", "unigram") == "bigram" else UNIGRAMS)[n]
        default_L = 18 if all(len(p) == 1 for p in patterns) else 36
        return NGramEnv(
            patterns=list(patterns),
            L=int(spec.get("L", default_L)),
            vocab=spec.get("vocab", string.ascii_uppercase),
        )
    raise ValueError(f"unknown environment {kind!r}")
