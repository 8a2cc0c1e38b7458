"""Trajectory-balance GFlowNets driven by global orders.

The forward policy is a :class:`~paretoflow.nn.DenseNet` over the
environment's state encoding; the backward policy is uniform over parents
and comes from the environment; ``log Z`` is a separate learnable scalar.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .nn import DenseNet, OptimizerState, adam_step, backward, forward, log_softmax
from .orders import RewardTransform, cheap_global_rank, rank_points, shift_positive, transform_scores
from .pareto import pareto_mask
from .replay import ReplayBuffer, ReplayConfig

REWARD_FLOOR = 1e-10


@dataclass
class Trajectory:
    """States ``s_0..s_n`` and the action taken in each (the last one stops).

    ``log_pf[t]`` is the policy log-probability of ``actions[t]`` in
    ``states[t]``; ``log_pb[t]`` is the backward log-probability of that
    transition (0 for the stop).
    """

    states: np.ndarray
    actions: np.ndarray
    log_pf: np.ndarray
    log_pb: np.ndarray

    @property
    def terminal(self):
        return self.states[-1]

    def __len__(self):
        return len(self.actions)


@dataclass
class GFNModel:
    policy: DenseNet
    log_z: np.ndarray = field(default_factory=lambda: np.zeros(1))

    @classmethod
    def init(cls, env, hidden=(64, 64, 64), rng=None):
        sizes = [env.input_dim, *hidden, env.n_actions]
        return cls(DenseNet.init(sizes, rng), np.zeros(1))

    @property
    def params(self):
        return self.policy.params + [self.log_z]

    def copy(self):
        return GFNModel(self.policy.copy(), self.log_z.copy())

    def to_json(self):
        return {"policy": self.policy.to_json(), "log_z": float(self.log_z[0])}

    @classmethod
    def from_json(cls, obj):
        return cls(DenseNet.from_json(obj["policy"]), np.array([float(obj["log_z"])]))


# --------------------------------------------------------------------------
# sampling


def _sample_rows(probs, rng):
    cum = np.cumsum(probs, axis=1)
    u = rng.random(len(probs)) * cum[:, -1]
    a = (cum <= u[:, None]).sum(axis=1)
    return np.minimum(a, probs.shape[1] - 1)


def policy_log_probs(model: GFNModel, env, states):
    logits = model.policy(env.encode(states))
    return log_softmax(logits, env.masks(states))


def sample_trajectories(model: GFNModel, env, n: int, rng, explore_eps: float = 0.0, keep_trajectories=True):
    """Roll ``n`` trajectories forward in lockstep.

    With probability ``explore_eps`` per step the action is drawn uniformly
    from the valid ones instead; ``log_pf`` always records the policy's own
    probability of the action taken. Returns a list of :class:`Trajectory`,
    or only the terminal states when ``keep_trajectories`` is false.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    cur = env.initial_states(n)
    alive = np.arange(n)
    terminals = np.empty_like(cur)
    rec = []
    for _ in range(env.max_steps):
        if len(alive) == 0:
            break
        S = cur[alive]
        mask = env.masks(S)
        logp = log_softmax(model.policy(env.encode(S)), mask)
        probs = np.exp(logp)
        if explore_eps > 0:
            uni = mask / mask.sum(axis=1, keepdims=True)
            probs = (1.0 - explore_eps) * probs + explore_eps * uni
        acts = _sample_rows(probs, rng)
        lpf = logp[np.arange(len(alive)), acts]
        stop = acts == env.stop
        lpb = np.zeros(len(alive))
        moving = ~stop
        if moving.any():
            nxt = env.step(S[moving], acts[moving])
            lpb[moving] = env.log_pb(nxt)
            cur[alive[moving]] = nxt
        if keep_trajectories:
            rec.append((alive, S, acts, lpf, lpb))
        terminals[alive[stop]] = S[stop]
        alive = alive[moving]
    if len(alive):
        raise RuntimeError("environment contract violation: trajectories did not terminate")
    if not keep_trajectories:
        return terminals
    owner = np.concatenate([r[0] for r in rec])
    order = np.argsort(owner, kind="stable")
    cols = [np.concatenate([r[k] for r in rec])[order] for k in range(1, 5)]
    cuts = np.cumsum(np.bincount(owner, minlength=n))[:-1]
    parts = [np.split(c, cuts) for c in cols]
    return [Trajectory(*(p[i] for p in parts)) for i in range(n)]


def sample_trajectory(model, env, rng, explore_eps=0.0) -> Trajectory:
    return sample_trajectories(model, env, 1, rng, explore_eps)[0]


# --------------------------------------------------------------------------
# losses


def _stack(trajs):
    states = np.concatenate([t.states for t in trajs])
    actions = np.concatenate([t.actions for t in trajs])
    owner = np.repeat(np.arange(len(trajs)), [len(t) for t in trajs])
    sum_lpb = np.array([float(np.sum(t.log_pb)) for t in trajs])
    return states, actions, owner, sum_lpb


def _policy_terms(model, env, trajs):
    """Recompute per-trajectory sum of log P_F under the current parameters."""
    states, actions, owner, sum_lpb = _stack(trajs)
    mask = env.masks(states)
    logits, cache = forward(model.policy, env.encode(states))
    logp = log_softmax(logits, mask)
    rows = np.arange(len(actions))
    lp = logp[rows, actions]
    sum_lpf = np.bincount(owner, weights=lp, minlength=len(trajs))
    return sum_lpf, sum_lpb, (logp, cache, actions, owner, rows)


def _grads_from_step_weights(model, aux, step_w):
    """Backprop d(loss)/d(log P_F of each taken action) through the policy."""
    logp, cache, actions, owner, rows = aux
    probs = np.exp(logp)
    g = -probs * step_w[:, None]
    g[rows, actions] += step_w
    return backward(model.policy, cache, g)


def tb_loss(model: GFNModel, env, trajs, log_rewards):
    """Mean trajectory-balance loss over ``trajs`` and its gradients.

    Per trajectory ``(log Z + sum log P_F - log R - sum log P_B)^2``. Returns
    ``(loss, grads, deltas)`` where ``grads`` lines up with ``model.params``.
    """
    if isinstance(trajs, Trajectory):
        trajs = [trajs]
    log_rewards = np.atleast_1d(np.asarray(log_rewards, dtype=np.float64))
    if not np.all(np.isfinite(log_rewards)):
        raise ValueError("log rewards must be finite; shift rewards positive first")
    sum_lpf, sum_lpb, aux = _policy_terms(model, env, trajs)
    delta = model.log_z[0] + sum_lpf - log_rewards - sum_lpb
    B = len(trajs)
    loss = float(np.mean(delta**2))
    d_delta = 2.0 * delta / B
    grads = _grads_from_step_weights(model, aux, d_delta[aux[3]])
    grads.append(np.array([d_delta.sum()]))
    return loss, grads, delta


def op_subset_loss(model: GFNModel, env, trajs, objectives):
    """KL from the uniform-on-front target to the model's within-batch conditional.

    The batch terminals form the subset; the model conditional is the softmax
    of the implied log-rewards ``log Z + sum log P_F - sum log P_B``.
    """
    if len(trajs) < 2:
        raise ValueError("the order-preserving loss needs a batch of at least 2")
    F = np.asarray(objectives, dtype=np.float64)
    sum_lpf, sum_lpb, aux = _policy_terms(model, env, trajs)
    implied = model.log_z[0] + sum_lpf - sum_lpb
    z = implied - implied.max()
    log_q = z - np.log(np.exp(z).sum())
    front = pareto_mask(F)
    p = front / front.sum()
    loss = float(np.sum(p[front] * (np.log(p[front]) - log_q[front])))
    d_implied = np.exp(log_q) - p
    grads = _grads_from_step_weights(model, aux, d_implied[aux[3]])
    grads.append(np.array([d_implied.sum()]))
    return loss, grads


# --------------------------------------------------------------------------
# exact terminal distribution


def exact_terminal_distribution(model: GFNModel, env, max_states: int = 100_000, as_array=False):
    """Push unit flow from ``s_0`` through the state DAG under the policy.

    Returns ``{terminal key: probability}``; with ``as_array`` the raw
    ``(states, probs)`` pair in enumeration order instead.
    """
    S, child, level = env.transition_table(max_states)
    probs = np.exp(policy_log_probs(model, env, S))
    flow = np.zeros(len(S))
    flow[0] = 1.0
    term = np.zeros(len(S))
    for lv in np.unique(level):
        idx = np.nonzero(level == lv)[0]
        f = flow[idx, None] * probs[idx]
        term[idx] = f[:, env.stop]
        for a in range(env.n_actions):
            if a == env.stop:
                continue
            c = child[idx, a]
            ok = c >= 0
            np.add.at(flow, c[ok], f[ok, a])
    if as_array:
        return S, term
    can_stop = env.masks(S)[:, env.stop]
    return {env.terminal_key(s): float(p) for s, p, ok in zip(S, term, can_stop) if ok}


# --------------------------------------------------------------------------
# training


@dataclass
class TrainConfig:
    steps: int = 1000
    batch_size: int = 128
    lr: float = 0.01
    logz_lr_scale: float = 10.0
    method: str = "gr"  # gr | gr-k | cheap-gr | nn | nn-int | op-baseline
    max_rank: int | None = None
    transform: str = "softmax"
    temperature: float = 1.0
    explore_eps: float = 0.05
    hidden: tuple = (64, 64, 64)
    replay: ReplayConfig | None = None
    log_every: int = 100
    seed: int = 0

    def to_dict(self):
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d


def batch_log_rewards(F, cfg: TrainConfig, reference=None):
    """Scores from the configured global order, transformed to floored log-rewards."""
    if cfg.method in ("cheap", "cheap-gr"):
        ranks = cheap_global_rank(F, reference)
    else:
        ranks = rank_points(F, cfg.method, max_rank=cfg.max_rank)
    scores = ranks.scores
    t = RewardTransform(cfg.transform, cfg.temperature)
    if t.kind == "raw":
        scores = shift_positive(scores)
    r = transform_scores(scores, t)
    return np.log(np.maximum(r, REWARD_FLOOR)), ranks


@dataclass
class TrainResult:
    model: GFNModel
    log: list
    buffer: ReplayBuffer | None = None


def train(model: GFNModel, env, cfg: TrainConfig, rng=None, snapshot_fn=None, log_file=None) -> TrainResult:
    """Optimise ``model`` in place.

    Each step samples ``batch_size`` fresh trajectories with epsilon
    exploration. Without replay (or during warm-up) those form the training
    batch; afterwards the batch is drawn from the replay buffer with the
    configured front share. ``snapshot_fn(model, step)`` is called every
    ``log_every`` steps and its dict is embedded in the log record.
    """
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    n_policy = len(model.policy.params)
    opt = OptimizerState.for_params(model.params, lr=cfg.lr, lr_scale=[1.0] * n_policy + [cfg.logz_lr_scale])
    buf = ReplayBuffer.from_config(cfg.replay) if cfg.replay is not None else None
    log = []
    fh = open(log_file, "w") if log_file is not None else None
    try:
        for step in range(cfg.steps):
            fresh = sample_trajectories(model, env, cfg.batch_size, rng, cfg.explore_eps)
            F_fresh = env.objective_values(np.array([t.terminal for t in fresh]))
            batch, F = fresh, F_fresh
            if buf is not None:
                for t, f in zip(fresh, F_fresh):
                    buf.insert(t, f)
                if buf.ready():
                    entries = buf.sample_batch(cfg.batch_size, rng)
                    batch = [e.trajectory for e in entries]
                    F = np.array([e.objectives for e in entries])
            if cfg.method in ("op", "op-baseline"):
                loss, grads = op_subset_loss(model, env, batch, F)
            else:
                ref = buf.front_snapshot() if (buf is not None and cfg.method in ("cheap", "cheap-gr")) else None
                log_r, _ = batch_log_rewards(F, cfg, ref)
                loss, grads, _ = tb_loss(model, env, batch, log_r)
            adam_step(model.params, grads, opt)
            rec = {
                "step": step,
                "loss": loss,
                "front_size": int(pareto_mask(F).sum()),
                "log_z": float(model.log_z[0]),
            }
            if snapshot_fn is not None and cfg.log_every and ((step + 1) % cfg.log_every == 0):
                rec["snapshot"] = snapshot_fn(model, step)
            log.append(rec)
            if fh is not None:
                fh.write(json.dumps(rec) + "\n")
            if not math.isfinite(loss):
                raise FloatingPointError(f"non-finite loss at step {step}")
    finally:
        if fh is not None:
            fh.close()
    return TrainResult(model, log, buf)
