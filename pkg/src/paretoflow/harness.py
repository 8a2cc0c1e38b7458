"""Experiment orchestration: train, generate candidates, score, write tables."""

from __future__ import annotations

import csv
import json
import os
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .envs import HyperGridEnv, make_env
from .gflownet import GFNModel, sample_trajectories, train
from .metrics import MetricReport, compute_report, hypercube_reference, unique_front
from .orders import global_rank, minmax_normalize, nn_order
from .pareto import pareto_mask

METRIC_COLUMNS = [k for k, _ in MetricReport().metric_items()]
THREADS_ENV = "PARETOFLOW_THREADS"


# --------------------------------------------------------------------------
# result table


@dataclass
class ResultTable:
    """Rows keyed by (env, method, seed); failed jobs carry ``status="error"``."""

    rows: list = field(default_factory=list)

    def add(self, row: dict):
        self.rows.append(row)

    @property
    def errors(self) -> list:
        return [r for r in self.rows if r["status"] != "ok"]

    def ok(self) -> list:
        return [r for r in self.rows if r["status"] == "ok"]

    def keys(self) -> list:
        return [(r["env"], r["method"], r["seed"]) for r in self.rows]

    def get(self, method, seed) -> dict:
        return next(r for r in self.rows if r["method"] == method and r["seed"] == seed)

    def mean(self, method: str, metric: str) -> float:
        vals = [r[metric] for r in self.ok() if r["method"] == method and r.get(metric) is not None]
        return float(np.mean(vals)) if vals else float("nan")

    def summary(self) -> list:
        """Per-(env, method) seed means of every metric."""
        out = []
        for env, method in dict.fromkeys((r["env"], r["method"]) for r in self.rows):
            good = [r for r in self.ok() if r["env"] == env and r["method"] == method]
            row = {"env": env, "method": method, "seed": "mean", "status": "ok" if good else "error"}
            for col in METRIC_COLUMNS:
                vals = [r[col] for r in good if r.get(col) is not None]
                row[col] = float(np.mean(vals)) if vals else None
            out.append(row)
        return out

    def write_csv(self, path, include_mean=True):
        cols = ["env", "method", "seed", "status"] + METRIC_COLUMNS + ["error"]
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore")
            w.writeheader()
            for r in self.rows + (self.summary() if include_mean else []):
                w.writerow({c: _fmt(r.get(c)) for c in cols})

    def write_json(self, path):
        Path(path).write_text(json.dumps({"rows": self.rows, "summary": self.summary()}, indent=2))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


# --------------------------------------------------------------------------
# single job


def reference_for(env):
    """``(lo, hi, P, is_true_front)`` used to normalise and score candidates."""
    d = env.n_objectives
    if isinstance(env, HyperGridEnv):
        lo, hi = env.normalizer()
        P = np.unique(minmax_normalize(env.true_front()[1], lo, hi), axis=0)
        return lo, hi, P, True
    lo, hi = np.zeros(d), np.ones(d)
    P = env.true_front()
    if P is None:
        return lo, hi, hypercube_reference(d), False
    return lo, hi, P, True


def _candidates(env, terminals):
    if isinstance(env, HyperGridEnv):
        return [t.tolist() for t in terminals]
    return [env.to_string(t) for t in terminals]


def run_job(cfg: ExperimentConfig, method: str, seed: int, out_dir) -> dict:
    """Train one (method, seed) pair and write its artifacts; returns the table row."""
    t0 = time.perf_counter()
    env = make_env(cfg.env)
    tcfg = cfg.train_config(method, seed)
    job_dir = Path(out_dir) / method / f"seed{seed}"
    job_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    model = GFNModel.init(env, hidden=tcfg.hidden, rng=rng)
    log_path = job_dir / "train_log.jsonl"
    train(model, env, tcfg, rng=rng, log_file=log_path)

    terminals = sample_trajectories(model, env, cfg.n_candidates, rng, 0.0, keep_trajectories=False)
    raw = env.objective_values(terminals)
    lo, hi, P, is_front = reference_for(env)
    S = minmax_normalize(raw, lo, hi)
    samples = _candidates(env, terminals)
    scores = global_rank(S).scores
    rep = compute_report(S, P, samples=samples, scores=scores, k=10, true_front=is_front)

    model_path = job_dir / "model.json"
    model_path.write_text(json.dumps(model.to_json()))
    cand_path = job_dir / "candidates.csv"
    with open(cand_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["candidate"] + [f"f{i}" for i in range(raw.shape[1])] + [f"f{i}_norm" for i in range(raw.shape[1])])
        for c, f, s in zip(samples, raw, S):
            w.writerow([c if isinstance(c, str) else " ".join(map(str, c))] + [repr(float(v)) for v in f] + [repr(float(v)) for v in s])
    plot_path = job_dir / "plot_data.csv"
    write_plot_data(plot_path, S, P)
    row = {"env": cfg.env.get("env", "hypergrid"), "method": method, "seed": int(seed), "status": "ok"}
    row.update({k: v for k, v in rep.metric_items()})
    row["artifacts"] = {
        "train_log": str(log_path),
        "model": str(model_path),
        "candidates": str(cand_path),
        "plot_data": str(plot_path),
        "report": str(job_dir / "report.json"),
    }
    report = {
        "env": cfg.env,
        "train": tcfg.to_dict(),
        "metrics": rep.to_dict(),
        "runtime_s": time.perf_counter() - t0,
    }
    (job_dir / "report.json").write_text(json.dumps(report, indent=2))
    return row


def write_plot_data(path, S, P):
    """Candidate objective vectors plus the reference front, one ``kind`` column to tell them apart."""
    d = S.shape[1]
    on = pareto_mask(S)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind"] + [f"f{i}" for i in range(d)])
        for s, f in zip(S, on):
            w.writerow(["candidate_front" if f else "candidate"] + [repr(float(v)) for v in s])
        for p in P:
            w.writerow(["reference"] + [repr(float(v)) for v in p])


def _safe_job(args):
    cfg, method, seed, out_dir = args
    try:
        return run_job(cfg, method, seed, out_dir)
    except Exception as exc:  # recorded, other jobs continue
        return {
            "env": cfg.env.get("env", "hypergrid"),
            "method": method,
            "seed": int(seed),
            "status": "error",
            "error": f"{type(exc).__name__}: {exc}",
            "traceback": traceback.format_exc(),
        }


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_experiment(cfg: ExperimentConfig, out_dir=None, seeds=None) -> ResultTable:
    """Every (method, seed) job of ``cfg``; writes ``results.csv`` and ``results.json``.

    Jobs run in worker processes when ``PARETOFLOW_THREADS`` > 1.
    """
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = cfg.seeds if seeds is None else seeds
    jobs = [(cfg, m, int(s), out) for m in cfg.methods for s in seeds]
    n = min(max_workers(), len(jobs))
    if n > 1:
        with ProcessPoolExecutor(n) as pool:
            rows = list(pool.map(_safe_job, jobs))
    else:
        rows = [_safe_job(j) for j in jobs]
    table = ResultTable(rows)
    (out / "config.toml").write_text(cfg.to_toml())
    table.write_csv(out / "results.csv")
    table.write_json(out / "results.json")
    return table


# --------------------------------------------------------------------------
# rank heatmaps on the unit square


def _identity(x, y):
    return np.stack([x, y], axis=-1)


def _skew(x, y):
    return np.stack([x, y / (1.0 + x**2)], axis=-1)


def _bump(x, y):
    return np.stack([x, (np.exp(-((x - 0.5) ** 2)) + y) / 2.0], axis=-1)


def _cossin(x, y):
    return np.stack([np.pi * x * np.cos(np.pi * x), np.pi * y * np.sin(np.pi * y)], axis=-1)


SQUARE_REWARDS = {"identity": _identity, "skew": _skew, "bump": _bump, "cossin": _cossin}


def square_grid(n: int = 32):
    """Cell centres of an ``n x n`` partition of the unit square, ``[i, j] -> (x_i, y_j)``."""
    t = (np.arange(n) + 0.5) / n
    return np.meshgrid(t, t, indexing="ij")


def emit_rank_heatmap(reward="cossin", method="gr", n: int = 32, out=None) -> np.ndarray:
    """``n x n`` matrix of global scores for a two-objective reward on the unit square.

    ``reward`` is a name from :data:`SQUARE_REWARDS` or a callable ``(x, y) -> (..., 2)``;
    ``method`` is ``"gr"`` or ``"nn"``. Entry ``[i, j]`` belongs to ``(x_i, y_j)``.
    """
    fn = SQUARE_REWARDS[reward] if isinstance(reward, str) else reward
    X, Y = square_grid(n)
    F = fn(X, Y).reshape(-1, 2)
    if method == "gr":
        scores = global_rank(F).scores
    elif method == "nn":
        scores = nn_order(F).scores
    else:
        raise ValueError(f"heatmaps support 'gr' and 'nn', got {method!r}")
    M = scores.reshape(n, n)
    if out is not None:
        np.savetxt(out, M, delimiter=",", fmt="%.17g")
    return M


# --------------------------------------------------------------------------
# pooled front comparison


def compare_fronts(fronts: dict) -> dict:
    """How many of each method's front points survive in the pooled front.

    ``fronts`` maps method name to an ``(n, d)`` array. Duplicates of a pooled
    front point all survive, so counts may sum to more than the number of
    distinct pooled points.
    """
    names = list(fronts)
    arrays = [unique_front(np.asarray(fronts[k], dtype=np.float64)) for k in names]
    pooled = np.vstack(arrays)
    keep = pareto_mask(pooled)
    counts, start = {}, 0
    for name, A in zip(names, arrays):
        counts[name] = int(keep[start : start + len(A)].sum())
        start += len(A)
    return counts
