"""Global-order GFlowNets for multi-objective sampling.

Pareto utilities, global scoring orders, multi-objective metrics, a numpy
GFlowNet trainer with a Pareto-tracking replay buffer, and a checker for
subset-conditional consistency.
"""

from .consistency import ConsistencyVerdict, DilemmaInstance, check_consistency, enumerate_dilemmas
from .envs import HyperGridEnv, NGramEnv, make_env
from .gflownet import GFNModel, TrainConfig, exact_terminal_distribution, sample_trajectories, train
from .metrics import MetricReport, compute_report, hypervolume, igd_plus
from .orders import cheap_global_rank, global_rank, nn_interp_order, nn_order, rank_points
from .pareto import PointSet, dominates, nondominated_sort, pareto_front
from .replay import BufferWarmingUp, ReplayBuffer, ReplayConfig

__version__ = "0.1.0"

__all__ = [
    "BufferWarmingUp",
    "ConsistencyVerdict",
    "DilemmaInstance",
    "GFNModel",
    "HyperGridEnv",
    "MetricReport",
    "NGramEnv",
    "PointSet",
    "ReplayBuffer",
    "ReplayConfig",
    "TrainConfig",
    "check_consistency",
    "cheap_global_rank",
    "compute_report",
    "dominates",
    "enumerate_dilemmas",
    "exact_terminal_distribution",
    "global_rank",
    "hypervolume",
    "igd_plus",
    "make_env",
    "nn_interp_order",
    "nn_order",
    "nondominated_sort",
    "pareto_front",
    "rank_points",
    "sample_trajectories",
    "train",
]
