"""peerbo: asynchronous distributed Bayesian optimization.

Workers run full per-worker optimizers (random-forest surrogate, UCB
acquisition with per-worker exploration draws) and exchange results
peer to peer without a manager. Centralized and synchronous baselines,
standard benchmark functions, a deterministic discrete-event runner,
and a threaded real-time runner round out the experiment harness.
"""
from .acquisition import (
    DEFAULT_KAPPA,
    KappaPolicy,
    SelectorConfig,
    constant_liar_batch,
    default_temperature,
    draw_kappa,
    select_argmax,
    select_boltzmann,
    ucb,
)
from .bench import Benchmark, RuntimeEmulator, make_benchmark
from .forest import Forest, ForestParams, Prediction, fit
from .harness import (
    METHODS,
    ComparisonTable,
    ExperimentConfig,
    ExperimentReport,
    compare,
    random_search_success_probability,
    run,
    run_seeds,
)
from .history import EvalRecord, History
from .optimizer import OptimizerConfig, WorkerState, run_worker
from .space import Dimension, ParamSpace, uniform_space

__version__ = "0.1.0"

__all__ = [
    "Benchmark",
    "ComparisonTable",
    "DEFAULT_KAPPA",
    "Dimension",
    "EvalRecord",
    "ExperimentConfig",
    "ExperimentReport",
    "Forest",
    "ForestParams",
    "History",
    "KappaPolicy",
    "METHODS",
    "OptimizerConfig",
    "ParamSpace",
    "Prediction",
    "RuntimeEmulator",
    "SelectorConfig",
    "WorkerState",
    "compare",
    "constant_liar_batch",
    "default_temperature",
    "draw_kappa",
    "fit",
    "make_benchmark",
    "random_search_success_probability",
    "run",
    "run_seeds",
    "run_worker",
    "select_argmax",
    "select_boltzmann",
    "ucb",
    "uniform_space",
]
