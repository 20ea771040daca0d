"""Per-worker sequential optimizer and its evaluate-share-refit loop.

Each worker owns a full optimizer: surrogate, selection policy, history,
and random stream. Workers never coordinate through a manager; the loop
evaluates, broadcasts the result to every peer, drains whatever peers
have sent, refits, and repeats until the wall-clock budget is spent. The
loop checks the deadline before asking, so an evaluation in flight at the
deadline completes and still lands in the history.

``run_worker`` is a generator yielding kernel requests (see
:mod:`peerbo.des`), which lets the identical loop run under the
deterministic simulated clock or under real threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Generator

import numpy as np

from . import acquisition, forest as forest_mod
from .acquisition import KappaPolicy, SelectorConfig, draw_kappa
from .des import Delay, Join
from .forest import Forest, ForestParams
from .history import EvalRecord, History
from .space import Config, ParamSpace
from .transport import Message


@dataclass(frozen=True)
class OptimizerConfig:
    """Per-worker optimizer settings.

    ``n_initial=None`` resolves to max(10, n_dims): the warmup prefix of
    uniformly random evaluations before the surrogate takes over.
    ``n_max_sample`` caps surrogate training size via quantile
    undersampling; None trains on everything. ``selection`` is one of
    "argmax", "boltzmann", "random".
    """

    forest: ForestParams = field(default_factory=ForestParams)
    selector: SelectorConfig = field(default_factory=SelectorConfig)
    kappa_policy: KappaPolicy = field(
        default_factory=lambda: KappaPolicy("exponential")
    )
    selection: str = "argmax"
    n_initial: int | None = None
    refit_every: int = 1
    n_max_sample: int | None = 5000

    def __post_init__(self):
        if self.selection not in ("argmax", "boltzmann", "random"):
            raise ValueError(f"unknown selection {self.selection!r}")
        if self.refit_every < 1:
            raise ValueError("refit_every must be at least 1")
        if self.n_initial is not None and self.n_initial < 1:
            raise ValueError("n_initial must be positive")

    def resolve_n_initial(self, n_dims: int) -> int:
        return self.n_initial if self.n_initial is not None else max(
            10, n_dims
        )


class WorkerState:
    """One worker's optimizer: kappa draw, surrogate, history, stream."""

    def __init__(self, worker_id: int, space: ParamSpace,
                 config: OptimizerConfig, rng: np.random.Generator):
        self.worker_id = worker_id
        self.space = space
        self.config = config
        self.rng = rng
        self.kappa = draw_kappa(config.kappa_policy, rng)
        self.history = History()
        self.forest: Forest | None = None
        self.step = 0  # completed evaluations told to this optimizer
        self.n_initial = config.resolve_n_initial(space.n_dims)

    def ask(self) -> Config:
        """Next configuration to evaluate."""
        cfg = self.config
        if (self.forest is None or cfg.selection == "random"
                or len(self.history) < self.n_initial):
            return self.space.sample(1, self.rng)[0]
        if cfg.selection == "argmax":
            return acquisition.select_argmax(
                self.forest, self.space, self.kappa, cfg.selector, self.rng
            )
        return acquisition.select_boltzmann(
            self.forest, self.space, self.kappa, cfg.selector, self.step,
            self.rng
        )

    def tell(self, history: History) -> tuple[bool, int]:
        """Ingest the (grown) history; refit on schedule.

        Returns (refit happened, training size used).
        """
        if len(history) < len(self.history):
            raise ValueError("tell must never shrink the history")
        self.history = history
        self.step += 1
        if self.config.selection == "random":
            return False, 0
        if len(history) < self.n_initial:
            return False, 0
        if self.step % self.config.refit_every != 0:
            return False, 0
        if self.config.n_max_sample is not None:
            records = history.undersample(self.config.n_max_sample, self.rng)
        else:
            records = list(history.records)
        X, y = history.as_arrays(self.space, records)
        self.forest = forest_mod.fit(X, y, self.config.forest, self.rng)
        return True, len(records)


def run_worker(
    state: WorkerState,
    objective: Callable[[Config, np.random.Generator], tuple[float, float]],
    endpoint,
    t_wall: float,
    log: Callable[[float, int, str, int], None] | None = None,
    fit_cost: Callable[[int], float] | None = None,
    barrier=None,
) -> Generator:
    """Alg.-1 style worker loop as a kernel-driven generator.

    ``objective(config, rng)`` returns (objective value, duration);
    the value is maximization-oriented. With ``barrier`` set the loop
    runs barrier-synchronized rounds instead of asynchronous gossip.
    Returns the worker's final history.
    """
    wid = state.worker_id

    def note(t: float, kind: str, payload: int = 0) -> None:
        if log is not None:
            log(t, wid, kind, payload)

    now = 0.0
    seq = 0
    while now < t_wall:
        note(now, "ask")
        x = state.ask()
        y, duration = objective(x, state.rng)
        note(now, "eval_start")
        t_start = now
        _, now = yield Delay(duration, "eval")
        note(now, "eval_end")
        seq += 1
        record = EvalRecord(worker_id=wid, seq=seq, config=x, objective=y,
                            t_start=t_start, t_end=now)
        state.history.push(record)
        if barrier is not None:
            arrived = now
            others, now = yield Join(barrier, Message(wid, record))
            for msg in others:
                state.history.push(msg.record)
            note(arrived, "barrier_wait", len(others))
        else:
            sent = endpoint.send_all(record, now)
            note(now, "send", sent)
            got = endpoint.recv_any(state.history, now)
            note(now, "recv", got)
        did_fit, m = state.tell(state.history)
        if did_fit:
            note(now, "fit_start", m)
            cost = fit_cost(m) if fit_cost is not None else 0.0
            if cost > 0:
                _, now = yield Delay(cost, "fit")
            note(now, "fit_end", m)
    if endpoint is not None:
        endpoint.close()
    return state.history
