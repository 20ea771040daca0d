"""Experiment harness: method wiring, runners, metrics, and reports.

A single flat :class:`ExperimentConfig` describes a run: the method, the
benchmark, the worker pool, the simulated wall-clock budget, and the
model/selection knobs. ``run`` executes it on the deterministic
discrete-event runner (default) or on real threads with a scaled clock,
and returns an :class:`ExperimentReport` carrying the convergence
trajectory, evaluation counts, effective utilization, and the full event
log.

Methods
-------
- ``adbo-qucb``   asynchronous distributed BO; per-worker kappa ~ Exp(1/kappa)
- ``sdbo-bucb``   barrier-synchronized distributed BO; Boltzmann-UCB selection
- ``seq-1``       single sequential worker, classic UCB argmax
- ``scbo-cl``     centralized synchronous batches via constant liar
- ``acbo-cl``     centralized asynchronous; liar-augmented refit per ask
- ``acbo-qucb``   centralized asynchronous; kappa redrawn per ask
- ``acbo-bucb``   centralized asynchronous; Boltzmann-UCB per ask
- ``rd-acbo``     centralized asynchronous random search

Surrogate fits consume simulated time through a pluggable cost model;
the default charges coeff * n_tree * max_features * m * log2(m)
microseconds for a fit on m samples, calibrated so a 5,000-sample fit
with 100 trees and 5 features costs about one simulated second.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import acquisition
from .acquisition import KappaPolicy, SelectorConfig, draw_kappa
from .bench import Benchmark, RuntimeEmulator, make_benchmark
from .des import Delay, Get, Join, Put, SimKernel
from .forest import ForestParams, fit as fit_forest
from .history import EvalRecord, History
from .optimizer import OptimizerConfig, WorkerState, run_worker
from .space import ParamSpace
from .transport import EventLog, RtFabric, SimFabric

DEFAULT_FIT_COST_COEFF = 0.0326  # microseconds per tree-feature-sample-log2m
MANAGER_ID = 0


@dataclass(frozen=True)
class MethodSpec:
    topology: str          # "distributed" | "centralized"
    mode: str              # "async"/"barrier" or "percompletion"/"batch"
    selection: str         # "argmax" | "boltzmann" | "random"
    kappa_kind: str        # "fixed" | "exponential"
    constant_liar: bool = False
    forced_workers: int | None = None


METHODS: dict[str, MethodSpec] = {
    "adbo-qucb": MethodSpec("distributed", "async", "argmax", "exponential"),
    "sdbo-bucb": MethodSpec("distributed", "barrier", "boltzmann", "fixed"),
    "seq-1": MethodSpec("distributed", "async", "argmax", "fixed",
                        forced_workers=1),
    "scbo-cl": MethodSpec("centralized", "batch", "argmax", "fixed",
                          constant_liar=True),
    "acbo-cl": MethodSpec("centralized", "percompletion", "argmax", "fixed",
                          constant_liar=True),
    "acbo-qucb": MethodSpec("centralized", "percompletion", "argmax",
                            "exponential"),
    "acbo-bucb": MethodSpec("centralized", "percompletion", "boltzmann",
                            "fixed"),
    "rd-acbo": MethodSpec("centralized", "percompletion", "random", "fixed"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat, file-loadable description of one run.

    Zero sentinels: ``n_initial=0`` resolves to max(10, dim) and
    ``n_max_sample=0`` disables undersampling.
    """

    method: str = "adbo-qucb"
    benchmark: str = "ackley"
    dim: int = 5
    n_workers: int = 16
    t_wall: float = 1500.0
    seed: int = 0
    runner: str = "sim"
    duration_mean: float = 60.0
    duration_sd: float = 20.0
    duration_floor: float = 1.0
    latency: float = 0.0
    kappa: float = acquisition.DEFAULT_KAPPA
    n_candidates: int = 10_000
    n_tree: int = 100
    min_samples_leaf: int = 1
    bootstrap: bool = True
    split_rule: str = "random"
    feature_reduction: bool = False
    n_max_sample: int = 5000
    n_initial: int = 0
    refit_every: int = 1
    fit_cost_coeff: float = DEFAULT_FIT_COST_COEFF
    time_scale: float = 0.01

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(
                f"unknown method {self.method!r}; "
                f"choose from {sorted(METHODS)}"
            )
        if self.runner not in ("sim", "realtime"):
            raise ValueError("runner must be 'sim' or 'realtime'")
        if self.n_workers < 1:
            raise ValueError("n_workers must be at least 1")
        if self.t_wall <= 0:
            raise ValueError("t_wall must be positive")

    @property
    def effective_workers(self) -> int:
        forced = METHODS[self.method].forced_workers
        return forced if forced is not None else self.n_workers

    def forest_params(self) -> ForestParams:
        return ForestParams(
            n_tree=self.n_tree,
            min_samples_leaf=self.min_samples_leaf,
            bootstrap=self.bootstrap,
            split_rule=self.split_rule,
            feature_reduction=self.feature_reduction,
        )

    def optimizer_config(self, spec: MethodSpec) -> OptimizerConfig:
        return OptimizerConfig(
            forest=self.forest_params(),
            selector=SelectorConfig(n_candidates=self.n_candidates),
            kappa_policy=KappaPolicy(spec.kappa_kind, self.kappa),
            selection=spec.selection,
            n_initial=self.n_initial if self.n_initial > 0 else None,
            refit_every=self.refit_every,
            n_max_sample=self.n_max_sample if self.n_max_sample > 0 else None,
        )

    def emulator(self) -> RuntimeEmulator:
        return RuntimeEmulator(self.duration_mean, self.duration_sd,
                               self.duration_floor)

    def fit_cost_fn(self, n_features: int) -> Callable[[int], float]:
        params = self.forest_params()
        width = params.effective_max_features(n_features)
        coeff = self.fit_cost_coeff * params.n_tree * width

        def cost(m: int) -> float:
            return coeff * m * math.log2(max(m, 2)) * 1e-6

        return cost

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: expected a flat JSON object")
        return cls.from_dict(raw)


@dataclass
class ExperimentReport:
    """Everything a run produced, ready to save or compare."""

    config: ExperimentConfig
    trajectory: list[tuple[float, float]]
    n_evaluations: int
    u_eff: float
    per_worker_busy: dict[int, float]
    fit_durations: list[tuple[float, float]]
    final_best: float
    events: EventLog
    history: History

    def time_to_threshold(self, threshold: float) -> float | None:
        for t, best in self.trajectory:
            if best <= threshold:
                return t
        return None

    def summary_text(self) -> str:
        cfg = self.config
        lines = [
            f"method:        {cfg.method}",
            f"benchmark:     {cfg.benchmark} (dim={cfg.dim})",
            f"workers:       {cfg.effective_workers}",
            f"t_wall:        {cfg.t_wall:g} s (runner={cfg.runner})",
            f"seed:          {cfg.seed}",
            f"evaluations:   {self.n_evaluations}",
            f"final best:    {self.final_best:.6g}",
            f"u_eff:         {self.u_eff:.4f}",
            "per-worker busy fraction:",
        ]
        for wid in sorted(self.per_worker_busy):
            lines.append(f"  worker {wid:3d}: "
                         f"{self.per_worker_busy[wid]:.4f}")
        return "\n".join(lines) + "\n"

    def save(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "report.csv", "w", newline="") as fh:
            fh.write("time,best_objective\n")
            for t, best in self.trajectory:
                fh.write(f"{t!r},{best!r}\n")
        self.events.write_csv(out / "events.csv")
        with open(out / "summary.txt", "w") as fh:
            fh.write(self.summary_text())
        with open(out / "config.json", "w") as fh:
            json.dump(asdict(self.config), fh, indent=2, sort_keys=True)
            fh.write("\n")
        metrics = {
            "n_evaluations": self.n_evaluations,
            "u_eff": self.u_eff,
            "final_best": self.final_best,
            "per_worker_busy": {str(k): v for k, v in
                                sorted(self.per_worker_busy.items())},
        }
        with open(out / "metrics.json", "w") as fh:
            json.dump(metrics, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return out


def load_report(report_dir: str | Path) -> ExperimentReport:
    """Rehydrate a saved report directory for comparison.

    Only the pieces ``compare`` needs come back (config, trajectory,
    scalar metrics); the event log and history are left empty.
    """
    d = Path(report_dir)
    cfg = ExperimentConfig.from_file(d / "config.json")
    with open(d / "metrics.json") as fh:
        metrics = json.load(fh)
    trajectory = []
    with open(d / "report.csv") as fh:
        next(fh)  # header
        for line in fh:
            t, best = line.strip().split(",")
            trajectory.append((float(t), float(best)))
    return ExperimentReport(
        config=cfg,
        trajectory=trajectory,
        n_evaluations=int(metrics["n_evaluations"]),
        u_eff=float(metrics["u_eff"]),
        per_worker_busy={int(k): float(v) for k, v in
                         metrics["per_worker_busy"].items()},
        fit_durations=[],
        final_best=float(metrics["final_best"]),
        events=EventLog(),
        history=History(),
    )


def random_search_success_probability(
    low: float, high: float, epsilon: float, dim: int, n_draws: int
) -> float:
    """Chance that n uniform draws land at least one point within
    epsilon (per coordinate) of the optimum of a dim-dimensional box.

    Per-draw, per-dimension probability is 2 * epsilon / (high - low);
    a draw succeeds when all dim coordinates land, and the run succeeds
    when any draw does.
    """
    if high <= low:
        raise ValueError("high must exceed low")
    if epsilon <= 0 or n_draws < 1 or dim < 1:
        raise ValueError("epsilon, dim and n_draws must be positive")
    p_eps = min(1.0, 2.0 * epsilon / (high - low))
    p_point = p_eps ** dim
    return 1.0 - (1.0 - p_point) ** n_draws


# ---------------------------------------------------------------------------
# centralized manager


class _Manager:
    """Single optimizer serving every worker (centralized baselines)."""

    def __init__(self, space: ParamSpace, cfg: ExperimentConfig,
                 spec: MethodSpec, rng: np.random.Generator):
        self.space = space
        self.cfg = cfg
        self.spec = spec
        self.rng = rng
        self.opt = cfg.optimizer_config(spec)
        self.history = History()
        self.forest = None
        self.in_flight: dict[int, tuple] = {}
        self.step = 0
        self.tells = 0
        self.n_initial = self.opt.resolve_n_initial(space.n_dims)

    def _records(self):
        if self.opt.n_max_sample is not None:
            return self.history.undersample(self.opt.n_max_sample, self.rng)
        return list(self.history.records)

    def _refit(self, lies: Sequence[tuple] = ()) -> int:
        records = self._records()
        X, y = self.history.as_arrays(self.space, records)
        if lies:
            lie = self.history.best().objective
            X = np.vstack([X] + [self.space.encode(c) for c in lies])
            y = np.append(y, [lie] * len(lies))
        self.forest = fit_forest(X, y, self.opt.forest, self.rng)
        return len(y)

    def _cold(self) -> bool:
        return len(self.history) < self.n_initial

    def select(self, wid: int) -> tuple[tuple, list[int]]:
        """Choose the next configuration for ``wid``.

        Returns (config, fit sizes charged by this selection).
        """
        fits: list[int] = []
        if self.spec.selection == "random" or self._cold():
            pick = self.space.sample(1, self.rng)[0]
        elif self.spec.constant_liar:
            lies = [c for w, c in self.in_flight.items() if w != wid]
            fits.append(self._refit(lies))
            pick = acquisition.select_argmax(
                self.forest, self.space, self.opt.kappa_policy.kappa,
                self.opt.selector, self.rng
            )
        else:
            if self.forest is None:
                fits.append(self._refit())
            kappa = draw_kappa(self.opt.kappa_policy, self.rng)
            if self.spec.selection == "argmax":
                pick = acquisition.select_argmax(
                    self.forest, self.space, kappa, self.opt.selector,
                    self.rng
                )
            else:
                pick = acquisition.select_boltzmann(
                    self.forest, self.space, kappa, self.opt.selector,
                    self.step, self.rng
                )
        self.step += 1
        self.in_flight[wid] = pick
        return pick, fits

    def complete(self, wid: int, record: EvalRecord) -> list[int]:
        """Ingest a completed evaluation; non-liar styles refit here."""
        self.history.push(record)
        self.in_flight.pop(wid, None)
        self.tells += 1
        if (self.spec.selection == "random" or self.spec.constant_liar
                or self._cold()):
            return []
        if self.tells % self.opt.refit_every != 0:
            return []
        return [self._refit()]

    def liar_batch(self, q: int) -> tuple[list[tuple], list[int]]:
        """A synchronous batch of q configurations via the constant liar."""
        if self._cold():
            return self.space.sample(q, self.rng), []
        records = self._records()
        X, y = self.history.as_arrays(self.space, records)
        self.forest = fit_forest(X, y, self.opt.forest, self.rng)
        sizes = [len(y)]
        lie = self.history.best().objective
        picks = acquisition.constant_liar_batch(
            self.forest, self.space, self.opt.kappa_policy.kappa,
            self.opt.selector, q, lie, (X, y), self.rng,
            params=self.opt.forest, on_refit=sizes.append,
        )
        return picks, sizes


def _manager_proc(mgr: _Manager, boxes, results, t_wall, log, fit_cost):
    """Per-completion manager: re-ask each worker as it finishes."""
    now = 0.0

    def charge(sizes, t):
        for m in sizes:
            log(t, MANAGER_ID, "fit_start", m)
            cost = fit_cost(m)
            if cost > 0:
                _, t = yield Delay(cost, "fit")
            log(t, MANAGER_ID, "fit_end", m)
        return t

    n = len(boxes)
    for wid in range(1, n + 1):
        log(now, MANAGER_ID, "ask")
        pick, sizes = mgr.select(wid)
        now = yield from charge(sizes, now)
        _, now = yield Put(boxes[wid - 1], pick)
        log(now, MANAGER_ID, "send", 1)
    live = n
    while live:
        (wid, record), now = yield Get(results)
        log(now, MANAGER_ID, "recv", 1)
        sizes = mgr.complete(wid, record)
        now = yield from charge(sizes, now)
        if now >= t_wall:
            _, now = yield Put(boxes[wid - 1], None)
            live -= 1
            continue
        log(now, MANAGER_ID, "ask")
        pick, sizes = mgr.select(wid)
        now = yield from charge(sizes, now)
        _, now = yield Put(boxes[wid - 1], pick)
        log(now, MANAGER_ID, "send", 1)
    return mgr.history


def _batch_manager_proc(mgr: _Manager, boxes, results, t_wall, log,
                        fit_cost):
    """Synchronous-batch manager: liar batch, dispatch all, collect all."""
    now = 0.0
    n = len(boxes)
    while now < t_wall:
        log(now, MANAGER_ID, "ask")
        picks, sizes = mgr.liar_batch(n)
        for m in sizes:
            log(now, MANAGER_ID, "fit_start", m)
            cost = fit_cost(m)
            if cost > 0:
                _, now = yield Delay(cost, "fit")
            log(now, MANAGER_ID, "fit_end", m)
        for wid in range(1, n + 1):
            mgr.in_flight[wid] = picks[wid - 1]
            _, now = yield Put(boxes[wid - 1], picks[wid - 1])
            log(now, MANAGER_ID, "send", 1)
        for _ in range(n):
            (wid, record), now = yield Get(results)
            log(now, MANAGER_ID, "recv", 1)
            mgr.history.push(record)
            mgr.in_flight.pop(wid, None)
    for box in boxes:
        yield Put(box, None)
    return mgr.history


def _eval_worker_proc(rank, box, results, objective, rng, log):
    """Dumb evaluator: take a task, run it, send the record back."""
    now = 0.0
    seq = 0
    while True:
        task, now = yield Get(box)
        if task is None:
            break
        y, duration = objective(task, rng)
        log(now, rank, "eval_start")
        t_start = now
        _, now = yield Delay(duration, "eval")
        log(now, rank, "eval_end")
        seq += 1
        record = EvalRecord(rank, seq, task, y, t_start, now)
        _, now = yield Put(results, (rank, record))
        log(now, rank, "send", 1)
    return None


# ---------------------------------------------------------------------------
# run assembly


def _objective_fn(benchmark: Benchmark, space: ParamSpace,
                  emulator: RuntimeEmulator):
    def objective(config, rng):
        value = -benchmark.evaluate(space.encode(config))
        return value, emulator.draw_duration(rng)

    return objective


def _build_processes(cfg: ExperimentConfig):
    """Resolve the shared plumbing one run needs: spec, space, streams."""
    spec = METHODS[cfg.method]
    n = cfg.effective_workers
    benchmark = make_benchmark(cfg.benchmark, cfg.dim)
    space = benchmark.space()
    emulator = cfg.emulator()
    objective = _objective_fn(benchmark, space, emulator)
    fit_cost = (cfg.fit_cost_fn(space.n_dims) if cfg.runner == "sim"
                else lambda m: 0.0)
    children = np.random.SeedSequence(cfg.seed).spawn(n + 1)
    mgr_rng = np.random.default_rng(children[0])
    worker_rngs = [np.random.default_rng(children[i]) for i in
                   range(1, n + 1)]
    return (spec, n, space, objective, fit_cost, mgr_rng, worker_rngs,
            cfg.optimizer_config(spec))


def _run_sim(cfg: ExperimentConfig) -> tuple[list[History], EventLog]:
    (spec, n, space, objective, fit_cost, mgr_rng, worker_rngs,
     opt_cfg) = _build_processes(cfg)
    log = EventLog()
    kernel = SimKernel()
    if spec.topology == "distributed":
        fabric = SimFabric(n, cfg.latency)
        barrier = kernel.barrier() if spec.mode == "barrier" else None
        pids = []
        for rank in range(1, n + 1):
            state = WorkerState(rank, space, opt_cfg, worker_rngs[rank - 1])
            gen = run_worker(state, objective, fabric.endpoint(rank),
                             cfg.t_wall, log.append, fit_cost, barrier)
            pid = kernel.spawn(gen)
            if barrier is not None:
                barrier.register(pid)
            pids.append(pid)
        kernel.run()
        return [kernel.result(p) for p in pids], log
    mgr = _Manager(space, cfg, spec, mgr_rng)
    boxes = [kernel.store() for _ in range(n)]
    results = kernel.store()
    proc = (_batch_manager_proc if spec.mode == "batch" else _manager_proc)
    mgr_pid = kernel.spawn(proc(mgr, boxes, results, cfg.t_wall, log.append,
                                fit_cost))
    for rank in range(1, n + 1):
        kernel.spawn(_eval_worker_proc(rank, boxes[rank - 1], results,
                                       objective, worker_rngs[rank - 1],
                                       log.append))
    kernel.run()
    return [kernel.result(mgr_pid)], log


class _RtStore:
    """Blocking FIFO used when the processes run on real threads."""

    def __init__(self):
        import queue

        self._q = queue.SimpleQueue()

    def put(self, item):
        self._q.put(item)

    def get(self):
        return self._q.get()


def _drive_thread(gen, fabric, rank, out, index):
    value = None
    started = False
    try:
        while True:
            req = gen.send(value) if started else next(gen)
            started = True
            if isinstance(req, Delay):
                fabric.sleep(req.duration)
                value = (None, fabric.now())
            elif isinstance(req, Put):
                req.store.put(req.item)
                value = (None, fabric.now())
            elif isinstance(req, Get):
                value = (req.store.get(), fabric.now())
            elif isinstance(req, Join):
                others = req.barrier.arrive(rank, req.payload)
                value = (others, fabric.now())
            else:
                raise TypeError(f"unknown request {req!r}")
    except StopIteration as stop:
        out[index] = stop.value


def _run_realtime(cfg: ExperimentConfig) -> tuple[list[History], EventLog]:
    import threading

    (spec, n, space, objective, fit_cost, mgr_rng, worker_rngs,
     opt_cfg) = _build_processes(cfg)
    log = EventLog()
    fabric = RtFabric(n, cfg.time_scale)

    def live_log(_t, worker, kind, payload=0):
        log.append(fabric.now(), worker, kind, payload)

    threads = []
    if spec.topology == "distributed":
        out = [None] * n
        barrier = fabric.barrier if spec.mode == "barrier" else None
        for rank in range(1, n + 1):
            state = WorkerState(rank, space, opt_cfg, worker_rngs[rank - 1])
            endpoint = fabric.endpoint(rank)
            gen = run_worker(state, objective, endpoint, cfg.t_wall,
                             live_log, None, barrier)
            threads.append(threading.Thread(
                target=_drive_thread, args=(gen, fabric, rank, out,
                                            rank - 1),
                daemon=True,
            ))
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        return list(out), log
    out = [None] * (n + 1)
    mgr = _Manager(space, cfg, spec, mgr_rng)
    boxes = [_RtStore() for _ in range(n)]
    results = _RtStore()
    proc = (_batch_manager_proc if spec.mode == "batch" else _manager_proc)
    gen = proc(mgr, boxes, results, cfg.t_wall, live_log, fit_cost)
    threads.append(threading.Thread(
        target=_drive_thread, args=(gen, fabric, MANAGER_ID, out, 0),
        daemon=True,
    ))
    for rank in range(1, n + 1):
        wgen = _eval_worker_proc(rank, boxes[rank - 1], results, objective,
                                 worker_rngs[rank - 1], live_log)
        threads.append(threading.Thread(
            target=_drive_thread, args=(wgen, fabric, rank, out, rank),
            daemon=True,
        ))
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    return [out[0]], log


def _assemble_report(cfg: ExperimentConfig, histories: list[History],
                     log: EventLog) -> ExperimentReport:
    n = cfg.effective_workers
    union = History()
    for h in histories:
        if h is not None:
            union.merge(h)
    records = sorted(union.records,
                     key=lambda r: (r.t_end, r.worker_id, r.seq))
    trajectory: list[tuple[float, float]] = []
    best = math.inf
    for r in records:
        value = -r.objective
        if value < best:
            best = value
        trajectory.append((r.t_end, best))
    busy = {w: 0.0 for w in range(1, n + 1)}
    overhead: dict[int, float] = {}
    open_eval: dict[int, float] = {}
    open_fit: dict[int, float] = {}
    fit_durations: list[tuple[float, float]] = []
    for t, worker, kind, _payload in log.rows:
        if kind == "eval_start":
            open_eval[worker] = t
        elif kind == "eval_end":
            t0 = open_eval.pop(worker)
            busy[worker] = busy.get(worker, 0.0) + (
                min(t, cfg.t_wall) - min(t0, cfg.t_wall)
            )
        elif kind == "fit_start":
            open_fit[worker] = t
        elif kind == "fit_end":
            t0 = open_fit.pop(worker)
            fit_durations.append((t0, t - t0))
            overhead[worker] = overhead.get(worker, 0.0) + (
                min(t, cfg.t_wall) - min(t0, cfg.t_wall)
            )
    u_eff = sum(busy.values()) / (n * cfg.t_wall)
    per_worker = {w: busy[w] / cfg.t_wall for w in busy}
    return ExperimentReport(
        config=cfg,
        trajectory=trajectory,
        n_evaluations=len(union),
        u_eff=u_eff,
        per_worker_busy=per_worker,
        fit_durations=fit_durations,
        final_best=trajectory[-1][1] if trajectory else math.inf,
        events=log,
        history=union,
    )


def run(cfg: ExperimentConfig) -> ExperimentReport:
    """Execute one experiment and assemble its report."""
    if cfg.runner == "sim":
        histories, log = _run_sim(cfg)
    else:
        histories, log = _run_realtime(cfg)
    return _assemble_report(cfg, histories, log)


def run_seeds(cfg: ExperimentConfig,
              seeds: Sequence[int]) -> list[ExperimentReport]:
    return [run(replace(cfg, seed=s)) for s in seeds]


def compare(reports: Sequence[ExperimentReport],
            threshold: float | None = None) -> "ComparisonTable":
    """Aggregate reports per method: final best, evaluations, u_eff."""
    groups: dict[str, list[ExperimentReport]] = {}
    for rep in reports:
        groups.setdefault(rep.config.method, []).append(rep)
    rows = []
    for method, reps in groups.items():
        finals = np.array([r.final_best for r in reps], dtype=float)
        stderr = (finals.std(ddof=1) / math.sqrt(len(finals))
                  if len(finals) > 1 else 0.0)
        hit_times = [r.time_to_threshold(threshold) for r in reps] \
            if threshold is not None else []
        reached = [t for t in hit_times if t is not None]
        rows.append({
            "method": method,
            "runs": len(reps),
            "final_best_mean": float(finals.mean()),
            "final_best_stderr": float(stderr),
            "n_evaluations_mean": float(np.mean(
                [r.n_evaluations for r in reps]
            )),
            "u_eff_mean": float(np.mean([r.u_eff for r in reps])),
            "time_to_threshold": (float(np.mean(reached)) if reached
                                  else None),
        })
    rows.sort(key=lambda row: row["final_best_mean"])
    return ComparisonTable(rows, threshold)


@dataclass
class ComparisonTable:
    rows: list[dict]
    threshold: float | None = None

    def text(self) -> str:
        header = (f"{'method':<12} {'runs':>4} {'final best':>22} "
                  f"{'evals':>8} {'u_eff':>7} {'t_thresh':>9}")
        lines = [header, "-" * len(header)]
        for row in self.rows:
            fb = (f"{row['final_best_mean']:.4g} "
                  f"+/- {row['final_best_stderr']:.2g}")
            tt = (f"{row['time_to_threshold']:.4g}"
                  if row["time_to_threshold"] is not None else "-")
            lines.append(
                f"{row['method']:<12} {row['runs']:>4} {fb:>22} "
                f"{row['n_evaluations_mean']:>8.1f} "
                f"{row['u_eff_mean']:>7.4f} {tt:>9}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(self.rows[0].keys()))
            w.writeheader()
            for row in self.rows:
                w.writerow(row)
