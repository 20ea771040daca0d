"""Acquisition policies: UCB scoring and the selection rules built on it.

All selectors score a pool of candidates drawn uniformly from the space
(size ``n_candidates``) and are maximization-oriented: callers optimizing
a loss should negate objectives before they reach the surrogate.

Worker diversity comes from the kappa policy. The "exponential" policy
draws each worker's exploration weight once from Exp(1/kappa), i.e.
kappa_i = -kappa * ln(u) with u ~ Uniform(0, 1], so the mean equals the
configured kappa: a share of workers exploit aggressively (kappa_i near 0)
while the tail explores harder than the classic fixed setting.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .forest import Forest, ForestParams, Prediction, fit
from .space import Config, ParamSpace

DEFAULT_KAPPA = 1.96


def default_temperature(step: int) -> float:
    """Boltzmann cooling schedule: T(step) = 1 / ln(step + 2)."""
    return 1.0 / np.log(step + 2.0)


@dataclass(frozen=True)
class KappaPolicy:
    """How a worker obtains its exploration weight."""

    kind: str = "fixed"
    kappa: float = DEFAULT_KAPPA

    def __post_init__(self):
        if self.kind not in ("fixed", "exponential"):
            raise ValueError(f"unknown kappa policy {self.kind!r}")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")


def draw_kappa(policy: KappaPolicy, rng: np.random.Generator) -> float:
    """Realize a kappa value under the policy (consumes the stream once
    for the exponential kind)."""
    if policy.kind == "fixed":
        return policy.kappa
    u = 1.0 - rng.random()  # in (0, 1], keeps log finite
    return -policy.kappa * np.log(u)


@dataclass(frozen=True)
class SelectorConfig:
    """Candidate-pool selection settings."""

    n_candidates: int = 10_000
    temperature: Callable[[int], float] = field(
        default=default_temperature, compare=False
    )

    def __post_init__(self):
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be positive")


def ucb(pred: Prediction, kappa: float) -> np.ndarray:
    """Upper confidence bound: mu + kappa * sigma, elementwise."""
    return pred.mu + kappa * pred.sigma


def _score_pool(
    forest: Forest, space: ParamSpace, kappa: float,
    cfg: SelectorConfig, rng: np.random.Generator,
) -> tuple[list[Config], np.ndarray]:
    pool = space.sample(cfg.n_candidates, rng)
    scores = ucb(forest.predict(space.encode_many(pool)), kappa)
    return pool, scores

def select_argmax(
    forest: Forest, space: ParamSpace, kappa: float,
    cfg: SelectorConfig, rng: np.random.Generator,
) -> Config:
    """Top UCB scorer from a fresh uniform candidate pool.

    Ties resolve to the lowest pool index.
    """
    pool, scores = _score_pool(forest, space, kappa, cfg, rng)
    return pool[int(np.argmax(scores))]


def select_boltzmann(
    forest: Forest, space: ParamSpace, kappa: float,
    cfg: SelectorConfig, step: int, rng: np.random.Generator,
) -> Config:
    """Sample a candidate from a softmax over UCB scores.

    Probabilities are exp((s - max s) / T(step)) normalized; subtracting
    the maximum keeps the exponentials in [0, 1] at any score scale.
    """
    pool, scores = _score_pool(forest, space, kappa, cfg, rng)
    t = cfg.temperature(step)
    if t <= 0:
        raise ValueError("temperature must be positive")
    w = np.exp((scores - scores.max()) / t)
    return pool[int(rng.choice(len(pool), p=w / w.sum()))]


def constant_liar_batch(
    forest: Forest, space: ParamSpace, kappa: float,
    cfg: SelectorConfig, q: int, lie: float,
    features: tuple[np.ndarray, np.ndarray], rng: np.random.Generator,
    params: ForestParams | None = None,
    on_refit: Callable[[int], None] | None = None,
) -> list[Config]:
    """Select q points sequentially, faking each selection's outcome.

    After each of the first q-1 selections the chosen point is appended
    to the training set with the ``lie`` objective (callers pass the best
    objective seen so far, which for maximization discourages revisiting)
    and the surrogate is refit, for exactly q-1 refits in total.
    ``on_refit`` receives the refit training size, for instrumentation.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    X, y = features
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if params is None:
        params = forest.params
    chosen: list[Config] = []
    for i in range(q):
        pick = select_argmax(forest, space, kappa, cfg, rng)
        chosen.append(pick)
        if i < q - 1:
            X = np.vstack([X, space.encode(pick)])
            y = np.append(y, lie)
            forest = fit(X, y, params, rng)
            if on_refit is not None:
                on_refit(len(y))
    return chosen
