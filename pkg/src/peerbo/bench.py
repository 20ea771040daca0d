"""Synthetic minimization benchmarks and the evaluation-runtime emulator.

Formulas and domains follow the classic continuous-optimization test-set
catalog. All functions are minimized; optimizers that maximize internally
should negate values. ``evaluate`` takes a 1-D coordinate array.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .space import ParamSpace, uniform_space


@dataclass(frozen=True)
class Benchmark:
    name: str
    dim: int
    low: float
    high: float
    evaluate: Callable[[np.ndarray], float]
    f_min: float
    x_min: tuple[float, ...]

    def space(self) -> ParamSpace:
        return uniform_space(self.low, self.high, self.dim)

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        return np.apply_along_axis(self.evaluate, 1, np.atleast_2d(X))


def _ackley(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    d = x.size
    s1 = np.sqrt(np.sum(x * x) / d)
    s2 = np.sum(np.cos(2.0 * np.pi * x)) / d
    return float(-20.0 * np.exp(-0.2 * s1) - np.exp(s2) + 20.0 + np.e)


def _griewank(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    i = np.arange(1, x.size + 1)
    return float(np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i)))
                 + 1.0)


def _levy(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    w = 1.0 + (x - 1.0) / 4.0
    head = np.sin(np.pi * w[0]) ** 2
    tail = (w[-1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[-1]) ** 2)
    mid = np.sum(
        (w[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[:-1] + 1.0) ** 2)
    )
    return float(head + mid + tail)


def _schwefel(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(418.9829 * x.size - np.sum(x * np.sin(np.sqrt(np.abs(x)))))


_H6_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_H6_A = np.array([
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
])
_H6_P = 1e-4 * np.array([
    [1312.0, 1696.0, 5569.0, 124.0, 8283.0, 5886.0],
    [2329.0, 4135.0, 8307.0, 3736.0, 1004.0, 9991.0],
    [2348.0, 1451.0, 3522.0, 2883.0, 3047.0, 6650.0],
    [4047.0, 8828.0, 8732.0, 5743.0, 1091.0, 381.0],
])


def _hartmann6(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    inner = np.sum(_H6_A * (x - _H6_P) ** 2, axis=1)
    return float(-np.sum(_H6_ALPHA * np.exp(-inner)))


_CATALOG: dict[str, tuple] = {
    # name: (fn, low, high, f_min, per-dim optimizer coordinate)
    "ackley": (_ackley, -32.768, 32.768, 0.0, 0.0),
    "griewank": (_griewank, -600.0, 600.0, 0.0, 0.0),
    "levy": (_levy, -10.0, 10.0, 0.0, 1.0),
    "schwefel": (_schwefel, -500.0, 500.0, 0.0, 420.9687),
}

_HARTMANN6_X = (0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573)
_HARTMANN6_F = -3.32237

BENCHMARK_NAMES = (*_CATALOG.keys(), "hartmann6d")


def make_benchmark(name: str, dim: int = 5) -> Benchmark:
    """Build a benchmark by catalog name; hartmann6d is fixed at dim 6."""
    if name == "hartmann6d":
        if dim not in (6,):
            raise ValueError("hartmann6d is defined for dim=6 only")
        return Benchmark("hartmann6d", 6, 0.0, 1.0, _hartmann6,
                         _HARTMANN6_F, _HARTMANN6_X)
    if name not in _CATALOG:
        raise ValueError(
            f"unknown benchmark {name!r}; choose from {BENCHMARK_NAMES}"
        )
    if dim < 1:
        raise ValueError("dim must be positive")
    fn, low, high, f_min, coord = _CATALOG[name]
    return Benchmark(name, dim, low, high, fn, f_min, (coord,) * dim)


@dataclass(frozen=True)
class RuntimeEmulator:
    """Evaluation durations: a floored normal, N(mean, sd) clipped below.

    The default mirrors a minute-scale training job with heavy spread.
    """

    mean: float = 60.0
    sd: float = 20.0
    floor: float = 1.0

    def __post_init__(self):
        if self.floor <= 0:
            raise ValueError("floor must be positive")
        if self.sd < 0:
            raise ValueError("sd must be non-negative")

    def draw_duration(self, rng: np.random.Generator) -> float:
        return max(self.floor, float(rng.normal(self.mean, self.sd)))
