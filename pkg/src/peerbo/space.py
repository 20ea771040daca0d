"""Search-space definition: typed dimensions, sampling, and feature encoding.

A space is an ordered list of dimensions. Configurations are plain tuples
aligned with that order; ``encode`` maps them to float feature vectors
(categoricals become ordinal indices) and ``decode`` inverts the mapping.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np

Kind = Literal["continuous", "integer", "categorical"]
Prior = Literal["uniform", "log-uniform"]

_REJECTION_CAP = 10_000


@dataclass(frozen=True)
class Dimension:
    """One coordinate of the search space.

    Continuous and integer dimensions carry inclusive bounds and a prior;
    categorical dimensions carry an ordered tuple of categories and are
    always sampled uniformly.
    """

    name: str
    kind: Kind = "continuous"
    low: float | None = None
    high: float | None = None
    categories: tuple | None = None
    prior: Prior = "uniform"

    def __post_init__(self):
        if self.kind in ("continuous", "integer"):
            if self.low is None or self.high is None:
                raise ValueError(f"dimension {self.name!r}: bounds required")
            if not self.low < self.high:
                raise ValueError(
                    f"dimension {self.name!r}: low must be < high, "
                    f"got [{self.low}, {self.high}]"
                )
            if self.prior == "log-uniform" and self.low <= 0:
                raise ValueError(
                    f"dimension {self.name!r}: log-uniform needs low > 0"
                )
            if self.kind == "integer":
                if int(self.low) != self.low or int(self.high) != self.high:
                    raise ValueError(
                        f"dimension {self.name!r}: integer bounds must be whole"
                    )
        elif self.kind == "categorical":
            if self.categories is None or len(self.categories) < 2:
                raise ValueError(
                    f"dimension {self.name!r}: need at least 2 categories"
                )
            if len(set(self.categories)) != len(self.categories):
                raise ValueError(
                    f"dimension {self.name!r}: categories must be distinct"
                )
            object.__setattr__(self, "categories", tuple(self.categories))
        else:
            raise ValueError(f"unknown dimension kind {self.kind!r}")

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n raw values from this dimension's prior."""
        if self.kind == "categorical":
            idx = rng.integers(0, len(self.categories), size=n)
            return np.array([self.categories[i] for i in idx], dtype=object)
        if self.prior == "log-uniform":
            vals = np.exp(rng.uniform(np.log(self.low), np.log(self.high), n))
        else:
            vals = rng.uniform(self.low, self.high, n)
        if self.kind == "integer":
            return np.clip(np.rint(vals), self.low, self.high).astype(np.int64)
        return vals

    def to_feature(self, value) -> float:
        if self.kind == "categorical":
            return float(self.categories.index(value))
        return float(value)

    def from_feature(self, feat: float):
        if self.kind == "categorical":
            idx = int(round(feat))
            if not 0 <= idx < len(self.categories):
                raise ValueError(
                    f"dimension {self.name!r}: feature {feat} out of range"
                )
            return self.categories[idx]
        if self.kind == "integer":
            return int(np.clip(round(feat), self.low, self.high))
        return float(feat)


Config = tuple
"""A configuration: one value per dimension, in space order."""


@dataclass(frozen=True)
class ParamSpace:
    """Ordered collection of dimensions plus an optional feasibility predicate.

    When ``constraint`` is given, ``sample`` rejection-samples until it
    returns true (bounded retries).
    """

    dimensions: tuple[Dimension, ...]
    constraint: Callable[[Config], bool] | None = field(
        default=None, compare=False
    )

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        names = [d.name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise ValueError("dimension names must be unique")
        if not self.dimensions:
            raise ValueError("a space needs at least one dimension")

    @property
    def n_dims(self) -> int:
        return len(self.dimensions)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dimensions)

    def sample(self, n: int, rng: np.random.Generator) -> list[Config]:
        """Draw n feasible configurations."""
        out: list[Config] = []
        tries = 0
        while len(out) < n:
            want = n - len(out)
            cols = [d.sample(want, rng) for d in self.dimensions]
            for row in zip(*cols):
                cfg = tuple(v.item() if isinstance(v, np.generic) else v
                            for v in row)
                if self.constraint is None or self.constraint(cfg):
                    out.append(cfg)
            tries += want
            if tries >= _REJECTION_CAP and not out:
                raise RuntimeError(
                    f"no feasible sample in {_REJECTION_CAP} draws"
                )
            if tries >= _REJECTION_CAP * 10:
                raise RuntimeError("constraint rejection cap exceeded")
        return out

    def encode(self, config: Config) -> np.ndarray:
        """Map a configuration to a float feature vector (ordinal categories)."""
        if len(config) != self.n_dims:
            raise ValueError(
                f"config has {len(config)} values, space has {self.n_dims}"
            )
        return np.array(
            [d.to_feature(v) for d, v in zip(self.dimensions, config)]
        )

    def encode_many(self, configs: Sequence[Config]) -> np.ndarray:
        return np.array([self.encode(c) for c in configs]).reshape(
            len(configs), self.n_dims
        )

    def decode(self, features: np.ndarray) -> Config:
        """Invert ``encode``: feature vector back to a configuration."""
        if len(features) != self.n_dims:
            raise ValueError(
                f"vector has {len(features)} entries, space has {self.n_dims}"
            )
        return tuple(
            d.from_feature(f) for d, f in zip(self.dimensions, features)
        )

    @classmethod
    def from_dicts(cls, specs: Sequence[dict]) -> "ParamSpace":
        dims = []
        for i, raw in enumerate(specs):
            spec = dict(raw)
            name = spec.pop("name", f"x{i}")
            kind = spec.pop("kind", "continuous")
            if "categories" in spec and spec["categories"] is not None:
                spec["categories"] = tuple(spec["categories"])
            dims.append(Dimension(name=name, kind=kind, **spec))
        return cls(tuple(dims))

    @classmethod
    def from_file(cls, path: str | Path) -> "ParamSpace":
        """Load a space from a JSON file holding a list of dimension specs."""
        with open(path) as fh:
            specs = json.load(fh)
        if not isinstance(specs, list):
            raise ValueError(f"{path}: expected a JSON list of dimensions")
        return cls.from_dicts(specs)


def uniform_space(low: float, high: float, dim: int) -> ParamSpace:
    """Convenience: a dim-dimensional box with identical continuous bounds."""
    return ParamSpace(
        tuple(Dimension(f"x{i}", "continuous", low, high) for i in range(dim))
    )
