"""Evaluation history: deduplicated record store with quantile undersampling.

Records are keyed by (worker_id, seq), so replaying a message a worker has
already seen is a no-op and merging histories is order-independent.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class EvalRecord:
    """One completed black-box evaluation."""

    worker_id: int
    seq: int
    config: tuple
    objective: float
    t_start: float
    t_end: float

    @property
    def key(self) -> tuple[int, int]:
        return (self.worker_id, self.seq)


class History:
    """Append-only evaluation store shared (by value) between peers."""

    def __init__(self, records: Iterable[EvalRecord] = ()):
        self._records: list[EvalRecord] = []
        self._keys: set[tuple[int, int]] = set()
        for r in records:
            self.push(r)

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __contains__(self, record: EvalRecord) -> bool:
        return record.key in self._keys

    @property
    def records(self) -> tuple[EvalRecord, ...]:
        return tuple(self._records)

    def push(self, record: EvalRecord) -> bool:
        """Add a record; duplicates of an already-seen key are dropped.

        Returns True when the record was new.
        """
        if record.key in self._keys:
            return False
        self._keys.add(record.key)
        self._records.append(record)
        return True

    def merge(self, other: "History") -> int:
        """Push every record of ``other``; returns the number newly added."""
        return sum(self.push(r) for r in other)

    def best(self) -> EvalRecord:
        """Record with the highest objective.

        Ties break toward the earliest t_end, then the lowest worker_id.
        """
        if not self._records:
            raise ValueError("history is empty")
        return max(
            self._records,
            key=lambda r: (r.objective, -r.t_end, -r.worker_id),
        )

    def undersample(
        self, n_max: int, rng: np.random.Generator
    ) -> list[EvalRecord]:
        """Bound the training set by equal draws from objective-quantile bins.

        With at most ``n_max`` records the full history is returned.
        Otherwise objectives are cut at their 20/40/60/80th percentiles
        (nearest-rank) and ``n_max // 5`` records are drawn with
        replacement from each non-empty bin, so every record keeps a
        positive selection probability and the result never exceeds
        ``n_max``. Bin edges are inclusive on both sides; with heavily
        tied objectives several bins collapse onto the same records
        rather than going empty.
        """
        if n_max < 5:
            raise ValueError("n_max must be at least 5")
        if len(self._records) <= n_max:
            return list(self._records)
        obj = np.array([r.objective for r in self._records])
        order = np.argsort(obj, kind="stable")
        srt = obj[order]
        n = len(srt)
        cuts = [srt[int(np.ceil(p / 100 * n)) - 1] for p in (20, 40, 60, 80)]
        edges = [srt[0], *cuts, srt[-1]]
        quota = n_max // 5
        picked: list[EvalRecord] = []
        for b in range(5):
            lo, hi = edges[b], edges[b + 1]
            members = np.flatnonzero((obj >= lo) & (obj <= hi))
            if members.size == 0:
                continue
            take = rng.integers(0, members.size, size=quota)
            picked.extend(self._records[members[t]] for t in take)
        return picked

    def as_arrays(
        self, space, records: Sequence[EvalRecord] | None = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Encode records (default: all) into (X, y) training arrays."""
        recs = self._records if records is None else records
        X = space.encode_many([r.config for r in recs])
        y = np.array([r.objective for r in recs])
        return X, y

    def dump_csv(
        self, path: str | Path, dim_names: Sequence[str] | None = None
    ) -> None:
        """Write records as CSV: worker_id, seq, t_start, t_end, objective,
        then one column per dimension."""
        if dim_names is None:
            width = len(self._records[0].config) if self._records else 0
            dim_names = [f"x{i}" for i in range(width)]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["worker_id", "seq", "t_start", "t_end", "objective",
                        *dim_names])
            for r in self._records:
                w.writerow([r.worker_id, r.seq, repr(r.t_start),
                            repr(r.t_end), repr(r.objective),
                            *[v if isinstance(v, str) else repr(v)
                              for v in r.config]])
