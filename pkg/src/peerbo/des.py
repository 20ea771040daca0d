"""Deterministic discrete-event kernel driving generator-style processes.

A process is a generator that yields requests and receives
``(payload, now)`` tuples back. Requests:

- ``Delay(duration, kind)``: advance this process's clock; payload None.
- ``Put(store, item)``: non-blocking enqueue, waking at most one parked
  getter; resumes immediately, payload None.
- ``Get(store)``: dequeue, parking while the store is empty; payload is
  the item.
- ``Join(barrier, payload)``: park until every live member arrived, then
  all resume at the release time; payload is the list of the other
  members' payloads in member order.

Ordering is a strict (time, insertion counter) priority queue, so ties
resolve by scheduling order and a given program always interleaves its
processes identically. The same request objects are interpreted by the
thread-based real-time driver in :mod:`peerbo.transport`.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Any, Generator


@dataclass(frozen=True)
class Delay:
    duration: float
    kind: str = "delay"


@dataclass(frozen=True)
class Put:
    store: Any
    item: Any


@dataclass(frozen=True)
class Get:
    store: Any


@dataclass(frozen=True)
class Join:
    barrier: Any
    payload: Any = None


class SimStore:
    """Unbounded FIFO connecting processes (task boxes, result queues)."""

    def __init__(self):
        self.items: list[Any] = []
        self.waiters: list[int] = []


class SimBarrier:
    """All-to-all rendezvous with dynamic membership.

    Members that terminate deregister (see ``SimKernel._on_exit``); a
    round releases once every still-live member has arrived, so a peer
    that already finished cannot strand the rest.
    """

    def __init__(self):
        self.live: set[int] = set()
        self.arrived: dict[int, Any] = {}

    def register(self, pid: int) -> None:
        self.live.add(pid)

    def ready(self) -> bool:
        return bool(self.arrived) and set(self.arrived) == self.live


@dataclass
class _Proc:
    gen: Generator
    pid: int
    done: bool = False
    result: Any = None


@dataclass(order=True)
class _Event:
    time: float
    seq: int
    pid: int = field(compare=False)
    payload: Any = field(compare=False, default=None)
    start: bool = field(compare=False, default=False)


class SimKernel:
    """Single-threaded deterministic scheduler."""

    def __init__(self):
        self.now: float = 0.0
        self._heap: list[_Event] = []
        self._seq = 0
        self._procs: list[_Proc] = []
        self._barriers: list[SimBarrier] = []

    def spawn(self, gen: Generator) -> int:
        pid = len(self._procs)
        self._procs.append(_Proc(gen=gen, pid=pid))
        self._schedule(0.0, pid, None, start=True)
        return pid

    def store(self) -> SimStore:
        return SimStore()

    def barrier(self) -> SimBarrier:
        bar = SimBarrier()
        self._barriers.append(bar)
        return bar

    def result(self, pid: int) -> Any:
        proc = self._procs[pid]
        if not proc.done:
            raise RuntimeError(f"process {pid} has not finished")
        return proc.result

    def run(self) -> None:
        """Drain every event; every spawned process must run to return."""
        while self._heap:
            ev = heapq.heappop(self._heap)
            self.now = ev.time
            self._advance(ev.pid, ev.payload, ev.start)
        stuck = [p.pid for p in self._procs if not p.done]
        if stuck:
            raise RuntimeError(f"deadlock: processes {stuck} never finished")

    def _schedule(self, time: float, pid: int, payload: Any,
                  start: bool = False) -> None:
        self._seq += 1
        heapq.heappush(self._heap, _Event(time, self._seq, pid, payload,
                                          start))

    def _advance(self, pid: int, payload: Any, start: bool = False) -> None:
        proc = self._procs[pid]
        try:
            req = (next(proc.gen) if start
                   else proc.gen.send((payload, self.now)))
            while True:
                if isinstance(req, Delay):
                    if req.duration < 0:
                        raise ValueError("negative delay")
                    self._schedule(self.now + req.duration, pid, None)
                    return
                if isinstance(req, Put):
                    store = req.store
                    if store.waiters:
                        self._schedule(self.now, store.waiters.pop(0),
                                       req.item)
                    else:
                        store.items.append(req.item)
                    req = proc.gen.send((None, self.now))
                    continue
                if isinstance(req, Get):
                    store = req.store
                    if store.items:
                        req = proc.gen.send((store.items.pop(0), self.now))
                        continue
                    store.waiters.append(pid)
                    return
                if isinstance(req, Join):
                    bar = req.barrier
                    if pid not in bar.live:
                        raise RuntimeError(
                            f"process {pid} joined a barrier it left"
                        )
                    bar.arrived[pid] = req.payload
                    if bar.ready():
                        self._release(bar)
                    return
                raise TypeError(f"unknown request {req!r}")
        except StopIteration as stop:
            proc.done = True
            proc.result = stop.value
            self._on_exit(pid)

    def _release(self, bar: SimBarrier) -> None:
        members = sorted(bar.arrived)
        payloads = dict(bar.arrived)
        bar.arrived.clear()
        for p in members:
            others = [payloads[q] for q in members if q != p]
            self._schedule(self.now, p, others)

    def _on_exit(self, pid: int) -> None:
        for bar in self._barriers:
            if pid in bar.live:
                bar.live.discard(pid)
                if bar.ready():
                    self._release(bar)
