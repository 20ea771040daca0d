"""Peer-to-peer result exchange: non-blocking sends, polling receives.

Every worker owns one unbounded FIFO inbox per peer, so per-sender order
is preserved end to end. ``send_all`` enqueues to every peer and returns
once the local enqueues are done; it never waits on receivers.
``recv_any`` makes polling passes over the peer inboxes, taking at most
one message per peer per pass, and repeats until a full pass finds
nothing: it never blocks, so a stalled peer costs nothing beyond its
silence. The synchronous variant, ``barrier_exchange``, is what the
barrier-synchronized baseline uses: everyone deposits one message and
blocks until the round's last arrival, then each receives the others'.

Two fabrics implement the same contract: ``SimFabric`` carries
timestamped messages inside the discrete-event kernel (a message sent at
t is visible to polls at deliver-time t + latency), while ``RtFabric``
uses locks and real threads for wall-clock runs.
"""
from __future__ import annotations

import csv
import threading
import time as _time
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .history import EvalRecord, History

EVENT_KINDS = ("ask", "eval_start", "eval_end", "send", "recv",
               "fit_start", "fit_end", "barrier_wait")


class TransportError(RuntimeError):
    pass


@dataclass(frozen=True)
class Message:
    sender: int
    record: EvalRecord


class EventLog:
    """Append-only run journal; rows are (time, worker, event, payload_size).

    Payload size means: records carried for send/recv/barrier_wait, the
    training-set size for fit events, zero otherwise.
    """

    def __init__(self):
        self.rows: list[tuple[float, int, str, int]] = []
        self._lock = threading.Lock()

    def append(self, time: float, worker: int, kind: str,
               payload: int = 0) -> None:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        with self._lock:
            self.rows.append((time, worker, kind, payload))

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time", "worker", "event", "payload_size"])
            for t, worker, kind, payload in self.rows:
                w.writerow([repr(float(t)), worker, kind, payload])


class _EndpointBase:
    """Shared bookkeeping for both fabrics; ranks run 1..size."""

    def __init__(self, fabric, rank: int):
        self.fabric = fabric
        self.rank = rank
        self.closed = False

    @property
    def size(self) -> int:
        return self.fabric.size

    @property
    def peers(self) -> tuple[int, ...]:
        return tuple(r for r in range(1, self.size + 1) if r != self.rank)

    def close(self) -> None:
        self.closed = True
        self.fabric.on_close(self.rank)

    def _check_open(self) -> None:
        if self.closed:
            raise TransportError(f"endpoint {self.rank} is closed")


class SimFabric:
    """In-kernel fabric: inboxes hold (deliver_time, message) pairs."""

    def __init__(self, size: int, latency: float = 0.0):
        if size < 1:
            raise ValueError("size must be at least 1")
        if latency < 0:
            raise ValueError("latency must be non-negative")
        self.size = size
        self.latency = latency
        self._open = set(range(1, size + 1))
        # inboxes[receiver][sender] -> FIFO of (deliver_time, Message)
        self.inboxes = {
            r: {s: deque() for s in range(1, size + 1) if s != r}
            for r in range(1, size + 1)
        }

    def endpoint(self, rank: int) -> "SimEndpoint":
        if rank not in self.inboxes:
            raise ValueError(f"rank {rank} outside 1..{self.size}")
        return SimEndpoint(self, rank)

    def on_close(self, rank: int) -> None:
        self._open.discard(rank)

    def is_open(self, rank: int) -> bool:
        return rank in self._open


class SimEndpoint(_EndpointBase):
    def send_all(self, record: EvalRecord, now: float) -> int:
        """Enqueue to every open peer; returns the number of enqueues."""
        self._check_open()
        sent = 0
        for peer in self.peers:
            if not self.fabric.is_open(peer):
                continue  # dead receiver: message dropped, sender unaffected
            self.fabric.inboxes[peer][self.rank].append(
                (now + self.fabric.latency, Message(self.rank, record))
            )
            sent += 1
        return sent

    def recv_any(self, history: History, now: float) -> int:
        """Drain deliverable messages into ``history``; never blocks.

        Polling passes take one message per peer per pass and repeat
        while any pass received something. Returns messages consumed.
        """
        self._check_open()
        if self.size <= 1:
            return 0
        consumed = 0
        inbox = self.fabric.inboxes[self.rank]
        while True:
            any_pass = False
            for sender in self.peers:
                q = inbox[sender]
                if q and q[0][0] <= now:
                    _, msg = q.popleft()
                    history.push(msg.record)
                    consumed += 1
                    any_pass = True
            if not any_pass:
                return consumed


class CondBarrier:
    """Dynamic-membership barrier with payload exchange (threaded runs)."""

    def __init__(self):
        self._cond = threading.Condition()
        self._live: set[int] = set()
        self._arrived: dict[int, Any] = {}
        self._generation = 0
        self._released: dict[int, dict[int, Any]] = {}

    def register(self, rank: int) -> None:
        with self._cond:
            self._live.add(rank)

    def leave(self, rank: int) -> None:
        with self._cond:
            self._live.discard(rank)
            if self._arrived and set(self._arrived) == self._live:
                self._release_locked()

    def arrive(self, rank: int, payload: Any,
               timeout: float | None = None) -> list[Any]:
        with self._cond:
            if rank not in self._live:
                raise TransportError(f"rank {rank} is not a barrier member")
            gen = self._generation
            self._arrived[rank] = payload
            if set(self._arrived) == self._live:
                self._release_locked()
            else:
                if not self._cond.wait_for(
                    lambda: self._generation > gen, timeout
                ):
                    raise TransportError("barrier timed out")
            payloads = self._released[gen]
            return [payloads[r] for r in sorted(payloads) if r != rank]

    def _release_locked(self) -> None:
        self._released[self._generation] = dict(self._arrived)
        self._arrived.clear()
        self._generation += 1
        self._cond.notify_all()


class RtFabric:
    """Thread-safe fabric for the real-time runner."""

    def __init__(self, size: int, time_scale: float = 1.0):
        if size < 1:
            raise ValueError("size must be at least 1")
        if time_scale <= 0:
            raise ValueError("time_scale must be positive")
        self.size = size
        self.time_scale = time_scale
        self._lock = threading.Lock()
        self._open = set(range(1, size + 1))
        self.inboxes = {
            r: {s: deque() for s in range(1, size + 1) if s != r}
            for r in range(1, size + 1)
        }
        self.barrier = CondBarrier()
        self._t0 = _time.monotonic()

    def now(self) -> float:
        """Current run time in simulated units (real elapsed / scale)."""
        return (_time.monotonic() - self._t0) / self.time_scale

    def sleep(self, duration: float) -> float:
        _time.sleep(max(0.0, duration) * self.time_scale)
        return self.now()

    def endpoint(self, rank: int) -> "RtEndpoint":
        if rank not in self.inboxes:
            raise ValueError(f"rank {rank} outside 1..{self.size}")
        self.barrier.register(rank)
        return RtEndpoint(self, rank)

    def on_close(self, rank: int) -> None:
        with self._lock:
            self._open.discard(rank)
        self.barrier.leave(rank)

    def is_open(self, rank: int) -> bool:
        with self._lock:
            return rank in self._open


class RtEndpoint(_EndpointBase):
    def send_all(self, record: EvalRecord, now: float | None = None) -> int:
        self._check_open()
        if now is None:
            now = self.fabric.now()
        sent = 0
        for peer in self.peers:
            if not self.fabric.is_open(peer):
                continue
            self.fabric.inboxes[peer][self.rank].append(
                (now, Message(self.rank, record))
            )
            sent += 1
        return sent

    def recv_any(self, history: History, now: float | None = None) -> int:
        self._check_open()
        if self.size <= 1:
            return 0
        consumed = 0
        inbox = self.fabric.inboxes[self.rank]
        while True:
            any_pass = False
            for sender in self.peers:
                q = inbox[sender]
                try:
                    _, msg = q.popleft()
                except IndexError:
                    continue
                history.push(msg.record)
                consumed += 1
                any_pass = True
            if not any_pass:
                return consumed

    def barrier_exchange(self, message: Message,
                         timeout: float | None = None) -> list[Message]:
        """Deposit one message, block for the round, get the others'."""
        self._check_open()
        return self.fabric.barrier.arrive(self.rank, message, timeout)
