import pytest

from peerbo.des import Delay, Get, Join, Put, SimKernel


class TestDelay:
    def test_clock_advances_per_process(self):
        log = []

        def proc(name, step):
            now = 0.0
            for _ in range(3):
                _, now = yield Delay(step)
                log.append((name, now))

        kernel = SimKernel()
        kernel.spawn(proc("a", 1.0))
        kernel.spawn(proc("b", 0.5))
        kernel.run()
        assert log == [("b", 0.5), ("a", 1.0), ("b", 1.0), ("b", 1.5),
                       ("a", 2.0), ("a", 3.0)]

    def test_ties_resolve_in_spawn_order(self):
        log = []

        def proc(name):
            _, now = yield Delay(1.0)
            log.append(name)

        kernel = SimKernel()
        for name in ("first", "second", "third"):
            kernel.spawn(proc(name))
        kernel.run()
        assert log == ["first", "second", "third"]

    def test_negative_delay_rejected(self):
        def proc():
            yield Delay(-0.5)

        kernel = SimKernel()
        kernel.spawn(proc())
        with pytest.raises(ValueError):
            kernel.run()


class TestStores:
    def test_put_then_get(self):
        def producer(store):
            for i in range(3):
                _, _ = yield Delay(1.0)
                _, _ = yield Put(store, i)

        def consumer(store):
            got = []
            for _ in range(3):
                item, now = yield Get(store)
                got.append((item, now))
            return got

        kernel = SimKernel()
        store = kernel.store()
        kernel.spawn(producer(store))
        pid = kernel.spawn(consumer(store))
        kernel.run()
        assert kernel.result(pid) == [(0, 1.0), (1, 2.0), (2, 3.0)]

    def test_get_parks_until_item_arrives(self):
        def eager(store):
            item, now = yield Get(store)
            return (item, now)

        def late(store):
            _, _ = yield Delay(5.0)
            yield Put(store, "ready")

        kernel = SimKernel()
        store = kernel.store()
        pid = kernel.spawn(eager(store))
        kernel.spawn(late(store))
        kernel.run()
        assert kernel.result(pid) == ("ready", 5.0)

    def test_fifo_order_preserved(self):
        def producer(store):
            for i in range(5):
                yield Put(store, i)

        def consumer(store):
            got = []
            for _ in range(5):
                item, _ = yield Get(store)
                got.append(item)
            return got

        kernel = SimKernel()
        store = kernel.store()
        kernel.spawn(producer(store))
        pid = kernel.spawn(consumer(store))
        kernel.run()
        assert kernel.result(pid) == [0, 1, 2, 3, 4]

    def test_deadlock_detected(self):
        def starved(store):
            yield Get(store)

        kernel = SimKernel()
        kernel.spawn(starved(kernel.store()))
        with pytest.raises(RuntimeError, match="deadlock"):
            kernel.run()

    def test_result_before_finish_raises(self):
        def proc():
            yield Delay(1.0)

        kernel = SimKernel()
        pid = kernel.spawn(proc())
        with pytest.raises(RuntimeError):
            kernel.result(pid)


class TestBarrier:
    def test_round_releases_at_last_arrival(self):
        def member(bar, delay, name):
            _, _ = yield Delay(delay)
            others, now = yield Join(bar, name)
            return (now, others)

        kernel = SimKernel()
        bar = kernel.barrier()
        pids = [kernel.spawn(member(bar, d, n))
                for d, n in ((1.0, "a"), (3.0, "b"), (2.0, "c"))]
        for pid in pids:
            bar.register(pid)
        kernel.run()
        for pid, others in ((pids[0], ["b", "c"]), (pids[1], ["a", "c"]),
                            (pids[2], ["a", "b"])):
            now, got = kernel.result(pid)
            assert now == 3.0
            assert got == others

    def test_member_exit_releases_waiters(self):
        # One member runs a single round and leaves; the remaining two
        # must still complete their second round.
        def short(bar):
            others, _ = yield Join(bar, "s")
            return others

        def long(bar, name):
            rounds = []
            for _ in range(2):
                others, _ = yield Join(bar, name)
                rounds.append(others)
                _, _ = yield Delay(1.0)
            return rounds

        kernel = SimKernel()
        bar = kernel.barrier()
        p_short = kernel.spawn(short(bar))
        p_a = kernel.spawn(long(bar, "a"))
        p_b = kernel.spawn(long(bar, "b"))
        for pid in (p_short, p_a, p_b):
            bar.register(pid)
        kernel.run()
        assert kernel.result(p_short) == ["a", "b"]
        assert kernel.result(p_a) == [["s", "b"], ["b"]]
        assert kernel.result(p_b) == [["s", "a"], ["a"]]

    def test_unregistered_join_rejected(self):
        def rogue(bar):
            yield Join(bar, None)

        kernel = SimKernel()
        bar = kernel.barrier()
        kernel.spawn(rogue(bar))
        with pytest.raises(RuntimeError):
            kernel.run()


class TestDeterminism:
    def test_identical_programs_trace_identically(self):
        def build(log):
            def worker(store, wid):
                now = 0.0
                for i in range(4):
                    _, now = yield Delay(0.5 + 0.1 * wid)
                    _, now = yield Put(store, (wid, i))
                    log.append((wid, i, now))

            def sink(store):
                for _ in range(8):
                    item, now = yield Get(store)
                    log.append(("sink", item, now))

            kernel = SimKernel()
            store = kernel.store()
            kernel.spawn(worker(store, 1))
            kernel.spawn(worker(store, 2))
            kernel.spawn(sink(store))
            kernel.run()
            return log

        assert build([]) == build([])
