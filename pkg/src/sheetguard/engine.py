"""Live mode: debounced background inspection with monotonic reports.

Edits restart a trailing debounce window; when it elapses the engine
snapshots the document and runs one inspection cycle.  At most one
cycle is tracked in flight; an edit landing mid-cycle schedules a
follow-up right after completion.  Publication is guarded: a report
whose generation is not strictly newer than the last published one is
discarded, so stale cycles (for example one abandoned by a disable/
enable bounce) can never roll the published state back.

Timing is injected.  ``WallClock`` + ``ThreadWorker`` run the real
thing; ``FakeClock`` + ``SimulatedWorker`` replay the same logic
deterministically inside tests.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import threading
import time
from typing import Callable, Iterable, Protocol

from .findings import InspectionReport, apply_flags, diff_reports
from .grid import EditReceipt, FrozenWorkbook
from .inspections import StaticRuleConfig
from .scenarios import run_all

logger = logging.getLogger(__name__)

DEFAULT_DEBOUNCE = 0.3


def run_cycle(
    snapshot: FrozenWorkbook,
    config: StaticRuleConfig | None = None,
    prev_report: InspectionReport | None = None,
) -> InspectionReport:
    """One full inspection: all rules, flag filtering, report diffing."""
    raw = run_all(snapshot, config)
    visible, suppressed = apply_flags(raw, snapshot.guardian.flags, snapshot.generation)
    return diff_reports(prev_report, visible, suppressed, snapshot.generation)


class Clock(Protocol):
    def now(self) -> float: ...

    def call_at(self, when: float, fn: Callable[[], None]): ...

    def cancel(self, handle) -> None: ...


class WallClock:
    def now(self) -> float:
        return time.monotonic()

    def call_at(self, when: float, fn: Callable[[], None]):
        timer = threading.Timer(max(0.0, when - self.now()), fn)
        timer.daemon = True
        timer.start()
        return timer

    def cancel(self, handle) -> None:
        handle.cancel()


class FakeClock:
    """Deterministic event-queue clock for tests; single-threaded."""

    def __init__(self):
        self._now = 0.0
        self._seq = itertools.count()
        self._events: list[tuple[float, int, Callable[[], None]]] = []
        self._cancelled: set[int] = set()

    def now(self) -> float:
        return self._now

    def call_at(self, when: float, fn: Callable[[], None]):
        seq = next(self._seq)
        heapq.heappush(self._events, (max(when, self._now), seq, fn))
        return seq

    def cancel(self, handle) -> None:
        self._cancelled.add(handle)

    def advance(self, dt: float) -> None:
        """Run every event due within the next ``dt`` simulated seconds."""
        deadline = self._now + dt
        while self._events and self._events[0][0] <= deadline:
            when, seq, fn = heapq.heappop(self._events)
            if seq in self._cancelled:
                self._cancelled.discard(seq)
                continue
            self._now = when
            fn()
        self._now = deadline

    def run_until_idle(self, limit: float = 3600.0) -> None:
        self.advance(limit)


class Worker(Protocol):
    def submit(self, job: Callable[[], InspectionReport],
               on_done: Callable[[InspectionReport], None]) -> None: ...


class ThreadWorker:
    """Runs each cycle on its own daemon thread."""

    def submit(self, job, on_done):
        def body():
            on_done(job())

        threading.Thread(target=body, daemon=True).start()


class SimulatedWorker:
    """Computes the report immediately (snapshots are frozen, so timing
    cannot change the result) but delivers it after an injected delay on
    the fake clock, reproducing slow-inspection races deterministically."""

    def __init__(self, clock: FakeClock, delays: Iterable[float] = ()):  # delays cycle
        self.clock = clock
        self._delays = list(delays) or [0.05]
        self._i = 0

    def submit(self, job, on_done):
        report = job()
        delay = self._delays[self._i % len(self._delays)]
        self._i += 1
        self.clock.call_at(self.clock.now() + delay, lambda: on_done(report))


class GuardianEngine:
    """Schedules inspection cycles for one document session."""

    def __init__(
        self,
        session,
        clock: Clock | None = None,
        worker: Worker | None = None,
        debounce: float = DEFAULT_DEBOUNCE,
        config: StaticRuleConfig | None = None,
    ):
        self.session = session
        self.clock = clock or WallClock()
        self.worker = worker or ThreadWorker()
        self.debounce = debounce
        self.config = config or StaticRuleConfig()
        self.enabled = True

        self._lock = threading.RLock()
        self._report_ready = threading.Condition(self._lock)
        self._last_published: InspectionReport | None = None
        self._in_flight: int | None = None   # generation under inspection
        self._timer_handle = None

    def _published_gen(self) -> int:
        return -1 if self._last_published is None else self._last_published.generation

    # --- edits ---

    def on_edit(self, receipt: EditReceipt) -> None:
        """Start or extend the debounce window for this edit."""
        with self._lock:
            if not self.enabled:
                return
            if self._timer_handle is not None:
                self.clock.cancel(self._timer_handle)
            self._timer_handle = self.clock.call_at(
                self.clock.now() + self.debounce, self._on_debounce_elapsed
            )

    def _on_debounce_elapsed(self) -> None:
        with self._lock:
            self._timer_handle = None
            if not self.enabled:
                return
            if self._in_flight is not None:
                # A cycle is running; its completion hook schedules the
                # follow-up for whatever has changed since.
                return
            if self.session.generation <= self._published_gen():
                return
            self._start_cycle()

    def _start_cycle(self) -> None:
        snapshot = self.session.snapshot()
        self._in_flight = snapshot.generation
        prev = self._last_published
        config = self.config
        self.worker.submit(
            lambda: run_cycle(snapshot, config, prev),
            self._on_cycle_done,
        )

    def _on_cycle_done(self, report: InspectionReport) -> None:
        with self._lock:
            if self._in_flight == report.generation:
                self._in_flight = None
            if report.generation > self._published_gen():
                self._last_published = report
                self._report_ready.notify_all()
            else:
                logger.debug("discarding stale report for generation %s", report.generation)
            if (
                self.enabled
                and self._in_flight is None
                and self.session.generation > self._published_gen()
            ):
                self._start_cycle()

    # --- consumers ---

    def current_report(self) -> InspectionReport | None:
        with self._lock:
            return self._last_published

    def wait_for_report(self, after: int, timeout: float | None = None) -> InspectionReport | None:
        """Block until a report newer than ``after`` is published.

        Only meaningful with the wall clock; simulated runs read
        ``current_report`` between advances instead.
        """
        deadline = None if timeout is None else time.monotonic() + timeout
        with self._report_ready:
            while True:
                r = self._last_published
                if r is not None and r.generation > after:
                    return r
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    return None
                self._report_ready.wait(remaining)

    # --- control ---

    def disable(self) -> None:
        """Stop scheduling; an in-flight cycle is abandoned (its late
        report still lands unless something newer published first)."""
        with self._lock:
            self.enabled = False
            self._in_flight = None
            if self._timer_handle is not None:
                self.clock.cancel(self._timer_handle)
                self._timer_handle = None

    def enable(self) -> None:
        with self._lock:
            self.enabled = True

    def kick(self) -> None:
        """Force a cycle without waiting for an edit (used at startup)."""
        with self._lock:
            if not self.enabled or self._in_flight is not None:
                return
            self._start_cycle()
