"""Per-domain politeness: a connection cap and minimum spacing between requests.

Every wire request the crawler or sampler makes passes through one gate, so a
domain never sees more than the configured concurrent connections and
consecutive requests are at least the effective delay apart. Delays come from
config but a larger robots.txt Crawl-delay overrides.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager

from .clock import Clock, SystemClock


class DomainGate:
    def __init__(
        self,
        max_connections: int = 32,
        delay: float = 3.0,
        clock: Clock | None = None,
    ):
        self.max_connections = max_connections
        self.base_delay = delay
        self.clock = clock or SystemClock()
        self._lock = threading.Lock()
        self._sems: dict[str, threading.BoundedSemaphore] = {}
        self._pace_locks: dict[str, threading.Lock] = {}
        self._last_request: dict[str, float] = {}
        self._delays: dict[str, float] = {}

    def set_delay(self, domain: str, delay: float) -> None:
        """Raise the effective delay for a domain (robots Crawl-delay)."""
        with self._lock:
            self._delays[domain] = max(self.base_delay, delay)

    def effective_delay(self, domain: str) -> float:
        with self._lock:
            return self._delays.get(domain, self.base_delay)

    def _domain_state(self, domain: str):
        with self._lock:
            if domain not in self._sems:
                self._sems[domain] = threading.BoundedSemaphore(self.max_connections)
                self._pace_locks[domain] = threading.Lock()
            return self._sems[domain], self._pace_locks[domain]

    @contextmanager
    def permit(self, domain: str):
        """Block until a connection slot is free and the delay has elapsed,
        then hold the slot for the duration of the request."""
        sem, pace = self._domain_state(domain)
        sem.acquire()
        try:
            with pace:
                delay = self.effective_delay(domain)
                last = self._last_request.get(domain)
                if last is not None:
                    wait = last + delay - self.clock.now()
                    if wait > 0:
                        self.clock.sleep(wait)
                self._last_request[domain] = self.clock.now()
            yield
        finally:
            sem.release()
