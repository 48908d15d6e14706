"""Per-domain request pacing with additive-increase/multiplicative-decrease.

Most sites never disclose their rate limits, so a static inter-request
delay is either wastefully slow or gets the client banned. Instead each
domain's allowed rate is adapted like TCP congestion control: grow the
rate additively while requests keep succeeding, halve it the moment the
domain pushes back with 429 (or 503 + Retry-After). The static batch
scheduler remains available as a fallback pacing mode.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Mapping, Sequence

ADDITIVE_INCREASE = 0.5  # req/s added per clean success window
MULTIPLICATIVE_DECREASE = 0.5  # rate multiplier on a rate-limited response
DEFAULT_INITIAL_RATE = 1.0
DEFAULT_FLOOR = 0.25
DEFAULT_CEILING = 8.0
SUCCESS_WINDOW = 20  # consecutive non-limited responses per additive step

DEFAULT_BATCH_SIZE = 10
DEFAULT_INTER_BATCH_DELAY = 0.5  # seconds


class RateOutcome(Enum):
    SUCCESS_WINDOW = "success_window"
    RATE_LIMITED = "rate_limited"


@dataclass(frozen=True)
class DomainRateState:
    domain: str
    rate_per_sec: float = DEFAULT_INITIAL_RATE
    floor: float = DEFAULT_FLOOR
    ceiling: float = DEFAULT_CEILING
    last_adjusted_at: float = 0.0  # unix epoch seconds

    def __post_init__(self) -> None:
        if not (0 < self.floor <= self.rate_per_sec <= self.ceiling):
            raise ValueError(
                f"rate {self.rate_per_sec} outside [{self.floor}, {self.ceiling}]"
            )


def adjust_rate(
    state: DomainRateState, outcome: RateOutcome, now: float | None = None
) -> DomainRateState:
    """One adaptation step, clamped to [floor, ceiling]."""
    if outcome is RateOutcome.SUCCESS_WINDOW:
        rate = min(state.rate_per_sec + ADDITIVE_INCREASE, state.ceiling)
    else:
        rate = max(state.rate_per_sec * MULTIPLICATIVE_DECREASE, state.floor)
    return replace(
        state,
        rate_per_sec=rate,
        last_adjusted_at=time.time() if now is None else now,
    )


def is_rate_limited_response(status: int, headers: Mapping[str, str] | None = None) -> bool:
    if status == 429:
        return True
    if status == 503 and headers:
        return any(k.lower() == "retry-after" for k in headers)
    return False


class DomainGovernor:
    """Serializes request grants per domain at that domain's adapted rate.

    ``acquire`` blocks (via the injected sleeper) until the domain's next
    slot; ``record_response`` feeds the AIMD loop. Clock and sleeper are
    injectable so simulations can run on a virtual timeline.
    """

    def __init__(
        self,
        initial_rate: float = DEFAULT_INITIAL_RATE,
        floor: float = DEFAULT_FLOOR,
        ceiling: float = DEFAULT_CEILING,
        success_window: int = SUCCESS_WINDOW,
        clock: Callable[[], float] = time.monotonic,
        sleeper: Callable[[float], None] = time.sleep,
        on_adjust: Callable[[DomainRateState], None] | None = None,
    ) -> None:
        self._initial_rate = initial_rate
        self._floor = floor
        self._ceiling = ceiling
        self._success_window = success_window
        self._clock = clock
        self._sleeper = sleeper
        self._on_adjust = on_adjust
        self._lock = threading.Lock()
        self._states: dict[str, DomainRateState] = {}
        self._next_allowed: dict[str, float] = {}
        self._successes: dict[str, int] = {}

    def state(self, domain: str) -> DomainRateState:
        with self._lock:
            return self._state_locked(domain)

    def seed_state(self, state: DomainRateState) -> None:
        """Install a persisted state (e.g. reloaded at startup)."""
        with self._lock:
            self._states[state.domain] = state

    def _state_locked(self, domain: str) -> DomainRateState:
        state = self._states.get(domain)
        if state is None:
            state = DomainRateState(
                domain=domain,
                rate_per_sec=self._initial_rate,
                floor=self._floor,
                ceiling=self._ceiling,
            )
            self._states[domain] = state
        return state

    def acquire(self, domain: str) -> None:
        """Block until this domain's next slot; grants are serialized."""
        with self._lock:
            now = self._clock()
            grant = max(now, self._next_allowed.get(domain, now))
            rate = self._state_locked(domain).rate_per_sec
            self._next_allowed[domain] = grant + 1.0 / rate
        wait = grant - now
        if wait > 0:
            self._sleeper(wait)

    def record_response(
        self, domain: str, status: int, headers: Mapping[str, str] | None = None
    ) -> None:
        limited = is_rate_limited_response(status, headers)
        self.record_outcome(domain, limited)

    def record_outcome(self, domain: str, rate_limited: bool) -> None:
        adjusted: DomainRateState | None = None
        with self._lock:
            state = self._state_locked(domain)
            if rate_limited:
                self._successes[domain] = 0
                adjusted = adjust_rate(state, RateOutcome.RATE_LIMITED, self._clock())
            else:
                count = self._successes.get(domain, 0) + 1
                if count >= self._success_window:
                    adjusted = adjust_rate(state, RateOutcome.SUCCESS_WINDOW, self._clock())
                    count = 0
                self._successes[domain] = count
            if adjusted is not None:
                self._states[domain] = adjusted
        if adjusted is not None and self._on_adjust is not None:
            self._on_adjust(adjusted)


@dataclass(frozen=True)
class Batch:
    index: int
    dispatch_at: float  # seconds from schedule start
    links: tuple[str, ...]


def schedule_batches(
    links: Sequence[str],
    batch_size: int = DEFAULT_BATCH_SIZE,
    inter_batch_delay: float = DEFAULT_INTER_BATCH_DELAY,
) -> list[Batch]:
    """Static fallback pacing: fixed-size batches spread by a fixed delay.

    Input order is preserved; batch ``i`` dispatches at ``i * delay``.
    Per-domain throttling on top of this schedule is the governor's job
    (see :func:`dispatch_batches`).
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if inter_batch_delay < 0:
        raise ValueError("inter_batch_delay must be >= 0")
    batches = []
    for i in range(math.ceil(len(links) / batch_size)):
        chunk = tuple(links[i * batch_size : (i + 1) * batch_size])
        batches.append(Batch(index=i, dispatch_at=i * inter_batch_delay, links=chunk))
    return batches


def dispatch_batches(
    links: Sequence[str],
    send: Callable[[str], None],
    governor: DomainGovernor,
    domain_of: Callable[[str], str],
    batch_size: int = DEFAULT_BATCH_SIZE,
    inter_batch_delay: float = DEFAULT_INTER_BATCH_DELAY,
    clock: Callable[[], float] = time.monotonic,
    sleeper: Callable[[float], None] = time.sleep,
) -> None:
    """Walk the static schedule, additionally honoring per-domain rates."""
    start = clock()
    for batch in schedule_batches(links, batch_size, inter_batch_delay):
        wait = start + batch.dispatch_at - clock()
        if wait > 0:
            sleeper(wait)
        for link in batch.links:
            governor.acquire(domain_of(link))
            send(link)
