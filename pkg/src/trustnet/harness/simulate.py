"""Virtual-clock simulation of rate adaptation against a limited domain.

The simulated domain enforces a fixed-window limit (at most ``limit``
accepted requests per wall-clock second); the client paces and adapts
through the production :class:`DomainGovernor`, so the simulation
exercises the real AIMD code path, just on a synthetic timeline. No real
time passes and no sockets are involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from trustnet.redirects.ratelimit import (
    DEFAULT_CEILING,
    DEFAULT_FLOOR,
    DEFAULT_INITIAL_RATE,
    SUCCESS_WINDOW,
    DomainGovernor,
)


@dataclass(frozen=True)
class GovernorConfig:
    initial_rate: float = DEFAULT_INITIAL_RATE
    floor: float = DEFAULT_FLOOR
    ceiling: float = DEFAULT_CEILING
    success_window: int = SUCCESS_WINDOW


class _VirtualClock:
    def __init__(self) -> None:
        self.now = 0.0

    def time(self) -> float:
        return self.now

    def sleep(self, seconds: float) -> None:
        self.now += max(0.0, seconds)


@dataclass
class RateTrace:
    """Send/reject timeline of one simulated run."""

    domain_limit: float
    duration: float
    sent: list[float] = field(default_factory=list)
    limited: list[float] = field(default_factory=list)
    rate_points: list[tuple[float, float]] = field(default_factory=list)

    def sent_rate(self, start: float = 0.0, end: float | None = None) -> float:
        end = self.duration if end is None else end
        if end <= start:
            return 0.0
        return sum(start <= t < end for t in self.sent) / (end - start)

    def limited_fraction(self, start: float = 0.0, end: float | None = None) -> float:
        end = self.duration if end is None else end
        sent = sum(start <= t < end for t in self.sent)
        if sent == 0:
            return 0.0
        return sum(start <= t < end for t in self.limited) / sent

    def per_second(self) -> list[dict]:
        """One row per simulated second: sent and limited counts, last rate."""
        rows = []
        rate = self.rate_points[0][1] if self.rate_points else 0.0
        rate_iter = iter(self.rate_points)
        pending = next(rate_iter, None)
        sent_idx = limited_idx = 0
        for second in range(int(self.duration)):
            hi = second + 1
            while pending is not None and pending[0] < hi:
                rate = pending[1]
                pending = next(rate_iter, None)
            sent_count = 0
            while sent_idx < len(self.sent) and self.sent[sent_idx] < hi:
                sent_count += 1
                sent_idx += 1
            limited_count = 0
            while limited_idx < len(self.limited) and self.limited[limited_idx] < hi:
                limited_count += 1
                limited_idx += 1
            rows.append(
                {"second": second, "sent": sent_count, "limited": limited_count, "rate": rate}
            )
        return rows


def simulate_rate(
    domain_limit: float,
    duration: float = 300.0,
    config: GovernorConfig | None = None,
    domain: str = "domain.example",
) -> RateTrace:
    """Run the governor against a domain that allows ``domain_limit`` req/s.

    Deterministic: no randomness, pure float timeline.
    """
    if domain_limit <= 0:
        raise ValueError("domain_limit must be positive")
    config = config or GovernorConfig()
    clock = _VirtualClock()
    governor = DomainGovernor(
        initial_rate=config.initial_rate,
        floor=config.floor,
        ceiling=config.ceiling,
        success_window=config.success_window,
        clock=clock.time,
        sleeper=clock.sleep,
    )
    trace = RateTrace(domain_limit=domain_limit, duration=duration)
    trace.rate_points.append((0.0, governor.state(domain).rate_per_sec))

    # Fixed-window limiter on the domain side. Windows are 1 s for limits
    # >= 1; fractional limits get proportionally longer windows so that
    # e.g. 0.1 req/s means one accepted request per 10 s.
    window_len = max(1.0, 1.0 / domain_limit)
    allowed_per_window = domain_limit * window_len

    window = -1
    window_accepted = 0
    while True:
        governor.acquire(domain)
        t = clock.now
        if t >= duration:
            break
        trace.sent.append(t)
        current_window = int(t / window_len)
        if current_window != window:
            window = current_window
            window_accepted = 0
        rate_before = governor.state(domain).rate_per_sec
        if window_accepted < allowed_per_window:
            window_accepted += 1
            governor.record_response(domain, 200)
        else:
            trace.limited.append(t)
            governor.record_response(domain, 429)
        rate_after = governor.state(domain).rate_per_sec
        if rate_after != rate_before:
            trace.rate_points.append((t, rate_after))
    return trace
