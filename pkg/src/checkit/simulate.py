"""Seeded synthetic tweet stream with known fake-news spreaders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import FlagListEntry, Tweet
from .osn import DAY_SECONDS, SESSION_SECONDS

FAKE_DOMAINS = ("dailyhoax.example", "truthleaks.example", "patriot-wire.example")
CLEAN_DOMAINS = ("citynews.example", "sciencedaily.example", "weatherwatch.example", "sportsdesk.example")


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class StreamConfig:
    users: int = 100
    days: int = 7
    spreader_fraction: float = 0.1
    base_rate: float = 12.0  # tweets per user per day
    fake_rate_multiplier: float = 5.0
    retweet_probability: float = 0.2
    spreader_attraction: float = 3.0  # retweet-target weight of a spreader's tweet
    seed: int = 0

    def validate(self) -> None:
        if self.users < 2:
            raise SimulationError("need at least 2 users")
        if self.days < 1:
            raise SimulationError("need at least 1 day")
        if not 0 <= self.spreader_fraction < 1:
            raise SimulationError("spreader_fraction must lie in [0, 1)")
        if self.base_rate <= 0 or self.fake_rate_multiplier <= 0:
            raise SimulationError("rates must be positive")
        if not 0 <= self.retweet_probability <= 1:
            raise SimulationError("retweet_probability must lie in [0, 1]")
        if self.spreader_attraction <= 0:
            raise SimulationError("spreader_attraction must be positive")


@dataclass(frozen=True)
class SimulatedStream:
    tweets: tuple[Tweet, ...]
    spreaders: frozenset[str]
    users: tuple[str, ...]
    flaglist: tuple[FlagListEntry, ...]


def simulation_flaglist() -> tuple[FlagListEntry, ...]:
    return tuple(FlagListEntry(d, frozenset({"fake news"}), "simulation") for d in FAKE_DOMAINS)


def simulate_stream(config: StreamConfig = StreamConfig()) -> SimulatedStream:
    """Generate the stream hour by hour.

    Spreaders post only flag-listed URLs at ``fake_rate_multiplier`` times the
    base rate. Everyone else posts clean URLs at the base rate, and some of
    those posts are retweets of the same hour's originals, drawn with extra
    weight on spreaders. A retweet carries the original's URLs.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    width = len(str(config.users - 1))
    users = tuple(f"u{i:0{width}d}" for i in range(config.users))
    n_spread = int(round(config.spreader_fraction * config.users))
    spreaders = frozenset(users[i] for i in rng.choice(config.users, size=n_spread, replace=False))
    hourly = config.base_rate / 24.0
    tweets: list[Tweet] = []
    counter = 0

    def new_id() -> str:
        nonlocal counter
        counter += 1
        return f"t{counter:07d}"

    for hour in range(config.days * DAY_SECONDS // SESSION_SECONDS):
        start = hour * SESSION_SECONDS
        originals: list[Tweet] = []
        retweeters: list[str] = []
        for u in users:
            if u in spreaders:
                for _ in range(rng.poisson(hourly * config.fake_rate_multiplier)):
                    domain = FAKE_DOMAINS[rng.integers(len(FAKE_DOMAINS))]
                    ts = start + int(rng.integers(SESSION_SECONDS))
                    originals.append(Tweet(new_id(), u, ts, (f"http://{domain}/story/{counter}",)))
                continue
            for _ in range(rng.poisson(hourly)):
                if rng.random() < config.retweet_probability:
                    retweeters.append(u)
                else:
                    domain = CLEAN_DOMAINS[rng.integers(len(CLEAN_DOMAINS))]
                    ts = start + int(rng.integers(SESSION_SECONDS))
                    originals.append(Tweet(new_id(), u, ts, (f"http://{domain}/article/{counter}",)))
        tweets.extend(originals)
        if not originals:
            continue
        weight = np.array([config.spreader_attraction if t.user_id in spreaders else 1.0 for t in originals])
        weight /= weight.sum()
        for u in retweeters:
            candidates = [i for i, t in enumerate(originals) if t.user_id != u]
            if not candidates:
                continue
            w = weight[candidates] / weight[candidates].sum()
            src = originals[candidates[rng.choice(len(candidates), p=w)]]
            ts = src.timestamp + int(rng.integers(start + SESSION_SECONDS - src.timestamp))
            tweets.append(Tweet(new_id(), u, ts, src.urls, src.user_id))
    tweets.sort(key=lambda t: (t.timestamp, t.id))
    return SimulatedStream(tuple(tweets), spreaders, users, simulation_flaglist())
