"""Falsity propagation over retweet graphs and the user blacklist.

The tweet stream is cut into hour-aligned sessions. Each session becomes a
retweet graph whose suspicious posters start with falsity 1 and everybody
else with 0; a DeGroot process spreads those opinions from retweeted users
to their retweeters. Session scores feed an exponentially weighted global
score per user, and the ultra-high band of that score is the blacklist.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .credibility import FlagIndex
from .ingest import BlacklistRecord, Tweet

SESSION_SECONDS = 3600
DAY_SECONDS = 86400
BANDS = ("low", "medium", "high", "ultra-high")
BAND_EDGES = (0.25, 0.5, 0.75)
BLACKLIST_CUTOFF = 0.75


class OSNError(ValueError):
    pass


# --------------------------------------------------------------------------
# marking and sessions

def mark_suspicious(tweet: Tweet, flaglist: FlagIndex) -> bool:
    return any(flaglist.match_url(u).matched for u in tweet.urls)


@dataclass(frozen=True)
class Session:
    window_start: int
    tweets: tuple[Tweet, ...]


def sessionize(tweets: Iterable[Tweet], seconds: int = SESSION_SECONDS) -> list[Session]:
    """Group tweets into aligned windows; empty windows are omitted."""
    ordered = sorted(tweets, key=lambda t: t.timestamp)  # stable for ties
    sessions: list[Session] = []
    bucket: list[Tweet] = []
    start = None
    for t in ordered:
        w = t.timestamp // seconds * seconds
        if w != start:
            if bucket:
                sessions.append(Session(start, tuple(bucket)))
            start, bucket = w, []
        bucket.append(t)
    if bucket:
        sessions.append(Session(start, tuple(bucket)))
    return sessions


# --------------------------------------------------------------------------
# graph and operator

@dataclass(frozen=True)
class RetweetGraph:
    nodes: tuple[str, ...]
    edges: frozenset  # (u, v): u retweeted v
    seeds: frozenset

    def __post_init__(self):
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise OSNError("duplicate node ids")
        for u, v in self.edges:
            if u == v:
                raise OSNError(f"self-edge on {u!r}")
            if u not in known or v not in known:
                raise OSNError(f"edge ({u!r}, {v!r}) leaves the node set")
        if not self.seeds <= known:
            raise OSNError("seeds must be graph nodes")

    @property
    def index(self) -> dict[str, int]:
        return {u: i for i, u in enumerate(self.nodes)}

    def adjacency(self) -> np.ndarray:
        idx = self.index
        A = np.zeros((len(self.nodes), len(self.nodes)))
        for u, v in self.edges:
            A[idx[u], idx[v]] = 1.0
        return A

    def out_degree(self, u: str) -> int:
        return sum(1 for a, _ in self.edges if a == u)


def build_retweet_graph(session: Session, flaglist: FlagIndex, *, seed_retweeters: bool = False) -> RetweetGraph:
    """Graph of one session.

    Seeds are users who posted a suspicious original tweet; with
    ``seed_retweeters`` a retweet of a suspicious tweet also seeds its author.
    """
    nodes: dict[str, None] = {}
    edges = set()
    seeds = set()
    for t in session.tweets:
        nodes.setdefault(t.user_id)
        target = t.retweet_of_user
        if target is not None:
            nodes.setdefault(target)
            if target != t.user_id:
                edges.add((t.user_id, target))
        if (target is None or seed_retweeters) and mark_suspicious(t, flaglist):
            seeds.add(t.user_id)
    return RetweetGraph(tuple(nodes), frozenset(edges), frozenset(seeds))


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic operator in compressed-row form.

    Row ``i`` holds ``cols[indptr[i]:indptr[i+1]]`` with matching ``weights``.
    """

    nodes: tuple[str, ...]
    indptr: np.ndarray
    cols: np.ndarray
    weights: np.ndarray

    def row(self, u: str) -> dict[str, float]:
        i = self.nodes.index(u)
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return {self.nodes[c]: float(w) for c, w in zip(self.cols[lo:hi], self.weights[lo:hi])}

    def apply(self, p: np.ndarray) -> np.ndarray:
        if len(self.nodes) == 0:
            return p.copy()
        return np.add.reduceat(self.weights * p[self.cols], self.indptr[:-1])

    def dense(self) -> np.ndarray:
        n = len(self.nodes)
        T = np.zeros((n, n))
        for i in range(n):
            lo, hi = self.indptr[i], self.indptr[i + 1]
            T[i, self.cols[lo:hi]] = self.weights[lo:hi]
        return T


def build_transition(g: RetweetGraph) -> TransitionMatrix:
    """Row u weights itself and every user it retweeted equally."""
    idx = g.index
    targets: dict[int, list[int]] = {i: [] for i in range(len(g.nodes))}
    for u, v in g.edges:
        targets[idx[u]].append(idx[v])
    indptr, cols, weights = [0], [], []
    for i in range(len(g.nodes)):
        row = [i] + sorted(targets[i])
        cols.extend(row)
        weights.extend([1.0 / len(row)] * len(row))
        indptr.append(len(cols))
    return TransitionMatrix(g.nodes, np.array(indptr, dtype=np.int64),
                            np.array(cols, dtype=np.int64), np.array(weights))


@dataclass
class FalsityScores:
    scores: dict[str, float]
    iterations: int
    converged: bool
    history: Optional[list] = None  # p(0), p(1), ... when recorded


def propagate(T: TransitionMatrix, seeds: Iterable[str], eps: float = 1e-6, max_iter: int = 100,
              record: bool = False) -> FalsityScores:
    """Iterate ``p(t) = T p(t-1)`` from the 0/1 seed vector.

    Stops after the first update whose max-norm change is below ``eps`` or
    after ``max_iter`` updates.
    """
    idx = {u: i for i, u in enumerate(T.nodes)}
    p = np.zeros(len(T.nodes))
    for s in seeds:
        if s not in idx:
            raise OSNError(f"seed {s!r} is not a graph node")
        p[idx[s]] = 1.0
    history = [p.copy()] if record else None
    converged = False
    t = 0
    while t < max_iter:
        nxt = T.apply(p)
        t += 1
        delta = float(np.max(np.abs(nxt - p))) if len(p) else 0.0
        p = nxt
        if record:
            history.append(p.copy())
        if delta < eps:
            converged = True
            break
    np.clip(p, 0.0, 1.0, out=p)
    return FalsityScores({u: float(p[i]) for u, i in idx.items()}, t, converged, history)


def score_session(session: Session, flaglist: FlagIndex, *, eps: float = 1e-6, max_iter: int = 100,
                  seed_retweeters: bool = False) -> FalsityScores:
    g = build_retweet_graph(session, flaglist, seed_retweeters=seed_retweeters)
    return propagate(build_transition(g), g.seeds, eps, max_iter)


# --------------------------------------------------------------------------
# aggregation, bands, blacklist

def band_of(score: float) -> str:
    for name, edge in zip(BANDS, BAND_EDGES):
        if score < edge:
            return name
    return BANDS[-1]


@dataclass(frozen=True)
class BlacklistEntry:
    score: float
    sessions_seen: int
    last_updated: int


@dataclass
class UserBlacklist:
    entries: dict[str, BlacklistEntry] = field(default_factory=dict)
    cutoff: float = BLACKLIST_CUTOFF

    def __contains__(self, user: str) -> bool:
        return user in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def users(self) -> set[str]:
        return set(self.entries)

    def records(self) -> list[BlacklistRecord]:
        return [BlacklistRecord(u, e.score, band_of(e.score), e.sessions_seen)
                for u, e in sorted(self.entries.items())]

    @classmethod
    def from_records(cls, records: Iterable[BlacklistRecord]) -> "UserBlacklist":
        out = cls()
        for r in records:
            if r.score >= out.cutoff:
                out.entries[r.user_id] = BlacklistEntry(r.score, r.sessions_seen, 0)
        return out


@dataclass
class BlacklistState:
    """Running global falsity per user, updated one session at a time."""

    alpha: float = 0.3
    scores: dict[str, float] = field(default_factory=dict)
    sessions_seen: dict[str, int] = field(default_factory=dict)
    last_updated: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise OSNError("alpha must lie in (0, 1]")

    def copy(self) -> "BlacklistState":
        return BlacklistState(self.alpha, dict(self.scores), dict(self.sessions_seen), dict(self.last_updated))

    def update(self, session_scores: Mapping[str, float], window_start: int = 0) -> "BlacklistState":
        a = self.alpha
        for user, s in session_scores.items():
            if not 0.0 <= s <= 1.0:
                raise OSNError(f"session score {s} for {user!r} outside [0, 1]")
            prev = self.scores.get(user)
            self.scores[user] = s if prev is None else (1 - a) * prev + a * s
            self.sessions_seen[user] = self.sessions_seen.get(user, 0) + 1
            self.last_updated[user] = window_start
        return self

    def bands(self) -> dict[str, str]:
        return {u: band_of(s) for u, s in self.scores.items()}

    def blacklist(self) -> UserBlacklist:
        return UserBlacklist({
            u: BlacklistEntry(s, self.sessions_seen[u], self.last_updated[u])
            for u, s in self.scores.items() if s >= BLACKLIST_CUTOFF
        })


def aggregate_and_band(session_scores: Mapping[str, float], previous: Optional[BlacklistState] = None, *,
                       alpha: float = 0.3, window_start: int = 0):
    """Fold one session into a copy of ``previous``; returns ``(state, bands, blacklist)``."""
    state = previous.copy() if previous is not None else BlacklistState(alpha)
    state.update(session_scores, window_start)
    return state, state.bands(), state.blacklist()


def build_blacklist(tweets: Iterable[Tweet], flaglist: FlagIndex, *, alpha: float = 0.3, eps: float = 1e-6,
                    max_iter: int = 100, seed_retweeters: bool = False, workers: int = 1) -> BlacklistState:
    """Run the whole stream: sessions are scored in parallel, folded in time order."""
    sessions = sessionize(tweets)

    def work(s: Session) -> FalsityScores:
        return score_session(s, flaglist, eps=eps, max_iter=max_iter, seed_retweeters=seed_retweeters)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, sessions))
    else:
        results = [work(s) for s in sessions]
    state = BlacklistState(alpha)
    for s, r in zip(sessions, results):
        state.update(r.scores, s.window_start)
    return state


# --------------------------------------------------------------------------
# frequency analysis

@dataclass(frozen=True)
class BandFrequency:
    band: str
    users: int
    tweets_per_day: float
    fake_tweets_per_day: float


def frequency_report(tweets: Sequence[Tweet], bands: Mapping[str, str], flaglist: FlagIndex,
                     days: Optional[float] = None) -> list[BandFrequency]:
    """Mean per-user daily tweets, all and flag-listed-URL only, per band.

    ``days`` defaults to the number of calendar days the stream touches.
    Users absent from ``bands`` are ignored.
    """
    tweets = list(tweets)
    if not tweets:
        raise OSNError("empty observation window")
    if days is None:
        ts = [t.timestamp for t in tweets]
        days = max(ts) // DAY_SECONDS - min(ts) // DAY_SECONDS + 1
    if days <= 0:
        raise OSNError("observation window must be positive")
    total: dict[str, int] = {}
    fake: dict[str, int] = {}
    for t in tweets:
        total[t.user_id] = total.get(t.user_id, 0) + 1
        if mark_suspicious(t, flaglist):
            fake[t.user_id] = fake.get(t.user_id, 0) + 1
    rows = []
    for band in BANDS:
        members = [u for u, b in bands.items() if b == band]
        if not members:
            rows.append(BandFrequency(band, 0, 0.0, 0.0))
            continue
        n = len(members)
        rows.append(BandFrequency(
            band, n,
            sum(total.get(u, 0) for u in members) / n / days,
            sum(fake.get(u, 0) for u in members) / n / days,
        ))
    return rows


def report_csv(rows: Sequence[BandFrequency]) -> str:
    lines = ["band,users,tweets_per_day,fake_tweets_per_day"]
    lines += [f"{r.band},{r.users},{r.tweets_per_day:.6g},{r.fake_tweets_per_day:.6g}" for r in rows]
    return "\n".join(lines) + "\n"
