import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from checkit.credibility import FlagIndex
from checkit.ingest import FlagListEntry, Tweet
from checkit.osn import (
    BlacklistState, OSNError, RetweetGraph, Session, UserBlacklist, aggregate_and_band, band_of,
    build_blacklist, build_retweet_graph, build_transition, frequency_report, mark_suspicious,
    propagate, report_csv, score_session, sessionize,
)

FLAGS = FlagIndex([[FlagListEntry("fake.example", frozenset({"fake news"}), "test")]])
BAD = "http://fake.example/story"
GOOD = "http://clean.example/story"


def tw(i, user, ts=0, urls=(), rt=None):
    return Tweet(f"t{i}", user, ts, tuple(urls), rt)


def session(*tweets):
    return Session(0, tuple(tweets))


def random_graph(rng, n_max=8):
    n = int(rng.integers(1, n_max + 1))
    nodes = tuple(f"u{i}" for i in range(n))
    edges = {(nodes[a], nodes[b]) for a in range(n) for b in range(n) if a != b and rng.random() < 0.3}
    seeds = {u for u in nodes if rng.random() < 0.3}
    return RetweetGraph(nodes, frozenset(edges), frozenset(seeds))


def dense_oracle(g):
    # rebuild T from the adjacency: invert nothing, add self-loops, normalize rows
    A = g.adjacency() + np.eye(len(g.nodes))
    return A / A.sum(axis=1, keepdims=True)


# ---------------------------------------------------------------- marking

def test_mark_suspicious():
    assert mark_suspicious(tw(0, "a", urls=[BAD]), FLAGS)
    assert not mark_suspicious(tw(0, "a"), FLAGS)
    assert mark_suspicious(tw(0, "a", urls=["http://www.Fake.Example/y"]), FLAGS)
    assert not mark_suspicious(tw(0, "a", urls=[GOOD, "http://notfake.example"]), FLAGS)


# ---------------------------------------------------------------- sessions

def test_hour_boundary_splits():
    s = sessionize([tw(0, "a", 3599), tw(1, "a", 3600)])
    assert [x.window_start for x in s] == [0, 3600]


def test_one_session():
    s = sessionize([tw(0, "a", 0), tw(1, "b", 10), tw(2, "c", 3599)])
    assert len(s) == 1 and len(s[0].tweets) == 3


def test_empty_windows_are_omitted():
    s = sessionize([tw(0, "a", 0), tw(1, "a", 5 * 3600 + 1)])
    assert [x.window_start for x in s] == [0, 18000]


@given(st.lists(st.integers(0, 5 * 86400), max_size=40), st.randoms(use_true_random=False))
def test_sessionize_is_an_order_independent_partition(stamps, rnd):
    tweets = [tw(i, "u", ts) for i, ts in enumerate(stamps)]
    sessions = sessionize(tweets)
    ids = [t.id for s in sessions for t in s.tweets]
    assert sorted(ids) == sorted(t.id for t in tweets)
    for s in sessions:
        assert s.window_start % 3600 == 0
        assert all(s.window_start <= t.timestamp < s.window_start + 3600 for t in s.tweets)
    shuffled = list(tweets)
    rnd.shuffle(shuffled)
    again = sessionize(shuffled)
    assert [(s.window_start, sorted(t.id for t in s.tweets)) for s in again] == \
        [(s.window_start, sorted(t.id for t in s.tweets)) for s in sessions]


# ---------------------------------------------------------------- graphs

def test_single_retweet():
    g = build_retweet_graph(session(tw(0, "u", rt="v")), FLAGS)
    assert set(g.nodes) == {"u", "v"} and g.edges == {("u", "v")} and not g.seeds


def test_repeated_retweet_is_one_edge():
    g = build_retweet_graph(session(tw(0, "u", rt="v"), tw(1, "u", rt="v")), FLAGS)
    assert g.edges == {("u", "v")}
    assert g.adjacency().max() == 1.0


def test_poster_of_flagged_url_is_the_seed():
    s = session(tw(0, "v", urls=[BAD]), tw(1, "u", urls=[BAD], rt="v"))
    g = build_retweet_graph(s, FLAGS)
    assert g.seeds == {"v"} and g.edges == {("u", "v")}
    assert build_retweet_graph(s, FLAGS, seed_retweeters=True).seeds == {"u", "v"}


def test_graph_invariants_enforced():
    with pytest.raises(OSNError):
        RetweetGraph(("a",), frozenset({("a", "a")}), frozenset())
    with pytest.raises(OSNError):
        RetweetGraph(("a",), frozenset(), frozenset({"b"}))
    with pytest.raises(OSNError):
        RetweetGraph(("a", "a"), frozenset(), frozenset())


# ---------------------------------------------------------------- transition

def test_transition_rows():
    g = RetweetGraph(("u", "v", "w", "x"), frozenset({("u", "v"), ("x", "v"), ("x", "w")}), frozenset())
    T = build_transition(g)
    assert T.row("u") == {"u": 0.5, "v": 0.5}
    assert T.row("v") == {"v": 1.0}
    assert T.row("x") == pytest.approx({"x": 1 / 3, "v": 1 / 3, "w": 1 / 3})


def test_isolated_node():
    assert build_transition(RetweetGraph(("w",), frozenset(), frozenset())).row("w") == {"w": 1.0}


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=200)
def test_transition_is_row_stochastic_with_self_loops(seed):
    g = random_graph(np.random.default_rng(seed), 12)
    T = build_transition(g).dense()
    assert np.allclose(T.sum(axis=1), 1, atol=1e-9)
    assert np.all(T >= 0) and np.all(np.diag(T) > 0)
    assert np.allclose(T, dense_oracle(g), atol=1e-15)


# ---------------------------------------------------------------- propagation

def test_no_seeds():
    T = build_transition(RetweetGraph(("a", "b"), frozenset({("a", "b")}), frozenset()))
    r = propagate(T, [])
    assert r.scores == {"a": 0.0, "b": 0.0} and r.iterations == 1 and r.converged


def test_lonely_seed_stays_one():
    T = build_transition(RetweetGraph(("a",), frozenset(), frozenset({"a"})))
    r = propagate(T, ["a"])
    assert r.scores == {"a": 1.0} and r.converged


def test_two_node_closed_form():
    T = build_transition(RetweetGraph(("u", "v"), frozenset({("u", "v")}), frozenset({"v"})))
    r = propagate(T, ["v"], eps=1e-6, record=True)
    assert r.iterations == 20 and r.converged
    assert r.scores["u"] == pytest.approx(1 - 2 ** -20, abs=1e-15)
    assert round(r.scores["u"], 7) == 0.9999990
    for t, p in enumerate(r.history):
        assert p[0] == pytest.approx(1 - 2.0 ** -t, abs=1e-15)
        assert p[1] == 1.0


def test_iteration_cap():
    T = build_transition(RetweetGraph(("u", "v"), frozenset({("u", "v")}), frozenset({"v"})))
    r = propagate(T, ["v"], eps=0.0, max_iter=7)
    assert r.iterations == 7 and not r.converged


def test_unknown_seed():
    with pytest.raises(OSNError):
        propagate(build_transition(RetweetGraph(("a",), frozenset(), frozenset())), ["zz"])


def test_dense_power_oracle_on_random_graphs():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        g = random_graph(rng)
        T = dense_oracle(g)
        p0 = np.array([1.0 if u in g.seeds else 0.0 for u in g.nodes])
        r = propagate(build_transition(g), g.seeds, eps=0.0, max_iter=30, record=True)
        for t, p in enumerate(r.history):
            assert np.allclose(p, np.linalg.matrix_power(T, t) @ p0, atol=1e-9)
            assert np.all((p >= 0) & (p <= 1))


@given(st.integers(0, 2**32 - 1), st.integers(0, 7))
@settings(max_examples=100)
def test_adding_a_seed_never_lowers_scores(seed, extra):
    g = random_graph(np.random.default_rng(seed))
    T = build_transition(g)
    more = set(g.seeds) | {g.nodes[extra % len(g.nodes)]}
    for t in (1, 5, 40):
        a = propagate(T, g.seeds, eps=0.0, max_iter=t).scores
        b = propagate(T, more, eps=0.0, max_iter=t).scores
        assert all(b[u] >= a[u] for u in g.nodes)
    a = propagate(T, g.seeds).scores
    b = propagate(T, more).scores
    assert all(b[u] >= a[u] - 1e-6 for u in g.nodes)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100)
def test_relabeling_permutes_scores(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng)
    names = [f"x{i}" for i in rng.permutation(len(g.nodes))]
    rename = dict(zip(g.nodes, names))
    order = list(rng.permutation(len(g.nodes)))
    h = RetweetGraph(tuple(rename[g.nodes[i]] for i in order),
                     frozenset((rename[u], rename[v]) for u, v in g.edges),
                     frozenset(rename[s] for s in g.seeds))
    a = propagate(build_transition(g), g.seeds)
    b = propagate(build_transition(h), h.seeds)
    assert a.iterations == b.iterations
    for u in g.nodes:
        assert b.scores[rename[u]] == pytest.approx(a.scores[u], abs=1e-12)


def test_score_session_end_to_end():
    s = session(tw(0, "v", urls=[BAD]), tw(1, "u", rt="v"), tw(2, "w", urls=[GOOD]))
    r = score_session(s, FLAGS)
    assert r.scores["v"] == 1.0 and r.scores["w"] == 0.0
    assert r.scores["u"] == pytest.approx(1.0, abs=2e-6)


# ---------------------------------------------------------------- bands and aggregation

@pytest.mark.parametrize("score,band", [
    (0.0, "low"), (0.2499, "low"), (0.25, "medium"), (0.5, "high"), (0.7499, "high"),
    (0.75, "ultra-high"), (1.0, "ultra-high"),
])
def test_band_edges(score, band):
    assert band_of(score) == band


def test_first_observation_initializes():
    state, bands, bl = aggregate_and_band({"n": 1.0})
    assert state.scores["n"] == 1.0 and bands["n"] == "ultra-high" and "n" in bl


def test_ewma_step_demotes():
    prev = BlacklistState(0.3, {"g": 0.8}, {"g": 1}, {"g": 0})
    state, bands, bl = aggregate_and_band({"g": 0.0}, prev, window_start=3600)
    assert state.scores["g"] == pytest.approx(0.56)
    assert bands["g"] == "high" and "g" not in bl
    assert prev.scores["g"] == 0.8  # previous state untouched
    assert state.sessions_seen["g"] == 2 and state.last_updated["g"] == 3600


def test_absent_users_keep_their_score():
    prev = BlacklistState(0.3, {"a": 0.9, "b": 0.1}, {"a": 1, "b": 1}, {"a": 0, "b": 0})
    state, _, _ = aggregate_and_band({"b": 1.0}, prev)
    assert state.scores["a"] == 0.9 and state.scores["b"] == pytest.approx(0.37)


def test_aggregation_rejects_bad_inputs():
    with pytest.raises(OSNError):
        aggregate_and_band({"a": 1.5})
    with pytest.raises(OSNError):
        BlacklistState(alpha=0.0)


@given(st.lists(st.dictionaries(st.sampled_from("abcd"), st.floats(0, 1), max_size=4), max_size=10))
def test_blacklist_holds_only_ultra_high(sessions):
    state = BlacklistState()
    for s in sessions:
        state.update(s)
    bl = state.blacklist()
    assert all(e.score >= 0.75 for e in bl.entries.values())
    assert bl.users() == {u for u, v in state.scores.items() if v >= 0.75}
    assert all(0 <= v <= 1 for v in state.scores.values())


def test_blacklist_records_round_trip():
    state = BlacklistState()
    state.update({"a": 0.9, "b": 0.2}, 7200)
    recs = state.blacklist().records()
    assert [(r.user_id, r.band, r.sessions_seen) for r in recs] == [("a", "ultra-high", 1)]
    assert UserBlacklist.from_records(recs).users() == {"a"}


def test_build_blacklist_over_sessions():
    tweets = [
        tw(0, "spreader", 10, [BAD]), tw(1, "fan", 20, [BAD], rt="spreader"),
        tw(2, "calm", 30, [GOOD]),
        tw(3, "spreader", 3700, [BAD]),
    ]
    state = build_blacklist(tweets, FLAGS)
    assert state.scores["spreader"] == 1.0 and state.sessions_seen["spreader"] == 2
    assert state.scores["calm"] == 0.0
    assert state.scores["fan"] == pytest.approx(1.0, abs=2e-6)
    threaded = build_blacklist(tweets, FLAGS, workers=4)
    assert threaded.scores == state.scores


# ---------------------------------------------------------------- frequency

def test_single_low_user():
    tweets = [tw(i, "a", i * 60, [GOOD]) for i in range(10)]
    rows = {r.band: r for r in frequency_report(tweets, {"a": "low"}, FLAGS)}
    assert (rows["low"].tweets_per_day, rows["low"].fake_tweets_per_day) == (10, 0)
    assert (rows["high"].tweets_per_day, rows["high"].fake_tweets_per_day) == (0, 0)


def test_days_span_calendar_days():
    tweets = [tw(0, "a", 0, [BAD]), tw(1, "a", 86400 * 2 + 5, [BAD])]
    [row] = [r for r in frequency_report(tweets, {"a": "ultra-high"}, FLAGS) if r.users]
    assert row.tweets_per_day == pytest.approx(2 / 3) and row.fake_tweets_per_day == pytest.approx(2 / 3)


def test_empty_window():
    with pytest.raises(OSNError):
        frequency_report([], {}, FLAGS)


def test_report_csv():
    text = report_csv(frequency_report([tw(0, "a", 0, [BAD])], {"a": "ultra-high"}, FLAGS))
    lines = text.splitlines()
    assert lines[0] == "band,users,tweets_per_day,fake_tweets_per_day"
    assert lines[4] == "ultra-high,1,1,1" and len(lines) == 5
