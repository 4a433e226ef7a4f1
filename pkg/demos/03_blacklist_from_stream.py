"""From a simulated tweet stream to a user blacklist and per-band tweet rates."""

# %% A week of tweets from 100 users, 10 of whom spread flag-listed links
from checkit.credibility import FlagIndex
from checkit.osn import (
    build_blacklist, build_retweet_graph, build_transition, frequency_report, propagate, report_csv,
    sessionize,
)
from checkit.simulate import StreamConfig, simulate_stream

stream = simulate_stream(StreamConfig(seed=0))
flags = FlagIndex([stream.flaglist])
print(len(stream.tweets), "tweets,", len(stream.spreaders), "spreaders")

# %% One hour in detail: graph, operator, propagation
hour = sessionize(stream.tweets)[12]
g = build_retweet_graph(hour, flags)
scores = propagate(build_transition(g), g.seeds)
print(f"{len(g.nodes)} users, {len(g.edges)} retweet edges, {len(g.seeds)} seeds, "
      f"{scores.iterations} iterations")
top = sorted(scores.scores.items(), key=lambda kv: -kv[1])[:5]
print("highest session scores:", [(u, round(s, 3)) for u, s in top])

# %% The whole stream, session by session
state = build_blacklist(stream.tweets, flags, workers=4)
listed = state.blacklist().users()
print("blacklisted:", sorted(listed))
print("all of them spreaders:", listed <= stream.spreaders)

# %% Tweeting frequency per falsity band
print(report_csv(frequency_report(stream.tweets, state.bands(), flags)))
