"""Two-team Gaussian skill ratings.

Each team is summarised by the mean of its members' skills.  With team means
mu_W, mu_L and team variances s_W^2, s_L^2 (variance of the mean, sum(sigma_i^2)/n^2):

    c^2 = s_W^2 + s_L^2 + 2 beta^2          t = (mu_W - mu_L) / c
    v(t) = pdf(t) / cdf(t)                  w(t) = v(t) * (v(t) + t)
    mu_i    += +/- sigma_i^2 / (n_T c) * v
    sigma_i^2 *= 1 - sigma_i^2 w / (n_T^2 c^2)

Winners gain and losers drop; the shift grows with surprise (negative t) and
with each member's own uncertainty.  0 < w < 1 keeps every sigma positive and
non-increasing.  An agent filling several seats in one game receives the mean
of its per-seat updates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

MU0 = 25.0
SIGMA0 = 25.0 / 3
BETA = 25.0 / 6


@dataclass(frozen=True)
class Rating:
    mu: float = MU0
    sigma: float = SIGMA0
    games: int = 0

    def conservative(self, k: float = 3.0) -> float:
        return self.mu - k * self.sigma


def _pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


def _cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2))


def v_w(t: float) -> tuple[float, float]:
    denom = _cdf(t)
    if denom < 1e-300:  # far-tail limit of the truncated-Gaussian moments
        v = -t
    else:
        v = _pdf(t) / denom
    w = v * (v + t)
    return v, min(max(w, 0.0), 1.0 - 1e-12)


def team_update(
    winners: Sequence[Rating], losers: Sequence[Rating], beta: float = BETA
) -> tuple[list[Rating], list[Rating]]:
    """Per-seat posterior ratings after ``winners`` beat ``losers``."""
    if not winners or not losers:
        raise ValueError("both teams need at least one member")
    nw, nl = len(winners), len(losers)
    mu_w = sum(r.mu for r in winners) / nw
    mu_l = sum(r.mu for r in losers) / nl
    var_w = sum(r.sigma**2 for r in winners) / nw**2
    var_l = sum(r.sigma**2 for r in losers) / nl**2
    c = math.sqrt(var_w + var_l + 2 * beta**2)
    v, w = v_w((mu_w - mu_l) / c)

    def move(team, n, sign):
        out = []
        for r in team:
            s2 = r.sigma**2
            mu = r.mu + sign * s2 / (n * c) * v
            s2_new = s2 * (1 - s2 * w / (n * n * c * c))
            out.append(Rating(mu, math.sqrt(s2_new), r.games + 1))
        return out

    return move(winners, nw, +1), move(losers, nl, -1)


@dataclass
class RatingState:
    mu0: float = MU0
    sigma0: float = SIGMA0
    beta: float = BETA
    ratings: dict[str, Rating] = field(default_factory=dict)

    def get(self, agent: str) -> Rating:
        return self.ratings.get(agent, Rating(self.mu0, self.sigma0, 0))

    def ensure(self, agents: Iterable[str]) -> None:
        for a in agents:
            self.ratings.setdefault(a, Rating(self.mu0, self.sigma0, 0))

    def update(self, seats: Sequence[str], winning_seats: Iterable[int]) -> dict[str, float]:
        """Apply one game result; returns the mean delta per agent."""
        win = set(winning_seats)
        w_idx = [i for i in range(len(seats)) if i in win]
        l_idx = [i for i in range(len(seats)) if i not in win]
        new_w, new_l = team_update([self.get(seats[i]) for i in w_idx],
                                   [self.get(seats[i]) for i in l_idx], self.beta)
        per_agent: dict[str, list[Rating]] = {}
        for i, r in zip(w_idx + l_idx, new_w + new_l):
            per_agent.setdefault(seats[i], []).append(r)
        deltas = {}
        for agent, posts in per_agent.items():
            old = self.get(agent)
            mu = sum(r.mu for r in posts) / len(posts)
            var = sum(r.sigma**2 for r in posts) / len(posts)
            self.ratings[agent] = Rating(mu, math.sqrt(var), old.games + 1)
            deltas[agent] = mu - old.mu
        return deltas

    def leaderboard(self, k: float = 3.0) -> list[tuple[str, Rating]]:
        return sorted(self.ratings.items(), key=lambda kv: (-kv[1].conservative(k), kv[0]))

    def to_dict(self) -> dict:
        return {"mu0": self.mu0, "sigma0": self.sigma0, "beta": self.beta,
                "ratings": {a: [r.mu, r.sigma, r.games] for a, r in sorted(self.ratings.items())}}

    @classmethod
    def from_dict(cls, data: Mapping) -> "RatingState":
        ratings = {a: Rating(float(m), float(s), int(g)) for a, (m, s, g) in data.get("ratings", {}).items()}
        return cls(float(data.get("mu0", MU0)), float(data.get("sigma0", SIGMA0)), float(data.get("beta", BETA)),
                   ratings)

    def write(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def read(cls, path: Union[str, Path]) -> "RatingState":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
