"""Seeded tournaments over a bounded process pool with sequential rating updates."""

from __future__ import annotations

import hashlib
import json
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from ..engine.types import GameConfig
from .match import MatchConfig, run_match
from .rating import RatingState
from .transcript import Transcript

log = logging.getLogger(__name__)


def split_seed(seed: int, index: int) -> int:
    """Independent 64-bit per-game seed; the same (seed, index) always gives the same value."""
    digest = hashlib.sha256(f"revac:{seed}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def seat_plan(specs: Sequence[str], num_players: int, game_seed: int) -> tuple[str, ...]:
    rng = random.Random(game_seed)
    return tuple(rng.choice(list(specs)) for _ in range(num_players))


def _play(job: tuple[int, dict]) -> tuple[int, Optional[str], Optional[str]]:
    index, cfg = job
    try:
        result = run_match(MatchConfig.from_dict(cfg))
        return index, Transcript.from_result(result).dumps(), None
    except Exception as exc:  # a failed game is skipped, not fatal
        return index, None, repr(exc)


@dataclass
class TournamentResult:
    ratings: RatingState
    transcripts: list[Transcript] = field(default_factory=list)
    failures: dict[int, str] = field(default_factory=dict)
    k: float = 3.0

    def leaderboard(self):
        return self.ratings.leaderboard(self.k)

    def table(self) -> str:
        rows = [f"{'rank':>4}  {'agent':<24} {'mu':>7} {'sigma':>6} {'mu-k*s':>7} {'games':>5}"]
        for i, (agent, r) in enumerate(self.leaderboard(), 1):
            rows.append(f"{i:>4}  {agent:<24} {r.mu:7.2f} {r.sigma:6.2f} {r.conservative(self.k):7.2f} {r.games:>5}")
        return "\n".join(rows)


def run_tournament(
    specs: Sequence[str],
    n_games: int,
    seed: int = 0,
    workers: int = 1,
    game: GameConfig = GameConfig(),
    out_dir: Optional[Path] = None,
    k: float = 3.0,
    ratings: Optional[RatingState] = None,
) -> TournamentResult:
    specs = list(dict.fromkeys(specs))
    if len(specs) < 2:
        raise ValueError("a tournament needs at least two distinct agent specs")
    if n_games < 0:
        raise ValueError("n_games must be non-negative")
    state = ratings or RatingState()
    state.ensure(specs)
    jobs = []
    for i in range(n_games):
        gseed = split_seed(seed, i)
        mc = MatchConfig(game.with_seed(gseed), seat_plan(specs, game.num_players, gseed), gseed)
        mc.validate()
        jobs.append((i, mc.to_dict()))

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_play, jobs, chunksize=max(1, len(jobs) // (workers * 4))))
    else:
        outcomes = [_play(j) for j in jobs]

    result = TournamentResult(state, k=k)
    for index, text, error in sorted(outcomes, key=lambda o: o[0]):  # ratings in game-index order
        if text is None:
            log.error("game %d failed: %s", index, error)
            result.failures[index] = error
            continue
        t = Transcript.loads(text)
        winners = [seat for seat, role in enumerate(t.roles) if role.alignment is t.winner]
        state.update(t.match.seats, winners)
        result.transcripts.append(t)
    if out_dir is not None:
        write_tournament(result, Path(out_dir), specs, n_games, seed)
    return result


def write_tournament(result: TournamentResult, out: Path, specs, n_games: int, seed: int) -> Path:
    games = out / "games"
    games.mkdir(parents=True, exist_ok=True)
    files = []
    for t in result.transcripts:
        name = f"game-{t.match.seed:016x}.jsonl"
        t.write(games / name)
        files.append(f"games/{name}")
    result.ratings.write(out / "ratings.json")
    manifest = {
        "kind": "tournament",
        "agents": list(specs),
        "games": n_games,
        "seed": seed,
        "k": result.k,
        "transcripts": files,
        "failures": {str(i): e for i, e in sorted(result.failures.items())},
        "leaderboard": [{"agent": a, "mu": r.mu, "sigma": r.sigma, "games": r.games,
                         "conservative": r.conservative(result.k)} for a, r in result.leaderboard()],
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path
