"""Drive one game: ask each seat's agent for actions, repair failures, log checkpoints."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from ..agents.executor import Night, Say, Vote, default_action, is_legal
from ..agents.spec import AgentSpec
from ..engine.game import (
    GameState,
    cast_vote,
    new_game,
    observation_for,
    record_statement,
    resolve_night,
    start_voting,
    submit_night_action,
    tally_votes,
)
from ..engine.types import ROLE_ABILITY, GameConfig, Role
from ..memory.extract import extract_acts

log = logging.getLogger(__name__)


class SetupError(ValueError):
    """A match could not be configured (bad seat map or agent spec)."""


@dataclass(frozen=True)
class MatchConfig:
    game: GameConfig
    seats: tuple[str, ...]  # one agent spec string per seat
    seed: int = 0

    def validate(self) -> None:
        self.game.validate()
        if len(self.seats) != self.game.num_players:
            raise SetupError(f"{len(self.seats)} seat specs for {self.game.num_players} players")
        for text in self.seats:
            try:
                AgentSpec.parse(text)
            except ValueError as exc:
                raise SetupError(str(exc)) from None

    def to_dict(self) -> dict[str, Any]:
        return {"game": self.game.to_dict(), "seats": list(self.seats), "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "MatchConfig":
        game = GameConfig.from_dict(data.get("game", {}))
        seed = int(data.get("seed", game.seed))
        seats = data.get("seats") or ["revac_8"] * game.num_players
        return cls(game.with_seed(seed), tuple(seats), seed)


@dataclass
class MatchResult:
    config: MatchConfig
    state: GameState
    checkpoints: dict[int, str] = field(default_factory=dict)  # events-so-far -> state digest
    repairs: list[dict] = field(default_factory=list)

    @property
    def winner(self):
        return self.state.winner

    @property
    def roles(self) -> list[Role]:
        return self.state.roles


def build_agents(config: MatchConfig) -> list:
    config.validate()
    try:
        return [AgentSpec.parse(s).build(seat, config.seed) for seat, s in enumerate(config.seats)]
    except Exception as exc:  # e.g. missing backend credentials
        raise SetupError(f"cannot construct agents: {exc}") from exc


def _ask(agent, state: GameState, seat: int, repairs: list) -> Optional[object]:
    obs = observation_for(state, seat)
    try:
        action = agent.step(obs)
    except Exception as exc:
        log.warning("seat P%d raised %r; repairing", seat, exc)
        repairs.append({"seq": len(state.events), "seat": seat, "reason": f"error: {exc!r}"})
        return default_action(obs)
    if action is None:
        return None  # declining a night action is allowed
    if not is_legal(obs, action):
        repairs.append({"seq": len(state.events), "seat": seat, "reason": f"illegal: {action!r}"})
        return default_action(obs)
    return action


def play(state: GameState, agents: Sequence, checkpoints: dict[int, str], repairs: list,
         observer: Optional[Callable[[GameState], None]] = None) -> GameState:
    """Run the phase machine to the end; every engine call is followed by a checkpoint
    (and by ``observer(state)`` when given, which property tests use)."""
    rounds = state.config.discussion_rounds_per_day
    roster = range(state.config.num_players)

    def mark():
        checkpoints[len(state.events)] = state.digest()
        if observer is not None:
            observer(state)

    mark()
    while not state.phase.is_ended:
        if state.phase.is_night:
            for seat in state.living():
                if ROLE_ABILITY.get(state.players[seat].role) is None:
                    continue
                action = _ask(agents[seat], state, seat, repairs)
                if isinstance(action, Night):
                    submit_night_action(state, seat, action.action)
                    mark()
            resolve_night(state)
        elif state.phase.is_discussion:
            for _ in range(rounds):
                for seat in state.living():
                    action = _ask(agents[seat], state, seat, repairs)
                    text = action.text if isinstance(action, Say) else ""
                    record_statement(state, seat, text, extract_acts(text, roster, seat))
                    mark()
            start_voting(state)
        elif state.phase.is_voting:
            for seat in state.living():
                action = _ask(agents[seat], state, seat, repairs)
                if isinstance(action, Vote) and action.target is not None:
                    cast_vote(state, seat, action.target)
                    mark()
            tally_votes(state)
        mark()
    return state


def run_match(config: MatchConfig, agents: Optional[Sequence] = None,
              observer: Optional[Callable[[GameState], None]] = None) -> MatchResult:
    if agents is None:
        agents = build_agents(config)
    elif len(agents) != config.game.num_players:
        raise SetupError("one agent per seat required")
    game = config.game.with_seed(config.seed)
    state = new_game(game)
    result = MatchResult(config, state)
    play(state, agents, result.checkpoints, result.repairs, observer)
    return result
