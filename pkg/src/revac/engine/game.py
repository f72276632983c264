"""Secret Mafia phase machine.

The state is a plain dataclass; every operation validates, mutates it in place,
appends events, and returns it.  Callers wanting value semantics copy first
(``copy.deepcopy``) -- the arena and tests do this for checkpoints.
"""

from __future__ import annotations

import hashlib
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from .types import (
    ROLE_ABILITY,
    Alignment,
    ConfigError,
    Event,
    EventKind,
    GameConfig,
    IllegalActionError,
    NightAction,
    NightActionBuffer,
    NightActionKind,
    Phase,
    PhaseError,
    PlayerState,
    Role,
)


@dataclass
class GameState:
    config: GameConfig
    players: list[PlayerState]
    phase: Phase
    events: list[Event] = field(default_factory=list)
    night: NightActionBuffer = field(default_factory=NightActionBuffer)
    votes: dict[int, int] = field(default_factory=dict)
    _public_config: Optional[dict] = field(default=None, repr=False, compare=False)
    _views: Optional["_ViewCache"] = field(default=None, repr=False, compare=False)

    def player(self, pid: int) -> PlayerState:
        if not 0 <= pid < len(self.players):
            raise IllegalActionError(f"unknown player {pid}")
        return self.players[pid]

    def living(self) -> list[int]:
        return [p.id for p in self.players if p.alive]

    def living_with(self, role: Role) -> list[int]:
        return [p.id for p in self.players if p.alive and p.role is role]

    def mafia_ids(self) -> list[int]:
        return [p.id for p in self.players if p.role is Role.MAFIA]

    @property
    def roles(self) -> list[Role]:
        return [p.role for p in self.players]

    @property
    def winner(self) -> Optional[Alignment]:
        return self.phase.winner

    def digest(self) -> str:
        """Stable hash of everything except the event log, used as a replay checkpoint."""
        # repr of plain str/int/bool/None tuples is stable across runs and platforms
        blob = (
            (self.phase.kind.value, self.phase.day, self.phase.label,
             self.phase.winner.value if self.phase.winner else None),
            tuple((p.id, p.role.value, p.alive) for p in self.players),
            tuple(sorted(self.night.to_dict().items())),
            tuple(sorted(self.votes.items())),
            len(self.events),
        )
        return hashlib.sha256(repr(blob).encode()).hexdigest()[:16]

    def public_config(self) -> dict[str, Any]:
        if self._public_config is None:
            self._public_config = self.config.public_dict()
        return self._public_config


@dataclass(frozen=True)
class Observation:
    """Everything one seat is allowed to know."""

    viewer: int
    viewer_role: Role
    phase: Phase
    living_players: frozenset
    public_events: tuple
    private_events: tuple
    partners: frozenset
    revealed_roles: dict
    config: dict

    @property
    def roster(self) -> list[int]:
        return list(range(self.config["num_players"]))

    @property
    def role_counts(self) -> dict[Role, int]:
        return {Role(k): v for k, v in self.config["role_counts"].items()}

    def events(self) -> list[Event]:
        """Public and private events merged in log order."""
        return sorted(self.public_events + self.private_events, key=lambda e: e.seq)


def _emit(state: GameState, kind: EventKind, payload: dict, visibility: Optional[Iterable[int]] = None) -> Event:
    vis = None if visibility is None else tuple(sorted(set(visibility)))
    ev = Event(len(state.events), kind, state.phase.day, state.phase.label, payload, vis)
    state.events.append(ev)
    return ev


def assign_roles(config: GameConfig) -> list[Role]:
    deck = [r for r in Role for _ in range(config.count(r))]
    random.Random(config.seed).shuffle(deck)
    return deck


def new_game(config: GameConfig, roles: Optional[Sequence[Role]] = None) -> GameState:
    """Start a game at Night 0.  ``roles`` overrides the seeded shuffle (fixtures)."""
    config.validate()
    if roles is None:
        roles = assign_roles(config)
    else:
        roles = [Role(r) for r in roles]
        expected = Counter({r: config.count(r) for r in Role if config.count(r)})
        if len(roles) != config.num_players or Counter(roles) != expected:
            raise ConfigError("explicit roles do not match the configured role counts")
    state = GameState(config, [PlayerState(i, r) for i, r in enumerate(roles)], Phase.night(0))
    _emit(state, EventKind.GAME_STARTED, {"config": config.public_dict()})
    return state


def _require_phase(state: GameState, ok: bool, what: str) -> None:
    if not ok:
        raise PhaseError(f"{what} not allowed during {state.phase.label} (day {state.phase.day})")


def _require_alive(state: GameState, pid: int, who: str) -> PlayerState:
    player = state.player(pid)
    if not player.alive:
        raise IllegalActionError(f"{who} P{pid} is dead")
    return player


def submit_night_action(state: GameState, actor: int, action: NightAction) -> GameState:
    _require_phase(state, state.phase.is_night, "night action")
    player = _require_alive(state, actor, "actor")
    if ROLE_ABILITY.get(player.role) is not action.kind:
        raise IllegalActionError(f"P{actor} ({player.role.value}) cannot {action.kind.value}")
    _require_alive(state, action.target, "target")

    buf = state.night
    if action.kind is NightActionKind.KILL:
        # the lowest-id submitting Mafia member decides; the same member may revise
        if buf.mafia_actor is None or actor <= buf.mafia_actor:
            buf.mafia_actor, buf.mafia_target = actor, action.target
        team = state.living_with(Role.MAFIA)
    elif action.kind is NightActionKind.PROTECT:
        buf.doctor_target, team = action.target, [actor]
    else:
        buf.detective_target, team = action.target, [actor]
    _emit(state, EventKind.NIGHT_ACTION, {"actor": actor, "action": action.kind.value, "target": action.target}, team)
    return state


def resolve_night(state: GameState) -> tuple[GameState, list[Event]]:
    _require_phase(state, state.phase.is_night, "night resolution")
    start = len(state.events)
    buf = state.night
    day = state.phase.day

    death = None
    if buf.mafia_target is not None and buf.mafia_target != buf.doctor_target:
        death = buf.mafia_target
    # the input event leads so a replay knows when to resolve; private results follow
    _emit(state, EventKind.NIGHT_RESOLVED, {"death": death})
    if buf.doctor_target is not None:
        doctors = [p.id for p in state.players if p.role is Role.DOCTOR]
        _emit(state, EventKind.PROTECTION_APPLIED, {"target": buf.doctor_target}, doctors)
    if buf.detective_target is not None:
        target = state.players[buf.detective_target]
        detective = [p.id for p in state.players if p.role is Role.DETECTIVE]
        _emit(
            state,
            EventKind.INVESTIGATION_RESULT,
            {"detective": detective[0], "target": target.id, "alignment": target.role.alignment.value},
            detective,
        )
    state.night = NightActionBuffer()
    if death is not None:
        _eliminate(state, death, "night")
    if not state.phase.is_ended:
        state.phase = Phase.discussion(day)
    return state, state.events[start:]


def record_statement(state: GameState, speaker: int, text: str, acts: Sequence[Any] = ()) -> GameState:
    """Log a day statement.  ``acts`` are stored verbatim (dicts or objects with ``to_dict``)."""
    _require_phase(state, state.phase.is_discussion, "statement")
    _require_alive(state, speaker, "speaker")
    stored = [a.to_dict() if hasattr(a, "to_dict") else dict(a) for a in acts]
    _emit(state, EventKind.STATEMENT_MADE, {"speaker": speaker, "text": text, "acts": stored})
    return state


def start_voting(state: GameState) -> GameState:
    _require_phase(state, state.phase.is_discussion, "voting start")
    state.phase = Phase.voting(state.phase.day)
    _emit(state, EventKind.VOTING_STARTED, {})
    return state


def cast_vote(state: GameState, voter: int, target: int) -> GameState:
    _require_phase(state, state.phase.is_voting, "vote")
    _require_alive(state, voter, "voter")
    _require_alive(state, target, "target")
    state.votes[voter] = target
    _emit(state, EventKind.VOTE_CAST, {"voter": voter, "target": target})
    return state


def plurality(votes: dict[int, int]) -> Optional[int]:
    """Strict plurality winner of final votes, or None on a tie / no votes."""
    counts = Counter(votes.values())
    if not counts:
        return None
    best = max(counts.values())
    leaders = [t for t, c in counts.items() if c == best]
    return leaders[0] if len(leaders) == 1 else None


def tally_votes(state: GameState) -> tuple[GameState, Optional[int]]:
    _require_phase(state, state.phase.is_voting, "tally")
    living = set(state.living())
    final = {v: t for v, t in state.votes.items() if v in living and t in living}
    eliminated = plurality(final)
    counts = Counter(final.values())
    _emit(state, EventKind.VOTES_TALLIED, {"counts": {str(k): counts[k] for k in sorted(counts)},
                                           "eliminated": eliminated})
    state.votes = {}
    if eliminated is not None:
        _eliminate(state, eliminated, "vote")
    if not state.phase.is_ended:
        nxt = state.phase.day + 1
        if nxt >= state.config.max_days:
            _end(state, Alignment.MAFIA, "stalemate")
        else:
            state.phase = Phase.night(nxt)
    return state, eliminated


def check_win(state: GameState) -> Optional[Alignment]:
    mafia = village = 0
    for p in state.players:
        if p.alive:
            if p.role is Role.MAFIA:
                mafia += 1
            else:
                village += 1
    if mafia == 0:
        return Alignment.VILLAGE
    if mafia >= village:
        return Alignment.MAFIA
    return None


def _end(state: GameState, winner: Alignment, reason: str) -> None:
    _emit(state, EventKind.GAME_ENDED, {"winner": winner.value, "reason": reason})
    state.phase = Phase.ended(state.phase.day, winner)


def _eliminate(state: GameState, pid: int, cause: str) -> None:
    player = state.players[pid]
    player.alive = False
    _emit(state, EventKind.PLAYER_ELIMINATED, {"player": pid, "revealed_role": player.role.value, "cause": cause})
    winner = check_win(state)
    if winner is not None:
        _end(state, winner, "elimination")


@dataclass
class _ViewCache:
    """Event log split by visibility, extended as the log grows."""

    seen: int = 0
    public: list = field(default_factory=list)
    private: dict = field(default_factory=dict)
    revealed: dict = field(default_factory=dict)

    def sync(self, events: list) -> "_ViewCache":
        if len(events) < self.seen:  # log was replaced; start over
            self.__init__()
        for ev in events[self.seen:]:
            if ev.visibility is None:
                self.public.append(ev)
                if ev.kind is EventKind.PLAYER_ELIMINATED:
                    self.revealed[ev.payload["player"]] = Role(ev.payload["revealed_role"])
            else:
                for pid in ev.visibility:
                    self.private.setdefault(pid, []).append(ev)
        self.seen = len(events)
        return self


def observation_for(state: GameState, viewer: int) -> Observation:
    if not 0 <= viewer < len(state.players):
        raise IllegalActionError(f"unknown viewer {viewer}")
    me = state.players[viewer]
    partners = frozenset(
        p.id for p in state.players if me.role is Role.MAFIA and p.role is Role.MAFIA and p.id != viewer
    )
    if state._views is None:
        state._views = _ViewCache()
    views = state._views.sync(state.events)
    return Observation(
        viewer=viewer,
        viewer_role=me.role,
        phase=state.phase,
        living_players=frozenset(state.living()),
        public_events=tuple(views.public),
        private_events=tuple(views.private.get(viewer, ())),
        partners=partners,
        revealed_roles=dict(views.revealed),
        config=state.public_config(),
    )


def legal_night_action(state: GameState, actor: int) -> Optional[NightActionKind]:
    """The night ability ``actor`` may use now, if any."""
    if not state.phase.is_night or not state.players[actor].alive:
        return None
    return ROLE_ABILITY.get(state.players[actor].role)


def is_legal_night_action(state: GameState, actor: int, action: NightAction) -> bool:
    return (
        legal_night_action(state, actor) is action.kind
        and 0 <= action.target < len(state.players)
        and state.players[action.target].alive
    )


def is_legal_vote(state: GameState, voter: int, target: Optional[int]) -> bool:
    if not state.phase.is_voting or not state.players[voter].alive:
        return False
    return target is not None and 0 <= target < len(state.players) and state.players[target].alive


def apply_input_event(state: GameState, ev: Event) -> None:
    """Re-execute one caller-input event (replay)."""
    p = ev.payload
    if ev.kind is EventKind.NIGHT_ACTION:
        submit_night_action(state, p["actor"], NightAction(NightActionKind(p["action"]), p["target"]))
    elif ev.kind is EventKind.NIGHT_RESOLVED:
        resolve_night(state)
    elif ev.kind is EventKind.STATEMENT_MADE:
        record_statement(state, p["speaker"], p["text"], p.get("acts", ()))
    elif ev.kind is EventKind.VOTING_STARTED:
        start_voting(state)
    elif ev.kind is EventKind.VOTE_CAST:
        cast_vote(state, p["voter"], p["target"])
    elif ev.kind is EventKind.VOTES_TALLIED:
        tally_votes(state)
    else:
        raise ValueError(f"{ev.kind.value} is derived, not an input")
