"""Core value types for the Secret Mafia engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional


class GameError(Exception):
    """Base class for engine rule violations."""


class ConfigError(GameError):
    pass


class PhaseError(GameError):
    pass


class IllegalActionError(GameError):
    pass


class Alignment(str, Enum):
    VILLAGE = "Village"
    MAFIA = "Mafia"


class Role(str, Enum):
    # declaration order doubles as the tie-break order for argmax predictions
    VILLAGER = "Villager"
    DOCTOR = "Doctor"
    DETECTIVE = "Detective"
    MAFIA = "Mafia"

    @property
    def alignment(self) -> Alignment:
        return Alignment.MAFIA if self is Role.MAFIA else Alignment.VILLAGE


VILLAGE_ROLES = (Role.VILLAGER, Role.DOCTOR, Role.DETECTIVE)


class NightActionKind(str, Enum):
    KILL = "kill"
    PROTECT = "protect"
    INVESTIGATE = "investigate"


ROLE_ABILITY = {
    Role.MAFIA: NightActionKind.KILL,
    Role.DOCTOR: NightActionKind.PROTECT,
    Role.DETECTIVE: NightActionKind.INVESTIGATE,
}


@dataclass(frozen=True)
class NightAction:
    kind: NightActionKind
    target: int


class PhaseKind(str, Enum):
    NIGHT = "night"
    DAY = "day"
    ENDED = "ended"


class Stage(str, Enum):
    DISCUSSION = "discussion"
    VOTING = "voting"


@dataclass(frozen=True)
class Phase:
    kind: PhaseKind
    day: int
    stage: Optional[Stage] = None
    winner: Optional[Alignment] = None

    @classmethod
    def night(cls, day: int) -> "Phase":
        return cls(PhaseKind.NIGHT, day)

    @classmethod
    def discussion(cls, day: int) -> "Phase":
        return cls(PhaseKind.DAY, day, Stage.DISCUSSION)

    @classmethod
    def voting(cls, day: int) -> "Phase":
        return cls(PhaseKind.DAY, day, Stage.VOTING)

    @classmethod
    def ended(cls, day: int, winner: Alignment) -> "Phase":
        return cls(PhaseKind.ENDED, day, winner=winner)

    @property
    def label(self) -> str:
        """Short label used in transcripts: night, discussion, voting or ended."""
        if self.kind is PhaseKind.DAY:
            return self.stage.value
        return self.kind.value

    @property
    def is_night(self) -> bool:
        return self.kind is PhaseKind.NIGHT

    @property
    def is_discussion(self) -> bool:
        return self.stage is Stage.DISCUSSION

    @property
    def is_voting(self) -> bool:
        return self.stage is Stage.VOTING

    @property
    def is_ended(self) -> bool:
        return self.kind is PhaseKind.ENDED


DEFAULT_ROLE_COUNTS = {Role.VILLAGER: 2, Role.DOCTOR: 1, Role.DETECTIVE: 1, Role.MAFIA: 2}

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class GameConfig:
    num_players: int = 6
    role_counts: dict = field(default_factory=lambda: dict(DEFAULT_ROLE_COUNTS))
    discussion_rounds_per_day: int = 2
    max_days: int = 10
    seed: int = 0

    def validate(self) -> None:
        counts = {Role(r): int(c) for r, c in self.role_counts.items()}
        if any(c < 0 for c in counts.values()):
            raise ConfigError("role counts must be non-negative")
        if sum(counts.values()) != self.num_players:
            raise ConfigError(
                f"role counts sum to {sum(counts.values())}, expected {self.num_players} players"
            )
        mafia = counts.get(Role.MAFIA, 0)
        if mafia < 1:
            raise ConfigError("at least one Mafia member is required")
        if mafia >= self.num_players - mafia:
            raise ConfigError("Mafia must start outnumbered by the Village")
        if self.discussion_rounds_per_day < 0 or self.max_days < 1:
            raise ConfigError("discussion_rounds_per_day >= 0 and max_days >= 1 required")
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def count(self, role: Role) -> int:
        return int(self.role_counts.get(role, self.role_counts.get(role.value, 0)))

    def with_seed(self, seed: int) -> "GameConfig":
        return GameConfig(
            self.num_players, dict(self.role_counts), self.discussion_rounds_per_day, self.max_days, seed
        )

    def public_dict(self) -> dict[str, Any]:
        """Config echo safe to show every player (no seed: it determines the roles)."""
        return {
            "num_players": self.num_players,
            "role_counts": {r.value: self.count(r) for r in Role},
            "discussion_rounds_per_day": self.discussion_rounds_per_day,
            "max_days": self.max_days,
        }

    def to_dict(self) -> dict[str, Any]:
        return {**self.public_dict(), "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GameConfig":
        counts = data.get("role_counts")
        return cls(
            num_players=int(data.get("num_players", 6)),
            role_counts={Role(k): int(v) for k, v in counts.items()} if counts else dict(DEFAULT_ROLE_COUNTS),
            discussion_rounds_per_day=int(data.get("discussion_rounds_per_day", 2)),
            max_days=int(data.get("max_days", 10)),
            seed=int(data.get("seed", 0)),
        )


@dataclass
class PlayerState:
    id: int
    role: Role
    alive: bool = True


@dataclass
class NightActionBuffer:
    mafia_target: Optional[int] = None
    mafia_actor: Optional[int] = None
    doctor_target: Optional[int] = None
    detective_target: Optional[int] = None

    def to_dict(self) -> dict[str, Optional[int]]:
        return {
            "mafia_target": self.mafia_target,
            "mafia_actor": self.mafia_actor,
            "doctor_target": self.doctor_target,
            "detective_target": self.detective_target,
        }


class EventKind(str, Enum):
    GAME_STARTED = "GameStarted"
    NIGHT_ACTION = "NightActionSubmitted"
    PROTECTION_APPLIED = "ProtectionApplied"
    INVESTIGATION_RESULT = "InvestigationResult"
    NIGHT_RESOLVED = "NightResolved"
    STATEMENT_MADE = "StatementMade"
    VOTING_STARTED = "VotingStarted"
    VOTE_CAST = "VoteCast"
    VOTES_TALLIED = "VotesTallied"
    PLAYER_ELIMINATED = "PlayerEliminated"
    GAME_ENDED = "GameEnded"


# events that carry caller input; everything else is derived by the engine
INPUT_EVENTS = frozenset(
    {
        EventKind.NIGHT_ACTION,
        EventKind.NIGHT_RESOLVED,
        EventKind.STATEMENT_MADE,
        EventKind.VOTING_STARTED,
        EventKind.VOTE_CAST,
        EventKind.VOTES_TALLIED,
    }
)


@dataclass(frozen=True)
class Event:
    """One append-only log entry. ``visibility`` is None for public events."""

    seq: int
    kind: EventKind
    day: int
    phase: str
    payload: dict
    visibility: Optional[tuple[int, ...]] = None

    @property
    def is_public(self) -> bool:
        return self.visibility is None

    def visible_to(self, player: int) -> bool:
        return self.visibility is None or player in self.visibility

    def participants(self) -> set[int]:
        """Player ids this event is about (speaker, voter, targets, act endpoints)."""
        p = self.payload
        out = {p[k] for k in ("speaker", "voter", "target", "player", "detective", "actor", "death", "eliminated")
               if isinstance(p.get(k), int)}
        for act in p.get("acts", ()):
            out.add(act["src"])
            if act.get("dst") is not None:
                out.add(act["dst"])
        return out

    def to_record(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "day": self.day,
            "phase": self.phase,
            "kind": self.kind.value,
            "visibility": None if self.visibility is None else list(self.visibility),
            "payload": self.payload,
        }

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "Event":
        vis = rec.get("visibility")
        return cls(
            seq=int(rec["seq"]),
            kind=EventKind(rec["kind"]),
            day=int(rec["day"]),
            phase=str(rec["phase"]),
            payload=rec.get("payload") or {},
            visibility=None if vis is None else tuple(int(v) for v in vis),
        )
