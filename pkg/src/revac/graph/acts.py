"""Structured social acts extracted from day discussion and votes."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from ..engine.types import Role


class ActKind(str, Enum):
    ACCUSE = "Accuse"
    DEFEND = "Defend"
    CLAIM = "ClaimRole"
    VOTE = "VoteAct"


class EdgeKind(str, Enum):
    ACCUSATION = "Accusation"
    DEFENSE = "Defense"
    VOTE_ALIGNMENT = "VoteAlignment"


EDGE_WEIGHTS = {
    EdgeKind.ACCUSATION: -1.0,
    EdgeKind.DEFENSE: 1.0,
    EdgeKind.VOTE_ALIGNMENT: -2.0,
}

ACT_EDGE = {
    ActKind.ACCUSE: EdgeKind.ACCUSATION,
    ActKind.DEFEND: EdgeKind.DEFENSE,
    ActKind.VOTE: EdgeKind.VOTE_ALIGNMENT,
}


@dataclass(frozen=True)
class SocialAct:
    kind: ActKind
    src: int
    dst: Optional[int] = None
    role: Optional[Role] = None
    day: int = 0
    turn: int = 0

    def __post_init__(self):
        if self.kind is ActKind.CLAIM:
            if self.role is None:
                raise ValueError("ClaimRole needs a role")
        elif self.dst is None:
            raise ValueError(f"{self.kind.value} needs a target")
        elif self.kind is not ActKind.VOTE and self.src == self.dst:
            raise ValueError(f"{self.kind.value} cannot target the speaker")

    def at(self, day: int, turn: int) -> "SocialAct":
        return SocialAct(self.kind, self.src, self.dst, self.role, day, turn)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value, "src": self.src, "day": self.day, "turn": self.turn}
        if self.dst is not None:
            out["dst"] = self.dst
        if self.role is not None:
            out["role"] = self.role.value
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SocialAct":
        role = data.get("role")
        return cls(
            ActKind(data["kind"]),
            int(data["src"]),
            None if data.get("dst") is None else int(data["dst"]),
            None if role is None else Role(role),
            int(data.get("day", 0)),
            int(data.get("turn", 0)),
        )


def accuse(src: int, dst: int, day: int = 0, turn: int = 0) -> SocialAct:
    return SocialAct(ActKind.ACCUSE, src, dst, day=day, turn=turn)


def defend(src: int, dst: int, day: int = 0, turn: int = 0) -> SocialAct:
    return SocialAct(ActKind.DEFEND, src, dst, day=day, turn=turn)


def claim(src: int, role: Role, day: int = 0, turn: int = 0) -> SocialAct:
    return SocialAct(ActKind.CLAIM, src, role=Role(role), day=day, turn=turn)


def vote(src: int, dst: int, day: int = 0, turn: int = 0) -> SocialAct:
    return SocialAct(ActKind.VOTE, src, dst, day=day, turn=turn)


@dataclass(frozen=True)
class SagEdge:
    src: int
    dst: int
    kind: EdgeKind
    weight: float
    day: int
    turn: int

    def to_dict(self) -> dict[str, Any]:
        return {"src": self.src, "dst": self.dst, "kind": self.kind.value,
                "weight": self.weight, "day": self.day, "turn": self.turn}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SagEdge":
        return cls(int(data["src"]), int(data["dst"]), EdgeKind(data["kind"]),
                   float(data["weight"]), int(data["day"]), int(data["turn"]))
