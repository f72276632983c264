"""JSONL transcripts: a header line, then one line per event.  Replay re-executes inputs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from ..engine.game import apply_input_event, assign_roles, new_game
from ..engine.types import INPUT_EVENTS, Alignment, Event, GameError, Role
from .match import MatchConfig, MatchResult

FORMAT = "revac-transcript/1"


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class Transcript:
    match: MatchConfig
    roles: list[Role]
    winner: Optional[Alignment]
    events: list[Event]
    checkpoints: dict[int, str] = field(default_factory=dict)
    repairs: list[dict] = field(default_factory=list)
    agents: list[str] = field(default_factory=list)

    @classmethod
    def from_result(cls, result: MatchResult) -> "Transcript":
        return cls(result.config, list(result.roles), result.winner, list(result.state.events),
                   dict(result.checkpoints), list(result.repairs), list(result.config.seats))

    def header(self) -> dict[str, Any]:
        return {
            "format": FORMAT,
            "match": self.match.to_dict(),
            "roles": [r.value for r in self.roles],
            "winner": self.winner.value if self.winner else None,
            "checkpoints": {str(k): v for k, v in sorted(self.checkpoints.items())},
            "repairs": self.repairs,
        }

    def dumps(self) -> str:
        lines = [_dump(self.header())] + [_dump(e.to_record()) for e in self.events]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Transcript":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty transcript")
        head = json.loads(lines[0])
        if head.get("format") != FORMAT:
            raise ValueError(f"not a transcript (format {head.get('format')!r})")
        match = MatchConfig.from_dict(head["match"])
        winner = Alignment(head["winner"]) if head.get("winner") else None
        events = [Event.from_record(json.loads(ln)) for ln in lines[1:]]
        checkpoints = {int(k): v for k, v in head.get("checkpoints", {}).items()}
        return cls(match, [Role(r) for r in head["roles"]], winner, events, checkpoints,
                   head.get("repairs", []), list(match.seats))

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(), encoding="utf-8")
        return path

    @classmethod
    def read(cls, path: Union[str, Path]) -> "Transcript":
        return cls.loads(Path(path).read_text(encoding="utf-8"))


@dataclass
class Divergence:
    seq: int
    what: str

    def __str__(self) -> str:
        return f"seq {self.seq}: {self.what}"


@dataclass
class ReplayReport:
    checked: int = 0
    divergences: list[Divergence] = field(default_factory=list)
    winner: Optional[Alignment] = None

    @property
    def ok(self) -> bool:
        return not self.divergences

    def summary(self) -> str:
        if self.ok:
            return f"OK: {self.checked} checkpoints match, winner {self.winner.value if self.winner else None}"
        return "\n".join(["DIVERGED:"] + [f"  {d}" for d in self.divergences])


def replay(transcript: Union[Transcript, str, Path], stop_at_first: bool = False) -> ReplayReport:
    """Re-execute the input events and compare every derived event, checkpoint and the result."""
    t = transcript if isinstance(transcript, Transcript) else Transcript.read(transcript)
    report = ReplayReport()
    game = t.match.game.with_seed(t.match.seed)
    try:
        state = new_game(game, t.roles)
    except GameError as exc:
        report.divergences.append(Divergence(0, f"cannot start game: {exc}"))
        return report
    if assign_roles(game) != list(t.roles):
        report.divergences.append(Divergence(0, "recorded roles differ from the seeded deal"))

    def compare(start: int) -> bool:
        produced = state.events[start:]
        recorded = t.events[start:start + len(produced)]
        for mine, theirs in zip(produced, recorded):
            if _dump(mine.to_record()) != _dump(theirs.to_record()):
                report.divergences.append(Divergence(mine.seq, f"expected {theirs.kind.value} "
                                                     f"{_dump(theirs.payload)}, replay gave {mine.kind.value} "
                                                     f"{_dump(mine.payload)}"))
                return False
        if len(recorded) < len(produced):
            report.divergences.append(Divergence(state.events[start + len(recorded)].seq,
                                                 "replay produced events missing from the transcript"))
            return False
        expected = t.checkpoints.get(len(state.events))
        if expected is not None:
            report.checked += 1
            if expected != state.digest():
                report.divergences.append(Divergence(len(state.events) - 1, "state checkpoint mismatch"))
                return False
        return True

    compare(0)
    while len(state.events) < len(t.events) and (report.ok or not stop_at_first):
        start = len(state.events)
        ev = t.events[start]
        if ev.seq != start:
            report.divergences.append(Divergence(start, f"sequence gap: found seq {ev.seq}"))
            break
        if ev.kind not in INPUT_EVENTS:
            report.divergences.append(Divergence(start, f"{ev.kind.value} recorded but not derivable here"))
            break
        try:
            apply_input_event(state, ev)
        except (GameError, KeyError, ValueError) as exc:
            report.divergences.append(Divergence(start, f"engine rejected {ev.kind.value}: {exc}"))
            break
        if not compare(start) and stop_at_first:
            break
    report.winner = state.winner
    if report.ok and len(state.events) != len(t.events):
        report.divergences.append(Divergence(len(state.events), "transcript ended early"))
    if state.winner != t.winner:
        report.divergences.append(Divergence(len(state.events) - 1, f"winner {state.winner} != recorded {t.winner}"))
    return report
