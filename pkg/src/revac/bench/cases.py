"""Benchmark cases: a compact event script replayed through the engine, plus ground truth."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

from ..engine.game import (
    GameState,
    Observation,
    cast_vote,
    new_game,
    observation_for,
    record_statement,
    resolve_night,
    start_voting,
    submit_night_action,
    tally_votes,
)
from ..engine.types import EventKind, GameConfig, GameError, NightAction, NightActionKind, Role
from ..memory.extract import extract_acts

TAGS = frozenset({"conflicting-claims", "hallucination", "no-kill-night", "strategic-deception"})
REQUIRED = ("id", "roster", "viewer", "events", "ground_truth", "explanation", "tags")


class CaseError(ValueError):
    """A case file failed schema or engine validation."""

    def __init__(self, case_id: str, field_name: str, problem: str):
        super().__init__(f"case {case_id!r}, field {field_name!r}: {problem}")
        self.case_id = case_id
        self.field = field_name


@dataclass
class BenchmarkCase:
    id: str
    roster: list[int]
    viewer: int
    config: GameConfig
    ground_truth: dict[int, Role]
    explanation: str
    tags: frozenset
    script: list[dict]
    private_facts: list[dict] = field(default_factory=list)
    state: Optional[GameState] = None

    @property
    def observation(self) -> Observation:
        if self.state is None:
            self.state = replay_script(self)
        return observation_for(self.state, self.viewer)

    def visible_seqs(self) -> set[int]:
        return {e.seq for e in self.observation.events()}


def _night(state: GameState, spec: dict, case_id: str, step: int) -> None:
    where = f"events[{step}].night"
    unknown = set(spec) - {"kill", "protect", "investigate", "killer"}
    if unknown:
        raise CaseError(case_id, where, f"unknown keys {sorted(unknown)}")
    mafia = state.living_with(Role.MAFIA)
    plan = []
    if spec.get("kill") is not None:
        plan.append((spec.get("killer", mafia[0] if mafia else -1), NightActionKind.KILL, spec["kill"]))
    for key, role, kind in (("protect", Role.DOCTOR, NightActionKind.PROTECT),
                            ("investigate", Role.DETECTIVE, NightActionKind.INVESTIGATE)):
        if spec.get(key) is not None:
            actors = state.living_with(role)
            if not actors:
                raise CaseError(case_id, f"{where}.{key}", f"no living {role.value}")
            plan.append((actors[0], kind, spec[key]))
    for actor, kind, target in plan:
        submit_night_action(state, int(actor), NightAction(kind, int(target)))
    resolve_night(state)


def replay_script(case: BenchmarkCase) -> GameState:
    roles = [case.ground_truth[p] for p in case.roster]
    try:
        state = new_game(case.config, roles)
    except GameError as exc:
        raise CaseError(case.id, "ground_truth", str(exc)) from None
    for step, item in enumerate(case.script):
        try:
            if "night" in item:
                _night(state, item["night"], case.id, step)
            elif "say" in item:
                speaker, text = item["say"]
                record_statement(state, speaker, text, extract_acts(text, case.roster, speaker))
            elif "vote" in item:
                if state.phase.is_discussion:
                    start_voting(state)
                for voter, target in item["vote"].items():
                    cast_vote(state, int(voter), int(target))
                if item.get("tally", True):
                    tally_votes(state)
            else:
                raise CaseError(case.id, f"events[{step}]", f"unknown step {sorted(item)}")
        except GameError as exc:
            raise CaseError(case.id, f"events[{step}]", f"engine rejected step: {exc}") from None
        except (TypeError, ValueError, KeyError) as exc:
            if isinstance(exc, CaseError):
                raise
            raise CaseError(case.id, f"events[{step}]", f"malformed step: {exc!r}") from None
    return state


def _check_private_facts(case: BenchmarkCase) -> None:
    obs = observation_for(case.state, case.viewer)
    for i, fact in enumerate(case.private_facts):
        where = f"private_facts[{i}]"
        kind = fact.get("kind")
        if kind == "partners":
            if set(fact.get("players", ())) != set(obs.partners):
                raise CaseError(case.id, where, f"partners {fact.get('players')} but engine says {sorted(obs.partners)}")
            continue
        try:
            ek = EventKind(kind)
        except ValueError:
            raise CaseError(case.id, where, f"unknown fact kind {kind!r}") from None
        wanted = {k: v for k, v in fact.items() if k != "kind"}
        if not any(e.kind is ek and all(e.payload.get(k) == v for k, v in wanted.items())
                   for e in obs.private_events):
            raise CaseError(case.id, where, f"{fact} is not among the viewer's private events")


def _check_involvement(case: BenchmarkCase) -> None:
    seen: set[int] = set()
    for ev in observation_for(case.state, case.viewer).events():
        seen.update(ev.participants())
    for pid, role in case.ground_truth.items():
        if role is Role.MAFIA and pid not in seen and pid != case.viewer:
            raise CaseError(case.id, "events", f"Mafia P{pid} never appears in the viewer's events")


def parse_case(data: dict[str, Any], source: str = "<memory>") -> BenchmarkCase:
    case_id = str(data.get("id", source))
    for name in REQUIRED:
        if name not in data:
            raise CaseError(case_id, name, "missing")
    roster_raw = data["roster"]
    roster = list(range(roster_raw)) if isinstance(roster_raw, int) else [int(p) for p in roster_raw]
    if roster != list(range(len(roster))):
        raise CaseError(case_id, "roster", "players must be numbered 0..n-1")
    truth_raw = data["ground_truth"]
    if not isinstance(truth_raw, dict):
        raise CaseError(case_id, "ground_truth", "must map player id to role")
    truth = {}
    for pid in roster:
        role = truth_raw.get(str(pid), truth_raw.get(pid))
        if role is None:
            raise CaseError(case_id, f"ground_truth.{pid}", "missing entry")
        try:
            truth[pid] = Role(role)
        except ValueError:
            raise CaseError(case_id, f"ground_truth.{pid}", f"unknown role {role!r}") from None
    extra = set(map(str, truth_raw)) - set(map(str, roster))
    if extra:
        raise CaseError(case_id, "ground_truth", f"players outside the roster: {sorted(extra)}")
    viewer = data["viewer"]
    if viewer not in roster:
        raise CaseError(case_id, "viewer", f"P{viewer} is not in the roster")
    tags = frozenset(data["tags"])
    if not tags or not tags <= TAGS:
        raise CaseError(case_id, "tags", f"tags must be a non-empty subset of {sorted(TAGS)}")
    counts: dict[Role, int] = {}
    for role in truth.values():
        counts[role] = counts.get(role, 0) + 1
    cfg = data.get("config", {})
    config = GameConfig(len(roster), counts, int(cfg.get("discussion_rounds_per_day", 2)),
                        int(cfg.get("max_days", 10)), 0)
    if not isinstance(data["events"], list):
        raise CaseError(case_id, "events", "must be a list of steps")
    if not isinstance(data["explanation"], str) or not data["explanation"].strip():
        raise CaseError(case_id, "explanation", "must be non-empty text")
    case = BenchmarkCase(case_id, roster, viewer, config, truth, data["explanation"], tags,
                         list(data["events"]), list(data.get("private_facts", [])))
    case.state = replay_script(case)
    if case.state.phase.is_ended:
        raise CaseError(case_id, "events", "the game is already over at the observation point")
    _check_private_facts(case)
    _check_involvement(case)
    return case


def bundled_dir() -> Path:
    return Path(str(resources.files("revac.bench") / "data"))


def load_cases(path: Union[str, Path, None] = None) -> list[BenchmarkCase]:
    """Load every ``*.json`` case under ``path`` (a file or directory), ordered by id."""
    root = Path(path) if path is not None else bundled_dir()
    files = [root] if root.is_file() else sorted(root.glob("*.json"))
    cases = []
    for f in files:
        try:
            data = json.loads(f.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CaseError(f.stem, "<file>", f"invalid JSON: {exc}") from None
        cases.append(parse_case(data, f.stem))
    ids = [c.id for c in cases]
    if len(set(ids)) != len(ids):
        raise CaseError("<suite>", "id", "duplicate case ids")
    return sorted(cases, key=lambda c: c.id)
