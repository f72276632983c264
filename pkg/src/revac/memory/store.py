"""RevacMemory: per-agent player profiles plus the social alignment graph."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Optional, Sequence

from ..engine.game import Observation
from ..engine.types import DEFAULT_ROLE_COUNTS, VILLAGE_ROLES, Alignment, Event, EventKind, NightActionKind, Role
from ..graph.acts import ActKind, SocialAct, vote
from ..graph.sag import SocialAlignmentGraph
from .extract import AbilityRef, act_summary, extract_ability_refs, extract_acts

DEFAULT_DIGEST_CAP = 8

ABILITY_ROLE = {NightActionKind.INVESTIGATE: Role.DETECTIVE, NightActionKind.PROTECT: Role.DOCTOR}


class SequencingError(ValueError):
    pass


class ContradictionKind(str, Enum):
    COUNTER_CLAIM = "CounterClaim"
    ROLE_ABILITY_MISMATCH = "RoleAbilityMismatch"
    SELF_CONTRADICTION = "SelfContradiction"
    IMPOSSIBLE_REFERENCE = "ImpossibleReference"


@dataclass(frozen=True)
class ContradictionRecord:
    kind: ContradictionKind
    subjects: tuple[int, ...]
    evidence: tuple[int, ...]
    day: int
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "subjects": list(self.subjects), "evidence": list(self.evidence),
                "day": self.day, "detail": self.detail}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ContradictionRecord":
        return cls(ContradictionKind(data["kind"]), tuple(data["subjects"]), tuple(data["evidence"]),
                   int(data["day"]), data.get("detail", ""))


@dataclass(frozen=True)
class Fact:
    """Something the owner knows for certain, with the event it came from."""

    subject: int
    alignment: Alignment
    role: Optional[Role]
    source: str
    seq: int

    def to_dict(self) -> dict[str, Any]:
        return {"subject": self.subject, "alignment": self.alignment.value,
                "role": self.role.value if self.role else None, "source": self.source, "seq": self.seq}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Fact":
        return cls(int(data["subject"]), Alignment(data["alignment"]),
                   Role(data["role"]) if data.get("role") else None, data["source"], int(data["seq"]))


@dataclass
class PlayerProfile:
    player: int
    digest_cap: int = DEFAULT_DIGEST_CAP
    claims: list = field(default_factory=list)          # (role, day, seq)
    votes_cast: list = field(default_factory=list)      # (target, day, seq)
    ability_refs: list = field(default_factory=list)    # (AbilityRef, day, seq)
    statement_digest: deque = field(default=None)
    silences: int = 0
    consistency_flags: list = field(default_factory=list)
    last_updated: tuple = (-1, -1)

    def __post_init__(self):
        if self.statement_digest is None:
            self.statement_digest = deque(maxlen=self.digest_cap)

    def latest_claim(self, before_seq: Optional[int] = None) -> Optional[tuple[Role, int, int]]:
        for entry in reversed(self.claims):
            if before_seq is None or entry[2] <= before_seq:
                return entry
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "player": self.player,
            "claims": [[r.value, d, s] for r, d, s in self.claims],
            "votes_cast": [list(v) for v in self.votes_cast],
            "ability_refs": [[ref.ability.value, ref.target, ref.night, d, s] for ref, d, s in self.ability_refs],
            "statement_digest": list(self.statement_digest),
            "silences": self.silences,
            "consistency_flags": [c.to_dict() for c in self.consistency_flags],
            "last_updated": list(self.last_updated),
        }


class RevacMemory:
    def __init__(
        self,
        owner: int,
        roster: Iterable[int],
        role_counts: Optional[Mapping[Role, int]] = None,
        digest_cap: int = DEFAULT_DIGEST_CAP,
    ):
        self.owner = owner
        self.roster = tuple(sorted(roster))
        self.role_counts = {Role(r): int(c) for r, c in (role_counts or DEFAULT_ROLE_COUNTS).items()}
        self.digest_cap = digest_cap
        self.profiles = {p: PlayerProfile(p, digest_cap) for p in self.roster}
        self.graph = SocialAlignmentGraph(self.roster)
        self.confirmed_facts: list[Fact] = []
        self.deaths: dict[int, tuple[int, int]] = {}
        self.events: dict[int, Event] = {}
        self.last_seq = -1
        self.last_updated = (-1, -1)
        self.no_kill_nights: list[int] = []

    @classmethod
    def for_observation(cls, obs: Observation, digest_cap: int = DEFAULT_DIGEST_CAP) -> "RevacMemory":
        return cls(obs.viewer, obs.roster, obs.role_counts, digest_cap)

    def unique_roles(self) -> set[Role]:
        return {r for r in VILLAGE_ROLES if self.role_counts.get(r, 0) == 1}

    def alive(self, pid: int) -> bool:
        return self.graph.alive[pid]

    # -- ingest -----------------------------------------------------------

    def update(self, new_events: Sequence[Event]) -> "RevacMemory":
        last = self.last_seq
        for ev in new_events:
            if ev.seq <= last:
                raise SequencingError(f"event {ev.seq} does not follow {last}")
            last = ev.seq
        touched = False
        for ev in new_events:
            touched |= self._ingest(ev)
            self.events[ev.seq] = ev
            self.last_seq = ev.seq
            self.last_updated = (ev.day, ev.seq)
        if touched:
            flags = detect_contradictions(self)
            for profile in self.profiles.values():
                profile.consistency_flags = [r for r in flags if profile.player in r.subjects]
        return self

    def _ingest(self, ev: Event) -> bool:
        p = ev.payload
        if ev.kind is EventKind.STATEMENT_MADE:
            speaker = p["speaker"]
            text = p.get("text", "")
            if "acts" in p:
                acts = [SocialAct.from_dict(a) for a in p["acts"]]
            else:
                acts = extract_acts(text, self.roster, speaker)
            profile = self.profiles[speaker]
            for act in acts:
                act = act.at(ev.day, ev.seq)
                self.graph.record_act(act)
                if act.kind is ActKind.CLAIM:
                    profile.claims.append((act.role, ev.day, ev.seq))
            for ref in extract_ability_refs(text, self.roster, speaker, ev.day):
                profile.ability_refs.append((ref, ev.day, ev.seq))
            if not text.strip():
                profile.silences += 1
                summary = "silent"
            else:
                summary = act_summary(acts) or _clip(text)
            profile.statement_digest.append(f"D{ev.day}#{ev.seq}: {summary}")
            profile.last_updated = (ev.day, ev.seq)
            return True
        if ev.kind is EventKind.VOTE_CAST:
            voter, target = p["voter"], p["target"]
            self.graph.record_act(vote(voter, target, ev.day, ev.seq))
            profile = self.profiles[voter]
            profile.votes_cast.append((target, ev.day, ev.seq))
            profile.last_updated = (ev.day, ev.seq)
            return False
        if ev.kind is EventKind.PLAYER_ELIMINATED:
            pid = p["player"]
            self.graph.mark_dead(pid)
            self.deaths[pid] = (ev.day, ev.seq)
            role = Role(p["revealed_role"])
            self.confirmed_facts.append(Fact(pid, role.alignment, role, "reveal", ev.seq))
            return True
        if ev.kind is EventKind.INVESTIGATION_RESULT and p["detective"] == self.owner:
            self.confirmed_facts.append(Fact(p["target"], Alignment(p["alignment"]), None, "investigation", ev.seq))
        elif ev.kind is EventKind.NIGHT_RESOLVED and p.get("death") is None:
            self.no_kill_nights.append(ev.day)
        return False

    # -- queries ----------------------------------------------------------

    def known_alignment(self, pid: int) -> Optional[Alignment]:
        for fact in reversed(self.confirmed_facts):
            if fact.subject == pid:
                return fact.alignment
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "owner": self.owner,
            "roster": list(self.roster),
            "role_counts": {r.value: c for r, c in self.role_counts.items()},
            "profiles": {str(p): prof.to_dict() for p, prof in self.profiles.items()},
            "graph": self.graph.to_dict(),
            "confirmed_facts": [f.to_dict() for f in self.confirmed_facts],
            "deaths": {str(p): list(v) for p, v in self.deaths.items()},
            "no_kill_nights": list(self.no_kill_nights),
            "last_seq": self.last_seq,
        }


def _clip(text: str, width: int = 80) -> str:
    text = " ".join(text.split())
    return text if len(text) <= width else text[: width - 3] + "..."


def update_memory(memory: RevacMemory, new_events: Sequence[Event]) -> RevacMemory:
    return memory.update(new_events)


def detect_contradictions(memory: RevacMemory) -> list[ContradictionRecord]:
    found: set[ContradictionRecord] = set()
    unique = memory.unique_roles()

    claimants: dict[Role, list[tuple[int, int, int]]] = {}
    for pid, prof in memory.profiles.items():
        latest = prof.latest_claim()
        if latest is not None and memory.alive(pid) and latest[0] in unique:
            claimants.setdefault(latest[0], []).append((pid, latest[1], latest[2]))
        for prev, cur in zip(prof.claims, prof.claims[1:]):
            if prev[0] is not cur[0]:
                found.add(ContradictionRecord(ContradictionKind.SELF_CONTRADICTION, (pid,),
                                              (prev[2], cur[2]), cur[1], f"{prev[0].value}->{cur[0].value}"))
        for ref, day, seq in prof.ability_refs:
            claimed = prof.latest_claim(before_seq=seq)
            needed = ABILITY_ROLE[ref.ability]
            if claimed is not None and claimed[0] is not needed:
                found.add(ContradictionRecord(ContradictionKind.ROLE_ABILITY_MISMATCH, (pid,),
                                              tuple(sorted({claimed[2], seq})), day,
                                              f"{claimed[0].value} cannot {ref.ability.value}"))
            death = memory.deaths.get(ref.target)
            if death is not None and ref.night is not None and death[0] < ref.night:
                found.add(ContradictionRecord(ContradictionKind.IMPOSSIBLE_REFERENCE, (pid,),
                                              (death[1], seq), day,
                                              f"{ref.ability.value} P{ref.target} on N{ref.night}"))
    for role, entries in claimants.items():
        if len(entries) > 1:
            entries.sort()
            found.add(ContradictionRecord(ContradictionKind.COUNTER_CLAIM, tuple(e[0] for e in entries),
                                          tuple(e[2] for e in entries), max(e[1] for e in entries), role.value))
    return sorted(found, key=lambda r: (min(r.evidence), r.kind.value, r.subjects, r.evidence))


def _claims_in(ev: Event) -> set[Role]:
    return {Role(a["role"]) for a in ev.payload.get("acts", ()) if a["kind"] == ActKind.CLAIM.value}


def validate_contradiction(record: ContradictionRecord, events: Mapping[int, Event], roster: Iterable[int]) -> bool:
    """Independently re-read the evidence and check that it supports ``record``."""
    try:
        evs = [events[s] for s in record.evidence]
    except KeyError:
        return False
    if not evs:
        return False
    statements = [e for e in evs if e.kind is EventKind.STATEMENT_MADE]
    kind = record.kind
    if kind is ContradictionKind.COUNTER_CLAIM:
        if len(statements) != len(evs) or len(record.subjects) < 2:
            return False
        if sorted(e.payload["speaker"] for e in statements) != sorted(record.subjects):
            return False
        shared = set.intersection(*(_claims_in(e) for e in statements))
        return bool(shared & set(VILLAGE_ROLES))
    (subject,) = record.subjects
    if kind is ContradictionKind.SELF_CONTRADICTION:
        if len(statements) != 2 or any(e.payload["speaker"] != subject for e in statements):
            return False
        first, second = (_claims_in(e) for e in statements)
        return bool(first) and bool(second) and any(a is not b for a in first for b in second)
    if kind is ContradictionKind.ROLE_ABILITY_MISMATCH:
        if len(statements) != len(evs) or any(e.payload["speaker"] != subject for e in statements):
            return False
        claimed = set().union(*(_claims_in(e) for e in statements))
        refs = [r for e in statements for r in extract_ability_refs(e.payload["text"], roster, subject, e.day)]
        return any(ABILITY_ROLE[r.ability] is not c for r in refs for c in claimed)
    if kind is ContradictionKind.IMPOSSIBLE_REFERENCE:
        deaths = [e for e in evs if e.kind is EventKind.PLAYER_ELIMINATED]
        if len(deaths) != 1 or len(statements) != 1 or statements[0].payload["speaker"] != subject:
            return False
        dead, died_on = deaths[0].payload["player"], deaths[0].day
        st = statements[0]
        refs = extract_ability_refs(st.payload["text"], roster, subject, st.day)
        return deaths[0].seq < st.seq and any(r.target == dead and r.night > died_on for r in refs)
    return False
