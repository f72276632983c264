"""Dynamic Tone Selector: a first-match rule cascade over review and graph signals."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from ..engine.types import Alignment, Phase, Role
from ..memory.store import RevacMemory
from .review import Review


class Tone(str, Enum):
    AGGRESSIVE = "AggressivePressuring"
    WITHDRAWING = "WithdrawingPassive"
    ANCHORING = "LogicallyAnchoring"
    CONTRARIAN = "ContrarianSkeptical"


DIRECTIVES = {
    Tone.AGGRESSIVE: (
        "Address the suspect directly by name.",
        "Demand a full role claim and night action now.",
        "State plainly that they get your vote if they dodge.",
    ),
    Tone.WITHDRAWING: (
        "Lower the temperature; sound calm and a little overwhelmed.",
        "Present yourself as an ordinary player without special insight.",
        "Point attention at a different suspect instead of defending at length.",
    ),
    Tone.ANCHORING: (
        "Open with a reset and restate the single strongest confirmed fact.",
        "Rank the remaining claims as secondary to that fact.",
        "Close with a concrete vote proposal.",
    ),
    Tone.CONTRARIAN: (
        "Question whether the current consensus rests on any evidence.",
        "Ask who started the pressure and why.",
        "Invite the pressured player to answer before anyone hammers.",
    ),
}


@dataclass(frozen=True)
class ToneContext:
    owner: int
    phase: Phase
    is_lylo: bool
    own_alignment: Alignment


@dataclass(frozen=True)
class ToneProfile:
    tone: Tone
    directives: tuple[str, ...]
    rationale: str
    focus: Optional[int] = None
    lylo: bool = False


@dataclass(frozen=True)
class ToneSettings:
    pressure_threshold: float = 4.0
    defense_threshold: float = 1.0
    order: tuple[str, ...] = ("self_preservation", "confirmed_fact", "false_consensus", "pressure")


def is_lylo(living_mafia: int, living_village: int) -> bool:
    """One more mislynch would hand the Mafia parity."""
    return living_mafia < living_village and living_mafia >= living_village - 1


Rule = Callable[[Review, RevacMemory, ToneContext, ToneSettings], Optional[tuple[Tone, str, Optional[int]]]]


def _self_preservation(review, memory, ctx, settings):
    top2 = review.suspicion_order[:2]
    if ctx.owner in top2 and review.suspicion_scores.get(ctx.owner, 0.0) > 0:
        rank = top2.index(ctx.owner) + 1
        return Tone.WITHDRAWING, f"owner ranks #{rank} in suspicion; deflect", None
    return None


def _confirmed_fact(review, memory, ctx, settings):
    for fact in memory.confirmed_facts:
        if fact.alignment is Alignment.MAFIA and memory.graph.alive.get(fact.subject, False):
            return Tone.ANCHORING, f"confirmed fact: P{fact.subject} is Mafia (event #{fact.seq})", fact.subject
    return None


def _supported(pid: int, review: Review, memory: RevacMemory) -> bool:
    if any(f.subject == pid and f.alignment is Alignment.MAFIA for f in memory.confirmed_facts):
        return True
    return any(pid in rec.subjects for rec in review.contradictions)


def _false_consensus(review, memory, ctx, settings):
    graph = memory.graph
    for pid in graph.living():
        if pid == ctx.owner:
            continue
        pressure = graph.pressure_score(pid)
        if pressure.score > settings.pressure_threshold and not _supported(pid, review, memory):
            return (Tone.CONTRARIAN,
                    f"P{pid} under pressure {pressure.score:g} from {pressure.accusers} accusers with no evidence",
                    pid)
    return None


def _pressure(review, memory, ctx, settings):
    graph = memory.graph
    suspects = [p for p in review.suspicion_order if p != ctx.owner]
    if not suspects:
        return None
    top = suspects[0]
    pressure = graph.pressure_score(top).score
    defense = graph.defense_in_weight(top)
    if pressure > 0 and (defense < settings.defense_threshold or ctx.is_lylo):
        return Tone.AGGRESSIVE, f"P{top} pressured ({pressure:g}) and weakly defended ({defense:g})", top
    return None


RULES: dict[str, Rule] = {
    "self_preservation": _self_preservation,
    "confirmed_fact": _confirmed_fact,
    "false_consensus": _false_consensus,
    "pressure": _pressure,
}


def select_tone(
    review: Review,
    memory: RevacMemory,
    context: ToneContext,
    settings: ToneSettings = ToneSettings(),
) -> ToneProfile:
    for name in settings.order:
        hit = RULES[name](review, memory, context, settings)
        if hit is not None:
            tone, rationale, focus = hit
            return ToneProfile(tone, DIRECTIVES[tone], rationale, focus, context.is_lylo)
    suspects = [p for p in review.suspicion_order
                if p != context.owner and review.suspicion_scores.get(p, 0.0) > 0]
    return ToneProfile(Tone.ANCHORING, DIRECTIVES[Tone.ANCHORING], "no strong signal; summarise evidence",
                       suspects[0] if suspects else None, context.is_lylo)


def tone_context(obs, memory: RevacMemory) -> ToneContext:
    counts = obs.role_counts
    dead_mafia = sum(1 for r in obs.revealed_roles.values() if r is Role.MAFIA)
    living_mafia = counts.get(Role.MAFIA, 0) - dead_mafia
    living_village = len(obs.living_players) - living_mafia
    return ToneContext(obs.viewer, obs.phase, is_lylo(living_mafia, living_village), obs.viewer_role.alignment)
