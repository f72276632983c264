"""Final action executor: turns a review (and tone) into one legal action."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from ..engine.game import Observation
from ..engine.types import ROLE_ABILITY, Alignment, NightAction, NightActionKind, Role
from ..memory.store import RevacMemory
from .backend import Backend, GenerationParams, Segment, build_request, call_with_retries
from .review import Review, memory_lines, observation_lines, recommend, vote_target
from .tone import Tone, ToneProfile

MAX_SAY_CHARS = 600


@dataclass(frozen=True)
class Say:
    text: str


@dataclass(frozen=True)
class Vote:
    target: Optional[int]  # None abstains


@dataclass(frozen=True)
class Night:
    action: NightAction


AgentAction = Union[Say, Vote, Night]


def is_legal(obs: Observation, action: AgentAction) -> bool:
    phase = obs.phase
    if isinstance(action, Say):
        return phase.is_discussion and obs.viewer in obs.living_players and isinstance(action.text, str)
    if isinstance(action, Vote):
        return phase.is_voting and obs.viewer in obs.living_players and (
            action.target is None or action.target in obs.living_players)
    if isinstance(action, Night):
        return (phase.is_night and obs.viewer in obs.living_players
                and ROLE_ABILITY.get(obs.viewer_role) is action.action.kind
                and action.action.target in obs.living_players)
    return False


def default_action(obs: Observation) -> Optional[AgentAction]:
    """A legal fallback needing no review: silence, abstention, or a harmless night pick."""
    if obs.phase.is_discussion:
        return Say("")
    if obs.phase.is_voting:
        return Vote(None)
    kind = ROLE_ABILITY.get(obs.viewer_role)
    if obs.phase.is_night and kind is not None:
        others = sorted(p for p in obs.living_players if p != obs.viewer and p not in obs.partners)
        if kind is NightActionKind.PROTECT or not others:
            target = obs.viewer if kind is not NightActionKind.KILL else (others or [None])[0]
        else:
            target = others[0]
        if target is not None:
            return Night(NightAction(kind, target))
    return None


# -- rule-based speech -------------------------------------------------------


def _detective_report(memory: RevacMemory) -> list[str]:
    out = []
    for fact in memory.confirmed_facts:
        if fact.source == "investigation" and memory.graph.alive.get(fact.subject, False):
            ev = memory.events.get(fact.seq)
            night = f" on N{ev.day}" if ev is not None else ""
            verdict = "Mafia" if fact.alignment is Alignment.MAFIA else "town"
            out.append(f"I checked P{fact.subject}{night} and P{fact.subject} is {verdict}.")
    return out


def _speech_target(obs: Observation, review: Review, tone: Optional[ToneProfile]) -> Optional[int]:
    team = {obs.viewer, *obs.partners}
    if tone is not None and tone.focus is not None and tone.focus not in team:
        return tone.focus
    # only name someone the evidence actually points at
    suspects = [p for p in review.suspicion_order if p not in team and review.suspicion_scores.get(p, 0.0) > 0]
    return suspects[0] if suspects else None


def template_speech(obs: Observation, review: Review, memory: RevacMemory, tone: Optional[ToneProfile]) -> str:
    role = obs.viewer_role
    target = _speech_target(obs, review, tone)
    report = _detective_report(memory) if role is Role.DETECTIVE else []
    parts: list[str] = []
    if tone is None:
        if report:
            parts += ["I am the Detective."] + report
        if target is not None:
            parts.append(f"I think P{target} is suspicious.")
        return " ".join(parts)

    kind = tone.tone
    if kind is Tone.WITHDRAWING:
        parts.append("Okay, everyone calm down, I'm just trying to follow along.")
        if role in (Role.VILLAGER, Role.MAFIA):
            parts.append("I'm just a villager.")
        if target is not None:
            parts.append(f"Honestly P{target} looks more suspicious to me.")
    elif kind is Tone.ANCHORING:
        parts.append("Let's reset and stick to what we actually know.")
        if report:
            parts += ["I am the Detective."] + report
        elif review.contradictions:
            rec = review.contradictions[0]
            parts.append(f"The clearest inconsistency involves {' and '.join(f'P{p}' for p in rec.subjects)}.")
        if target is not None:
            parts.append(f"Everything else is secondary. I vote P{target} today.")
    elif kind is Tone.AGGRESSIVE:
        if target is not None:
            lylo = " We are at LyLo." if tone.lylo else ""
            parts.append(f"P{target}, nobody is vouching for you.{lylo}")
            parts.append(f"Claim your role and your night action now, or I accuse P{target}.")
        if report:
            parts += ["I am the Detective."] + report
    elif kind is Tone.CONTRARIAN:
        if target is not None:
            parts.append(f"Hold on, the pile-on against P{target} has no evidence behind it.")
            parts.append(f"P{target} is not mafia as far as anyone has shown.")
        parts.append("Who started this push, and why?")
    return " ".join(parts)


# -- backend-driven speech and votes ----------------------------------------

SAY_SYSTEM = (
    "You are playing Secret Mafia. Write your next chat message only: one short paragraph, "
    "in character, following the tone directives exactly. Refer to players as P<number>."
)
VOTE_SYSTEM = "You are playing Secret Mafia. Reply with exactly one line: VOTE: P<number>."

_VOTE = re.compile(r"(?:player\s*|p)(\d+)\b", re.IGNORECASE)


def _request(system: str, obs: Observation, review: Review, memory: Optional[RevacMemory],
             tone: Optional[ToneProfile], budget: int):
    facts = [f"You are P{obs.viewer} ({obs.viewer_role.value}), phase {obs.phase.label} day {obs.phase.day}."]
    if obs.partners:
        facts.append("Partners: " + ", ".join(f"P{p}" for p in sorted(obs.partners)))
    segs = [Segment("Facts", tuple(facts)), Segment("Review", (review.narrative,))]
    if memory is not None:
        segs.append(Segment("Memory", tuple(memory_lines(memory))))
    if tone is not None:
        segs.append(Segment(f"Tone: {tone.tone.value}", tone.directives))
    segs.append(Segment("Chat log", tuple(observation_lines(obs)), truncatable=True))
    return build_request(system, segs, budget, GenerationParams(max_tokens=256))


def execute_action(
    obs: Observation,
    review: Review,
    tone: Optional[ToneProfile],
    backend: Optional[Backend] = None,
    memory: Optional[RevacMemory] = None,
    retries: int = 2,
    retry_delay: float = 0.25,
    budget_chars: int = 12000,
) -> AgentAction:
    phase = obs.phase
    if phase.is_discussion:
        text = None
        if backend is not None:
            resp = call_with_retries(backend, _request(SAY_SYSTEM, obs, review, memory, tone, budget_chars),
                                     retries, retry_delay)
            if resp is not None and resp.text.strip():
                text = " ".join(resp.text.split())[:MAX_SAY_CHARS]
        if text is None:
            text = template_speech(obs, review, memory, tone) if memory is not None else ""
        return Say(text)

    if phase.is_voting:
        fallback = vote_target(obs, review)
        if backend is not None:
            resp = call_with_retries(backend, _request(VOTE_SYSTEM, obs, review, memory, None, budget_chars),
                                     retries, retry_delay)
            m = _VOTE.search(resp.text) if resp is not None else None
            if m is not None:
                choice = Vote(int(m.group(1)))
                if is_legal(obs, choice) and choice.target != obs.viewer:
                    return choice
        return Vote(fallback)

    if phase.is_night:
        kind = ROLE_ABILITY.get(obs.viewer_role)
        rec = review.recommended_action if memory is None else recommend(obs, memory, review)
        if kind is not None and rec is not None:
            action = Night(NightAction(kind, rec[0]))
            if is_legal(obs, action):
                return action
        fallback = default_action(obs)
        if fallback is not None:
            return fallback
    raise ValueError(f"no action available for P{obs.viewer} during {phase.label}")
