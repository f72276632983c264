"""Reviewer stage: turn an observation plus memory into role probabilities,
contradictions, a suspicion order and a cited narrative."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

from ..engine.game import Observation
from ..engine.types import VILLAGE_ROLES, Alignment, EventKind, Role
from ..graph.acts import EdgeKind
from ..memory.store import ContradictionKind, ContradictionRecord, RevacMemory, detect_contradictions
from .backend import Backend, GenerationParams, Segment, build_request, call_with_retries

PROB_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ReviewSettings:
    temperature: float = 1.0
    claim_boost: float = 3.0
    collusion_threshold: float = 2.0
    collusion_weight: float = 1.0
    contradiction_weight: float = 0.5
    claimed_check_weight: float = 1.5
    association_weight: float = 1.0
    silence_weight: float = 0.25
    false_claim_weight: float = 2.0
    budget_chars: int = 12000


@dataclass
class Review:
    role_probabilities: dict[int, dict[Role, float]]
    contradictions: list[ContradictionRecord]
    suspicion_order: list[int]
    suspicion_scores: dict[int, float]
    recommended_action: Optional[tuple[int, str]]
    narrative: str
    source: str = "rule"

    def mafia_probability(self, pid: int) -> float:
        return self.role_probabilities[pid].get(Role.MAFIA, 0.0)

    def predicted_roles(self) -> dict[int, Role]:
        """Per-player argmax; ties resolve in role declaration order."""
        out = {}
        for pid, dist in self.role_probabilities.items():
            best = max(dist.get(r, 0.0) for r in Role)
            out[pid] = next(r for r in Role if dist.get(r, 0.0) == best)
        return out

    def check(self) -> None:
        for pid, dist in self.role_probabilities.items():
            if any(not 0.0 <= v <= 1.0 for v in dist.values()):
                raise ValueError(f"probability out of range for P{pid}")
            if abs(sum(dist.values()) - 1.0) > PROB_TOLERANCE:
                raise ValueError(f"probabilities for P{pid} sum to {sum(dist.values())}")


@dataclass
class Knowledge:
    """Role facts the owner is certain of, and what is left to distribute."""

    known: dict[int, Role] = field(default_factory=dict)
    cleared: set[int] = field(default_factory=set)
    remaining: dict[Role, int] = field(default_factory=dict)
    unknown: list[int] = field(default_factory=list)


def knowledge_for(obs: Observation, memory: RevacMemory) -> Knowledge:
    k = Knowledge()
    k.known[obs.viewer] = obs.viewer_role
    for pid, role in obs.revealed_roles.items():
        k.known[pid] = role
    for fact in memory.confirmed_facts:
        if fact.role is not None:
            k.known[fact.subject] = fact.role
    for pid in obs.partners:
        k.known[pid] = Role.MAFIA
    for fact in memory.confirmed_facts:
        if fact.role is None and fact.subject not in k.known:
            if fact.alignment is Alignment.MAFIA:
                k.known[fact.subject] = Role.MAFIA
            else:
                k.cleared.add(fact.subject)
    k.remaining = dict(obs.role_counts)
    for role in k.known.values():
        k.remaining[role] = max(0, k.remaining.get(role, 0) - 1)
    k.unknown = [p for p in obs.roster if p not in k.known]
    return k


def credible_claimants(role: Role, memory: RevacMemory, know: Knowledge, contradictions) -> list[int]:
    """Living claimants of ``role`` not already disproven by known roles or their own inconsistencies."""
    graph = memory.graph
    discredited = {p for rec in contradictions if rec.kind is not ContradictionKind.COUNTER_CLAIM
                   for p in rec.subjects}
    out = []
    for pid in graph.living():
        if graph.latest_claim(pid) is not role or pid in discredited:
            continue
        if pid in know.known and know.known[pid] is not role:
            continue
        out.append(pid)
    return out


def adjusted_suspicion(obs: Observation, memory: RevacMemory, contradictions, settings: ReviewSettings,
                       know: Optional[Knowledge] = None):
    """Graph suspicion plus collusion, contradiction, claimed-check and silence signals."""
    graph = memory.graph
    owner = obs.viewer
    know = know or knowledge_for(obs, memory)
    scores = graph.suspicion_scores(viewer=owner)
    # testimony from a known Mafia member points the other way
    for e in graph.edges:
        if e.src != owner and know.known.get(e.src) is Role.MAFIA:
            scores[e.dst] += 2 * e.weight
    for (a, b), mutual in graph.collusion_pairs(settings.collusion_threshold):
        if owner in (a, b):
            continue
        # defense from a colluding partner buys no credit
        scores[a] += graph.positive_weight(b, a) + settings.collusion_weight * mutual
        scores[b] += graph.positive_weight(a, b) + settings.collusion_weight * mutual
    for rec in contradictions:
        for pid in rec.subjects:
            scores[pid] += settings.contradiction_weight
    # a claim to the owner's own unique role is a lie the owner can see
    if obs.viewer_role in (Role.DETECTIVE, Role.DOCTOR) and obs.role_counts.get(obs.viewer_role, 0) == 1:
        for pid in graph.living():
            if pid != owner and graph.latest_claim(pid) is obs.viewer_role:
                scores[pid] += settings.false_claim_weight

    checkers = credible_claimants(Role.DETECTIVE, memory, know, contradictions)
    if len(checkers) == 1 and checkers[0] != owner:
        checker = checkers[0]
        implicated = {e.dst for e in graph.edges if e.src == checker and e.kind is EdgeKind.ACCUSATION}
        for pid in implicated:
            scores[pid] += settings.claimed_check_weight
        for e in graph.edges:
            if e.src in (owner, checker):
                continue
            if e.kind is EdgeKind.DEFENSE and e.dst in implicated:
                scores[e.src] += settings.association_weight
            elif e.dst == checker and e.weight < 0:
                # attacking the lone credible investigator: their word outweighs the attack
                scores[checker] += e.weight
                scores[e.src] += settings.association_weight
    for pid, prof in memory.profiles.items():
        scores[pid] += settings.silence_weight * prof.silences
    return scores


def _waterfill(total: float, weights: Mapping[int, float]) -> dict[int, float]:
    """Split ``total`` mass proportionally to weights with each share capped at 1."""
    out = {pid: 0.0 for pid in weights}
    free = dict(weights)
    remaining = float(total)
    while free and remaining > 0:
        norm = sum(free.values())
        capped = [p for p, w in free.items() if remaining * w / norm >= 1.0]
        if not capped:
            for p, w in free.items():
                out[p] = remaining * w / norm
            break
        for p in capped:
            out[p] = 1.0
            remaining -= 1.0
            del free[p]
    return out


def rule_review(obs: Observation, memory: RevacMemory, settings: ReviewSettings = ReviewSettings()) -> Review:
    know = knowledge_for(obs, memory)
    contradictions = detect_contradictions(memory)
    scores = adjusted_suspicion(obs, memory, contradictions, settings, know)

    candidates = [p for p in know.unknown if p not in know.cleared]
    if candidates:
        top = max(scores[p] for p in candidates)
        weights = {p: math.exp((scores[p] - top) / settings.temperature) for p in candidates}
    else:
        weights = {}
    mafia_mass = _waterfill(know.remaining.get(Role.MAFIA, 0), weights)

    probs: dict[int, dict[Role, float]] = {}
    for pid in obs.roster:
        if pid in know.known:
            probs[pid] = {r: float(r is know.known[pid]) for r in Role}
            continue
        p_mafia = mafia_mass.get(pid, 0.0)
        claimed = memory.graph.latest_claim(pid)
        vw = {r: know.remaining.get(r, 0) * (settings.claim_boost if r is claimed else 1.0) for r in VILLAGE_ROLES}
        norm = sum(vw.values())
        if norm <= 0:
            probs[pid] = {r: float(r is Role.MAFIA) for r in Role}
            continue
        dist = {r: (1.0 - p_mafia) * w / norm for r, w in vw.items()}
        dist[Role.MAFIA] = p_mafia
        probs[pid] = {r: dist[r] for r in Role}

    living = sorted(obs.living_players)
    order = sorted(living, key=lambda p: (-scores[p], p))
    review = Review(probs, contradictions, order, {p: scores[p] for p in obs.roster}, None, "")
    review.recommended_action = recommend(obs, memory, review)
    review.narrative = compose_narrative(obs, memory, review)
    return review


# -- action recommendation ---------------------------------------------------


def _team(obs: Observation) -> set[int]:
    return {obs.viewer, *obs.partners} if obs.viewer_role is Role.MAFIA else {obs.viewer}


def vote_target(obs: Observation, review: Review) -> Optional[int]:
    """Most likely Mafia among living non-team players; ties by suspicion order then id."""
    team = _team(obs)
    rank = {p: i for i, p in enumerate(review.suspicion_order)}
    options = [p for p in obs.living_players if p not in team]
    if not options:
        return None
    return min(options, key=lambda p: (-review.mafia_probability(p), rank.get(p, len(rank)), p))


def recommend(obs: Observation, memory: RevacMemory, review: Review) -> Optional[tuple[int, str]]:
    phase = obs.phase
    graph = memory.graph
    living = sorted(obs.living_players)
    team = _team(obs)
    if phase.is_voting:
        target = vote_target(obs, review)
        return None if target is None else (target, "vote")
    if phase.is_night:
        role = obs.viewer_role
        if role is Role.MAFIA:
            options = [p for p in living if p not in team]
            claim_rank = {Role.DETECTIVE: 0, Role.DOCTOR: 1}

            def threat(p: int) -> float:
                return -sum(graph.net_weight(p, m) for m in team)

            key = lambda p: (claim_rank.get(graph.latest_claim(p), 2), review.mafia_probability(p), -threat(p), p)
            return (min(options, key=key), "kill") if options else None
        if role is Role.DOCTOR:
            power = [p for p in living if p != obs.viewer and graph.latest_claim(p) is Role.DETECTIVE]
            power += [f.subject for f in memory.confirmed_facts
                      if f.source == "investigation" and f.alignment is Alignment.VILLAGE and f.subject in living]
            if power:
                target = min(set(power), key=lambda p: (review.mafia_probability(p),
                                                        -graph.pressure_score(p).score, p))
                return target, "protect"
            return obs.viewer, "protect"
        if role is Role.DETECTIVE:
            checked = {f.subject for f in memory.confirmed_facts if f.source == "investigation"}
            options = [p for p in living if p != obs.viewer and p not in checked]
            options = options or [p for p in living if p != obs.viewer]
            rank = {p: i for i, p in enumerate(review.suspicion_order)}
            return (min(options, key=lambda p: (-review.mafia_probability(p), rank.get(p, 99), p)),
                    "investigate") if options else None
        return None
    suspects = [p for p in review.suspicion_order if p not in team]
    return (suspects[0], "accuse") if suspects else None


# -- narrative ---------------------------------------------------------------


def _cite(seqs) -> str:
    return "[" + ", ".join(f"#{s}" for s in sorted(set(seqs))) + "]"


def likely_mafia(review: Review, known_team: set[int] = frozenset()) -> list[int]:
    predicted = review.predicted_roles()
    return sorted(p for p, r in predicted.items() if r is Role.MAFIA and p not in known_team)


def evidence_for(memory: RevacMemory, pid: int, limit: int = 2) -> list[int]:
    """Event seqs that bear on ``pid``: pressure against them first, then their own statements."""
    seqs = [e.turn for e in memory.graph.edges_into(pid) if e.weight < 0]
    if len(seqs) < limit:
        seqs += [s for s, ev in sorted(memory.events.items())
                 if ev.kind is EventKind.STATEMENT_MADE and ev.payload.get("speaker") == pid]
    if len(seqs) < limit:
        seqs += [s for s, ev in sorted(memory.events.items()) if pid in ev.participants()]
    out: list[int] = []
    for s in seqs:
        if s not in out:
            out.append(s)
    return out[:limit]


def _contradiction_sentence(rec: ContradictionRecord) -> str:
    who = " and ".join(f"P{p}" for p in rec.subjects)
    return f"Contradiction ({rec.kind.value}): {who}, {rec.detail} {_cite(rec.evidence)}."


def compose_narrative(obs: Observation, memory: RevacMemory, review: Review, conclusion=None) -> str:
    lines = []
    if conclusion is None:
        conclusion = likely_mafia(review) or [p for p in review.suspicion_order if p != obs.viewer][:1]
    for fact in memory.confirmed_facts:
        if fact.source == "investigation":
            lines.append(f"Confirmed by my check: P{fact.subject} is {fact.alignment.value} {_cite([fact.seq])}.")
    for rec in review.contradictions:
        lines.append(_contradiction_sentence(rec))
    for (a, b), mutual in memory.graph.collusion_pairs():
        seqs = [e.turn for e in memory.graph.edges if {e.src, e.dst} == {a, b} and e.weight > 0]
        lines.append(f"P{a} and P{b} keep defending each other (mutual support {mutual:g}) {_cite(seqs)}.")
    for pid in conclusion:
        seqs = evidence_for(memory, pid)
        score = review.suspicion_scores.get(pid, 0.0)
        if seqs:
            lines.append(f"P{pid} carries suspicion score {score:.2f} {_cite(seqs)}.")
    if conclusion:
        lines.append("Conclusion: " + ", ".join(f"P{p}" for p in conclusion) + " most likely Mafia.")
    return "\n".join(lines)


# -- backend variant ---------------------------------------------------------

REVIEW_SYSTEM = (
    "You are the reviewer for a Secret Mafia player. Reason step by step about who holds which role, "
    "using only the events shown. Finish with a JSON object "
    '{"probabilities": {"P0": {"Villager": p, "Doctor": p, "Detective": p, "Mafia": p}, ...}, '
    '"narrative": "..."} covering every player.'
)

_JSON_BLOCK = re.compile(r"\{.*\}", re.DOTALL)


def observation_lines(obs: Observation) -> list[str]:
    lines = []
    for ev in obs.events():
        p = ev.payload
        if ev.kind is EventKind.STATEMENT_MADE:
            lines.append(f"#{ev.seq} D{ev.day} P{p['speaker']}: {p['text'] or '(silent)'}")
        elif ev.kind is EventKind.VOTE_CAST:
            lines.append(f"#{ev.seq} D{ev.day} P{p['voter']} votes P{p['target']}")
        elif ev.kind is EventKind.PLAYER_ELIMINATED:
            lines.append(f"#{ev.seq} D{ev.day} P{p['player']} eliminated ({p['cause']}), was {p['revealed_role']}")
        elif ev.kind is EventKind.NIGHT_RESOLVED and p.get("death") is None:
            lines.append(f"#{ev.seq} N{ev.day} nobody died")
        elif ev.kind is EventKind.INVESTIGATION_RESULT:
            lines.append(f"#{ev.seq} N{ev.day} your check: P{p['target']} is {p['alignment']}")
    return lines


def memory_lines(memory: RevacMemory) -> list[str]:
    lines = []
    for pid, prof in memory.profiles.items():
        if prof.statement_digest or prof.votes_cast:
            votes = ", ".join(f"P{t}@D{d}" for t, d, _ in prof.votes_cast)
            lines.append(f"P{pid}: {' | '.join(prof.statement_digest)}" + (f"; votes {votes}" if votes else ""))
    for (a, b), s in memory.graph.collusion_pairs():
        lines.append(f"mutual defense P{a}<->P{b} ({s:g})")
    return lines


def review_request(obs: Observation, memory: RevacMemory, base: Review, settings: ReviewSettings):
    facts = [f"You are P{obs.viewer}, role {obs.viewer_role.value}."]
    if obs.partners:
        facts.append("Mafia partners: " + ", ".join(f"P{p}" for p in sorted(obs.partners)))
    facts += [f"P{p} revealed as {r.value}" for p, r in sorted(obs.revealed_roles.items())]
    segments = [
        Segment("Known facts", tuple(facts)),
        Segment("Memory", tuple(memory_lines(memory))),
        Segment("Rule-based draft", (base.narrative,)),
        Segment("Chat log", tuple(observation_lines(obs)), truncatable=True),
    ]
    return build_request(REVIEW_SYSTEM, segments, settings.budget_chars, GenerationParams(temperature=0.2))


def parse_probabilities(text: str, base: Review) -> Optional[dict[int, dict[Role, float]]]:
    """Read the model's probability block, keeping rule-derived certainties and zeros."""
    match = _JSON_BLOCK.search(text or "")
    if not match:
        return None
    try:
        data = json.loads(match.group(0))
        raw = data["probabilities"]
    except (json.JSONDecodeError, KeyError, TypeError):
        return None
    out = {}
    for pid, prior in base.role_probabilities.items():
        entry = raw.get(f"P{pid}", raw.get(str(pid))) if isinstance(raw, dict) else None
        if max(prior.values()) == 1.0 or not isinstance(entry, dict):
            out[pid] = dict(prior)
            continue
        dist = {}
        for role in Role:
            try:
                v = float(entry.get(role.value, 0.0))
            except (TypeError, ValueError):
                return None
            dist[role] = max(0.0, v) if prior[role] > 0 and math.isfinite(v) else 0.0
        norm = sum(dist.values())
        out[pid] = {r: v / norm for r, v in dist.items()} if norm > 0 else dict(prior)
    return out


def review(
    obs: Observation,
    memory: RevacMemory,
    backend: Optional[Backend] = None,
    settings: ReviewSettings = ReviewSettings(),
    retries: int = 2,
    retry_delay: float = 0.25,
) -> Review:
    base = rule_review(obs, memory, settings)
    if backend is None:
        return base
    response = call_with_retries(backend, review_request(obs, memory, base, settings), retries, retry_delay)
    probs = parse_probabilities(response.text, base) if response is not None else None
    if probs is None:
        return base
    out = Review(probs, base.contradictions, base.suspicion_order, base.suspicion_scores, None, base.narrative,
                 source="backend")
    try:
        out.check()
    except ValueError:
        return base
    narrative = _JSON_BLOCK.search(response.text)
    try:
        text = json.loads(narrative.group(0)).get("narrative") if narrative else None
    except json.JSONDecodeError:
        text = None
    if isinstance(text, str) and text.strip():
        out.narrative = text.strip()
    out.recommended_action = recommend(obs, memory, out)
    return out
