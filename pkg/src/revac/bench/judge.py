"""Explanation judges.

The stub judge is a deterministic checklist worth 1.25 points per item:

1. evidence: cites at least two distinct real event references (``#seq``);
2. contradiction: names a contradiction the case contains, with its players
   (or, when the case has none, claims none);
3. grounding: every player and event it mentions exists for this viewer;
4. conclusion: a ``Conclusion:`` line whose players all appear in cited events.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..agents.backend import Backend, GenerationParams, Segment, build_request, call_with_retries
from ..agents.review import observation_lines
from ..memory.store import ContradictionRecord, RevacMemory, detect_contradictions
from .cases import BenchmarkCase

log = logging.getLogger(__name__)

PLAYER_REF = re.compile(r"\b(?:P|Player\s*)(\d+)\b", re.IGNORECASE)
EVENT_REF = re.compile(r"#(\d+)\b")
CONTRADICTION_WORDS = re.compile(
    r"contradict|counter-?claim|inconsisten|impossible|mismatch|two (?:detectives|doctors)|dual", re.IGNORECASE)
CONCLUSION = re.compile(r"conclusion\s*:(.*)", re.IGNORECASE)
POINT = Fraction(5, 4)


@dataclass(frozen=True)
class Verdict:
    score: Fraction
    checks: dict = field(default_factory=dict)
    judge: str = "stub"
    fallback: bool = False


def case_contradictions(case: BenchmarkCase) -> list[ContradictionRecord]:
    obs = case.observation
    memory = RevacMemory.for_observation(obs).update(obs.events())
    return detect_contradictions(memory)


def stub_judge(explanation: str, case: BenchmarkCase) -> Verdict:
    text = explanation or ""
    if not text.strip():
        return Verdict(Fraction(0), {k: False for k in ("evidence", "contradiction", "grounding", "conclusion")})
    events = {e.seq: e for e in case.observation.events()}
    roster = set(case.roster)
    cited = {int(m) for m in EVENT_REF.findall(text)}
    real_cited = cited & set(events)
    players = {int(m) for m in PLAYER_REF.findall(text)}

    checks = {}
    checks["evidence"] = len(real_cited) >= 2

    expected = case_contradictions(case)
    lines = [ln for ln in re.split(r"[\n.;]+(?=\s|$)|\n", text) if ln.strip()]
    flagged = [ln for ln in lines if CONTRADICTION_WORDS.search(ln)]
    if expected:
        checks["contradiction"] = any(
            all(pid in {int(m) for m in PLAYER_REF.findall(ln)} for pid in rec.subjects)
            for ln in flagged for rec in expected)
    else:
        checks["contradiction"] = not flagged

    checks["grounding"] = players <= roster and cited <= set(events)

    named: set[int] = set()
    for m in CONCLUSION.finditer(text):
        named |= {int(p) for p in PLAYER_REF.findall(m.group(1))}
    involved: set[int] = set()
    for s in real_cited:
        involved |= events[s].participants()
    checks["conclusion"] = bool(named) and named <= involved

    score = POINT * sum(checks.values())
    return Verdict(min(max(score, Fraction(0)), Fraction(5)), checks)


JUDGE_SYSTEM = (
    "You grade a Secret Mafia player's written reasoning on a 0-5 scale. Criteria: logical soundness, "
    "use of game evidence, contradiction detection, and avoidance of hallucination (mentioning players or "
    'events that do not exist). Reply with JSON only: {"score": <number 0-5>, "reason": "..."}.'
)
_SCORE = re.compile(r'"score"\s*:\s*([0-9.]+)')


def model_judge(explanation: str, case: BenchmarkCase, backend: Backend, retries: int = 2,
                retry_delay: float = 0.25) -> Verdict:
    """Ask a model for a 0-5 grade; any failure falls back to the stub and is flagged."""
    if not (explanation or "").strip():
        return Verdict(Fraction(0), judge="model")
    request = build_request(
        JUDGE_SYSTEM,
        [Segment("Game log", tuple(observation_lines(case.observation)), truncatable=True),
         Segment("Scenario notes", (case.explanation,)),
         Segment("Explanation to grade", (explanation,))],
        12000, GenerationParams(max_tokens=200, temperature=0.0, seed=0),
    )
    resp = call_with_retries(backend, request, retries, retry_delay)
    score = None
    if resp is not None:
        try:
            score = float(json.loads(resp.text).get("score"))
        except (ValueError, TypeError, AttributeError):
            m = _SCORE.search(resp.text)
            score = float(m.group(1)) if m else None
    if score is None or not 0 <= score <= 5:
        log.warning("model judge unavailable for %s; using the stub", case.id)
        v = stub_judge(explanation, case)
        return Verdict(v.score, v.checks, "stub", fallback=True)
    return Verdict(Fraction(repr(score)), judge="model")
