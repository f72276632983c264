"""Deterministic lexical extraction of social acts from chat text.

Player references are only resolved from explicit name tokens ("P3",
"Player 3"); anything else yields no act.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from ..engine.types import NightActionKind, Role
from ..graph.acts import ActKind, SocialAct, accuse, claim, defend

REF = r"(?:player\s*|p)(\d+)\b"

ROLE_WORDS = {
    "villager": Role.VILLAGER,
    "doctor": Role.DOCTOR,
    "medic": Role.DOCTOR,
    "detective": Role.DETECTIVE,
    "cop": Role.DETECTIVE,
    "mafia": Role.MAFIA,
}

GUILTY = r"(?:mafia|sus|suspicious|scum|evil|lying|a\s+liar)"
INNOCENT = r"(?:town|innocent|clean|trustworthy|village)"
HEDGE = r"(?:(?:very|really|so|kind\s+of|kinda|super|definitely|probably|clearly|totally|pretty)\s+)?"

_FLAGS = re.IGNORECASE

ACCUSE_PATTERNS = [
    re.compile(rf"\bI\s+accuse\s+{REF}", _FLAGS),
    re.compile(rf"\b(?:vote|voting|lynch|lynching|eliminate)\s+(?:for\s+|out\s+)?{REF}", _FLAGS),
    re.compile(rf"\b{REF}\s+(?:is|seems|looks|was)\s+{HEDGE}{GUILTY}\b", _FLAGS),
    re.compile(rf"\bI\s+(?:don't|do\s+not)\s+trust\s+{REF}", _FLAGS),
]

DEFEND_PATTERNS = [
    re.compile(rf"\b{REF}\s+(?:is|seems|looks|was)\s+{HEDGE}{INNOCENT}\b", _FLAGS),
    re.compile(rf"\b{REF}\s+is\s+not\s+{GUILTY}\b", _FLAGS),
    re.compile(rf"\bI\s+(?:trust|believe|defend|vouch\s+for)\s+{REF}", _FLAGS),
]

# first-person reports of a night ability imply the matching role claim
ABILITY_CLAIM_PATTERNS = [
    (re.compile(rf"\bI\s+(?:protected|saved|healed)\s+{REF}", _FLAGS), Role.DOCTOR),
    (re.compile(rf"\bI\s+(?:checked|investigated)\s+{REF}", _FLAGS), Role.DETECTIVE),
]

SELF_SAVE = re.compile(r"\bI\s+(?:protected|saved|healed)\s+(?:myself|me|self)\b", _FLAGS)

CLAIM_PATTERN = re.compile(
    r"\bI\s*(?:am|'m)\s+(?:just\s+|really\s+|actually\s+)?(?:the\s+|a\s+|an\s+)?"
    r"(?:normal\s+|plain\s+|simple\s+|real\s+|vanilla\s+)?(villager|doctor|medic|detective|cop|mafia)\b",
    _FLAGS,
)

# result of a check reported in the same sentence: "checked P3 ... P3 is mafia" / "checked P3 as mafia"
CHECK_RESULT = re.compile(rf"\b(?:checked|investigated)\s+{REF}(?P<rest>.*)", _FLAGS)
RESULT_GUILTY = re.compile(r"\b(?:mafia|scum|evil)\b", _FLAGS)
RESULT_INNOCENT = re.compile(rf"\b{INNOCENT}\b", _FLAGS)

ABILITY_REF = re.compile(
    rf"\b(investigat\w*|check(?:ed|ing)?|protect\w*|sav(?:ed|ing)|heal\w*)\s+(?:on\s+)?{REF}", _FLAGS
)
NIGHT_REF = re.compile(r"\b(?:N|night\s*)(\d+)\b", _FLAGS)

SENTENCE_SPLIT = re.compile(r"(?<=[.!?;\n])\s*")


@dataclass(frozen=True)
class AbilityRef:
    """A statement describing a night ability used on someone."""

    speaker: int
    ability: NightActionKind
    target: int
    night: Optional[int]


def _sentences(text: str) -> list[str]:
    return [s for s in SENTENCE_SPLIT.split(text) if s.strip()]


def _resolve(raw: str, roster: frozenset[int]) -> Optional[int]:
    pid = int(raw)
    return pid if pid in roster else None


def extract_acts(text: str, roster: Iterable[int], speaker: int) -> list[SocialAct]:
    """Accusations, defenses and role claims stated in ``text``, in textual order."""
    members = frozenset(roster)
    if speaker not in members:
        raise ValueError(f"speaker {speaker} not in roster")
    found: list[tuple[int, int, SocialAct]] = []
    offset = 0
    for sentence in _sentences(text or ""):
        base = text.find(sentence, offset)
        offset = base + len(sentence)

        def add(pos: int, act: SocialAct, order: int = 0) -> None:
            found.append((base + pos, order, act))

        for pat in ACCUSE_PATTERNS:
            for m in pat.finditer(sentence):
                dst = _resolve(m.group(1), members)
                if dst is not None and dst != speaker:
                    add(m.start(), accuse(speaker, dst))
        for pat in DEFEND_PATTERNS:
            for m in pat.finditer(sentence):
                dst = _resolve(m.group(1), members)
                if dst is not None and dst != speaker:
                    add(m.start(), defend(speaker, dst))
        for pat, role in ABILITY_CLAIM_PATTERNS:
            for m in pat.finditer(sentence):
                dst = _resolve(m.group(1), members)
                if dst is None:
                    continue
                if role is Role.DOCTOR and dst != speaker:
                    add(m.start(), defend(speaker, dst))
                add(m.start(), claim(speaker, role), order=1)
        for m in SELF_SAVE.finditer(sentence):
            add(m.start(), claim(speaker, Role.DOCTOR), order=1)
        for m in CLAIM_PATTERN.finditer(sentence):
            add(m.start(), claim(speaker, ROLE_WORDS[m.group(1).lower()]))
        for m in CHECK_RESULT.finditer(sentence):
            dst = _resolve(m.group(1), members)
            if dst is None or dst == speaker:
                continue
            rest = m.group("rest")
            if RESULT_GUILTY.search(rest):
                add(m.start(), accuse(speaker, dst))
            elif RESULT_INNOCENT.search(rest):
                add(m.start(), defend(speaker, dst))

    found.sort(key=lambda item: (item[0], item[1]))
    acts: list[SocialAct] = []
    seen = set()
    for _, _, act in found:
        if act not in seen:
            seen.add(act)
            acts.append(act)
    return acts


_CLAUSE_BREAK = re.compile(r"[,;:]|\b(?:and|but|while|because)\b", re.IGNORECASE)
_SELF = re.compile(r"\bI(?:'m|'ve| am| was| have| had)?\b")
_NEGATION = re.compile(r"\b(?:not|never|cannot|can't|couldn't|didn't|wasn't)\b|n't\b", re.IGNORECASE)


def _first_person(prefix: str) -> bool:
    """The clause leading up to an ability verb has the speaker as its subject, un-negated."""
    clause = _CLAUSE_BREAK.split(prefix)[-1]
    return bool(_SELF.search(clause)) and not _NEGATION.search(clause)


def extract_ability_refs(text: str, roster: Iterable[int], speaker: int, day: int) -> list[AbilityRef]:
    """Night abilities the speaker describes using.  The night defaults to the
    one just before ``day`` unless the sentence names it ("N0", "night 1")."""
    members = frozenset(roster)
    refs: list[AbilityRef] = []
    for sentence in _sentences(text or ""):
        night_m = NIGHT_REF.search(sentence)
        night = int(night_m.group(1)) if night_m else day
        for m in ABILITY_REF.finditer(sentence):
            target = _resolve(m.group(2), members)
            if target is None or not _first_person(sentence[: m.start()]):
                continue
            verb = m.group(1).lower()
            kind = NightActionKind.INVESTIGATE if verb.startswith(("investigat", "check")) else NightActionKind.PROTECT
            ref = AbilityRef(speaker, kind, target, night)
            if ref not in refs:
                refs.append(ref)
    return refs


def act_summary(acts: Iterable[SocialAct]) -> str:
    parts = []
    for act in acts:
        if act.kind is ActKind.CLAIM:
            parts.append(f"claims {act.role.value}")
        elif act.kind is ActKind.ACCUSE:
            parts.append(f"accuses P{act.dst}")
        elif act.kind is ActKind.DEFEND:
            parts.append(f"defends P{act.dst}")
        else:
            parts.append(f"votes P{act.dst}")
    return ", ".join(parts)
