"""Hand-written policies used as baselines, fixtures and property-test drivers."""

from __future__ import annotations

import random
from typing import Optional

from ..engine.game import Observation
from ..engine.types import ROLE_ABILITY, Alignment, EventKind, NightAction, NightActionKind, Role
from ..memory.extract import extract_acts
from .executor import AgentAction, Night, Say, Vote

POLICIES = ("random", "passive", "killer", "strong")


class ScriptedAgent:
    def __init__(self, seat: int, policy: str = "random", seed: int = 0):
        if policy not in POLICIES:
            raise ValueError(f"unknown scripted policy {policy!r}; choose from {POLICIES}")
        self.seat = seat
        self.policy = policy
        self.rng = random.Random(seed * 1009 + seat)

    @property
    def name(self) -> str:
        return f"scripted:{self.policy}"

    def step(self, obs: Observation) -> AgentAction:
        return getattr(self, f"_{self.policy}")(obs)

    # -- policies ---------------------------------------------------------

    def _others(self, obs: Observation, skip_team: bool = False) -> list[int]:
        team = {obs.viewer, *obs.partners} if skip_team else {obs.viewer}
        return sorted(p for p in obs.living_players if p not in team)

    def _random(self, obs: Observation) -> AgentAction:
        others = self._others(obs)
        if obs.phase.is_discussion:
            if not others or self.rng.random() < 0.3:
                return Say("")
            target = self.rng.choice(others)
            return Say(self.rng.choice([f"I think P{target} is suspicious.", f"I trust P{target}.",
                                        f"P{target} is town.", "No idea yet."]))
        if obs.phase.is_voting:
            return Vote(self.rng.choice(others) if others and self.rng.random() < 0.9 else None)
        kind = ROLE_ABILITY[obs.viewer_role]
        pool = sorted(obs.living_players)
        return Night(NightAction(kind, self.rng.choice(pool)))

    def _passive(self, obs: Observation) -> Optional[AgentAction]:
        if obs.phase.is_discussion:
            return Say("")
        if obs.phase.is_voting:
            return Vote(None)
        return None  # no night action

    def _killer(self, obs: Observation) -> Optional[AgentAction]:
        """Mafia kill and vote the lowest-id villager; everyone else passes."""
        if obs.viewer_role is not Role.MAFIA:
            return self._passive(obs)
        targets = self._others(obs, skip_team=True)
        if obs.phase.is_discussion:
            return Say("")
        if obs.phase.is_voting:
            return Vote(targets[0] if targets else None)
        return Night(NightAction(NightActionKind.KILL, targets[0]))

    def _strong(self, obs: Observation) -> AgentAction:
        """Information-sharing town play; Mafia hunts the loudest investigator."""
        checks, detective_claims, accused_by_detective = {}, [], []
        for ev in obs.events():
            p = ev.payload
            if ev.kind is EventKind.INVESTIGATION_RESULT:
                checks[p["target"]] = Alignment(p["alignment"])
            elif ev.kind is EventKind.STATEMENT_MADE:
                acts = p.get("acts") or [a.to_dict() for a in extract_acts(p["text"], obs.roster, p["speaker"])]
                for a in acts:
                    if a["kind"] == "ClaimRole" and a["role"] == Role.DETECTIVE.value:
                        detective_claims.append(p["speaker"])
                    elif a["kind"] == "Accuse" and p["speaker"] in detective_claims:
                        accused_by_detective.append(a["dst"])
        living = obs.living_players
        role = obs.viewer_role
        team = {obs.viewer, *obs.partners} if role is Role.MAFIA else {obs.viewer}
        others = [p for p in sorted(living) if p not in team]
        loud = [p for p in detective_claims if p in living and p not in team]

        if obs.phase.is_discussion:
            if role is Role.DETECTIVE:
                found = [t for t, a in checks.items() if a is Alignment.MAFIA and t in living]
                if found:
                    return Say(f"I am the Detective. I checked P{found[0]} and P{found[0]} is Mafia.")
                return Say("")
            return Say("")
        if obs.phase.is_voting:
            if role is Role.MAFIA:
                return Vote(loud[-1] if loud else (self.rng.choice(others) if others else None))
            if role is Role.DETECTIVE:
                found = [t for t, a in checks.items() if a is Alignment.MAFIA and t in living]
                if found:
                    return Vote(found[0])
            suspects = [p for p in accused_by_detective if p in living and p != obs.viewer]
            if suspects:
                return Vote(suspects[-1])
            cleared = {t for t, a in checks.items() if a is Alignment.VILLAGE}
            pool = [p for p in others if p not in cleared and p not in loud] or others
            return Vote(self.rng.choice(pool) if pool else None)
        if role is Role.MAFIA:
            target = loud[-1] if loud else self.rng.choice(others)
            return Night(NightAction(NightActionKind.KILL, target))
        if role is Role.DOCTOR:
            return Night(NightAction(NightActionKind.PROTECT, loud[-1] if loud else obs.viewer))
        unchecked = [p for p in others if p not in checks] or others
        return Night(NightAction(NightActionKind.INVESTIGATE, self.rng.choice(unchecked)))
