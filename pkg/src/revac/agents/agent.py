"""The Revac pipeline: memory -> review -> tone -> action, with version toggles."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..engine.game import Observation
from ..engine.types import EventKind
from ..memory.store import DEFAULT_DIGEST_CAP, RevacMemory
from .backend import Backend
from .executor import AgentAction, default_action, execute_action, is_legal
from .review import Review, ReviewSettings, review
from .tone import ToneSettings, select_tone, tone_context

log = logging.getLogger(__name__)


class Variant(str, Enum):
    REVAC = "revac"
    REVAC2_1 = "revac2_1"
    REVAC_8 = "revac_8"

    @property
    def use_memory(self) -> bool:
        return self is not Variant.REVAC

    @property
    def use_tone(self) -> bool:
        return self is Variant.REVAC_8


@dataclass(frozen=True)
class AgentSettings:
    review: ReviewSettings = field(default_factory=ReviewSettings)
    tone: ToneSettings = field(default_factory=ToneSettings)
    digest_cap: int = DEFAULT_DIGEST_CAP
    retries: int = 2
    retry_delay: float = 0.25


# kept in the short-sighted view: player status and own private results
_STATUS_EVENTS = {EventKind.PLAYER_ELIMINATED, EventKind.INVESTIGATION_RESULT, EventKind.GAME_STARTED}


def current_view(obs: Observation) -> list:
    """What a memoryless agent sees: today's events plus player status."""
    day = obs.phase.day
    return [e for e in obs.events() if e.day == day or e.kind in _STATUS_EVENTS]


class RevacAgent:
    def __init__(
        self,
        seat: int,
        variant: Variant = Variant.REVAC_8,
        backend: Optional[Backend] = None,
        settings: AgentSettings = AgentSettings(),
    ):
        self.seat = seat
        self.variant = Variant(variant)
        self.backend = backend
        self.settings = settings
        self.memory: Optional[RevacMemory] = None
        self.last_review: Optional[Review] = None
        self.last_tone = None

    @property
    def name(self) -> str:
        return self.variant.value

    def _memory_for(self, obs: Observation) -> RevacMemory:
        if not self.variant.use_memory:
            memory = RevacMemory.for_observation(obs, self.settings.digest_cap)
            return memory.update(current_view(obs))
        if self.memory is None or self.memory.owner != obs.viewer:
            self.memory = RevacMemory.for_observation(obs, self.settings.digest_cap)
        fresh = [e for e in obs.events() if e.seq > self.memory.last_seq]
        return self.memory.update(fresh)

    def review_observation(self, obs: Observation) -> Review:
        memory = self._memory_for(obs)
        self.last_review = review(obs, memory, self.backend, self.settings.review,
                                  self.settings.retries, self.settings.retry_delay)
        return self.last_review

    def step(self, obs: Observation) -> AgentAction:
        if obs.viewer != self.seat:
            raise ValueError(f"observation for P{obs.viewer} given to seat P{self.seat}")
        memory = self._memory_for(obs)
        rev = review(obs, memory, self.backend, self.settings.review, self.settings.retries,
                     self.settings.retry_delay)
        self.last_review = rev
        tone = None
        if self.variant.use_tone and obs.phase.is_discussion:
            tone = select_tone(rev, memory, tone_context(obs, memory), self.settings.tone)
        self.last_tone = tone
        action = execute_action(obs, rev, tone, self.backend, memory, self.settings.retries,
                                self.settings.retry_delay, self.settings.review.budget_chars)
        if not is_legal(obs, action):
            log.warning("P%d produced illegal %r; repairing", self.seat, action)
            action = default_action(obs)
        return action


def agent_step(agent, observation: Observation) -> AgentAction:
    return agent.step(observation)
