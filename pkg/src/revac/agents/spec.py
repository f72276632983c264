"""Agent spec strings used by the CLI and tournament: ``kind[:policy][@backend[:arg]]``.

Examples: ``revac_8``, ``revac@rule``, ``scripted:strong``, ``revac_8@flaky:0.5``, ``revac2_1@http``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .agent import AgentSettings, RevacAgent, Variant
from .backend import Backend, CannedBackend, ChatCompletionsBackend, FlakyBackend
from .scripted import POLICIES, ScriptedAgent

BACKENDS = ("rule", "http", "flaky", "canned")
CANNED_REPLY = "Let's slow down and compare the claims before anyone votes."


@dataclass(frozen=True)
class AgentSpec:
    kind: str  # a Variant value or "scripted"
    policy: Optional[str] = None
    backend: str = "rule"
    backend_arg: Optional[float] = None

    @classmethod
    def parse(cls, text: str) -> "AgentSpec":
        head, _, tail = text.strip().partition("@")
        kind, _, policy = head.partition(":")
        backend, _, arg = (tail or "rule").partition(":")
        if kind == "scripted":
            if policy not in POLICIES:
                raise ValueError(f"{text!r}: scripted policy must be one of {POLICIES}")
        else:
            try:
                Variant(kind)
            except ValueError:
                raise ValueError(f"{text!r}: unknown agent kind {kind!r}") from None
            if policy:
                raise ValueError(f"{text!r}: only scripted agents take a policy")
        if backend not in BACKENDS:
            raise ValueError(f"{text!r}: backend must be one of {BACKENDS}")
        value = None
        if arg:
            try:
                value = float(arg)
            except ValueError:
                raise ValueError(f"{text!r}: backend argument {arg!r} is not a number") from None
        if backend == "flaky" and value is None:
            value = 0.5
        if backend == "flaky" and not 0.0 <= value <= 1.0:
            raise ValueError(f"{text!r}: failure rate must lie in [0, 1]")
        return cls(kind, policy or None, backend, value)

    def __str__(self) -> str:
        out = self.kind + (f":{self.policy}" if self.policy else "")
        if self.backend != "rule":
            out += f"@{self.backend}" + (f":{self.backend_arg:g}" if self.backend_arg is not None else "")
        return out

    def make_backend(self, seed: int = 0) -> Optional[Backend]:
        if self.backend == "rule":
            return None
        if self.backend == "http":
            return ChatCompletionsBackend.from_env()
        canned = CannedBackend([CANNED_REPLY])
        if self.backend == "canned":
            return canned
        return FlakyBackend(canned, self.backend_arg, seed)

    def build(self, seat: int, seed: int = 0, settings: AgentSettings = AgentSettings()):
        if self.kind == "scripted":
            return ScriptedAgent(seat, self.policy, seed)
        return RevacAgent(seat, Variant(self.kind), self.make_backend(seed * 31 + seat), settings)
