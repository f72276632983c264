"""Run predictors over the case suite and aggregate the scores."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Protocol, Sequence, Union

from ..agents.agent import AgentSettings, RevacAgent, Variant
from ..agents.backend import Backend
from ..agents.review import _cite
from ..engine.types import Role
from .cases import BenchmarkCase
from .judge import Verdict, model_judge, stub_judge
from .scoring import CaseResult, combine, mean, metric_a

log = logging.getLogger(__name__)


class Predictor(Protocol):
    name: str

    def predict(self, case: BenchmarkCase) -> tuple[dict[int, Role], str]: ...


@dataclass
class RevacPredictor:
    variant: Variant = Variant.REVAC_8
    backend: Optional[Backend] = None
    settings: AgentSettings = field(default_factory=AgentSettings)

    @property
    def name(self) -> str:
        return self.variant.value

    def predict(self, case: BenchmarkCase):
        agent = RevacAgent(case.viewer, self.variant, self.backend, self.settings)
        review = agent.review_observation(case.observation)
        return review.predicted_roles(), review.narrative


class OracleAgent:
    """Reads the ground truth; writes a grounded explanation from the viewer's own events."""

    name = "oracle"

    def predict(self, case: BenchmarkCase):
        from .judge import case_contradictions

        events = case.observation.events()
        mafia = sorted(p for p, r in case.ground_truth.items() if r is Role.MAFIA and p != case.viewer)
        lines = []
        for rec in case_contradictions(case):
            who = " and ".join(f"P{p}" for p in rec.subjects)
            lines.append(f"Contradiction ({rec.kind.value}): {who} {_cite(rec.evidence)}")
        cited: list[int] = []
        for pid in mafia:
            seqs = [e.seq for e in events if pid in e.participants()][:2]
            cited += seqs
            lines.append(f"P{pid} appears in {_cite(seqs)}")
        extra = [e.seq for e in events if e.seq not in cited]
        if len(set(cited)) < 2 and extra:
            lines.append(f"Timeline {_cite(extra[:2])}")
        lines.append("Conclusion: " + ", ".join(f"P{p}" for p in mafia) + " are Mafia")
        return dict(case.ground_truth), "\n".join(lines)


class ConstantAgent:
    """Predicts one role for everybody and explains nothing."""

    def __init__(self, role: Role = Role.VILLAGER):
        self.role = role
        self.name = f"constant-{role.value.lower()}"

    def predict(self, case: BenchmarkCase):
        return {p: self.role for p in case.roster}, ""


Judge = Callable[[str, BenchmarkCase], Verdict]


def make_judge(kind: str = "stub", backend: Optional[Backend] = None, retry_delay: float = 0.25) -> Judge:
    if kind == "stub":
        return stub_judge
    if kind == "model":
        if backend is None:
            raise ValueError("the model judge needs a backend")
        return lambda text, case: model_judge(text, case, backend, retry_delay=retry_delay)
    raise ValueError(f"unknown judge {kind!r}")


@dataclass
class SuiteResult:
    agent: str
    results: list[CaseResult]

    @property
    def metric_a(self) -> Fraction:
        return mean(r.metric_a for r in self.results)

    @property
    def metric_b_norm(self) -> Fraction:
        return mean(r.metric_b_norm for r in self.results)

    @property
    def metric_b_raw(self) -> Fraction:
        return mean(r.metric_b_raw for r in self.results)

    @property
    def final(self) -> Fraction:
        return combine(self.metric_a, self.metric_b_norm)

    def aggregate(self) -> dict:
        return {"agent": self.agent, "cases": len(self.results), "metric_a": float(self.metric_a),
                "metric_a_exact": str(self.metric_a), "metric_b_norm": float(self.metric_b_norm),
                "final": float(self.final), "failures": sum(r.error is not None for r in self.results)}

    def table(self) -> str:
        rows = [f"{'case':<28} {'A':>6} {'B':>5} {'final':>6}"]
        for r in self.results:
            flag = "  ERROR" if r.error else ""
            rows.append(f"{r.case_id:<28} {float(r.metric_a):6.3f} {float(r.metric_b_raw):5.2f} "
                        f"{float(r.final):6.3f}{flag}")
        agg = self.aggregate()
        rows.append(f"{'mean':<28} {agg['metric_a']:6.3f} {float(self.metric_b_raw):5.2f} {agg['final']:6.3f}")
        return "\n".join(rows)

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [json.dumps(r.to_dict(), sort_keys=True) for r in self.results]
        lines.append(json.dumps({"aggregate": self.aggregate()}, sort_keys=True))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path


def score_case(predictor: Predictor, case: BenchmarkCase, judge: Judge, alignment_only: bool = False) -> CaseResult:
    try:
        prediction, explanation = predictor.predict(case)
        verdict = judge(explanation, case)
        return CaseResult.score(case.id, prediction, explanation,
                                metric_a(prediction, case.ground_truth, alignment_only), verdict.score,
                                judge=verdict.judge, judge_fallback=verdict.fallback)
    except Exception as exc:  # one broken case must not sink the suite
        log.error("case %s failed: %r", case.id, exc)
        return CaseResult.failed(case.id, repr(exc))


def run_suite(
    predictor: Predictor,
    cases: Sequence[BenchmarkCase],
    judge: Judge = stub_judge,
    workers: int = 1,
    alignment_only: bool = False,
    out: Optional[Path] = None,
) -> SuiteResult:
    ordered = sorted(cases, key=lambda c: c.id)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: score_case(predictor, c, judge, alignment_only), ordered))
    else:
        results = [score_case(predictor, c, judge, alignment_only) for c in ordered]
    suite = SuiteResult(getattr(predictor, "name", type(predictor).__name__), results)
    if out is not None:
        suite.write(out)
    return suite
