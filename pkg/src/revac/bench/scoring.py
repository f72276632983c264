"""Role accuracy, judged-explanation normalisation and the combined final score (exact rationals)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from ..engine.types import Role

Number = Union[int, float, str, Fraction]
B_MAX = 5


class ScoringError(ValueError):
    pass


def exact(x: Number) -> Fraction:
    """Fraction from a literal: floats go through their shortest repr, so 0.74 means 74/100."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def metric_a(prediction: Mapping[int, Role], truth: Mapping[int, Role], alignment_only: bool = False) -> Fraction:
    """Correct predictions over the whole roster; missing predictions count as wrong."""
    if not truth:
        raise ScoringError("ground truth is empty")
    correct = 0
    for pid, role in truth.items():
        guess = prediction.get(pid)
        if guess is None:
            continue
        if alignment_only:
            correct += Role(guess).alignment is role.alignment
        else:
            correct += Role(guess) is role
    return Fraction(correct, len(truth))


def final_score(a: Number, b_raw: Number) -> tuple[Fraction, Fraction]:
    """(metric_b_norm, final) with final = 0.5*A + 0.5*B/5."""
    a, b = exact(a), exact(b_raw)
    if not 0 <= a <= 1:
        raise ScoringError(f"metric A {float(a)} outside [0, 1]")
    if not 0 <= b <= B_MAX:
        raise ScoringError(f"metric B {float(b)} outside [0, {B_MAX}]")
    b_norm = b / B_MAX
    return b_norm, combine(a, b_norm)


def combine(a: Number, b_norm: Number) -> Fraction:
    a, b_norm = exact(a), exact(b_norm)
    if not (0 <= a <= 1 and 0 <= b_norm <= 1):
        raise ScoringError("scores must lie in [0, 1]")
    return Fraction(1, 2) * a + Fraction(1, 2) * b_norm


def round_half_up(x: Fraction, places: int = 2) -> Fraction:
    scale = 10**places
    return Fraction(int(x * scale + Fraction(1, 2)), scale)


@dataclass(frozen=True)
class CaseResult:
    case_id: str
    prediction: dict
    explanation: str
    metric_a: Fraction
    metric_b_raw: Fraction
    metric_b_norm: Fraction
    final: Fraction
    judge: str = "stub"
    judge_fallback: bool = False
    error: Optional[str] = None

    @classmethod
    def score(cls, case_id: str, prediction, explanation: str, a: Number, b_raw: Number, **extra) -> "CaseResult":
        b_norm, final = final_score(a, b_raw)
        return cls(case_id, dict(prediction), explanation, exact(a), exact(b_raw), b_norm, final, **extra)

    @classmethod
    def failed(cls, case_id: str, error: str) -> "CaseResult":
        return cls(case_id, {}, "", Fraction(0), Fraction(0), Fraction(0), Fraction(0), error=error)

    def to_dict(self) -> dict:
        return {
            "case": self.case_id,
            "prediction": {str(p): (r.value if isinstance(r, Role) else r) for p, r in sorted(self.prediction.items())},
            "explanation": self.explanation,
            "metric_a": float(self.metric_a),
            "metric_a_exact": str(self.metric_a),
            "metric_b_raw": float(self.metric_b_raw),
            "metric_b_norm": float(self.metric_b_norm),
            "final": float(self.final),
            "judge": self.judge,
            "judge_fallback": self.judge_fallback,
            "error": self.error,
        }


def mean(values: Iterable[Fraction]) -> Fraction:
    values = list(values)
    return sum(values, Fraction(0)) / len(values) if values else Fraction(0)
