from .cases import TAGS, BenchmarkCase, CaseError, load_cases, parse_case, replay_script
from .judge import Verdict, case_contradictions, model_judge, stub_judge
from .scoring import CaseResult, ScoringError, combine, exact, final_score, mean, metric_a, round_half_up
from .suite import ConstantAgent, OracleAgent, RevacPredictor, SuiteResult, make_judge, run_suite
