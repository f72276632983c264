"""Command line: play, tournament, bench, replay."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .agents.spec import AgentSpec
from .arena.match import MatchConfig, SetupError, run_match
from .arena.tournament import run_tournament
from .arena.transcript import Transcript, replay
from .engine.types import GameConfig, GameError

log = logging.getLogger("revac")


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    return json.loads(text)


def _manifest(out: Path, kind: str, **fields) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(json.dumps({"kind": kind, **fields}, indent=2) + "\n", encoding="utf-8")


def cmd_play(args) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.agents:
        seats = args.agents.split(",")
        n = cfg.get("game", {}).get("num_players", GameConfig().num_players)
        cfg["seats"] = seats * n if len(seats) == 1 else seats
    match = MatchConfig.from_dict(cfg)
    try:
        result = run_match(match)
    except (SetupError, GameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    transcript = Transcript.from_result(result)
    out = Path(args.out)
    path = transcript.write(out / f"match-{match.seed}.jsonl")
    _manifest(out, "match", config=match.to_dict(), transcript=path.name,
              winner=result.winner.value, repairs=len(result.repairs))
    roles = " ".join(f"P{i}={r.value}" for i, r in enumerate(result.roles))
    print(f"winner: {result.winner.value}  ({len(result.state.events)} events, {len(result.repairs)} repairs)")
    print(f"roles: {roles}")
    print(f"transcript: {path}")
    return 0


def cmd_tournament(args) -> int:
    specs = [s.strip() for s in args.agents.split(",") if s.strip()]
    try:
        for s in specs:
            AgentSpec.parse(s)
        cfg = _load_config(args.config)
        game = GameConfig.from_dict(cfg.get("game", {}))
        t0 = time.perf_counter()
        result = run_tournament(specs, args.games, args.seed, args.workers, game, Path(args.out), args.k)
    except (ValueError, GameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(result.table())
    print(f"{len(result.transcripts)} games in {time.perf_counter() - t0:.1f}s, "
          f"{len(result.failures)} failed; artifacts in {args.out}")
    return 0


def cmd_bench(args) -> int:
    from .bench.cases import CaseError, load_cases
    from .bench.suite import ConstantAgent, OracleAgent, RevacPredictor, make_judge, run_suite
    from .agents.agent import Variant

    try:
        cases = load_cases(args.cases)
    except CaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.agent == "oracle":
        predictor = OracleAgent()
    elif args.agent == "villager":
        predictor = ConstantAgent()
    else:
        spec = AgentSpec.parse(args.agent)
        if spec.kind == "scripted":
            print("error: scripted agents have no reviewer to benchmark", file=sys.stderr)
            return 2
        predictor = RevacPredictor(Variant(spec.kind), spec.make_backend())
    judge_backend = None
    if args.judge == "model":
        from .agents.backend import ChatCompletionsBackend

        judge_backend = ChatCompletionsBackend.from_env()
    out = Path(args.out)
    suite = run_suite(predictor, cases, make_judge(args.judge, judge_backend), args.workers,
                      args.alignment_only, out / "bench-results.jsonl")
    _manifest(out, "bench", agent=suite.agent, cases=len(cases), results="bench-results.jsonl",
              aggregate=suite.aggregate())
    print(suite.table())
    final = float(suite.final)
    if args.min_score is not None and final < args.min_score:
        print(f"FAIL: final score {final:.4f} below floor {args.min_score}", file=sys.stderr)
        return 1
    return 0


def cmd_replay(args) -> int:
    try:
        report = replay(args.transcript)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot read transcript: {exc}", file=sys.stderr)
        return 2
    print(report.summary())
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revac", description="Secret Mafia agents, arena and benchmark.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("play", help="run one match and write its transcript")
    p.add_argument("--config", help="JSON match config: {game: {...}, seats: [...], seed}")
    p.add_argument("--seed", type=int)
    p.add_argument("--agents", help="comma-separated seat specs, or one spec for every seat")
    p.add_argument("--out", default="runs/play")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("tournament", help="rated tournament between agent specs")
    p.add_argument("--agents", required=True, help="comma-separated agent specs, e.g. revac_8,scripted:random")
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--config", help="JSON file with a 'game' section")
    p.add_argument("--k", type=float, default=3.0, help="leaderboard uses mu - k*sigma")
    p.add_argument("--out", default="runs/tournament")
    p.set_defaults(func=cmd_tournament)

    p = sub.add_parser("bench", help="score an agent's reviewer on the case suite")
    p.add_argument("--cases", help="case file or directory (default: bundled suite)")
    p.add_argument("--agent", default="revac_8", help="revac|revac2_1|revac_8[@backend], oracle or villager")
    p.add_argument("--judge", choices=("stub", "model"), default="stub")
    p.add_argument("--min-score", type=float, help="exit nonzero when the final score is lower")
    p.add_argument("--alignment-only", action="store_true", help="score Metric A on alignments only")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="runs/bench")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("replay", help="re-execute a transcript and verify every checkpoint")
    p.add_argument("--transcript", required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
