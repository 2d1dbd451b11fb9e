from __future__ import annotations

import itertools
import json
import re
from pathlib import Path
from typing import Sequence

import pandas as pd

from src.agent import load_learner, train, write_run
from src.agent.loop import evaluate
from src.analysis import csv_io
from src.analysis.stats import EvalCurve, aulc, iqm, paired_ttest_onesided, quartiles
from src.cli.args import CliCommand
from src.core.config import TrainConfig, ensure_parent_dir
from src.core.logger import get_logger
from src.core.rng import RngStreams
from src.envs import make_env
from src.numerics.mlp import params_digest
from src.oracle.numeric_checks import run_numeric_checks
from src.oracle.suite import OracleReport, run_oracle_suite

logger = get_logger(__name__)

_SEED_DIR = re.compile(r"seed_(\d+)$")


def run_train(cfg: TrainConfig) -> int:
    run_dir = cfg.run_dir()
    logger.info("training %s on %s seed=%d -> %s", cfg.agent, cfg.env, cfg.seed, run_dir)
    log, learner = train(cfg)
    written = write_run(log, run_dir, cfg.eval_episodes)
    learner.save(run_dir / "params.npz")
    config_path = run_dir / "config.json"
    config_path.write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(
        "wrote %s; buffer=%d phases=%d wall=%.1fs params=%s",
        ", ".join(sorted(written)), log.buffer_size, log.gradient_phases, log.wall_seconds,
        params_digest(list(learner.named_arrays().values()))[:16],
    )
    if log.failure is not None:
        logger.error("run aborted: %s", log.failure["message"])
        return 1
    return 0


def run_eval(cfg: TrainConfig, params: str | None = None) -> int:
    run_dir = cfg.run_dir()
    params_path = Path(params) if params else run_dir / "params.npz"
    if not params_path.is_file():
        logger.error("no saved parameters at %s", params_path)
        return 1
    streams = RngStreams(cfg.seed)
    env = make_env(cfg.env)
    learner = load_learner(cfg, env.obs_dim, env.act_dim, streams)
    learner.load(params_path)
    result = evaluate(learner.eval_policy(), env, cfg.eval_episodes, streams.eval_env)
    out = csv_io.write_eval(run_dir / "eval_final.csv", [(cfg.total_steps, result.mean, result.returns)], cfg.eval_episodes)
    logger.info("eval_return=%.4f over %d episodes -> %s", result.mean, cfg.eval_episodes, out)
    return 0


def _report_lines(report: OracleReport) -> list[dict]:
    lines = []
    for o in report.outcomes.values():
        print(f"{'PASS' if o.passed else 'FAIL'} {o.name} ({o.cases} cases, {o.failures} failures)")
        lines.append({"name": o.name, "passed": o.passed, "cases": o.cases, "failures": o.failures, "worst_margin": o.worst})
    return lines


def run_verify(seed: int = 0, out_dir: str = "runs", n_mdps: int = 200, n_configs: int = 100) -> int:
    oracle = run_oracle_suite(seed=seed, n_mdps=n_mdps)
    numeric = run_numeric_checks(seed=seed, n_configs=n_configs)
    checks = _report_lines(oracle) + _report_lines(numeric)
    passed = oracle.passed and numeric.passed
    summary = {
        "passed": passed,
        "seed": seed,
        "oracle_seconds": oracle.seconds,
        "numeric_seconds": numeric.seconds,
        "checks": checks,
    }
    path = Path(out_dir) / "verify_summary.json"
    ensure_parent_dir(path)
    path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    logger.info("verify %s; summary -> %s", "passed" if passed else "FAILED", path)
    return 0 if passed else 1


def collect_eval_paths(paths: Sequence[str]) -> list[Path]:
    found: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            found.extend(sorted(p.rglob("eval.csv")))
        elif p.is_file():
            found.append(p)
        else:
            raise FileNotFoundError(f"no such eval file or directory: {p}")
    if not found:
        raise FileNotFoundError(f"no eval.csv under {list(paths)}")
    return found


def method_and_seed(path: Path, fallback_seed: int) -> tuple[str, int]:
    """Infer (method, seed) from .../{agent}/seed_{k}/eval.csv."""
    match = _SEED_DIR.match(path.parent.name)
    if match:
        return path.parent.parent.name, int(match.group(1))
    return path.parent.name or path.stem, fallback_seed


def analyze_curves(paths: Sequence[Path]) -> tuple[pd.DataFrame, pd.DataFrame]:
    finals: dict[str, dict[int, float]] = {}
    areas: dict[str, dict[int, float]] = {}
    for i, path in enumerate(paths):
        frame = csv_io.read_eval(path)
        curve = EvalCurve(
            steps=tuple(int(s) for s in frame["step"]),
            returns=tuple(float(r) for r in frame["eval_return_mean"]),
        )
        method, seed = method_and_seed(Path(path), i)
        finals.setdefault(method, {})[seed] = curve.final
        areas.setdefault(method, {})[seed] = aulc(curve)

    summary = []
    for method in sorted(finals):
        f = list(finals[method].values())
        a = list(areas[method].values())
        summary.append([method, len(f), iqm(f), *quartiles(f), iqm(a), *quartiles(a)])

    tests = []
    for ma, mb in itertools.permutations(sorted(finals), 2):
        seeds = sorted(set(finals[ma]) & set(finals[mb]))
        if len(seeds) < 2:
            logger.warning("skip t-test %s vs %s: %d paired seeds", ma, mb, len(seeds))
            continue
        res = paired_ttest_onesided([finals[ma][s] for s in seeds], [finals[mb][s] for s in seeds])
        tests.append([ma, mb, len(seeds), res.t_stat, res.p_value, res.degenerate])

    return (
        pd.DataFrame(summary, columns=list(csv_io.SUMMARY_COLUMNS)),
        pd.DataFrame(tests, columns=list(csv_io.TTEST_COLUMNS)),
    )


def run_analyze(paths: Sequence[str], out_dir: str = "runs") -> int:
    eval_paths = collect_eval_paths(paths)
    summary, tests = analyze_curves(eval_paths)
    out = Path(out_dir)
    csv_io.write_rows(out / "summary.csv", csv_io.SUMMARY_COLUMNS, summary.itertuples(index=False))
    csv_io.write_rows(out / "ttest.csv", csv_io.TTEST_COLUMNS, tests.itertuples(index=False))
    for row in summary.itertuples(index=False):
        logger.info(
            "%s: n=%d final IQM %.4f [%.4f, %.4f] AULC IQM %.4f",
            row.method, row.n_runs, row.final_iqm, row.final_q25, row.final_q75, row.aulc_iqm,
        )
    return 0


def dispatch(cmd: CliCommand) -> int:
    if cmd.subcommand == "train":
        return run_train(cmd.config)
    if cmd.subcommand == "eval":
        return run_eval(cmd.config, cmd.params)
    if cmd.subcommand == "verify":
        return run_verify(cmd.seed, cmd.out_dir, cmd.n_mdps, cmd.n_configs)
    if cmd.subcommand == "analyze":
        return run_analyze(cmd.paths, cmd.out_dir)
    raise ValueError(f"unknown subcommand: {cmd.subcommand}")
