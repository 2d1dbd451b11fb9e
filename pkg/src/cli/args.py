from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from typing import Callable, Sequence

from src.core.config import AGENTS, BASELINE_LOSSES, TrainConfig, load_config
from src.core.errors import ConfigError
from src.envs import ENV_NAMES

SUBCOMMANDS: tuple[str, ...] = ("train", "eval", "verify", "analyze")


@dataclass(frozen=True)
class CliCommand:
    subcommand: str
    config: TrainConfig | None = None
    params: str | None = None
    paths: tuple[str, ...] = field(default_factory=tuple)
    out_dir: str = "runs"
    seed: int = 0
    n_mdps: int = 200
    n_configs: int = 100


def _ranged(kind: type, lo: float | None = None, hi: float | None = None, lo_open: bool = False, hi_open: bool = False) -> Callable[[str], float]:
    def parse(text: str):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {kind.__name__}, got {text!r}") from None
        if lo is not None and (value < lo or (lo_open and value == lo)):
            raise argparse.ArgumentTypeError(f"{value} is below the allowed range")
        if hi is not None and (value > hi or (hi_open and value == hi)):
            raise argparse.ArgumentTypeError(f"{value} is above the allowed range")
        return value

    parse.__name__ = kind.__name__
    return parse


POS_INT = _ranged(int, lo=1)
NONNEG_INT = _ranged(int, lo=0)
POS_FLOAT = _ranged(float, lo=0.0, lo_open=True)
NONNEG_FLOAT = _ranged(float, lo=0.0)
OPEN_UNIT = _ranged(float, lo=0.0, hi=1.0, lo_open=True, hi_open=True)
DISCOUNT = _ranged(float, lo=0.0, hi=1.0, hi_open=True)
CLOSED_UNIT = _ranged(float, lo=0.0, hi=1.0)
CONFIDENCE = _ranged(float, lo=0.0, hi=1.0, lo_open=True)

# flag -> (config field, argparse type)
TRAIN_FLAGS: dict[str, tuple[str, Callable]] = {
    "--seed": ("seed", NONNEG_INT),
    "--steps": ("total_steps", POS_INT),
    "--warmup": ("warmup_steps", NONNEG_INT),
    "--batch": ("batch_size", POS_INT),
    "--replay-ratio": ("replay_ratio", POS_INT),
    "--buffer": ("buffer_size", POS_INT),
    "--ensemble": ("ensemble_size", POS_INT),
    "--hidden": ("hidden", POS_INT),
    "--gamma": ("gamma", DISCOUNT),
    "--tau": ("tau", CLOSED_UNIT),
    "--kappa": ("kappa", OPEN_UNIT),
    "--psr": ("psr", POS_INT),
    "--prior-var": ("sigma0_sq", POS_FLOAT),
    "--lr": ("lr", NONNEG_FLOAT),
    "--init-alpha": ("init_alpha", POS_FLOAT),
    "--prior-scale": ("prior_scale", NONNEG_FLOAT),
    "--eval-every": ("eval_every", NONNEG_INT),
    "--eval-episodes": ("eval_episodes", POS_INT),
    "--visit-every": ("visit_every", POS_INT),
    "--log-every": ("log_every", POS_INT),
    "--lambda-bar": ("lambda_bar", POS_FLOAT),
    "--delta": ("delta", CONFIDENCE),
    "--reward-bound": ("reward_bound", NONNEG_FLOAT),
    "--out-dir": ("out_dir", str),
}


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="key=value config file (flags win)")
    p.add_argument("--env", dest="env", choices=ENV_NAMES, default=None)
    p.add_argument("--agent", dest="agent", choices=AGENTS, default=None)
    for flag, (dest, kind) in TRAIN_FLAGS.items():
        p.add_argument(flag, dest=dest, type=kind, default=None)
    p.add_argument("--loss-terms", dest="loss_terms", default=None, help="comma list of diversity,coherence,propagation")
    p.add_argument("--baseline-loss", dest="baseline_loss", choices=BASELINE_LOSSES, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbac", description="deep-exploration actor-critic toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    _add_run_flags(sub.add_parser("train", help="train one agent on one environment"))
    ev = sub.add_parser("eval", help="evaluate saved parameters of a finished run")
    _add_run_flags(ev)
    ev.add_argument("--params", default=None, help="params.npz (default: <run dir>/params.npz)")

    ver = sub.add_parser("verify", help="exact oracles and numerical self-checks")
    ver.add_argument("--seed", type=NONNEG_INT, default=0)
    ver.add_argument("--out-dir", default="runs")
    ver.add_argument("--n-mdps", dest="n_mdps", type=POS_INT, default=200)
    ver.add_argument("--n-configs", dest="n_configs", type=POS_INT, default=100)

    an = sub.add_parser("analyze", help="cross-seed statistics over eval.csv files")
    an.add_argument("paths", nargs="+", help="eval.csv files or directories to search")
    an.add_argument("--out-dir", default="runs")
    return parser


def parse_args(argv: Sequence[str] | None = None) -> CliCommand:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.subcommand in {"verify", "analyze"}:
        return CliCommand(
            subcommand=ns.subcommand,
            paths=tuple(getattr(ns, "paths", ()) or ()),
            out_dir=ns.out_dir,
            seed=getattr(ns, "seed", 0),
            n_mdps=getattr(ns, "n_mdps", 200),
            n_configs=getattr(ns, "n_configs", 100),
        )

    overrides = {name: getattr(ns, name) for name in ("env", "agent", "loss_terms", "baseline_loss")}
    overrides.update({dest: getattr(ns, dest) for dest, _ in TRAIN_FLAGS.values()})
    try:
        cfg = load_config(ns.config, overrides)
    except ConfigError as exc:
        parser.error(str(exc))
    if cfg.env not in ENV_NAMES:
        parser.error(f"unknown env {cfg.env!r}; choose from {list(ENV_NAMES)}")
    return CliCommand(
        subcommand=ns.subcommand,
        config=cfg,
        params=getattr(ns, "params", None),
        out_dir=cfg.out_dir,
        seed=cfg.seed,
    )
