from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from src.analysis import csv_io
from src.analysis.bound import BoundDiagnostics
from src.core.config import ensure_parent_dir

NAN = float("nan")


@dataclass(frozen=True)
class LossStats:
    diversity: float = NAN
    coherence: float = NAN
    propagation: float = NAN


@dataclass(frozen=True)
class TrainRecord:
    step: int
    episode_return: float
    loss: LossStats
    alpha: float
    active_head: int

    def row(self) -> list[Any]:
        return [
            self.step,
            self.episode_return,
            self.loss.diversity,
            self.loss.coherence,
            self.loss.propagation,
            self.alpha,
            self.active_head,
        ]


@dataclass(frozen=True)
class EvalRecord:
    step: int
    mean_return: float
    returns: tuple[float, ...]


@dataclass
class TrainLog:
    train: list[TrainRecord] = field(default_factory=list)
    evals: list[EvalRecord] = field(default_factory=list)
    visits: list[tuple[int, float, float]] = field(default_factory=list)
    bounds: list[tuple[int, BoundDiagnostics]] = field(default_factory=list)
    gradient_phases: int = 0
    buffer_size: int = 0
    wall_seconds: float = 0.0
    failure: dict[str, Any] | None = None

    def append_train(self, rec: TrainRecord) -> None:
        if self.train and rec.step <= self.train[-1].step:
            raise ValueError(f"train log step {rec.step} after {self.train[-1].step}")
        self.train.append(rec)

    def append_eval(self, rec: EvalRecord) -> None:
        if self.evals and rec.step <= self.evals[-1].step:
            raise ValueError(f"eval log step {rec.step} after {self.evals[-1].step}")
        self.evals.append(rec)


def write_run(log: TrainLog, run_dir: str | Path, eval_episodes: int) -> dict[str, Path]:
    out = Path(run_dir)
    written = {
        "train": csv_io.write_rows(out / "train.csv", csv_io.TRAIN_COLUMNS, (r.row() for r in log.train)),
        "eval": csv_io.write_eval(
            out / "eval.csv", ((e.step, e.mean_return, e.returns) for e in log.evals), eval_episodes
        ),
        "visits": csv_io.write_rows(out / "visits.csv", csv_io.VISITS_COLUMNS, log.visits),
    }
    if log.bounds:
        written["bound"] = csv_io.write_rows(
            out / "bound.csv",
            csv_io.BOUND_COLUMNS,
            ([step, d.empirical_risk, d.kl, d.variance_term, d.rhs] for step, d in log.bounds),
        )
    if log.failure is not None:
        path = out / "failure.json"
        ensure_parent_dir(path)
        path.write_text(json.dumps(log.failure, indent=2) + "\n", encoding="utf-8")
        written["failure"] = path
    return written
