from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Sequence

import pandas as pd

from src.core.config import ensure_parent_dir
from src.core.errors import CsvSchemaError

TRAIN_COLUMNS: tuple[str, ...] = (
    "step",
    "episode_return",
    "loss_diversity",
    "loss_coherence",
    "loss_propagation",
    "alpha",
    "active_head",
)
VISITS_COLUMNS: tuple[str, ...] = ("step", "dim_a", "dim_b")
BOUND_COLUMNS: tuple[str, ...] = ("step", "empirical_risk", "kl", "variance_term", "rhs")
SUMMARY_COLUMNS: tuple[str, ...] = (
    "method",
    "n_runs",
    "final_iqm",
    "final_q25",
    "final_q75",
    "aulc_iqm",
    "aulc_q25",
    "aulc_q75",
)
TTEST_COLUMNS: tuple[str, ...] = ("method_a", "method_b", "n_pairs", "t_stat", "p_value", "degenerate")

_EVAL_RETURN = re.compile(r"eval_return_(\d+)$")


def eval_columns(episodes: int) -> list[str]:
    return ["step", "eval_return_mean", *(f"eval_return_{i}" for i in range(episodes))]


def write_rows(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    p = Path(path)
    ensure_parent_dir(p)
    frame = pd.DataFrame(list(rows), columns=list(columns))
    frame.to_csv(p, index=False, lineterminator="\n", na_rep="nan")
    return p


def write_eval(path: str | Path, rows: Iterable[tuple[int, float, Sequence[float]]], episodes: int) -> Path:
    flat = []
    for step, mean, returns in rows:
        if len(returns) != episodes:
            raise ValueError(f"eval row at step {step} has {len(returns)} returns, expected {episodes}")
        flat.append([step, mean, *returns])
    return write_rows(path, eval_columns(episodes), flat)


def _check_header(path: Path, frame: pd.DataFrame, expected: Sequence[str]) -> None:
    if list(frame.columns) != list(expected):
        raise CsvSchemaError(f"{path}: header {list(frame.columns)} does not match {list(expected)}")


def read_table(path: str | Path, columns: Sequence[str]) -> pd.DataFrame:
    p = Path(path)
    frame = pd.read_csv(p)
    _check_header(p, frame, columns)
    return frame


def read_eval(path: str | Path) -> pd.DataFrame:
    p = Path(path)
    try:
        frame = pd.read_csv(p)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise CsvSchemaError(f"{p}: unreadable eval csv ({exc})") from exc
    cols = list(frame.columns)
    episodes = sum(1 for c in cols if _EVAL_RETURN.match(str(c)))
    if episodes < 1:
        raise CsvSchemaError(f"{p}: no eval_return_<i> columns in header {cols}")
    _check_header(p, frame, eval_columns(episodes))
    if frame.empty:
        raise CsvSchemaError(f"{p}: no evaluation rows")
    steps = frame["step"].to_numpy()
    if (steps[1:] <= steps[:-1]).any():
        raise CsvSchemaError(f"{p}: evaluation steps are not strictly increasing")
    return frame
