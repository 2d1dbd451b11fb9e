from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

from dotenv import dotenv_values

from src.core.errors import ConfigError

AGENTS: tuple[str, ...] = ("pbac", "bootdqnp", "sac")
LOSS_TERMS: tuple[str, ...] = ("diversity", "coherence", "propagation")
BASELINE_LOSSES: tuple[str, ...] = ("squared", "huber")


@dataclass(frozen=True)
class TrainConfig:
    env: str = "pointmass-delayed"
    agent: str = "pbac"
    seed: int = 0
    total_steps: int = 300_000
    warmup_steps: int = 10_000
    batch_size: int = 256
    replay_ratio: int = 5
    buffer_size: int = 100_000
    ensemble_size: int = 10
    hidden: int = 256
    gamma: float = 0.99
    tau: float = 5e-3
    kappa: float = 0.05
    psr: int = 5
    sigma0_sq: float = 1.0
    lr: float = 3e-4
    init_alpha: float = 1.0
    prior_scale: float = 5.0
    loss_terms: tuple[str, ...] = LOSS_TERMS
    baseline_loss: str = "squared"
    eval_every: int = 0
    eval_episodes: int = 10
    visit_every: int = 500
    visit_dims: tuple[int, int] = (0, 1)
    log_every: int = 5000
    lambda_bar: float = 1.0
    delta: float = 0.05
    reward_bound: float = 1.0
    nu: float = 1.0
    out_dir: str = "runs"

    @property
    def eval_interval(self) -> int:
        if self.eval_every > 0:
            return self.eval_every
        # evaluation frequency defaults to total timesteps / 100
        return max(1, self.total_steps // 100)

    def run_dir(self) -> Path:
        return Path(self.out_dir) / self.env / self.agent / f"seed_{self.seed}"

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["loss_terms"] = ",".join(self.loss_terms)
        out["visit_dims"] = ",".join(str(d) for d in self.visit_dims)
        return out


# config-file / flag spellings that differ from field names
KEY_ALIASES: dict[str, str] = {
    "steps": "total_steps",
    "warmup": "warmup_steps",
    "batch": "batch_size",
    "buffer": "buffer_size",
    "ensemble": "ensemble_size",
    "prior_var": "sigma0_sq",
}

FIELD_NAMES: frozenset[str] = frozenset(f.name for f in fields(TrainConfig))


def _as_int(name: str, raw: Any) -> int:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected an integer, got {raw!r}") from None
    if not value.is_integer():
        raise ConfigError(f"{name}: expected an integer, got {raw!r}")
    return int(value)


def _as_float(name: str, raw: Any) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number, got {raw!r}") from None


def _as_terms(raw: Any) -> tuple[str, ...]:
    items = raw if isinstance(raw, (tuple, list)) else str(raw).split(",")
    terms = tuple(t.strip().lower() for t in items if str(t).strip())
    unknown = [t for t in terms if t not in LOSS_TERMS]
    if unknown:
        raise ConfigError(f"loss_terms: unknown term(s) {unknown}; choose from {list(LOSS_TERMS)}")
    return tuple(t for t in LOSS_TERMS if t in terms)


def _as_dims(raw: Any) -> tuple[int, int]:
    items = raw if isinstance(raw, (tuple, list)) else str(raw).split(",")
    dims = tuple(_as_int("visit_dims", x) for x in items)
    if len(dims) != 2 or min(dims) < 0:
        raise ConfigError(f"visit_dims: expected two non-negative indices, got {raw!r}")
    return dims  # type: ignore[return-value]


def _normalize_key(key: str) -> str:
    k = key.strip().lower().replace("-", "_")
    return KEY_ALIASES.get(k, k)


def _coerce(name: str, raw: Any) -> Any:
    if name in {"env", "agent", "out_dir", "baseline_loss"}:
        return str(raw).strip()
    if name == "loss_terms":
        return _as_terms(raw)
    if name == "visit_dims":
        return _as_dims(raw)
    default = getattr(TrainConfig, name)
    if isinstance(default, int):
        return _as_int(name, raw)
    return _as_float(name, raw)


def validate(cfg: TrainConfig) -> TrainConfig:
    if cfg.agent not in AGENTS:
        raise ConfigError(f"agent: unknown {cfg.agent!r}; choose from {list(AGENTS)}")
    if cfg.baseline_loss not in BASELINE_LOSSES:
        raise ConfigError(f"baseline_loss: choose from {list(BASELINE_LOSSES)}")
    if not 0.0 < cfg.kappa < 1.0:
        raise ConfigError(f"kappa must lie in (0,1), got {cfg.kappa}")
    lo_gamma = 0.0 < cfg.gamma if cfg.agent == "pbac" else 0.0 <= cfg.gamma
    if not (lo_gamma and cfg.gamma < 1.0):
        raise ConfigError(f"gamma out of range for {cfg.agent}: {cfg.gamma}")
    if not 0.0 <= cfg.tau <= 1.0:
        raise ConfigError(f"tau must lie in [0,1], got {cfg.tau}")
    if cfg.sigma0_sq <= 0.0:
        raise ConfigError(f"prior variance must be positive, got {cfg.sigma0_sq}")
    if cfg.agent in {"pbac", "bootdqnp"} and cfg.ensemble_size < 2:
        raise ConfigError(f"ensemble size must be >= 2 for {cfg.agent}")
    if cfg.total_steps < 1 or not 0 <= cfg.warmup_steps <= cfg.total_steps:
        raise ConfigError(f"need 0 <= warmup ({cfg.warmup_steps}) <= steps ({cfg.total_steps})")
    for name in ("replay_ratio", "batch_size", "buffer_size", "psr", "hidden", "eval_episodes", "visit_every", "log_every"):
        if getattr(cfg, name) < 1:
            raise ConfigError(f"{name} must be >= 1")
    if cfg.eval_every < 0:
        raise ConfigError("eval_every must be >= 0 (0 = steps/100)")
    if cfg.lr < 0.0:
        raise ConfigError("lr must be >= 0")
    if cfg.init_alpha <= 0.0:
        raise ConfigError("init_alpha must be positive")
    if cfg.prior_scale < 0.0:
        raise ConfigError("prior_scale must be >= 0")
    if not 0.0 < cfg.delta <= 1.0:
        raise ConfigError(f"delta must lie in (0,1], got {cfg.delta}")
    if cfg.lambda_bar <= 0.0 or cfg.nu <= 0.0 or cfg.reward_bound < 0.0:
        raise ConfigError("lambda_bar and nu must be positive, reward_bound non-negative")
    return cfg


def read_config_file(path: str | Path) -> dict[str, Any]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    raw = dotenv_values(p)
    out: dict[str, Any] = {}
    for key, value in raw.items():
        name = _normalize_key(key)
        if name not in FIELD_NAMES:
            raise ConfigError(f"{p}: unknown key {key!r}")
        if value is None:
            raise ConfigError(f"{p}: key {key!r} has no value")
        out[name] = value
    return out


def load_config(config_path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> TrainConfig:
    values: dict[str, Any] = {}
    if config_path:
        values.update(read_config_file(config_path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        name = _normalize_key(key)
        if name not in FIELD_NAMES:
            raise ConfigError(f"unknown setting {key!r}")
        values[name] = value
    coerced = {name: _coerce(name, raw) for name, raw in values.items()}
    return validate(replace(TrainConfig(), **coerced))


def ensure_parent_dir(path_str: str | Path) -> None:
    Path(path_str).parent.mkdir(parents=True, exist_ok=True)
