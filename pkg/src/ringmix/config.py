"""Experiment configuration: INI-style parsing, validation, canonical echo.

Grammar (stdlib configparser, no interpolation): three sections, all
keys lowercase, `key = value` pairs, `#`/`;` comments.

    [experiment]
    strategies = adpsgd_fixed, rand_psgd, d1d   ; required
    learners = 16, 32                           ; required
    iterations = 500                            ; required
    trials = 8                                  ; required
    seed = 1234                                 ; required
    lr = 0.01                                   ; required
    batch_mode = total-fixed                    ; required: total-fixed | per-learner-fixed
    batch_size = 8192                           ; required
    warmup_iters = 0
    staleness_mode = async                      ; sync | async (rand_psgd only)
    init_scale = 1.0
    data_partition = shared                     ; shared | sharded
    log_every = 1

    [oracle]
    kind = quadratic                            ; quadratic | logistic
    dimension = 16
    seed = 0
    condition_number = 10.0                     ; quadratic only
    noise_scale = 1.0                           ; quadratic only
    n_samples = 512                             ; logistic only
    separation = 2.0                            ; logistic only
    ridge = 0.0001                              ; logistic only

    [cost_model]
    message_size_mb = 165.0
    bandwidth_gbps = 25.0
    compute_median_s = 0.1
    compute_sigma = 0.1
    straggler_factor = 1.0
    straggler_count = 0

Unknown sections or keys are rejected by name, as are keys that do not
apply to the chosen oracle kind.  `parse_config(echo_config(cfg))`
returns an equal config: floats are echoed via repr, which round-trips
exactly.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, replace

from .simulation import Strategy


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    strategies: tuple[Strategy, ...]
    learner_counts: tuple[int, ...]
    iterations: int
    trials: int
    master_seed: int
    lr: float
    batch_mode: str
    batch_size: int
    warmup_iters: int = 0
    staleness_mode: str = "async"
    init_scale: float = 1.0
    data_partition: str = "shared"
    log_every: int = 1
    oracle_kind: str = "quadratic"
    dimension: int = 16
    oracle_seed: int = 0
    condition_number: float = 10.0
    noise_scale: float = 1.0
    n_samples: int = 512
    separation: float = 2.0
    ridge: float = 1e-4
    message_size_mb: float = 165.0
    bandwidth_gbps: float = 25.0
    compute_median_s: float = 0.1
    compute_sigma: float = 0.1
    straggler_factor: float = 1.0
    straggler_count: int = 0

    def per_learner_batch(self, n_learners: int) -> int:
        if self.batch_mode == "per-learner-fixed":
            return self.batch_size
        return self.batch_size // n_learners


_REQUIRED_EXPERIMENT = (
    "strategies", "learners", "iterations", "trials", "seed", "lr", "batch_mode", "batch_size",
)
_EXPERIMENT_KEYS = _REQUIRED_EXPERIMENT + (
    "warmup_iters", "staleness_mode", "init_scale", "data_partition", "log_every",
)
_ORACLE_KEYS_COMMON = ("kind", "dimension", "seed")
_ORACLE_KEYS_QUADRATIC = ("condition_number", "noise_scale")
_ORACLE_KEYS_LOGISTIC = ("n_samples", "separation", "ridge")
_COST_KEYS = (
    "message_size_mb", "bandwidth_gbps", "compute_median_s", "compute_sigma",
    "straggler_factor", "straggler_count",
)


def _convert(section: str, key: str, raw: str, kind):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
    except ValueError:
        raise ConfigError(
            f"[{section}] {key}: expected {kind.__name__}, got {raw!r}"
        ) from None
    raise AssertionError(kind)


def _int_list(section: str, key: str, raw: str) -> tuple[int, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"[{section}] {key}: expected a comma-separated list")
    return tuple(_convert(section, key, p, int) for p in parts)


def _parse_strategies(raw: str) -> tuple[Strategy, ...]:
    out = []
    for part in (p.strip() for p in raw.split(",")):
        if not part:
            continue
        try:
            out.append(Strategy(part))
        except ValueError:
            valid = ", ".join(s.value for s in Strategy)
            raise ConfigError(
                f"[experiment] strategies: unknown strategy {part!r} (valid: {valid})"
            ) from None
    if not out:
        raise ConfigError("[experiment] strategies: expected at least one strategy")
    if len(set(out)) != len(out):
        raise ConfigError("[experiment] strategies: duplicate strategy")
    return tuple(out)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate configuration text.  Raises ConfigError."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        parser.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from None

    known_sections = {"experiment", "oracle", "cost_model"}
    for section in parser.sections():
        if section not in known_sections:
            raise ConfigError(f"unknown section [{section}]")
    if not parser.has_section("experiment"):
        raise ConfigError("missing required section [experiment]")

    exp = parser["experiment"]
    for key in exp:
        if key not in _EXPERIMENT_KEYS:
            raise ConfigError(f"[experiment] unknown key {key!r}")
    for key in _REQUIRED_EXPERIMENT:
        if key not in exp:
            raise ConfigError(f"[experiment] missing required key {key!r}")

    oracle = parser["oracle"] if parser.has_section("oracle") else {}
    kind = oracle.get("kind", "quadratic")
    if kind not in ("quadratic", "logistic"):
        raise ConfigError(f"[oracle] kind: expected quadratic|logistic, got {kind!r}")
    allowed_oracle = set(_ORACLE_KEYS_COMMON) | set(
        _ORACLE_KEYS_QUADRATIC if kind == "quadratic" else _ORACLE_KEYS_LOGISTIC
    )
    for key in oracle:
        if key not in allowed_oracle:
            raise ConfigError(
                f"[oracle] key {key!r} not recognized for kind {kind!r}"
            )

    cost = parser["cost_model"] if parser.has_section("cost_model") else {}
    for key in cost:
        if key not in _COST_KEYS:
            raise ConfigError(f"[cost_model] unknown key {key!r}")

    def exp_int(key, default=None):
        if key not in exp:
            return default
        return _convert("experiment", key, exp[key], int)

    def exp_float(key, default=None):
        if key not in exp:
            return default
        return _convert("experiment", key, exp[key], float)

    cfg = ExperimentConfig(
        strategies=_parse_strategies(exp["strategies"]),
        learner_counts=_int_list("experiment", "learners", exp["learners"]),
        iterations=exp_int("iterations"),
        trials=exp_int("trials"),
        master_seed=exp_int("seed"),
        lr=exp_float("lr"),
        batch_mode=exp["batch_mode"].strip(),
        batch_size=exp_int("batch_size"),
        warmup_iters=exp_int("warmup_iters", 0),
        staleness_mode=exp.get("staleness_mode", "async").strip(),
        init_scale=exp_float("init_scale", 1.0),
        data_partition=exp.get("data_partition", "shared").strip(),
        log_every=exp_int("log_every", 1),
        oracle_kind=kind,
        dimension=_convert("oracle", "dimension", oracle.get("dimension", "16"), int),
        oracle_seed=_convert("oracle", "seed", oracle.get("seed", "0"), int),
        condition_number=_convert(
            "oracle", "condition_number", oracle.get("condition_number", "10.0"), float
        ),
        noise_scale=_convert("oracle", "noise_scale", oracle.get("noise_scale", "1.0"), float),
        n_samples=_convert("oracle", "n_samples", oracle.get("n_samples", "512"), int),
        separation=_convert("oracle", "separation", oracle.get("separation", "2.0"), float),
        ridge=_convert("oracle", "ridge", oracle.get("ridge", "0.0001"), float),
        message_size_mb=_convert(
            "cost_model", "message_size_mb", cost.get("message_size_mb", "165.0"), float
        ),
        bandwidth_gbps=_convert(
            "cost_model", "bandwidth_gbps", cost.get("bandwidth_gbps", "25.0"), float
        ),
        compute_median_s=_convert(
            "cost_model", "compute_median_s", cost.get("compute_median_s", "0.1"), float
        ),
        compute_sigma=_convert(
            "cost_model", "compute_sigma", cost.get("compute_sigma", "0.1"), float
        ),
        straggler_factor=_convert(
            "cost_model", "straggler_factor", cost.get("straggler_factor", "1.0"), float
        ),
        straggler_count=_convert(
            "cost_model", "straggler_count", cost.get("straggler_count", "0"), int
        ),
    )
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig) -> None:
    """Range and consistency checks; raises ConfigError naming the field."""
    if cfg.iterations < 1:
        raise ConfigError("[experiment] iterations: must be >= 1")
    if cfg.trials < 1:
        raise ConfigError("[experiment] trials: must be >= 1")
    if cfg.master_seed < 0:
        raise ConfigError("[experiment] seed: must be >= 0")
    if cfg.lr <= 0:
        raise ConfigError("[experiment] lr: must be > 0")
    if cfg.warmup_iters < 0:
        raise ConfigError("[experiment] warmup_iters: must be >= 0")
    if cfg.batch_mode not in ("total-fixed", "per-learner-fixed"):
        raise ConfigError(
            f"[experiment] batch_mode: expected total-fixed|per-learner-fixed, "
            f"got {cfg.batch_mode!r}"
        )
    if cfg.batch_size < 1:
        raise ConfigError("[experiment] batch_size: must be >= 1")
    if cfg.staleness_mode not in ("sync", "async"):
        raise ConfigError("[experiment] staleness_mode: expected sync|async")
    if cfg.init_scale < 0:
        raise ConfigError("[experiment] init_scale: must be >= 0")
    if cfg.data_partition not in ("shared", "sharded"):
        raise ConfigError("[experiment] data_partition: expected shared|sharded")
    if cfg.log_every < 1:
        raise ConfigError("[experiment] log_every: must be >= 1")
    if not cfg.learner_counts:
        raise ConfigError("[experiment] learners: expected at least one count")
    needs_ring = any(
        s in (Strategy.DPSGD_FIXED, Strategy.ADPSGD_FIXED, Strategy.RAND_PSGD)
        for s in cfg.strategies
    )
    for L in cfg.learner_counts:
        if L < 1:
            raise ConfigError(f"[experiment] learners: must be >= 1, got {L}")
        if needs_ring and L < 3:
            raise ConfigError(
                f"[experiment] learners: ring strategies need >= 3 learners, got {L}"
            )
        if cfg.batch_mode == "total-fixed":
            if cfg.batch_size % L != 0:
                raise ConfigError(
                    f"[experiment] batch_size: total-fixed size {cfg.batch_size} "
                    f"not divisible by learners={L}"
                )
            if cfg.batch_size // L < 1:
                raise ConfigError(
                    f"[experiment] batch_size: total-fixed size {cfg.batch_size} "
                    f"leaves no samples per learner at learners={L}"
                )
        if cfg.straggler_count > L:
            raise ConfigError(
                f"[cost_model] straggler_count: {cfg.straggler_count} exceeds learners={L}"
            )
    if cfg.dimension < 1:
        raise ConfigError("[oracle] dimension: must be >= 1")
    if cfg.oracle_seed < 0:
        raise ConfigError("[oracle] seed: must be >= 0")
    if cfg.oracle_kind == "quadratic":
        if cfg.condition_number < 1:
            raise ConfigError("[oracle] condition_number: must be >= 1")
        if cfg.noise_scale < 0:
            raise ConfigError("[oracle] noise_scale: must be >= 0")
    else:
        if cfg.n_samples < 2:
            raise ConfigError("[oracle] n_samples: must be >= 2")
        if cfg.separation < 0:
            raise ConfigError("[oracle] separation: must be >= 0")
        if cfg.ridge < 0:
            raise ConfigError("[oracle] ridge: must be >= 0")
    if cfg.message_size_mb <= 0:
        raise ConfigError("[cost_model] message_size_mb: must be > 0")
    if cfg.bandwidth_gbps <= 0:
        raise ConfigError("[cost_model] bandwidth_gbps: must be > 0")
    if cfg.compute_median_s <= 0:
        raise ConfigError("[cost_model] compute_median_s: must be > 0")
    if cfg.compute_sigma < 0:
        raise ConfigError("[cost_model] compute_sigma: must be >= 0")
    if cfg.straggler_factor <= 0:
        raise ConfigError("[cost_model] straggler_factor: must be > 0")
    if cfg.straggler_count < 0:
        raise ConfigError("[cost_model] straggler_count: must be >= 0")


def echo_config(cfg: ExperimentConfig) -> str:
    """Canonical text for a config: parse(echo(cfg)) == cfg, byte-stable."""
    f = lambda x: repr(float(x))
    lines = [
        "[experiment]",
        "strategies = " + ", ".join(s.value for s in cfg.strategies),
        "learners = " + ", ".join(str(n) for n in cfg.learner_counts),
        f"iterations = {cfg.iterations}",
        f"trials = {cfg.trials}",
        f"seed = {cfg.master_seed}",
        f"lr = {f(cfg.lr)}",
        f"batch_mode = {cfg.batch_mode}",
        f"batch_size = {cfg.batch_size}",
        f"warmup_iters = {cfg.warmup_iters}",
        f"staleness_mode = {cfg.staleness_mode}",
        f"init_scale = {f(cfg.init_scale)}",
        f"data_partition = {cfg.data_partition}",
        f"log_every = {cfg.log_every}",
        "",
        "[oracle]",
        f"kind = {cfg.oracle_kind}",
        f"dimension = {cfg.dimension}",
        f"seed = {cfg.oracle_seed}",
    ]
    if cfg.oracle_kind == "quadratic":
        lines += [
            f"condition_number = {f(cfg.condition_number)}",
            f"noise_scale = {f(cfg.noise_scale)}",
        ]
    else:
        lines += [
            f"n_samples = {cfg.n_samples}",
            f"separation = {f(cfg.separation)}",
            f"ridge = {f(cfg.ridge)}",
        ]
    lines += [
        "",
        "[cost_model]",
        f"message_size_mb = {f(cfg.message_size_mb)}",
        f"bandwidth_gbps = {f(cfg.bandwidth_gbps)}",
        f"compute_median_s = {f(cfg.compute_median_s)}",
        f"compute_sigma = {f(cfg.compute_sigma)}",
        f"straggler_factor = {f(cfg.straggler_factor)}",
        f"straggler_count = {cfg.straggler_count}",
        "",
    ]
    return "\n".join(lines)


def with_overrides(
    cfg: ExperimentConfig, master_seed: int | None = None, trials: int | None = None
) -> ExperimentConfig:
    """Config with CLI-level overrides applied (None keeps the file's value)."""
    updates = {}
    if master_seed is not None:
        updates["master_seed"] = master_seed
    if trials is not None:
        updates["trials"] = trials
    if not updates:
        return cfg
    out = replace(cfg, **updates)
    validate_config(out)
    return out
