"""Experiment orchestration: configuration, the training loop, evaluation,
method/diversity/seed sweeps, and score-grid export.

Config documents are JSON with a fixed nested schema (see README); unknown
keys anywhere are a hard error so hyperparameter typos cannot silently
corrupt a sweep. Every run is a pure function of its config: datasets,
initialization, batch draws, and mixing each consume a named substream of
the run's root RNG, so sweep cells are order-independent and two identical
runs produce bit-identical parameters and metrics.
"""
from __future__ import annotations

import json
import math
import os
import time
from dataclasses import asdict, dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, InvalidInputError, OodLabError, TrainingDivergenceError
from .mixing import MixStrategy, mix_batch
from .nn import (
    MlpModel,
    forward,
    init_mlp,
    init_optim,
    loss_and_grad,
    save_checkpoint,
    sgd_step,
)
from .numerics import RngState
from .oodcore import (
    SCORE_KINDS,
    DetectionReport,
    RegLossSpec,
    aupr,
    auroc,
    calibrate_gamma,
    id_accuracy,
    score_rows,
    write_scores_csv,
)
from .synthdata import LabeledSet, OutlierSet, make_aux_outliers, make_id_dataset, make_test_ood

__all__ = [
    "DataConfig",
    "ModelConfig",
    "OptimConfig",
    "TrainConfig",
    "ExperimentConfig",
    "Datasets",
    "HistoryRow",
    "RunResult",
    "SWEEP_METHODS",
    "RESULTS_COLUMNS",
    "default_config",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "save_config",
    "make_datasets",
    "train",
    "evaluate",
    "run_experiment",
    "method_config",
    "run_sweep",
    "write_results_csv",
    "load_results_csv",
    "results_match",
    "write_history_csv",
    "write_report_csv",
    "export_score_grid",
]

SWEEP_METHODS = ("no-aux", "aux", "mixup", "diversemix", "cutmask")

RESULTS_COLUMNS = ("method", "k", "seed", "fpr95", "auroc", "aupr", "id_acc", "gamma", "wall_ms", "status")


def _set(obj, name, value) -> None:
    object.__setattr__(obj, name, value)


@dataclass(frozen=True)
class DataConfig:
    """Synthetic world geometry and sample counts. aux_k is the outlier
    diversity knob (ring component count)."""

    n_per_class: int = 500
    aux_k: int = 10
    aux_m: int = 2000
    test_n_per_class: int = 500
    test_ood_m: int = 2000
    num_classes: int = 3
    id_radius: float = 2.0
    id_sigma: float = 0.3
    aux_radius: float = 6.0
    aux_sigma: float = 0.3
    aux_phase: float = 0.0
    test_ring_k: int = 20
    test_ring_phase: float = math.pi / 1000.0
    test_ring_radius: float = 6.0
    test_ring_sigma: float = 0.3
    annulus_inner: float = 8.0
    annulus_outer: float = 12.0
    ring_fraction: float = 0.9

    def __post_init__(self) -> None:
        for name in ("n_per_class", "aux_k", "aux_m", "test_n_per_class", "test_ood_m", "num_classes", "test_ring_k"):
            _set(self, name, int(getattr(self, name)))
        for name in (
            "id_radius",
            "id_sigma",
            "aux_radius",
            "aux_sigma",
            "aux_phase",
            "test_ring_phase",
            "test_ring_radius",
            "test_ring_sigma",
            "annulus_inner",
            "annulus_outer",
            "ring_fraction",
        ):
            _set(self, name, float(getattr(self, name)))
        if min(self.n_per_class, self.aux_k, self.test_n_per_class, self.test_ood_m, self.test_ring_k) < 1:
            raise ConfigError("data: counts must be >= 1")
        if self.aux_m < self.aux_k:
            raise ConfigError("data: aux_m must be >= aux_k")
        if self.num_classes < 2:
            raise ConfigError("data: num_classes must be >= 2")
        if min(self.id_sigma, self.aux_sigma, self.test_ring_sigma) < 0:
            raise ConfigError("data: sigmas must be >= 0")
        if min(self.id_radius, self.aux_radius, self.test_ring_radius) <= 0:
            raise ConfigError("data: radii must be > 0")
        if not 0.0 < self.annulus_inner <= self.annulus_outer:
            raise ConfigError("data: annulus radii must satisfy 0 < inner <= outer")
        if not 0.0 <= self.ring_fraction <= 1.0:
            raise ConfigError("data: ring_fraction must be in [0, 1]")


@dataclass(frozen=True)
class ModelConfig:
    """Hidden widths of the 2-D input MLP; the output width is derived
    (num_classes, plus one extra head under the kplus1 regularizer)."""

    hidden_dims: tuple = (64, 64)

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.hidden_dims)
        if not dims or min(dims) < 1:
            raise ConfigError("model: hidden_dims must be a non-empty list of widths >= 1")
        _set(self, "hidden_dims", dims)


@dataclass(frozen=True)
class OptimConfig:
    learning_rate: float = 0.05
    momentum: float = 0.9
    milestones: tuple = ()
    decay_factor: float = 0.1

    def __post_init__(self) -> None:
        _set(self, "learning_rate", float(self.learning_rate))
        _set(self, "momentum", float(self.momentum))
        _set(self, "milestones", tuple(int(m) for m in self.milestones))
        _set(self, "decay_factor", float(self.decay_factor))
        if self.learning_rate < 0:
            raise ConfigError("optim: learning_rate must be >= 0")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError("optim: momentum must be in [0, 1)")
        if not 0.0 < self.decay_factor <= 1.0:
            raise ConfigError("optim: decay_factor must be in (0, 1]")


@dataclass(frozen=True)
class TrainConfig:
    """iterations of SGD; each step samples batch_size labeled rows and
    outlier_batch_size outlier rows (None means equal, a 1:1 composition).

    The defaults stop training inside the window where limited-coverage
    outlier sets still leak detectable false positives; at much larger
    budgets this 2-D world is easy enough that every method converges to
    near-zero FPR and the coverage ordering washes out."""

    iterations: int = 80
    batch_size: int = 128
    outlier_batch_size: int | None = 256
    log_every: int = 10

    def __post_init__(self) -> None:
        _set(self, "iterations", int(self.iterations))
        _set(self, "batch_size", int(self.batch_size))
        _set(self, "log_every", int(self.log_every))
        if self.outlier_batch_size is not None:
            _set(self, "outlier_batch_size", int(self.outlier_batch_size))
            if self.outlier_batch_size < 0:
                raise ConfigError("train: outlier_batch_size must be >= 0")
        if self.iterations < 1:
            raise ConfigError("train: iterations must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("train: batch_size must be >= 1")
        if self.log_every < 1:
            raise ConfigError("train: log_every must be >= 1")

    @property
    def effective_outlier_batch(self) -> int:
        return self.batch_size if self.outlier_batch_size is None else self.outlier_batch_size


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    score_kind: str = "energy"
    tpr_target: float = 0.95
    out_dir: str | None = None
    data: DataConfig = DataConfig()
    model: ModelConfig = ModelConfig()
    optim: OptimConfig = OptimConfig()
    train: TrainConfig = TrainConfig()
    mix: MixStrategy = MixStrategy()
    reg: RegLossSpec = RegLossSpec()

    def __post_init__(self) -> None:
        _set(self, "seed", int(self.seed))
        _set(self, "tpr_target", float(self.tpr_target))
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        if self.score_kind not in SCORE_KINDS:
            raise ConfigError(f"unknown score_kind {self.score_kind!r}, expected one of {SCORE_KINDS}")
        if not 0.0 < self.tpr_target <= 1.0:
            raise ConfigError("tpr_target must be in (0, 1]")
        if self.score_kind == "kplus1" and self.reg.variant != "kplus1":
            raise ConfigError("score_kind=kplus1 requires the kplus1 regularizer (the model has no extra head otherwise)")

    @property
    def output_dim(self) -> int:
        extra = 1 if self.reg.variant == "kplus1" else 0
        return self.data.num_classes + extra

    @property
    def layer_dims(self) -> tuple:
        return (2, *self.model.hidden_dims, self.output_dim)


def default_config(seed: int = 0) -> ExperimentConfig:
    return ExperimentConfig(seed=seed)


def _coerce_section(raw, converters: dict, path: str) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(f"config section {path or 'top level'} must be a JSON object")
    out = {}
    for key, value in raw.items():
        if key not in converters:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown config key: {where}")
        try:
            out[key] = converters[key](value)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f"bad value for config key {where}: {value!r}") from exc
    return out


def _int_list(values):
    return tuple(int(v) for v in values)


def _opt_str(value):
    return None if value is None else str(value)


_SECTION_CONVERTERS = {
    "data": {
        "n_per_class": int,
        "aux_k": int,
        "aux_m": int,
        "test_n_per_class": int,
        "test_ood_m": int,
        "num_classes": int,
        "id_radius": float,
        "id_sigma": float,
        "aux_radius": float,
        "aux_sigma": float,
        "aux_phase": float,
        "test_ring_k": int,
        "test_ring_phase": float,
        "test_ring_radius": float,
        "test_ring_sigma": float,
        "annulus_inner": float,
        "annulus_outer": float,
        "ring_fraction": float,
    },
    "model": {"hidden_dims": _int_list},
    "optim": {"learning_rate": float, "momentum": float, "milestones": _int_list, "decay_factor": float},
    "train": {
        "iterations": int,
        "batch_size": int,
        "outlier_batch_size": lambda v: None if v is None else int(v),
        "log_every": int,
    },
    "mix": {"kind": str, "alpha": float, "temperature": float},
    "reg": {"variant": str, "omega": float, "m_in": float, "m_out": float},
}

_SECTION_TYPES = {
    "data": DataConfig,
    "model": ModelConfig,
    "optim": OptimConfig,
    "train": TrainConfig,
    "mix": MixStrategy,
    "reg": RegLossSpec,
}

_TOP_CONVERTERS = {"seed": int, "score_kind": str, "tpr_target": float, "out_dir": _opt_str}


def config_from_dict(doc) -> ExperimentConfig:
    """Build a validated config from a nested plain dict. Missing keys take
    defaults; unknown keys raise ConfigError naming the offending path."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    top = dict(doc)
    kwargs = {}
    for name, cls in _SECTION_TYPES.items():
        raw = top.pop(name, {})
        values = _coerce_section(raw, _SECTION_CONVERTERS[name], name)
        kwargs[name] = cls(**values)
    kwargs.update(_coerce_section(top, _TOP_CONVERTERS, ""))
    return ExperimentConfig(**kwargs)


def config_to_dict(config: ExperimentConfig) -> dict:
    doc = asdict(config)
    for name in ("model",):
        doc[name]["hidden_dims"] = list(doc[name]["hidden_dims"])
    doc["optim"]["milestones"] = list(doc["optim"]["milestones"])
    return doc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(doc)


def save_config(path, config: ExperimentConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class Datasets:
    id_train: LabeledSet
    aux: OutlierSet
    id_test: LabeledSet
    ood_test: OutlierSet


def make_datasets(config: ExperimentConfig, rng: RngState | None = None) -> Datasets:
    """All four datasets from fixed-label substreams of the run's root RNG
    (id-train, aux, id-test, ood-test), so each set is independent of the
    others and of training-time draws."""
    if rng is None:
        rng = RngState(config.seed)
    d = config.data
    id_train = make_id_dataset(
        d.n_per_class,
        rng.substream("id-train"),
        num_classes=d.num_classes,
        radius=d.id_radius,
        sigma=d.id_sigma,
    )
    aux = make_aux_outliers(
        d.aux_k,
        d.aux_m,
        rng.substream("aux"),
        radius=d.aux_radius,
        sigma=d.aux_sigma,
        phase=d.aux_phase,
    )
    id_test = make_id_dataset(
        d.test_n_per_class,
        rng.substream("id-test"),
        num_classes=d.num_classes,
        radius=d.id_radius,
        sigma=d.id_sigma,
    )
    ood_test = make_test_ood(
        d.test_ood_m,
        rng.substream("ood-test"),
        ring_k=d.test_ring_k,
        ring_phase=d.test_ring_phase,
        ring_radius=d.test_ring_radius,
        ring_sigma=d.test_ring_sigma,
        annulus=(d.annulus_inner, d.annulus_outer),
        ring_fraction=d.ring_fraction,
    )
    return Datasets(id_train=id_train, aux=aux, id_test=id_test, ood_test=ood_test)


class HistoryRow(NamedTuple):
    iteration: int
    ce_loss: float
    reg_loss: float
    total_loss: float


def train(config: ExperimentConfig, rng: RngState | None = None, hook=None):
    """Run the training loop; returns (model, history).

    Each iteration: (1) draw batch_size labeled rows and
    outlier_batch_size outlier rows with replacement; (2) score the
    outlier rows with the CURRENT model (pre-update) under
    config.score_kind; (3) mix the outlier batch per config.mix, feeding
    those scores to the adaptive mixer; (4) evaluate loss and exact
    gradients; (5) momentum step. history holds a HistoryRow every
    log_every iterations plus the final iteration (reg_loss is the
    unweighted regularizer value).

    hook(iteration, model, outlier_batch, outlier_scores, mixed) is called
    after step (3), before any update. The model argument is live training
    state; copy() it if you keep it.

    Raises TrainingDivergenceError on a non-finite loss, gradient, or
    parameter, with the failing iteration attached.
    """
    if rng is None:
        rng = RngState(config.seed)
    data = config.data
    id_train = make_id_dataset(
        data.n_per_class,
        rng.substream("id-train"),
        num_classes=data.num_classes,
        radius=data.id_radius,
        sigma=data.id_sigma,
    )
    aux = make_aux_outliers(
        data.aux_k,
        data.aux_m,
        rng.substream("aux"),
        radius=data.aux_radius,
        sigma=data.aux_sigma,
        phase=data.aux_phase,
    )

    model = init_mlp(config.layer_dims, rng.substream("init"))
    opt = init_optim(
        model,
        config.optim.learning_rate,
        momentum=config.optim.momentum,
        milestones=config.optim.milestones,
        decay_factor=config.optim.decay_factor,
    )
    batch_rng = rng.substream("batches")
    mix_rng = rng.substream("mix")

    n_id = len(id_train)
    n_out = config.train.effective_outlier_batch
    iterations = config.train.iterations
    empty_batch = np.zeros((0, 2))
    history = []

    for t in range(iterations):
        idx_id = batch_rng.integers(0, n_id, size=config.train.batch_size)
        id_points = id_train.points[idx_id]
        id_labels = id_train.labels[idx_id]
        if n_out:
            idx_out = batch_rng.integers(0, len(aux), size=n_out)
            outlier_batch = aux.points[idx_out]
            outlier_scores = score_rows(forward(model, outlier_batch), config.score_kind)
            mixed = mix_batch(outlier_batch, outlier_scores, config.mix, mix_rng)
            mixed_points = mixed.points
        else:
            outlier_batch = empty_batch
            outlier_scores = np.zeros(0)
            mixed = None
            mixed_points = empty_batch
        if hook is not None:
            hook(t, model, outlier_batch, outlier_scores, mixed)
        terms, grads = loss_and_grad(
            model,
            id_points,
            id_labels,
            mixed_points,
            config.reg,
            score_kind=config.score_kind,
            num_classes=data.num_classes,
        )
        if not np.isfinite(terms.total):
            raise TrainingDivergenceError(
                f"non-finite loss at iteration {t}",
                iteration=t,
                details={"ce": terms.ce, "reg": terms.reg},
            )
        if t % config.train.log_every == 0 or t == iterations - 1:
            history.append(HistoryRow(t, terms.ce, terms.reg, terms.total))
        model, opt = sgd_step(model, grads, opt)

    return model, history


@dataclass(frozen=True)
class RunResult:
    """Per-OOD-set detection reports, their unweighted mean, and (when
    produced by run_experiment) the training history and wall time."""

    reports: tuple
    aggregate: DetectionReport
    history: tuple = ()
    wall_ms: float = 0.0


def evaluate(
    model: MlpModel,
    id_test: LabeledSet,
    ood_tests,
    score_kind: str = "energy",
    tpr_target: float = 0.95,
) -> RunResult:
    """Score the ID test set once, calibrate the threshold on it, then
    report detection metrics against each OOD test set. The aggregate is
    the unweighted mean across OOD sets."""
    ood_tests = list(ood_tests)
    if len(id_test) == 0 or not ood_tests:
        raise InvalidInputError("evaluate: need a non-empty ID test set and at least one OOD set")
    id_scores = score_rows(forward(model, id_test.points), score_kind)
    gamma = calibrate_gamma(id_scores, tpr_target)
    acc = id_accuracy(model, id_test)
    reports = []
    for ood in ood_tests:
        if len(ood) == 0:
            raise InvalidInputError("evaluate: empty OOD test set")
        ood_scores = score_rows(forward(model, ood.points), score_kind)
        reports.append(
            DetectionReport(
                gamma=gamma,
                fpr95=float(np.mean(ood_scores >= gamma)),
                auroc=auroc(id_scores, ood_scores),
                aupr=aupr(id_scores, ood_scores),
                id_acc=acc,
            )
        )
    aggregate = DetectionReport(
        gamma=gamma,
        fpr95=float(np.mean([r.fpr95 for r in reports])),
        auroc=float(np.mean([r.auroc for r in reports])),
        aupr=float(np.mean([r.aupr for r in reports])),
        id_acc=acc,
    )
    return RunResult(reports=tuple(reports), aggregate=aggregate)


def write_history_csv(path, history) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("iteration,ce_loss,reg_loss,total_loss\n")
        for row in history:
            fh.write(f"{row.iteration},{row.ce_loss!r},{row.reg_loss!r},{row.total_loss!r}\n")


def write_report_csv(path, result: RunResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("set,gamma,fpr95,auroc,aupr,id_acc\n")
        rows = [(f"ood-{i}", r) for i, r in enumerate(result.reports)]
        rows.append(("aggregate", result.aggregate))
        for name, r in rows:
            fh.write(f"{name},{r.gamma!r},{r.fpr95!r},{r.auroc!r},{r.aupr!r},{r.id_acc!r}\n")


def run_experiment(config: ExperimentConfig, out_dir=None, hook=None):
    """Train, evaluate on the config's test sets, and optionally write
    checkpoint.bin, history.csv, and report.csv to out_dir (which
    overrides config.out_dir). Returns (model, RunResult)."""
    start = time.perf_counter()
    model, history = train(config, hook=hook)
    data = make_datasets(config)
    result = evaluate(model, data.id_test, [data.ood_test], config.score_kind, config.tpr_target)
    wall_ms = (time.perf_counter() - start) * 1000.0
    result = RunResult(reports=result.reports, aggregate=result.aggregate, history=tuple(history), wall_ms=wall_ms)
    target = config.out_dir if out_dir is None else out_dir
    if target is not None:
        os.makedirs(target, exist_ok=True)
        save_checkpoint(os.path.join(target, "checkpoint.bin"), model)
        write_history_csv(os.path.join(target, "history.csv"), history)
        write_report_csv(os.path.join(target, "report.csv"), result)
    return model, result


def _parse_method_token(token: str):
    name, sep, suffix = token.partition("@")
    if name not in SWEEP_METHODS:
        raise ConfigError(f"unknown sweep method {name!r}, expected one of {SWEEP_METHODS}")
    if not sep:
        return name, None
    try:
        k = int(suffix)
    except ValueError as exc:
        raise ConfigError(f"bad diversity level in sweep method {token!r}") from exc
    return name, k


def method_config(base: ExperimentConfig, method: str, k: int | None = None, seed: int | None = None) -> ExperimentConfig:
    """Specialize a base config for one sweep cell. Methods: no-aux
    (regularizer weight zeroed, no mixing), aux (regularized, no mixing),
    mixup / diversemix / cutmask (regularized, that mixer). A method token
    may carry its own diversity level as name@k."""
    name, pinned = _parse_method_token(method)
    kwargs = {}
    if name == "no-aux":
        kwargs["reg"] = replace(base.reg, omega=0.0)
        kwargs["mix"] = replace(base.mix, kind="none")
    elif name == "aux":
        kwargs["mix"] = replace(base.mix, kind="none")
    elif name == "mixup":
        kwargs["mix"] = replace(base.mix, kind="vanilla")
    elif name == "diversemix":
        kwargs["mix"] = replace(base.mix, kind="diversemix")
    else:
        kwargs["mix"] = replace(base.mix, kind="cutmask")
    k = pinned if pinned is not None else k
    if k is not None:
        kwargs["data"] = replace(base.data, aux_k=int(k))
    if seed is not None:
        kwargs["seed"] = int(seed)
    return replace(base, **kwargs)


def run_sweep(base_config: ExperimentConfig, methods, k_levels, seeds, out_dir=None):
    """Train and evaluate every (method, diversity level, seed) cell;
    returns the result rows and writes results.csv when out_dir is given.

    A method token with an @k suffix occupies exactly one column of the
    grid at that diversity level; tokens without a suffix are crossed with
    k_levels (or keep the base config's aux_k when k_levels is empty).
    A failing cell is recorded with its error class in the status column
    and the sweep continues. Cells are independent (each is seeded from
    its own config), so rows do not depend on execution order.
    """
    methods = list(methods)
    seeds = [int(s) for s in seeds]
    k_levels = [int(k) for k in k_levels]
    if not methods or not seeds:
        raise ConfigError("run_sweep: methods and seeds must be non-empty")
    cells = []
    for token in methods:
        name, pinned = _parse_method_token(token)
        ks = [pinned] if pinned is not None else (k_levels or [base_config.data.aux_k])
        for k in ks:
            for seed in seeds:
                cells.append((token, name, k, seed))
    rows = []
    for token, name, k, seed in cells:
        row = {"method": name, "k": k, "seed": seed, "status": "ok"}
        for col in ("fpr95", "auroc", "aupr", "id_acc", "gamma", "wall_ms"):
            row[col] = None
        try:
            config = method_config(base_config, token, k=k, seed=seed)
            config = replace(config, out_dir=None)
            _, result = run_experiment(config)
        except OodLabError as exc:
            row["status"] = type(exc).__name__
        else:
            agg = result.aggregate
            row.update(
                fpr95=agg.fpr95,
                auroc=agg.auroc,
                aupr=agg.aupr,
                id_acc=agg.id_acc,
                gamma=agg.gamma,
                wall_ms=result.wall_ms,
            )
        rows.append(row)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_results_csv(os.path.join(out_dir, "results.csv"), rows)
    return rows


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_results_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(RESULTS_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(row[col]) for col in RESULTS_COLUMNS) + "\n")


def load_results_csv(path):
    """Rows as dicts of raw strings, in file order."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines or lines[0].split(",") != list(RESULTS_COLUMNS):
        raise InvalidInputError(f"{path}: missing or wrong results.csv header")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(RESULTS_COLUMNS):
            raise InvalidInputError(f"{path}: malformed results row: {line!r}")
        rows.append(dict(zip(RESULTS_COLUMNS, parts)))
    return rows


def results_match(path_a, path_b, ignore_columns=("wall_ms",)) -> bool:
    """True when the two results files agree on every cell outside
    ignore_columns (wall time is never reproducible)."""
    rows_a = load_results_csv(path_a)
    rows_b = load_results_csv(path_b)
    if len(rows_a) != len(rows_b):
        return False
    compared = [c for c in RESULTS_COLUMNS if c not in set(ignore_columns)]
    return all(ra[c] == rb[c] for ra, rb in zip(rows_a, rows_b) for c in compared)


def export_score_grid(model: MlpModel, score_kind: str, bounds, resolution: int, out_path) -> np.ndarray:
    """Score a resolution x resolution lattice over bounds
    (xmin, xmax, ymin, ymax) and write CSV rows x,y,score in row-major
    order (y outer, x inner). Returns the scores as a (resolution,
    resolution) array indexed [y, x]. Lattice values are direct model
    evaluations; nothing is interpolated."""
    if len(tuple(bounds)) != 4:
        raise InvalidInputError("export_score_grid: bounds must be (xmin, xmax, ymin, ymax)")
    xmin, xmax, ymin, ymax = (float(b) for b in bounds)
    resolution = int(resolution)
    if resolution < 2:
        raise InvalidInputError("export_score_grid: resolution must be >= 2")
    if not (xmin < xmax and ymin < ymax):
        raise InvalidInputError("export_score_grid: degenerate bounds")
    xs = np.linspace(xmin, xmax, resolution)
    ys = np.linspace(ymin, ymax, resolution)
    gx, gy = np.meshgrid(xs, ys)
    points = np.column_stack([gx.ravel(), gy.ravel()])
    scores = score_rows(forward(model, points), score_kind)
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write("x,y,score\n")
            for (x, y), s in zip(points, scores):
                fh.write(f"{float(x)!r},{float(y)!r},{float(s)!r}\n")
    return scores.reshape(resolution, resolution)
