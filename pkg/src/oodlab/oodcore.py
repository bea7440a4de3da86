"""Scoring, thresholding, regularizer values, and exact detection metrics.

Score convention: higher = more in-distribution. A point is declared ID
when its score is >= gamma (inclusive boundary). gamma is calibrated on ID
scores as the largest threshold keeping at least the target fraction of ID
scores at or above it.

Metric conventions (documented assumptions):

* AUROC uses half-credit for ties and is computed two independent ways —
  pairwise Mann-Whitney (:func:`auroc`) and a trapezoidal ROC sweep
  (:func:`auroc_trapezoid`); the two must agree to 1e-9.
* AUPR treats ID as the positive class and is step-wise average precision
  (so a constant scorer yields exactly the ID prevalence).
* Classification argmax ties break to the lowest class index.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidInputError
from .numerics import logsumexp_rows, softmax_rows

__all__ = [
    "SCORE_KINDS",
    "REG_VARIANTS",
    "RegLossSpec",
    "DetectionReport",
    "score",
    "score_rows",
    "detect",
    "calibrate_gamma",
    "fpr_at_tpr",
    "auroc",
    "auroc_trapezoid",
    "aupr",
    "reg_loss",
    "id_accuracy",
    "write_scores_csv",
]

SCORE_KINDS = ("energy", "msp", "kplus1")
REG_VARIANTS = ("energy", "oe", "kplus1")


@dataclass(frozen=True)
class RegLossSpec:
    """Outlier regularizer choice: variant in {energy, oe, kplus1}, weight
    omega >= 0, and (energy only) the hinge margins m_in > m_out."""

    variant: str = "energy"
    omega: float = 0.01
    m_in: float = 3.0
    m_out: float = -3.0

    def __post_init__(self) -> None:
        if self.variant not in REG_VARIANTS:
            raise ConfigError(f"RegLossSpec: unknown variant {self.variant!r}, expected one of {REG_VARIANTS}")
        if not self.omega >= 0:
            raise ConfigError("RegLossSpec: omega must be >= 0")
        if self.variant == "energy" and not self.m_in > self.m_out:
            raise ConfigError("RegLossSpec: energy margins need m_in > m_out")


@dataclass(frozen=True)
class DetectionReport:
    """Threshold and metrics for one trained model on one test pairing."""

    gamma: float
    fpr95: float
    auroc: float
    aupr: float
    id_acc: float

    def __post_init__(self) -> None:
        for name in ("fpr95", "auroc", "aupr", "id_acc"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidInputError(f"DetectionReport: {name}={v} outside [0, 1]")


def _check_scores(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise InvalidInputError(f"{name}: empty score vector")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: scores must be finite")
    return arr


def score_rows(logits, kind: str) -> np.ndarray:
    """Vectorized score of an (n, width) logit matrix; see :func:`score`."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 2 or logits.shape[1] < 2:
        raise InvalidInputError("score_rows: need an (n, width>=2) logit matrix")
    if kind == "energy":
        return logsumexp_rows(logits)
    if kind == "msp":
        return softmax_rows(logits).max(axis=1)
    if kind == "kplus1":
        if logits.shape[1] < 3:
            raise ConfigError("kplus1 score needs a K+1-wide head (width >= 3)")
        return -softmax_rows(logits)[:, -1]
    raise ConfigError(f"unknown score kind {kind!r}, expected one of {SCORE_KINDS}")


def score(logits, kind: str) -> float:
    """Score one logit vector. energy = log-sum-exp (higher = more ID);
    msp = max softmax probability; kplus1 = negative softmax mass on the
    extra (last) head."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 1:
        raise InvalidInputError("score: logits must be a 1-D vector")
    return float(score_rows(logits[None, :], kind)[0])


def detect(score_value: float, gamma: float) -> str:
    """'id' iff score_value >= gamma (inclusive boundary), else 'ood'."""
    if not (np.isfinite(score_value) and np.isfinite(gamma)):
        raise InvalidInputError("detect: inputs must be finite")
    return "id" if score_value >= gamma else "ood"


def calibrate_gamma(id_scores, tpr_target: float = 0.95) -> float:
    """Largest gamma with fraction(id_scores >= gamma) >= tpr_target.

    That largest value is attained at a score: the c-th largest ID score
    with c = ceil(tpr_target * n).
    """
    id_scores = _check_scores(id_scores, "calibrate_gamma")
    if not 0.0 < tpr_target <= 1.0:
        raise InvalidInputError("calibrate_gamma: tpr_target must be in (0, 1]")
    n = id_scores.size
    c = math.ceil(tpr_target * n)
    return float(np.sort(id_scores)[n - c])


def fpr_at_tpr(id_scores, ood_scores, tpr_target: float = 0.95) -> float:
    """Fraction of OOD scores at or above the calibrated gamma."""
    gamma = calibrate_gamma(id_scores, tpr_target)
    ood_scores = _check_scores(ood_scores, "fpr_at_tpr")
    return float(np.mean(ood_scores >= gamma))


def auroc(id_scores, ood_scores) -> float:
    """Pairwise Mann-Whitney AUROC with half-credit for ties."""
    id_scores = _check_scores(id_scores, "auroc")
    ood_scores = np.sort(_check_scores(ood_scores, "auroc"))
    below = np.searchsorted(ood_scores, id_scores, side="left")
    below_or_tie = np.searchsorted(ood_scores, id_scores, side="right")
    wins = float(below.sum())
    ties = float((below_or_tie - below).sum())
    return (wins + 0.5 * ties) / (id_scores.size * ood_scores.size)


def auroc_trapezoid(id_scores, ood_scores) -> float:
    """Independent AUROC route: trapezoidal area under the ROC sweep over
    the distinct pooled scores (must match :func:`auroc` to 1e-9)."""
    id_scores = _check_scores(id_scores, "auroc_trapezoid")
    ood_scores = _check_scores(ood_scores, "auroc_trapezoid")
    thresholds = np.unique(np.concatenate([id_scores, ood_scores]))[::-1]
    tpr = np.array([np.mean(id_scores >= g) for g in thresholds])
    fpr = np.array([np.mean(ood_scores >= g) for g in thresholds])
    tpr = np.concatenate([[0.0], tpr])
    fpr = np.concatenate([[0.0], fpr])
    area = 0.0
    for t in range(1, tpr.size):
        area += (fpr[t] - fpr[t - 1]) * (tpr[t] + tpr[t - 1]) / 2.0
    return float(area)


def aupr(id_scores, ood_scores) -> float:
    """Step-wise average precision with ID as the positive class."""
    id_scores = np.sort(_check_scores(id_scores, "aupr"))
    ood_scores = np.sort(_check_scores(ood_scores, "aupr"))
    n_id = id_scores.size
    n_ood = ood_scores.size
    levels = np.unique(np.concatenate([id_scores, ood_scores]))[::-1]
    tp = n_id - np.searchsorted(id_scores, levels, side="left")
    fp = n_ood - np.searchsorted(ood_scores, levels, side="left")
    recall = tp / n_id
    precision = tp / (tp + fp)
    delta = np.diff(recall, prepend=0.0)
    return float(np.sum(delta * precision))


def reg_loss(id_scores, ood_scores_or_logits, spec: RegLossSpec) -> float:
    """Unweighted regularizer value L_aux (the caller applies omega).

    energy consumes score vectors (either side may be empty/None and then
    contributes 0); oe and kplus1 consume the outlier logit matrix.
    """
    if spec.variant == "energy":
        total = 0.0
        for side, margin_term in (("id", "in"), ("ood", "out")):
            values = id_scores if side == "id" else ood_scores_or_logits
            if values is None:
                continue
            arr = np.asarray(values, dtype=np.float64)
            if arr.ndim > 1:
                raise ConfigError("reg_loss(energy): expected score vectors, got a matrix")
            if arr.size == 0:
                continue
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError("reg_loss: scores must be finite")
            if margin_term == "in":
                gaps = np.maximum(0.0, spec.m_in - arr)
            else:
                gaps = np.maximum(0.0, arr - spec.m_out)
            total += float(np.mean(gaps**2))
        return total

    logits = np.asarray(ood_scores_or_logits, dtype=np.float64)
    if logits.ndim != 2 or logits.shape[0] == 0:
        raise ConfigError(f"reg_loss({spec.variant}): expected a non-empty outlier logit matrix")
    if spec.variant == "oe":
        return float(np.mean(logsumexp_rows(logits) - logits.mean(axis=1)))
    if spec.variant == "kplus1":
        if logits.shape[1] < 3:
            raise ConfigError("reg_loss(kplus1): logits must be K+1 wide (width >= 3)")
        return float(np.mean(logsumexp_rows(logits) - logits[:, -1]))
    raise ConfigError(f"unknown regularizer variant {spec.variant!r}")


def id_accuracy(model, dataset) -> float:
    """Fraction of argmax-over-first-K-logits predictions equal to the
    label (any extra head is excluded; argmax ties break to the lowest
    index)."""
    from .nn import forward

    if len(dataset) == 0:
        raise InvalidInputError("id_accuracy: empty test set")
    logits = forward(model, dataset.points)
    preds = np.argmax(logits[:, : dataset.num_classes], axis=1)
    return float(np.mean(preds == dataset.labels))


def write_scores_csv(path, id_scores, ood_scores) -> None:
    """CSV `source,score` with source in {id, ood}."""
    id_scores = _check_scores(id_scores, "write_scores_csv")
    ood_scores = _check_scores(ood_scores, "write_scores_csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "score"])
        for s in id_scores:
            writer.writerow(["id", repr(float(s))])
        for s in ood_scores:
            writer.writerow(["ood", repr(float(s))])
