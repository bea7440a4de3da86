"""Interpolation machinery for auxiliary outliers.

Four strategies:

* ``none``: pass-through (raw outliers, lambda = 1 provenance);
* ``vanilla``: lambda ~ Beta(alpha, alpha), x_hat = lambda*x_i + (1-lambda)*x_j;
* ``diversemix``: per-pair adaptive weights (w_i, w_j) from a temperature
  softmax of the pair's current scores, then lambda ~ Beta(w_i*alpha,
  w_j*alpha) — pairs where one point looks more novel get lambdas biased
  toward it;
* ``cutmask``: lambda ~ Beta(alpha, alpha) and a uniformly random
  coordinate subset of size round(lambda*d) is taken from x_i, the rest
  from x_j.

Batch mixing shuffles the batch and its score vector with the same
permutation and pairs row t with shuffled row t. Self-pairs are allowed
and are exact identities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidInputError
from .numerics import RngState, beta_sample

__all__ = [
    "MIX_KINDS",
    "MixStrategy",
    "MixedBatch",
    "adaptive_weights",
    "diversemix_pair",
    "vanilla_mixup_pair",
    "cutmask_pair",
    "mix_batch",
]

MIX_KINDS = ("none", "vanilla", "diversemix", "cutmask")

# Extreme score spreads saturate the pair softmax to exact 0/1; flooring the
# weights here keeps both Beta parameters positive. The floored draw then
# lands on the matching endpoint (lambda = 0 or 1) almost surely, which is
# the Beta(a, b -> 0) limit.
_WEIGHT_FLOOR = 1e-12


def _sampling_weights(w_i):
    w_i = np.clip(w_i, _WEIGHT_FLOOR, 1.0 - _WEIGHT_FLOOR)
    return w_i, 1.0 - w_i


@dataclass(frozen=True)
class MixStrategy:
    """kind in {none, vanilla, diversemix, cutmask}; alpha is the Beta
    concentration; temperature softens the adaptive weights (diversemix)."""

    kind: str = "diversemix"
    alpha: float = 4.0
    temperature: float = 10.0

    def __post_init__(self) -> None:
        if self.kind not in MIX_KINDS:
            raise ConfigError(f"MixStrategy: unknown kind {self.kind!r}, expected one of {MIX_KINDS}")
        if not self.alpha > 0:
            raise ConfigError("MixStrategy: alpha must be positive")
        if self.kind == "diversemix" and not self.temperature > 0:
            raise ConfigError("MixStrategy: temperature must be positive")


@dataclass(frozen=True)
class MixedBatch:
    """Mixed points plus per-row provenance (source indices and lambda)."""

    points: np.ndarray  # (n, d)
    index_i: np.ndarray  # (n,)
    index_j: np.ndarray  # (n,)
    lam: np.ndarray  # (n,)

    def __post_init__(self) -> None:
        n = self.points.shape[0]
        for name in ("index_i", "index_j", "lam"):
            if getattr(self, name).shape != (n,):
                raise InvalidInputError(f"MixedBatch: {name} must have one entry per row")
        if self.lam.size and (self.lam.min() < 0.0 or self.lam.max() > 1.0):
            raise InvalidInputError("MixedBatch: every lambda must lie in [0, 1]")

    def __len__(self) -> int:
        return self.points.shape[0]


def adaptive_weights(s_i, s_j, temperature: float):
    """Two-way temperature softmax of a score pair, stabilized by max
    subtraction. Returns (w_i, w_j) with w_j = 1 - w_i; equal scores give
    exactly (0.5, 0.5). Accepts scalars or equal-shape arrays."""
    if not temperature > 0:
        raise InvalidInputError("adaptive_weights: temperature must be positive")
    s_i = np.asarray(s_i, dtype=np.float64)
    s_j = np.asarray(s_j, dtype=np.float64)
    if not (np.all(np.isfinite(s_i)) and np.all(np.isfinite(s_j))):
        raise InvalidInputError("adaptive_weights: scores must be finite")
    m = np.maximum(s_i, s_j)
    e_i = np.exp((s_i - m) / temperature)
    e_j = np.exp((s_j - m) / temperature)
    w_i = e_i / (e_i + e_j)
    w_j = 1.0 - w_i
    if w_i.ndim == 0:
        return float(w_i), float(w_j)
    return w_i, w_j


def _linear_mix(x_i: np.ndarray, x_j: np.ndarray, lam) -> np.ndarray:
    """lam*x_i + (1-lam)*x_j for a single pair, with exact endpoints.

    Computed as x_j + lam*(x_i - x_j) so that self-pairs reproduce the
    point exactly for any lam; the clip (at most 1 ulp) keeps every
    coordinate inside the pair's min/max envelope; lam == 1 short-circuits
    to a bit-exact copy of x_i.
    """
    if lam == 1.0:
        return x_i.copy()
    if lam == 0.0:
        return x_j.copy()
    mixed = x_j + lam * (x_i - x_j)
    return np.clip(mixed, np.minimum(x_i, x_j), np.maximum(x_i, x_j))


def _check_pair(x_i, x_j):
    x_i = np.asarray(x_i, dtype=np.float64)
    x_j = np.asarray(x_j, dtype=np.float64)
    if x_i.shape != x_j.shape or x_i.ndim != 1 or x_i.size < 1:
        raise InvalidInputError("mix pair: points must be equal-length 1-D vectors")
    return x_i, x_j


def diversemix_pair(x_i, x_j, s_i: float, s_j: float, strategy: MixStrategy, rng: RngState, lam=None):
    """Adaptive pair mix: lambda ~ Beta(w_i*alpha, w_j*alpha). Returns
    (x_hat, lambda); pass lam to force the interpolation weight (test hook)."""
    if strategy.kind != "diversemix":
        raise ConfigError(f"diversemix_pair: strategy kind is {strategy.kind!r}")
    x_i, x_j = _check_pair(x_i, x_j)
    w_i, _ = adaptive_weights(s_i, s_j, strategy.temperature)
    w_i, w_j = _sampling_weights(w_i)
    if lam is None:
        lam = beta_sample(w_i * strategy.alpha, w_j * strategy.alpha, rng)
    return _linear_mix(x_i, x_j, float(lam)), float(lam)


def vanilla_mixup_pair(x_i, x_j, alpha: float, rng: RngState, lam=None):
    """Symmetric pair mix: lambda ~ Beta(alpha, alpha). Returns (x_hat, lambda)."""
    if not alpha > 0:
        raise InvalidInputError("vanilla_mixup_pair: alpha must be positive")
    x_i, x_j = _check_pair(x_i, x_j)
    if lam is None:
        lam = beta_sample(alpha, alpha, rng)
    return _linear_mix(x_i, x_j, float(lam)), float(lam)


def cutmask_pair(x_i, x_j, alpha: float, rng: RngState, lam=None):
    """Coordinate-mask mix: round(lambda*d) uniformly chosen coordinates
    come from x_i, the rest from x_j. Returns (x_hat, lambda)."""
    if not alpha > 0:
        raise InvalidInputError("cutmask_pair: alpha must be positive")
    x_i, x_j = _check_pair(x_i, x_j)
    if lam is None:
        lam = beta_sample(alpha, alpha, rng)
    lam = float(lam)
    d = x_i.size
    n_keep = int(np.floor(lam * d + 0.5))  # round-half-up, deterministic
    take = rng.permutation(d)[:n_keep]
    mixed = x_j.copy()
    mixed[take] = x_i[take]
    return mixed, lam


def mix_batch(points, scores, strategy: MixStrategy, rng: RngState) -> MixedBatch:
    """Pair each batch row with a row of the shuffled batch and mix.

    The shuffle permutation is applied to the points and to their scores
    identically (row t is paired with shuffled row t, whose original index
    is perm[t]). kind=none returns the batch unchanged with lambda = 1
    provenance. Scores are consumed only by diversemix but are always
    length-checked.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise InvalidInputError("mix_batch: points must be a 2-D batch")
    n, d = points.shape
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (n,):
        raise InvalidInputError(f"mix_batch: scores length {scores.shape} != batch size {n}")
    idx = np.arange(n)

    if strategy.kind == "none":
        return MixedBatch(points=points.copy(), index_i=idx, index_j=idx.copy(), lam=np.ones(n))

    perm = rng.permutation(n)
    partner = points[perm]

    if strategy.kind == "cutmask":
        lam = np.asarray(beta_sample(strategy.alpha, strategy.alpha, rng, n=n))
        n_keep = np.floor(lam * d + 0.5).astype(np.int64)
        # per-row uniformly random coordinate subsets via random ranks
        ranks = np.argsort(np.argsort(rng.uniform(size=(n, d)), axis=1), axis=1)
        mask = ranks < n_keep[:, None]
        mixed = np.where(mask, points, partner)
        return MixedBatch(points=mixed, index_i=idx, index_j=perm, lam=lam)

    if strategy.kind == "vanilla":
        lam = np.asarray(beta_sample(strategy.alpha, strategy.alpha, rng, n=n))
    elif strategy.kind == "diversemix":
        w_i, _ = adaptive_weights(scores, scores[perm], strategy.temperature)
        w_i, w_j = _sampling_weights(w_i)
        lam = np.asarray(beta_sample(w_i * strategy.alpha, w_j * strategy.alpha, rng))
    else:
        raise ConfigError(f"mix_batch: unknown strategy kind {strategy.kind!r}")

    mixed = partner + lam[:, None] * (points - partner)
    np.clip(mixed, np.minimum(points, partner), np.maximum(points, partner), out=mixed)
    exact = lam == 1.0
    if np.any(exact):
        mixed[exact] = points[exact]
    return MixedBatch(points=mixed, index_i=idx, index_j=perm, lam=lam)
