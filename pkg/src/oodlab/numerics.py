"""Deterministic seeded randomness, distribution samplers, and dense matrix helpers.

All randomness in the package flows through :class:`RngState`, which derives
bit-reproducible, independent substreams from a (seed, stream_label) pair.
The Gamma sampler is the Marsaglia-Tsang squeeze method (with the shape<1
boost transform) so that Beta draws are correct for arbitrarily small shape
parameters; Beta is realized as X/(X+Y) over it. Matrix values are float64
throughout.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "RngState",
    "as_matrix",
    "gaussian_sample",
    "gamma_sample",
    "beta_sample",
    "matmul",
    "add",
    "relu",
    "softmax_rows",
    "logsumexp_rows",
]


@dataclass
class RngState:
    """A deterministic random stream addressed by (seed, stream_label).

    The same (seed, stream_label) replays the same draw sequence on any
    platform: the label is hashed with SHA-256 into a Philox key, so the
    underlying counter-based generator is fully determined by the pair.
    Distinct labels give statistically independent substreams.

    Not shareable between threads; give each worker its own substream.
    """

    seed: int
    stream_label: str = ""
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        seed = int(self.seed)
        if not 0 <= seed < 2**64:
            raise InvalidInputError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        digest = hashlib.sha256(f"{seed}\x1f{self.stream_label}".encode()).digest()
        key = int.from_bytes(digest[:16], "little")
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def substream(self, label: str) -> "RngState":
        """Derive an independent stream; labels nest as 'parent/child'."""
        joined = f"{self.stream_label}/{label}" if self.stream_label else label
        return RngState(self.seed, joined)

    def uniform(self, size=None):
        """U[0, 1) draws."""
        return self._gen.random(size)

    def normal(self, size=None):
        """Standard normal draws."""
        return self._gen.standard_normal(size)

    def integers(self, low: int, high: int, size=None):
        """Uniform integers in [low, high)."""
        return self._gen.integers(low, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Validate and return a finite 2-D float64 array (row-major)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name}: expected a 2-D array, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: entries must be finite")
    return np.ascontiguousarray(arr)


def gaussian_sample(mean, sigma: float, rng: RngState, n: int | None = None):
    """Draw from the isotropic Gaussian N(mean, sigma^2 I).

    mean is a scalar or length-d vector. With n=None one draw of mean's
    shape is returned; otherwise an (n, d) matrix. sigma=0 is permitted and
    returns mean exactly.
    """
    mean = np.asarray(mean, dtype=np.float64)
    if not np.all(np.isfinite(mean)):
        raise InvalidInputError("gaussian_sample: mean must be finite")
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma < 0:
        raise InvalidInputError("gaussian_sample: sigma must be a finite non-negative real")
    shape = mean.shape if n is None else (int(n),) + mean.shape
    z = rng.normal(size=shape)
    return mean + sigma * z


def _gamma_marsaglia_tsang(shape_vec: np.ndarray, rng: RngState) -> np.ndarray:
    """Vectorized Marsaglia-Tsang squeeze sampler, valid for shape >= 1."""
    d = shape_vec - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty_like(d)
    todo = np.arange(d.size)
    while todo.size:
        x = rng.normal(size=todo.size)
        u = rng.uniform(size=todo.size)
        v = (1.0 + c[todo] * x) ** 3
        ok = v > 0.0
        x2 = x * x
        accept = ok & (u < 1.0 - 0.0331 * x2 * x2)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_branch = np.log(u) < 0.5 * x2 + d[todo] * (1.0 - v + np.log(np.where(ok, v, 1.0)))
        accept |= ok & log_branch
        hit = todo[accept]
        out[hit] = d[hit] * v[accept]
        todo = todo[~accept]
    return out


def gamma_sample(shape, rng: RngState, n: int | None = None):
    """Draw from Gamma(shape, scale=1) via Marsaglia-Tsang.

    shape may be a scalar (returns a float, or an (n,) vector when n is
    given) or an array (one draw per entry; n must then be None). Shapes
    below 1 use the boost transform: sample at shape+1 and scale by
    u**(1/shape).
    """
    a = np.asarray(shape, dtype=np.float64)
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise InvalidInputError("gamma_sample: shape must be positive and finite")
    scalar_out = a.ndim == 0 and n is None
    if n is not None:
        if a.ndim != 0:
            raise InvalidInputError("gamma_sample: pass either an array shape or n, not both")
        a = np.full(int(n), float(a))
    orig_shape = a.shape
    a = np.atleast_1d(a).ravel()

    boost = a < 1.0
    draws = _gamma_marsaglia_tsang(np.where(boost, a + 1.0, a), rng)
    if np.any(boost):
        u = rng.uniform(size=int(boost.sum()))
        draws[boost] *= u ** (1.0 / a[boost])

    if scalar_out:
        return float(draws[0])
    return draws.reshape(orig_shape)


def beta_sample(a, b, rng: RngState, n: int | None = None):
    """Draw from Beta(a, b), realized as X/(X+Y) with X~Gamma(a), Y~Gamma(b).

    a and b may be scalars or equal-shape arrays (elementwise draws).
    """
    a_arr = np.asarray(a, dtype=np.float64)
    b_arr = np.asarray(b, dtype=np.float64)
    if a_arr.shape != b_arr.shape:
        raise InvalidInputError("beta_sample: a and b must have the same shape")
    if not np.all(np.isfinite(a_arr)) or not np.all(np.isfinite(b_arr)):
        raise InvalidInputError("beta_sample: parameters must be finite")
    if np.any(a_arr <= 0) or np.any(b_arr <= 0):
        raise InvalidInputError("beta_sample: parameters must be positive")
    scalar_out = a_arr.ndim == 0 and n is None
    x = np.asarray(gamma_sample(a_arr, rng, n=n), dtype=np.float64)
    y = np.asarray(gamma_sample(b_arr, rng, n=n), dtype=np.float64)
    total = x + y
    # x+y can underflow to 0 only when both shapes are far below 1
    ratio = np.where(total > 0.0, x / np.where(total > 0.0, total, 1.0), 0.5)
    if scalar_out:
        return float(ratio)
    return ratio


def matmul(a, b) -> np.ndarray:
    """Matrix product with explicit inner-dimension validation."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise InvalidInputError("matmul: both operands must be 2-D")
    if a.shape[1] != b.shape[0]:
        raise InvalidInputError(f"matmul: inner dimensions disagree ({a.shape} x {b.shape})")
    return a @ b


def add(a, b) -> np.ndarray:
    """Elementwise/broadcast addition with shape validation."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError as exc:
        raise InvalidInputError(f"add: shapes not compatible ({a.shape} + {b.shape})") from exc
    return a + b


def relu(x) -> np.ndarray:
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def softmax_rows(x) -> np.ndarray:
    """Row-wise softmax, stabilized by row-max subtraction."""
    x = np.asarray(x, dtype=np.float64)
    shifted = x - np.max(x, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


def logsumexp_rows(x):
    """Row-wise log-sum-exp, stabilized by row-max subtraction."""
    x = np.asarray(x, dtype=np.float64)
    m = np.max(x, axis=-1)
    return m + np.log(np.sum(np.exp(x - m[..., None]), axis=-1))
