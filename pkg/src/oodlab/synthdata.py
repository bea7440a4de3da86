"""Synthetic 2-D benchmark world: labeled Gaussian classes, a ring-shaped
auxiliary outlier mixture with a tunable component count (the diversity
knob), and held-out test outliers that interleave the auxiliary ring and
add a far-field annulus.

Default geometry (all config-overridable): three labeled classes at radius
2.0 (one per third of the circle, sigma 0.3); auxiliary ring at radius 6.0,
k equally spaced components at phase 0; test outliers use a 20-component
ring at phase pi/1000 plus a uniform annulus with radius in [8, 12]. The
pi/1000 phase keeps every test center off every auxiliary center for any
auxiliary k below 2000 (the offset is a half-step of a 2000-spoke ring,
and no coarser ring lands on its half-steps).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .numerics import RngState, as_matrix, gaussian_sample

__all__ = [
    "GmmSpec",
    "LabeledSet",
    "OutlierSet",
    "ring_gmm_spec",
    "id_gmm_spec",
    "sample_gmm",
    "make_id_dataset",
    "make_aux_outliers",
    "make_test_ood",
    "save_labeled_csv",
    "save_outlier_csv",
    "load_points_csv",
    "load_labeled_csv",
    "OUTLIER_LABEL",
    "DEFAULT_ID_RADIUS",
    "DEFAULT_ID_SIGMA",
    "DEFAULT_NUM_CLASSES",
    "DEFAULT_AUX_RADIUS",
    "DEFAULT_AUX_SIGMA",
    "DEFAULT_AUX_PHASE",
    "DEFAULT_TEST_RING_K",
    "DEFAULT_TEST_RING_PHASE",
    "DEFAULT_ANNULUS",
]

DEFAULT_ID_RADIUS = 2.0
DEFAULT_ID_SIGMA = 0.3
DEFAULT_NUM_CLASSES = 3
DEFAULT_AUX_RADIUS = 6.0
DEFAULT_AUX_SIGMA = 0.3
DEFAULT_AUX_PHASE = 0.0
DEFAULT_K_MAX = 1000  # densest ring in the default diversity grid
DEFAULT_TEST_RING_K = 20
DEFAULT_TEST_RING_PHASE = np.pi / DEFAULT_K_MAX
DEFAULT_ANNULUS = (8.0, 12.0)

OUTLIER_LABEL = -1


@dataclass(frozen=True)
class GmmSpec:
    """Isotropic Gaussian mixture: shared sigma, explicit means and weights."""

    means: np.ndarray  # (m, 2)
    sigma: float
    weights: np.ndarray  # (m,)

    def __post_init__(self) -> None:
        means = as_matrix(self.means, "GmmSpec.means")
        weights = np.asarray(self.weights, dtype=np.float64)
        if means.shape[0] < 1:
            raise InvalidInputError("GmmSpec: need at least one component")
        if weights.shape != (means.shape[0],) or np.any(weights < 0):
            raise InvalidInputError("GmmSpec: one non-negative weight per component")
        if abs(float(weights.sum()) - 1.0) > 1e-12:
            raise InvalidInputError("GmmSpec: weights must sum to 1 within 1e-12")
        # sigma = 0 is the degenerate point-mass limit and is permitted
        if not self.sigma >= 0:
            raise InvalidInputError("GmmSpec: sigma must be non-negative")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "weights", weights)
        means.flags.writeable = False
        weights.flags.writeable = False

    @property
    def component_count(self) -> int:
        return self.means.shape[0]


@dataclass(frozen=True)
class LabeledSet:
    """Labeled points; labels are integers in [0, num_classes)."""

    points: np.ndarray  # (n, 2)
    labels: np.ndarray  # (n,)
    num_classes: int

    def __post_init__(self) -> None:
        points = as_matrix(self.points, "LabeledSet.points")
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.shape != (points.shape[0],):
            raise InvalidInputError("LabeledSet: one label per point")
        if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise InvalidInputError("LabeledSet: labels out of [0, num_classes)")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)
        points.flags.writeable = False
        labels.flags.writeable = False

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class OutlierSet:
    """Unlabeled outlier points plus their generating provenance.

    component_count is the diversity level k. annulus, when present,
    records the (r_lo, r_hi) far-field band that supplements the mixture
    spec (test outlier sets only).
    """

    points: np.ndarray  # (m, 2)
    component_count: int
    spec: GmmSpec
    annulus: tuple | None = None

    def __post_init__(self) -> None:
        points = as_matrix(self.points, "OutlierSet.points")
        if self.component_count < 1:
            raise InvalidInputError("OutlierSet: component_count must be >= 1")
        object.__setattr__(self, "points", points)
        points.flags.writeable = False

    def __len__(self) -> int:
        return self.points.shape[0]


def ring_gmm_spec(
    k: int,
    radius: float = DEFAULT_AUX_RADIUS,
    sigma: float = DEFAULT_AUX_SIGMA,
    phase: float = DEFAULT_AUX_PHASE,
) -> GmmSpec:
    """k equally spaced, equally weighted components on a circle."""
    if k < 1:
        raise InvalidInputError("ring_gmm_spec: k must be >= 1")
    angles = 2.0 * np.pi * np.arange(k) / k + phase
    means = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    return GmmSpec(means=means, sigma=sigma, weights=np.full(k, 1.0 / k))


def id_gmm_spec(
    num_classes: int = DEFAULT_NUM_CLASSES,
    radius: float = DEFAULT_ID_RADIUS,
    sigma: float = DEFAULT_ID_SIGMA,
) -> GmmSpec:
    """One labeled class per component, equally spaced at the given radius."""
    return ring_gmm_spec(num_classes, radius=radius, sigma=sigma, phase=0.0)


def sample_gmm(spec: GmmSpec, n: int, rng: RngState):
    """Draw n points; returns (points (n,2), component indices (n,))."""
    if n < 1:
        raise InvalidInputError("sample_gmm: n must be >= 1")
    cdf = np.cumsum(spec.weights)
    comp = np.searchsorted(cdf, rng.uniform(size=n), side="right")
    comp = np.minimum(comp, spec.component_count - 1)
    noise = gaussian_sample(np.zeros(2), spec.sigma, rng, n=n)
    return spec.means[comp] + noise, comp


def make_id_dataset(
    n_per_class: int,
    rng: RngState,
    num_classes: int = DEFAULT_NUM_CLASSES,
    radius: float = DEFAULT_ID_RADIUS,
    sigma: float = DEFAULT_ID_SIGMA,
) -> LabeledSet:
    """Balanced labeled set: exactly n_per_class points per class, labels
    assigned by generating component."""
    if n_per_class < 1:
        raise InvalidInputError("make_id_dataset: n_per_class must be >= 1")
    spec = id_gmm_spec(num_classes, radius=radius, sigma=sigma)
    labels = np.repeat(np.arange(num_classes), n_per_class)
    noise = gaussian_sample(np.zeros(2), sigma, rng, n=labels.size)
    points = spec.means[labels] + noise
    return LabeledSet(points=points, labels=labels, num_classes=num_classes)


def make_aux_outliers(
    k: int,
    m: int,
    rng: RngState,
    radius: float = DEFAULT_AUX_RADIUS,
    sigma: float = DEFAULT_AUX_SIGMA,
    phase: float = DEFAULT_AUX_PHASE,
) -> OutlierSet:
    """m draws from a k-component ring mixture (component per draw is
    multinomial with equal weights)."""
    if k < 1:
        raise InvalidInputError("make_aux_outliers: k must be >= 1")
    if m < k:
        raise InvalidInputError("make_aux_outliers: need m >= k")
    spec = ring_gmm_spec(k, radius=radius, sigma=sigma, phase=phase)
    points, _ = sample_gmm(spec, m, rng)
    return OutlierSet(points=points, component_count=k, spec=spec)


def make_test_ood(
    m: int,
    rng: RngState,
    ring_k: int = DEFAULT_TEST_RING_K,
    ring_phase: float = DEFAULT_TEST_RING_PHASE,
    ring_radius: float = DEFAULT_AUX_RADIUS,
    ring_sigma: float = DEFAULT_AUX_SIGMA,
    annulus: tuple = DEFAULT_ANNULUS,
    ring_fraction: float = 0.9,
) -> OutlierSet:
    """Held-out test outliers: a ring mixture whose phase interleaves the
    auxiliary components, plus a uniform far-field annulus (uniform in
    angle and in radius over [r_lo, r_hi])."""
    if m < 1:
        raise InvalidInputError("make_test_ood: m must be >= 1")
    if not 0.0 <= ring_fraction <= 1.0:
        raise InvalidInputError("make_test_ood: ring_fraction must be in [0, 1]")
    r_lo, r_hi = float(annulus[0]), float(annulus[1])
    if not 0.0 < r_lo <= r_hi:
        raise InvalidInputError("make_test_ood: annulus radii must satisfy 0 < r_lo <= r_hi")
    spec = ring_gmm_spec(ring_k, radius=ring_radius, sigma=ring_sigma, phase=ring_phase)
    n_ring = int(np.floor(m * ring_fraction + 0.5))
    n_ann = m - n_ring
    parts = []
    if n_ring:
        ring_points, _ = sample_gmm(spec, n_ring, rng)
        parts.append(ring_points)
    if n_ann:
        radii = r_lo + (r_hi - r_lo) * rng.uniform(size=n_ann)
        theta = 2.0 * np.pi * rng.uniform(size=n_ann)
        parts.append(np.column_stack([radii * np.cos(theta), radii * np.sin(theta)]))
    points = np.concatenate(parts, axis=0)
    return OutlierSet(points=points, component_count=ring_k, spec=spec, annulus=(r_lo, r_hi))


def _write_points_csv(path, points: np.ndarray, labels: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "label"])
        for (x, y), lab in zip(points, labels):
            writer.writerow([repr(float(x)), repr(float(y)), int(lab)])


def save_labeled_csv(path, dataset: LabeledSet) -> None:
    """CSV columns x,y,label with a header row; UTF-8; '.' decimals."""
    _write_points_csv(path, dataset.points, dataset.labels)


def save_outlier_csv(path, outliers: OutlierSet) -> None:
    """Outliers are written with label -1."""
    _write_points_csv(path, outliers.points, np.full(len(outliers), OUTLIER_LABEL))


def load_points_csv(path):
    """Read an x,y,label CSV back; returns (points (n,2), labels (n,))."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["x", "y", "label"]:
            raise InvalidInputError(f"{path}: expected header x,y,label, got {header!r}")
        xs, ys, labs = [], [], []
        for row in reader:
            if len(row) != 3:
                raise InvalidInputError(f"{path}: malformed row {row!r}")
            xs.append(float(row[0]))
            ys.append(float(row[1]))
            labs.append(int(row[2]))
    points = np.column_stack([xs, ys]) if xs else np.empty((0, 2))
    return points, np.asarray(labs, dtype=np.int64)


def load_labeled_csv(path) -> LabeledSet:
    """Rebuild a LabeledSet (num_classes inferred as max label + 1)."""
    points, labels = load_points_csv(path)
    if labels.size and labels.min() < 0:
        raise InvalidInputError(f"{path}: labeled CSV contains outlier rows")
    num_classes = int(labels.max()) + 1 if labels.size else 0
    return LabeledSet(points=points, labels=labels, num_classes=num_classes)
