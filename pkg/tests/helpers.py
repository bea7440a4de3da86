"""Shared brute-force oracles and utilities for the test suite.

Everything here is deliberately naive (O(n^2) pairwise loops, exhaustive
threshold sweeps, finite differences) so the fast implementations in the
package are checked against an independent route.
"""
import numpy as np

from oodlab import MlpModel, forward, loss_and_grad


def pairwise_auroc(id_scores, ood_scores):
    """Count concordant ID/OOD pairs one by one, half credit for ties."""
    id_scores = np.asarray(id_scores, dtype=np.float64)
    ood_scores = np.asarray(ood_scores, dtype=np.float64)
    wins = 0.0
    for s in id_scores:
        for t in ood_scores:
            if s > t:
                wins += 1.0
            elif s == t:
                wins += 0.5
    return wins / (id_scores.size * ood_scores.size)


def sweep_gamma(id_scores, tpr_target):
    """Largest candidate threshold keeping at least tpr_target of ID scores,
    found by trying every score in the set (the threshold must be attained)."""
    id_scores = np.asarray(id_scores, dtype=np.float64)
    n = id_scores.size
    best = None
    for g in np.sort(id_scores):
        if np.count_nonzero(id_scores >= g) / n >= tpr_target:
            best = g
    return best


def sweep_fpr(id_scores, ood_scores, tpr_target):
    g = sweep_gamma(id_scores, tpr_target)
    ood_scores = np.asarray(ood_scores, dtype=np.float64)
    return np.count_nonzero(ood_scores >= g) / ood_scores.size


def average_precision(id_scores, ood_scores):
    """Step-wise AP with ID positive, sweeping distinct scores descending."""
    id_scores = np.asarray(id_scores, dtype=np.float64)
    ood_scores = np.asarray(ood_scores, dtype=np.float64)
    n_pos = id_scores.size
    ap = 0.0
    prev_recall = 0.0
    for level in np.unique(np.concatenate([id_scores, ood_scores]))[::-1]:
        tp = np.count_nonzero(id_scores >= level)
        fp = np.count_nonzero(ood_scores >= level)
        recall = tp / n_pos
        precision = tp / (tp + fp)
        ap += (recall - prev_recall) * precision
        prev_recall = recall
    return ap


def flatten_params(model):
    parts = [w.ravel() for w in model.weights] + [b.ravel() for b in model.biases]
    return np.concatenate(parts)


def model_from_flat(model, theta):
    weights, biases = [], []
    pos = 0
    for w in model.weights:
        weights.append(theta[pos : pos + w.size].reshape(w.shape).copy())
        pos += w.size
    for b in model.biases:
        biases.append(theta[pos : pos + b.size].reshape(b.shape).copy())
        pos += b.size
    return MlpModel(weights=tuple(weights), biases=tuple(biases))


def gradcheck_max_rel_error(model, id_points, id_labels, outliers, reg,
                            score_kind="energy", num_classes=None, h=1e-5):
    """Central finite differences over every parameter, worst relative error
    against the analytic gradient. Denominator floored to dodge 0/0."""
    terms, grads = loss_and_grad(
        model, id_points, id_labels, outliers, reg,
        score_kind=score_kind, num_classes=num_classes,
    )
    analytic = flatten_params(MlpModel(weights=grads.weights, biases=grads.biases))
    theta = flatten_params(model)
    numeric = np.empty_like(theta)
    for i in range(theta.size):
        bumped = theta.copy()
        bumped[i] = theta[i] + h
        hi, _ = loss_and_grad(
            model_from_flat(model, bumped), id_points, id_labels, outliers, reg,
            score_kind=score_kind, num_classes=num_classes,
        )
        bumped[i] = theta[i] - h
        lo, _ = loss_and_grad(
            model_from_flat(model, bumped), id_points, id_labels, outliers, reg,
            score_kind=score_kind, num_classes=num_classes,
        )
        numeric[i] = (hi.total - lo.total) / (2.0 * h)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / denom))


def zero_model(layer_dims):
    weights = tuple(
        np.zeros((layer_dims[i], layer_dims[i + 1])) for i in range(len(layer_dims) - 1)
    )
    biases = tuple(np.zeros(layer_dims[i + 1]) for i in range(len(layer_dims) - 1))
    return MlpModel(weights=weights, biases=biases)


def random_score_sets(rng, max_size=50, tie_fraction=0.5):
    """Random ID/OOD score vectors with deliberate ties: a fraction of the
    values is snapped to a small integer grid shared by both sets."""
    n_id = int(rng.integers(1, max_size + 1))
    n_ood = int(rng.integers(1, max_size + 1))
    ids = rng.normal(1.0, 2.0, size=n_id)
    oods = rng.normal(0.0, 2.0, size=n_ood)
    snap_id = rng.random(n_id) < tie_fraction
    snap_ood = rng.random(n_ood) < tie_fraction
    ids[snap_id] = np.round(ids[snap_id])
    oods[snap_ood] = np.round(oods[snap_ood])
    return ids, oods
