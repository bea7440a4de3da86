import math

import numpy as np
import pytest

from oodlab import (
    GmmSpec,
    InvalidInputError,
    RngState,
    load_labeled_csv,
    load_points_csv,
    make_aux_outliers,
    make_id_dataset,
    make_test_ood,
    ring_gmm_spec,
    sample_gmm,
    save_labeled_csv,
    save_outlier_csv,
)

ID_RADIUS = 2.0
AUX_RADIUS = 6.0
SIGMA = 0.3


def id_centers(num_classes=3, radius=ID_RADIUS):
    angles = 2.0 * np.pi * np.arange(num_classes) / num_classes
    return np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])


def test_id_dataset_shapes_and_classes():
    data = make_id_dataset(500, RngState(0, "id"))
    assert data.points.shape == (1500, 2)
    assert data.labels.shape == (1500,)
    assert set(np.unique(data.labels)) == {0, 1, 2}


def test_id_dataset_sigma_zero_hits_centers_exactly():
    data = make_id_dataset(1, RngState(0, "id"), sigma=0.0)
    got = data.points[np.argsort(data.labels)]
    assert np.array_equal(got, id_centers())


def test_id_dataset_class_means_within_clt_bound():
    n = 500
    data = make_id_dataset(n, RngState(1, "id"))
    bound = 3.0 * SIGMA / math.sqrt(n)
    centers = id_centers()
    for c in range(3):
        mean = data.points[data.labels == c].mean(axis=0)
        assert np.all(np.abs(mean - centers[c]) < bound)


def test_id_dataset_deterministic():
    a = make_id_dataset(100, RngState(5, "id"))
    b = make_id_dataset(100, RngState(5, "id"))
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.labels, b.labels)


def test_id_dataset_zero_count_raises():
    with pytest.raises(InvalidInputError):
        make_id_dataset(0, RngState(0, "id"))


def test_aux_outliers_degenerate_single_component():
    out = make_aux_outliers(1, 10, RngState(0, "aux"), sigma=0.0)
    assert out.points.shape == (10, 2)
    assert np.array_equal(out.points, np.broadcast_to(out.points[0], (10, 2)))
    assert out.points[0] == pytest.approx([AUX_RADIUS, 0.0], abs=1e-12)
    assert out.component_count == 1


def test_aux_outliers_component_counts_multinomial():
    k, m = 4, 10_000
    out = make_aux_outliers(k, m, RngState(2, "aux"))
    spec = out.spec
    assert spec.means.shape == (k, 2)
    # assign each point to its nearest component center and count
    d2 = ((out.points[:, None, :] - spec.means[None, :, :]) ** 2).sum(axis=2)
    counts = np.bincount(np.argmin(d2, axis=1), minlength=k)
    assert np.all(np.abs(counts - m / k) <= 150)


def test_aux_outliers_m_below_k_raises():
    with pytest.raises(InvalidInputError):
        make_aux_outliers(10, 9, RngState(0, "aux"))


def test_higher_k_covers_ring_more_densely():
    m = 4000
    low = make_aux_outliers(10, m, RngState(3, "aux"))
    high = make_aux_outliers(1000, m, RngState(3, "aux"))

    def max_angular_gap(points):
        ang = np.sort(np.arctan2(points[:, 1], points[:, 0]))
        gaps = np.diff(ang)
        wrap = ang[0] + 2 * np.pi - ang[-1]
        return max(gaps.max(), wrap)

    assert max_angular_gap(high.points) < max_angular_gap(low.points)


def test_test_ood_keeps_distance_from_id_centers():
    out = make_test_ood(2000, RngState(4, "ood"))
    centers = id_centers()
    d = np.sqrt(((out.points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2))
    closest = d.min(axis=1)
    # ring components sit 6 - 3*sigma = 5.1 from the origin at worst, so at
    # least 5.1 - 2.0 = 3.1 from every ID center, with small Gaussian slack
    frac = np.mean(closest >= 3.1)
    assert frac >= 0.99


def test_test_ood_zero_count_raises():
    with pytest.raises(InvalidInputError):
        make_test_ood(0, RngState(0, "ood"))


def test_test_ood_deterministic():
    a = make_test_ood(500, RngState(6, "ood"))
    b = make_test_ood(500, RngState(6, "ood"))
    assert np.array_equal(a.points, b.points)


def test_test_ood_annulus_radii_within_band():
    out = make_test_ood(2000, RngState(7, "ood"), ring_fraction=0.0)
    r = np.sqrt((out.points ** 2).sum(axis=1))
    assert np.all(r >= 8.0) and np.all(r <= 12.0)


def test_test_ring_centers_never_collide_with_aux_centers():
    # test ring angles are (2*pi*j/20 + pi/1000); an aux grid of k equal
    # angles collides only if k*(100*j + 1) is divisible by 2000, and
    # 100*j + 1 is coprime to 2000, so k itself must be a multiple of 2000
    for k in list(range(1, 200)) + [500, 999, 1000, 1999]:
        assert all((k * (100 * j + 1)) % 2000 != 0 for j in range(20))
    test_spec = make_test_ood(10, RngState(0, "ood")).spec
    for k in (10, 1000):
        aux_spec = make_aux_outliers(k, k, RngState(0, "aux")).spec
        d2 = ((test_spec.means[:, None, :] - aux_spec.means[None, :, :]) ** 2).sum(axis=2)
        assert d2.min() > 1e-8


def test_id_and_outlier_centers_separated():
    centers = id_centers()
    for spec in (ring_gmm_spec(10), ring_gmm_spec(1000),
                 make_test_ood(10, RngState(0, "ood")).spec):
        d = np.sqrt(((spec.means[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2))
        assert d.min() >= 3.0


def test_gmm_spec_validates_weights():
    with pytest.raises(InvalidInputError):
        GmmSpec(means=np.zeros((2, 2)), sigma=0.5, weights=np.array([0.7, 0.2]))
    with pytest.raises(InvalidInputError):
        GmmSpec(means=np.zeros((2, 2)), sigma=-1.0, weights=np.array([0.5, 0.5]))


def test_sample_gmm_respects_weights():
    spec = GmmSpec(
        means=np.array([[0.0, 0.0], [100.0, 0.0]]),
        sigma=0.1,
        weights=np.array([0.25, 0.75]),
    )
    pts, comps = sample_gmm(spec, 20_000, RngState(8, "gmm"))
    frac = np.mean(comps == 1)
    assert abs(frac - 0.75) < 0.02
    far = pts[:, 0] > 50.0
    assert np.array_equal(far, comps == 1)


def test_labeled_csv_roundtrip(tmp_path):
    data = make_id_dataset(50, RngState(9, "id"))
    path = tmp_path / "id.csv"
    save_labeled_csv(path, data)
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == "x,y,label"
    back = load_labeled_csv(path)
    assert np.array_equal(back.points, data.points)
    assert np.array_equal(back.labels, data.labels)


def test_outlier_csv_uses_sentinel_label(tmp_path):
    out = make_aux_outliers(5, 20, RngState(10, "aux"))
    path = tmp_path / "aux.csv"
    save_outlier_csv(path, out)
    rows = path.read_text(encoding="utf-8").splitlines()
    assert rows[0] == "x,y,label"
    assert all(line.rsplit(",", 1)[1] == "-1" for line in rows[1:])
    pts, labels = load_points_csv(path)
    assert np.array_equal(pts, out.points)
    assert np.all(labels == -1)
