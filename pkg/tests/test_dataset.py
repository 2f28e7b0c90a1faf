import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from svddsel.dataset import (
    DEGENERATE_EXTENT_EPS,
    BoundingBox,
    Dataset,
    LabeledDataset,
    bounding_box,
    gen_gaussian_mixture,
    gen_uniform,
    load_csv,
    load_multiclass_csv,
    make_one_class_task,
    save_csv,
)

finite_floats = st.floats(
    allow_nan=False, allow_infinity=False, min_value=-1e12, max_value=1e12
)


def point_matrices(max_rows=8, max_cols=4):
    return hnp.arrays(
        np.float64,
        st.tuples(st.integers(1, max_rows), st.integers(1, max_cols)),
        elements=finite_floats,
    )


class TestDataset:
    def test_shape_properties(self):
        ds = Dataset(points=[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], name="t")
        assert ds.l == 3 and ds.n == 2

    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="non-finite"):
            Dataset(points=[[1.0, np.nan]])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Dataset(points=np.empty((0, 2)))

    def test_points_are_immutable(self):
        ds = Dataset(points=[[1.0, 2.0]])
        with pytest.raises(ValueError):
            ds.points[0, 0] = 9.0

    def test_callers_array_stays_writable(self):
        arr = np.array([[1.0, 2.0]])
        Dataset(points=arr)
        arr[0, 0] = 9.0  # must not raise

    def test_labels_must_match_length(self):
        ds = Dataset(points=[[1.0], [2.0]])
        with pytest.raises(ValueError, match="length"):
            LabeledDataset(data=ds, labels=[1])

    def test_validation_check_requires_both_signs(self):
        ds = Dataset(points=[[1.0], [2.0]])
        ld = LabeledDataset(data=ds, labels=[1, 1])
        with pytest.raises(ValueError, match="at least one"):
            ld.check_validation()


class TestCsv:
    def test_load_without_label_defaults_to_normal(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("f1,f2\n1.0,2.0\n3.0,4.0\n5.0,6.0\n")
        ld = load_csv(p)
        assert ld.data.l == 3 and ld.data.n == 2
        assert np.array_equal(ld.labels, [1, 1, 1])
        assert ld.name == "t"

    def test_load_with_label_column(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("f1,label\n1.0,1\n2.0,1\n3.0,-1\n")
        ld = load_csv(p, "label")
        assert ld.n_normals == 2 and ld.n_anomalies == 1
        assert ld.data.n == 1

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("f1,f2\n1.0,2.0\nabc,4.0\n")
        with pytest.raises(ValueError) as exc:
            load_csv(p)
        assert "row 2" in str(exc.value) and "'f1'" in str(exc.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "nope.csv")

    def test_empty_file(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("")
        with pytest.raises(ValueError, match="empty"):
            load_csv(p)

    def test_header_only_file(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("f1,f2\n")
        with pytest.raises(ValueError, match="no data rows"):
            load_csv(p)

    def test_label_outside_pm1_rejected(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("f1,label\n1.0,2\n2.0,1\n")
        with pytest.raises(ValueError, match="outside"):
            load_csv(p, "label")

    def test_multiclass_loader_accepts_class_ids(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("f1,label\n1.0,0\n2.0,1\n3.0,2\n")
        ld = load_multiclass_csv(p, "label")
        assert sorted(set(ld.labels.tolist())) == [0, 1, 2]

    def test_unknown_label_column(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("f1\n1.0\n")
        with pytest.raises(ValueError, match="no column"):
            load_csv(p, "label")

    @settings(max_examples=50, deadline=None)
    @given(point_matrices())
    def test_round_trip_is_bit_exact(self, pts, tmp_path_factory):
        ds = Dataset(points=pts, name="rt")
        path = tmp_path_factory.mktemp("csv") / "rt.csv"
        save_csv(ds, path)
        back = load_csv(path)
        assert np.array_equal(back.points, ds.points)

    def test_labeled_round_trip(self, tmp_path):
        ds = Dataset(points=[[0.1, 0.2], [np.pi, 1e-17]])
        ld = LabeledDataset(data=ds, labels=[1, -1])
        path = tmp_path / "rt.csv"
        save_csv(ld, path)
        back = load_csv(path, "label")
        assert np.array_equal(back.points, ds.points)
        assert np.array_equal(back.labels, ld.labels)


class TestBoundingBox:
    def test_tight_box(self):
        box = bounding_box(Dataset(points=[[0.0], [1.0]]), 1.0)
        assert box.lo[0] == 0.0 and box.hi[0] == 1.0

    def test_factor_two_doubles_about_center(self):
        box = bounding_box(Dataset(points=[[0.0], [1.0]]), 2.0)
        assert box.lo[0] == -0.5 and box.hi[0] == 1.5

    def test_degenerate_dimension_widened(self):
        box = bounding_box(Dataset(points=[[3.0]]), 2.0)
        assert box.lo[0] == 3.0 - DEGENERATE_EXTENT_EPS
        assert box.hi[0] == 3.0 + DEGENERATE_EXTENT_EPS

    def test_factor_below_one_rejected(self):
        with pytest.raises(ValueError):
            bounding_box(Dataset(points=[[0.0]]), 0.5)

    def test_inverted_bounds_rejected(self):
        with pytest.raises(ValueError, match="lo <= hi"):
            BoundingBox(lo=[1.0], hi=[0.0])

    @settings(max_examples=50, deadline=None)
    @given(point_matrices(), st.floats(min_value=1.0, max_value=10.0))
    def test_containment_and_nesting(self, pts, factor):
        ds = Dataset(points=pts)
        tight = bounding_box(ds, 1.0)
        wide = bounding_box(ds, factor)
        assert tight.contains(ds.points).all()
        assert (wide.lo <= tight.lo + 1e-9 * np.abs(tight.lo)).all()
        assert (wide.hi >= tight.hi - 1e-9 * np.abs(tight.hi)).all()


class TestGenerators:
    def test_mixture_shape(self):
        ds = gen_gaussian_mixture(42, 100, [[1] * 5, [-1] * 5])
        assert ds.l == 100 and ds.n == 5

    def test_mixture_single_point_reproducible(self):
        a = gen_gaussian_mixture(5, 1, [[0.0] * 5])
        b = gen_gaussian_mixture(5, 1, [[0.0] * 5])
        assert np.array_equal(a.points, b.points)
        assert a.n == 5

    def test_mixture_mean_converges(self):
        # law of large numbers: tolerance 4 sigma / sqrt(count) = 0.04 < 0.05
        mu = [2.0, -1.0, 0.5]
        ds = gen_gaussian_mixture(7, 10000, [mu])
        assert np.all(np.abs(ds.points.mean(axis=0) - mu) < 0.05)

    def test_mixture_dimension_mismatch(self):
        with pytest.raises(ValueError):
            gen_gaussian_mixture(0, 10, [[1.0, 2.0], [1.0]])

    def test_uniform_containment(self):
        box = BoundingBox(lo=[-5.0] * 5, hi=[5.0] * 5)
        ds = gen_uniform(1, 100, box)
        assert ds.l == 100 and box.contains(ds.points).all()

    def test_uniform_degenerate_box(self):
        eps = DEGENERATE_EXTENT_EPS
        box = BoundingBox(lo=[3.0 - eps], hi=[3.0 + eps])
        ds = gen_uniform(3, 50, box)
        assert np.all(np.abs(ds.points - 3.0) <= eps)

    def test_uniform_mean_converges(self):
        box = BoundingBox(lo=[0.0], hi=[1.0])
        ds = gen_uniform(9, 10000, box)
        assert abs(ds.points.mean() - 0.5) < 0.02

    def test_generators_are_pure(self):
        box = BoundingBox(lo=[0.0], hi=[1.0])
        assert np.array_equal(gen_uniform(11, 64, box).points,
                              gen_uniform(11, 64, box).points)
        assert np.array_equal(
            gen_gaussian_mixture(11, 64, [[0.0, 1.0]]).points,
            gen_gaussian_mixture(11, 64, [[0.0, 1.0]]).points,
        )


def multiclass_source(rows_per_class=100, n=3, classes=(0, 1), seed=0):
    rng = np.random.default_rng(seed)
    pts, labels = [], []
    for c in classes:
        pts.append(rng.normal(3.0 * c, 1.0, size=(rows_per_class, n)))
        labels.extend([c] * rows_per_class)
    return LabeledDataset(
        data=Dataset(points=np.vstack(pts), name="multi"), labels=np.array(labels)
    )


class TestMakeOneClassTask:
    def test_anomaly_count_rule(self):
        src = multiclass_source(rows_per_class=100)
        _, val = make_one_class_task(src, 0, anomaly_fraction=0.10, seed=1)
        assert val.n_anomalies == 10

    def test_split_arithmetic(self):
        src = multiclass_source(rows_per_class=100)
        train, val = make_one_class_task(src, 0, 0.10, val_fraction=0.3, seed=1)
        assert train.l == 70 and val.n_normals == 30

    def test_anomalies_confined_to_scaled_box(self):
        src = multiclass_source(rows_per_class=50)
        normals = src.points[src.labels == 0]
        train, val = make_one_class_task(src, 0, 0.10, box_factor=2.0, seed=3)
        box = bounding_box(Dataset(points=normals), 2.0)
        anomalies = val.points[val.labels == -1]
        assert box.contains(anomalies).all()

    def test_validation_has_both_signs(self):
        src = multiclass_source()
        _, val = make_one_class_task(src, 1, 0.05, seed=2)
        val.check_validation()

    def test_deterministic(self):
        src = multiclass_source()
        t1, v1 = make_one_class_task(src, 0, 0.10, seed=9)
        t2, v2 = make_one_class_task(src, 0, 0.10, seed=9)
        assert np.array_equal(t1.points, t2.points)
        assert np.array_equal(v1.points, v2.points)

    def test_missing_class(self):
        src = multiclass_source()
        with pytest.raises(ValueError, match="not present"):
            make_one_class_task(src, 7, 0.10, seed=0)

    def test_too_few_normals(self):
        ds = Dataset(points=[[0.0], [1.0], [2.0]])
        src = LabeledDataset(data=ds, labels=[0, 1, 1])
        with pytest.raises(ValueError, match="fewer than 2"):
            make_one_class_task(src, 0, 0.10, seed=0)
