import numpy as np
import pytest

from vectorcd.data import Dataset, load_csv, save_csv
from vectorcd.discovery import lag_expand
from vectorcd.graphs import Partition


class TestDataset:
    def test_block_views(self, rng):
        ds = Dataset(rng.standard_normal((20, 5)), Partition.from_sizes([2, 3]))
        assert ds.block(1).shape == (20, 3)
        assert np.allclose(ds.cols_of({0}), ds.block(0))
        assert ds.widths == (2, 3)

    def test_default_names(self, rng):
        ds = Dataset(rng.standard_normal((5, 3)), Partition.from_sizes([1, 2]))
        assert ds.names == ("X1", "X2")

    def test_shape_validation(self, rng):
        with pytest.raises(ValueError):
            Dataset(rng.standard_normal((5, 4)), Partition.from_sizes([2, 3]))

    def test_as_micro(self, rng):
        ds = Dataset(rng.standard_normal((10, 4)), Partition.from_sizes([2, 2]))
        micro = ds.as_micro()
        assert micro.n_vars == 4
        assert micro.names == ("X1.0", "X1.1", "X2.0", "X2.1")


class TestCsv:
    def test_round_trip(self, rng, tmp_path):
        ds = Dataset(
            rng.standard_normal((30, 5)), Partition.from_sizes([2, 2, 1]), ("A", "B", "C")
        )
        path = tmp_path / "d.csv"
        save_csv(ds, path)
        header = path.read_text().splitlines()[0]
        assert header == "A:0,A:1,B:0,B:1,C:0"
        back = load_csv(path)
        assert back.names == ds.names
        assert back.widths == ds.widths
        assert np.allclose(back.X, ds.X)

    def test_lag_annotations_round_trip(self, rng, tmp_path):
        ds = Dataset(rng.standard_normal((40, 2)), Partition.from_sizes([1, 1]), ("u", "v"))
        lagged = lag_expand(ds, 1)
        path = tmp_path / "lagged.csv"
        save_csv(lagged, path)
        back = load_csv(path)
        assert back.lags == (0, 0, 1, 1)
        assert back.names == ("u", "v", "u", "v")
        assert np.allclose(back.X, lagged.X)

    def test_same_name_distinct_lag_blocks_stay_separate(self, rng, tmp_path):
        # two adjacent blocks share a name only when lags differ
        ds = Dataset(rng.standard_normal((10, 4)), Partition.from_sizes([2, 2]), ("m", "m"))
        path = tmp_path / "clash.csv"
        save_csv(ds, path)
        back = load_csv(path)
        # without lag annotations adjacent equal names merge into one block
        assert back.n_vars == 1
        assert back.widths == (4,)
