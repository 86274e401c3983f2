import struct
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmlkit.data import (
    Dataset,
    IdxFormatError,
    batches,
    confusion_and_accuracy,
    fraction_correct,
    load_idx,
    one_hot,
    parse_idx,
    split_dataset,
    standardize,
    write_idx,
)


def idx_bytes(magic, dims, payload):
    return struct.pack(">i", magic) + struct.pack(f">{len(dims)}i", *dims) + bytes(payload)


class TestIdx:
    def test_single_pixel_image(self):
        out = parse_idx(idx_bytes(2051, (1, 1, 1), [255]))
        assert out.shape == (1, 1, 1) and out.reshape(-1).tolist() == [255.0]

    def test_labels(self):
        assert parse_idx(idx_bytes(2049, (3,), [0, 1, 2])).tolist() == [0, 1, 2]

    def test_bad_magic(self):
        with pytest.raises(IdxFormatError):
            parse_idx(idx_bytes(9999, (1,), [0]))

    def test_truncated_payload(self):
        with pytest.raises(IdxFormatError):
            parse_idx(idx_bytes(2049, (4,), [0, 1]))

    def test_truncated_header(self):
        with pytest.raises(IdxFormatError):
            parse_idx(b"\x00\x00")

    def test_round_trip(self, tmp_path, rng):
        images = rng.integers(0, 256, size=(5, 28, 28))
        path = tmp_path / "images.idx"
        write_idx(images, path)
        np.testing.assert_array_equal(load_idx(path), images)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_idx(tmp_path / "absent.idx")


class TestStandardize:
    def test_constant_image(self):
        assert np.all(standardize(np.full((1, 9), 4.0)) == 0.0)

    def test_pair(self):
        assert standardize(np.array([[0.0, 2.0]])).tolist() == [[-1.0, 1.0]]

    def test_random(self, rng):
        out = standardize(rng.normal(3.0, 7.0, size=(50, 30)))
        assert np.abs(out.mean(axis=1)).max() <= 1e-10
        assert np.abs(out.std(axis=1) - 1.0).max() <= 1e-10


class TestOneHot:
    def test_example_matrix(self):
        code = {"A": 0, "B": 1, "C": 2}
        out = one_hot([code[c] for c in "ACBA"], 3)
        assert out.tolist() == [[1, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0]]

    def test_single_class(self):
        assert one_hot([0, 0, 0], 1).tolist() == [[1], [1], [1]]

    @given(st.lists(st.integers(0, 9), min_size=1, max_size=50))
    def test_round_trip(self, labels):
        assert one_hot(labels, 10).argmax(axis=1).tolist() == labels

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            one_hot([3], 3)


class TestSplit:
    def make(self, n):
        return Dataset(np.arange(n, dtype=float)[:, None], np.arange(n) % 3, 3)

    def test_mnist_sizes(self, rng):
        s = split_dataset(self.make(10**4), (0.8, 0.1, 0.1), rng)
        assert (len(s.train), len(s.validation), len(s.test)) == (8000, 1000, 1000)

    def test_all_train(self, rng):
        s = split_dataset(self.make(17), (1.0, 0.0, 0.0), rng)
        assert (len(s.train), len(s.validation), len(s.test)) == (17, 0, 0)

    def test_partition(self, rng):
        d = self.make(101)
        s = split_dataset(d, (0.7, 0.2, 0.1), rng)
        parts = np.concatenate([s.train.features, s.validation.features, s.test.features]).ravel()
        assert Counter(parts.tolist()) == Counter(d.features.ravel().tolist())

    def test_empty(self, rng):
        with pytest.raises(ValueError):
            split_dataset(self.make(0), (0.8, 0.1, 0.1), rng)

    def test_bad_fractions(self, rng):
        with pytest.raises(ValueError):
            split_dataset(self.make(10), (0.5, 0.1, 0.1), rng)


class TestBatches:
    @given(st.integers(0, 200), st.integers(1, 64))
    def test_cover_once(self, n, size):
        seen = np.concatenate(list(batches(n, size, np.random.default_rng(0))) or [np.array([], int)])
        assert sorted(seen.tolist()) == list(range(n))


class TestConfusion:
    def test_perfect(self):
        c, acc = confusion_and_accuracy([0, 1, 2, 1], [0, 1, 2, 1], 3)
        assert c.tolist() == np.eye(3).tolist() and acc == 1.0

    def test_all_zero_predictions(self):
        c, acc = confusion_and_accuracy([0, 0, 0, 0], [0, 1, 0, 1], 2)
        assert acc == 0.5
        assert c.tolist() == [[0.5, 0.5], [0.0, 0.0]]

    def test_random_predictions(self):
        rng = np.random.default_rng(0)
        labels = np.repeat(np.arange(10), 10**4)
        _, acc = confusion_and_accuracy(rng.integers(10, size=labels.size), labels, 10)
        assert abs(acc - 0.1) <= 0.02

    def test_rows_normalized(self, rng):
        c, _ = confusion_and_accuracy(rng.integers(4, size=200), rng.integers(4, size=200), 4)
        np.testing.assert_allclose(c.sum(axis=1), 1.0)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            confusion_and_accuracy([0, 5], [0, 1], 3)

    def test_fraction_correct(self):
        assert fraction_correct([0, 1, 1, 0], [0, 1, 0, 0]) == 0.75
