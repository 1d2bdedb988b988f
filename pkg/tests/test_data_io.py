"""IDX parsing, MNIST loading, synthetic blobs and batching."""

import gzip
import struct

import numpy as np
import pytest

from aplab.data import (
    DataError,
    Dataset,
    IdxFormatError,
    batches,
    load_mnist,
    parse_idx,
    serialize_idx,
    synth_blobs,
)
from aplab.numerics import Rng


class TestParseIdx:
    def test_single_pixel_scaling(self):
        payload = struct.pack(">iiii", 0x803, 1, 1, 1) + bytes([255])
        np.testing.assert_array_equal(parse_idx(payload), [[[1.0]]])

    def test_labels(self):
        payload = struct.pack(">ii", 0x801, 2) + bytes([7, 2])
        np.testing.assert_array_equal(parse_idx(payload), [7, 2])

    def test_round_trip_bit_exact(self):
        rng = Rng(31)
        block = (rng.uniform(0, 1, (10, 28, 28)) * 255).astype(np.uint8)
        payload = struct.pack(">iiii", 0x803, *block.shape) + block.tobytes()
        parsed = parse_idx(payload)
        assert serialize_idx(parsed) == payload

    def test_bad_magic_rejected(self):
        payload = struct.pack(">iiii", 0x805, 1, 1, 1) + bytes([0])
        with pytest.raises(IdxFormatError):
            parse_idx(payload)

    def test_truncated_payload_rejected(self):
        payload = struct.pack(">iiii", 0x803, 2, 2, 2) + bytes(7)
        with pytest.raises(IdxFormatError, match="length"):
            parse_idx(payload)

    def test_magic_fuzz_all_rejected(self):
        """Any corruption of the magic bytes errors out, never crashes."""
        good = struct.pack(">iiii", 0x803, 1, 2, 2) + bytes(4)
        rng = Rng(32)
        rejected = 0
        for _ in range(100):
            pos = int(rng.uniform(0, 4))
            flip = 1 + int(rng.uniform(0, 255))
            corrupted = bytearray(good)
            corrupted[pos] ^= flip
            try:
                parse_idx(bytes(corrupted))
            except IdxFormatError:
                rejected += 1
        assert rejected == 100


class TestLoadMnist:
    def test_bundled_subset(self, mnist_dir):
        train, test = load_mnist(mnist_dir)
        assert train.images.shape == (9000, 28, 28)
        assert test.images.shape == (1000, 28, 28)
        assert train.class_count == 10

    def test_take_cap(self, mnist_dir):
        train, test = load_mnist(mnist_dir, take=(1000, 200))
        assert len(train) == 1000 and len(test) == 200

    def test_pixel_range(self, mnist_dir):
        train, test = load_mnist(mnist_dir, take=500)
        for ds in (train, test):
            assert ds.images.min() >= 0.0
            assert ds.images.max() <= 1.0

    def test_missing_file_lists_name(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="train-images-idx3-ubyte"):
            load_mnist(tmp_path)

    def test_gzip_transparent(self, tmp_path, mnist_dir):
        # decompress one file, keep the rest gzipped
        for name in ("train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                     "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"):
            src = (mnist_dir / (name + ".gz")).read_bytes()
            if name.startswith("train-images"):
                (tmp_path / name).write_bytes(gzip.decompress(src))
            else:
                (tmp_path / (name + ".gz")).write_bytes(src)
        train, _ = load_mnist(tmp_path, take=100)
        assert len(train) == 100


class TestSynthBlobs:
    def test_deterministic(self):
        a = synth_blobs(20, classes=3, side=8, seed=5)
        b = synth_blobs(20, classes=3, side=8, seed=5)
        assert a.images.tobytes() == b.images.tobytes()

    def test_zero_noise_identical_within_class(self):
        ds = synth_blobs(10, classes=3, side=8, seed=1, noise=0.0)
        first_class = ds.images[ds.labels == 0]
        assert all(np.array_equal(img, first_class[0]) for img in first_class)

    def test_validation(self):
        with pytest.raises(DataError):
            synth_blobs(5, classes=1)
        with pytest.raises(DataError):
            synth_blobs(5, side=2)


class TestDatasetAndBatches:
    def test_invariants_enforced(self):
        with pytest.raises(DataError):
            Dataset(np.zeros((2, 4, 4)), np.array([0, 5]), class_count=3)
        with pytest.raises(DataError):
            Dataset(np.full((1, 4, 4), 2.0), np.array([0]), class_count=3)

    def test_single_batch_is_permutation(self):
        ds = synth_blobs(8, classes=2, side=6, seed=2)
        (imgs, labs), = list(batches(ds, size=100, rng=Rng(0)))
        assert sorted(labs.tolist()) == sorted(ds.labels.tolist())
        assert imgs.shape[0] == len(ds)

    def test_same_rng_same_order(self):
        ds = synth_blobs(10, classes=2, side=6, seed=2)
        run1 = [labs.tolist() for _, labs in batches(ds, 7, Rng(3))]
        run2 = [labs.tolist() for _, labs in batches(ds, 7, Rng(3))]
        assert run1 == run2

    def test_union_of_batches_is_dataset(self):
        ds = synth_blobs(9, classes=3, side=6, seed=4)
        seen = []
        for imgs, labs in batches(ds, 4, Rng(1)):
            seen.extend(imgs.reshape(len(imgs), -1).sum(axis=1) + 1000 * labs)
        expected = ds.images.reshape(len(ds), -1).sum(axis=1) + 1000 * ds.labels
        assert sorted(seen) == pytest.approx(sorted(expected.tolist()))
