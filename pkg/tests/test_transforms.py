"""Feature squeezers and the resize/rotate transform."""

import numpy as np
import pytest

from aplab.data import SqueezerSpec, bit_depth_reduce, median_filter, resize_rotate
from aplab.numerics import Rng


def brute_force_median(img, k):
    """Loop-and-sort reference with explicit reflect index mirroring."""
    h, w = img.shape
    pad = k // 2
    out = np.empty_like(img)

    def mirror(idx, n):
        if idx < 0:
            return -idx
        if idx >= n:
            return 2 * n - 2 - idx
        return idx

    for i in range(h):
        for j in range(w):
            vals = []
            for di in range(-pad, pad + 1):
                for dj in range(-pad, pad + 1):
                    vals.append(img[mirror(i + di, h), mirror(j + dj, w)])
            vals.sort()
            mid = len(vals) // 2
            out[i, j] = vals[mid]
    return out


class TestBitDepth:
    def test_one_bit_rounds(self):
        assert bit_depth_reduce(np.array(0.4), 1) == 0.0
        assert bit_depth_reduce(np.array(0.6), 1) == 1.0

    def test_eight_bit_fixed_point(self):
        x = np.arange(256) / 255.0
        np.testing.assert_array_equal(bit_depth_reduce(x, 8), x)

    def test_idempotent(self):
        x = Rng(41).uniform(0, 1, (5, 8, 8))
        for bits in (1, 3, 5, 8):
            once = bit_depth_reduce(x, bits)
            assert bit_depth_reduce(once, bits).tobytes() == once.tobytes()

    def test_monotone(self):
        x = np.sort(Rng(42).uniform(0, 1, 200))
        for bits in (2, 4, 7):
            out = bit_depth_reduce(x, bits)
            assert (np.diff(out) >= 0).all()

    def test_range_validated(self):
        with pytest.raises(ValueError):
            bit_depth_reduce(np.zeros(3), 0)
        with pytest.raises(ValueError):
            bit_depth_reduce(np.zeros(3), 9)


class TestMedianFilter:
    def test_constant_unchanged(self):
        img = np.full((6, 6), 0.7)
        np.testing.assert_array_equal(median_filter(img, 3), img)

    def test_salt_removed(self):
        img = np.zeros((7, 7))
        img[3, 3] = 1.0
        np.testing.assert_array_equal(median_filter(img, 3), np.zeros((7, 7)))

    def test_matches_brute_force(self):
        rng = Rng(43)
        for trial in range(5):
            img = rng.uniform(0, 1, (8, 8))
            for k in (3, 5):
                np.testing.assert_allclose(median_filter(img, k),
                                           brute_force_median(img, k), atol=1e-10)

    def test_even_window_rejected(self):
        with pytest.raises(ValueError):
            median_filter(np.zeros((5, 5)), 4)

    def test_batch_matches_single(self):
        imgs = Rng(44).uniform(0, 1, (3, 6, 6))
        batched = median_filter(imgs, 3)
        for i in range(3):
            np.testing.assert_array_equal(batched[i], median_filter(imgs[i], 3))


class TestResizeRotate:
    def test_identity_bit_exact(self):
        img = Rng(45).uniform(0, 1, (28, 28))
        out = resize_rotate(img, 1.0, 0.0)
        assert out.tobytes() == img.tobytes()

    def test_half_turn_on_symmetric_cross(self):
        img = np.zeros((9, 9))
        img[4, :] = 1.0
        img[:, 4] = 1.0
        out = resize_rotate(img, 1.0, np.pi)
        np.testing.assert_allclose(out, img, atol=1e-9)

    def test_rotate_back_near_inverse(self):
        # smooth blob so interpolation loss stays small
        ii, jj = np.meshgrid(np.arange(28), np.arange(28), indexing="ij")
        img = np.exp(-((ii - 14.0) ** 2 + (jj - 10.0) ** 2) / 30.0)
        theta = np.deg2rad(8.0)
        back = resize_rotate(resize_rotate(img, 1.0, theta), 1.0, -theta)
        assert np.abs(back - img).mean() < 0.05

    def test_output_in_unit_range(self):
        img = Rng(46).uniform(0, 1, (3, 28, 28))
        out = resize_rotate(img, 1.08, 0.2)
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_bad_factor(self):
        with pytest.raises(ValueError):
            resize_rotate(np.zeros((4, 4)), 0.0, 0.0)


class TestSqueezerSpec:
    def test_apply_dispatch(self):
        x = Rng(47).uniform(0, 1, (2, 6, 6))
        np.testing.assert_array_equal(SqueezerSpec("bit_depth", 3).apply(x),
                                      bit_depth_reduce(x, 3))
        np.testing.assert_array_equal(SqueezerSpec("median_filter", 3).apply(x),
                                      median_filter(x, 3))

    def test_validation(self):
        with pytest.raises(ValueError):
            SqueezerSpec("bit_depth", 9)
        with pytest.raises(ValueError):
            SqueezerSpec("median_filter", 4)
        with pytest.raises(ValueError):
            SqueezerSpec("gaussian", 3)
