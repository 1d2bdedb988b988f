#!/usr/bin/env python3
"""Build the bundled MNIST subset (IDX files) from the npm `mnist` package.

The npm package `mnist` (https://github.com/cazala/mnist, MIT) ships 10,000
real MNIST digits as JSON, pixel values already scaled to [0,1]. This script
converts them back to the standard IDX byte format with a deterministic
9000/1000 train/test split so the repository is self-contained.

Usage:
    npm pack mnist && tar xzf mnist-1.1.0.tgz
    python scripts/prepare_mnist.py package/src/digits data/mnist
"""

import gzip
import json
import struct
import sys
from pathlib import Path

import numpy as np

SPLIT_SEED = 20240801
TRAIN_COUNT = 9000


def load_digits_json(digits_dir: Path):
    images, labels = [], []
    for digit in range(10):
        raw = json.loads((digits_dir / f"{digit}.json").read_text())["data"]
        arr = np.asarray(raw, dtype=np.float64).reshape(-1, 28, 28)
        images.append(arr)
        labels.append(np.full(len(arr), digit, dtype=np.uint8))
    return np.concatenate(images), np.concatenate(labels)


def idx_bytes(arr: np.ndarray) -> bytes:
    if arr.ndim == 3:
        header = struct.pack(">iiii", 0x00000803, *arr.shape)
    elif arr.ndim == 1:
        header = struct.pack(">ii", 0x00000801, arr.shape[0])
    else:
        raise ValueError(f"unsupported rank {arr.ndim}")
    return header + arr.astype(np.uint8).tobytes()


def write_gz(path: Path, payload: bytes) -> None:
    # mtime=0 keeps the output bytes reproducible
    with open(path, "wb") as fh:
        with gzip.GzipFile(fileobj=fh, mode="wb", mtime=0) as gz:
            gz.write(payload)


def main() -> None:
    digits_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("package/src/digits")
    out_dir = Path(sys.argv[2]) if len(sys.argv) > 2 else Path("data/mnist")
    out_dir.mkdir(parents=True, exist_ok=True)

    images, labels = load_digits_json(digits_dir)
    pixels = np.rint(images * 255.0).astype(np.uint8)

    order = np.random.default_rng(SPLIT_SEED).permutation(len(pixels))
    pixels, labels = pixels[order], labels[order]

    splits = {
        "train": (pixels[:TRAIN_COUNT], labels[:TRAIN_COUNT]),
        "t10k": (pixels[TRAIN_COUNT:], labels[TRAIN_COUNT:]),
    }
    for tag, (imgs, labs) in splits.items():
        write_gz(out_dir / f"{tag}-images-idx3-ubyte.gz", idx_bytes(imgs))
        write_gz(out_dir / f"{tag}-labels-idx1-ubyte.gz", idx_bytes(labs))
        print(f"{tag}: {len(imgs)} images, label counts {np.bincount(labs).tolist()}")


if __name__ == "__main__":
    main()
