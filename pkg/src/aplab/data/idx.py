"""IDX byte-format parsing (the MNIST distribution format) and MNIST loading.

Accepted payloads: big-endian magic 0x00000803 (3-D u8 image block) or
0x00000801 (1-D u8 label block), followed by big-endian u32 extents and the
raw u8 payload. Gzip containers are handled transparently.
"""

from __future__ import annotations

import gzip
import os
import struct
from pathlib import Path

import numpy as np

from .dataset import DataError, Dataset

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

MNIST_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}


class IdxFormatError(ValueError):
    pass


def parse_idx(payload: bytes) -> np.ndarray:
    """Images (scaled to [0,1] by /255) or integer labels from IDX bytes."""
    if len(payload) < 4:
        raise IdxFormatError("truncated header: no magic")
    (magic,) = struct.unpack(">i", payload[:4])
    if magic == IMAGE_MAGIC:
        rank = 3
    elif magic == LABEL_MAGIC:
        rank = 1
    else:
        raise IdxFormatError(f"bad magic 0x{magic & 0xFFFFFFFF:08x}")
    header_len = 4 + 4 * rank
    if len(payload) < header_len:
        raise IdxFormatError("truncated header: missing extents")
    dims = struct.unpack(f">{rank}i", payload[4:header_len])
    if any(d <= 0 for d in dims):
        raise IdxFormatError(f"non-positive extent in {dims}")
    count = int(np.prod(dims))
    body = payload[header_len:]
    if len(body) != count:
        raise IdxFormatError(f"payload length {len(body)} != expected {count}")
    data = np.frombuffer(body, dtype=np.uint8).reshape(dims)
    if magic == IMAGE_MAGIC:
        return data.astype(np.float64) / 255.0
    return data.astype(np.int64)


def serialize_idx(arr: np.ndarray) -> bytes:
    """Inverse of parse_idx: float images are rescaled by *255 and rounded."""
    arr = np.asarray(arr)
    if arr.ndim == 3:
        body = np.rint(np.asarray(arr, dtype=np.float64) * 255.0).astype(np.uint8)
        header = struct.pack(">iiii", IMAGE_MAGIC, *arr.shape)
    elif arr.ndim == 1:
        body = arr.astype(np.uint8)
        header = struct.pack(">ii", LABEL_MAGIC, arr.shape[0])
    else:
        raise IdxFormatError(f"unsupported rank {arr.ndim}")
    return header + body.tobytes()


def read_idx_file(path) -> np.ndarray:
    path = Path(path)
    raw = path.read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return parse_idx(raw)


def _resolve(directory: Path, stem: str) -> Path:
    for candidate in (directory / stem, directory / (stem + ".gz")):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"missing MNIST file: expected '{stem}' or '{stem}.gz' in {directory}")


def data_dir(default: str = "data/mnist") -> Path:
    """Dataset root; the APLAB_DATA_DIR environment variable overrides."""
    return Path(os.environ.get("APLAB_DATA_DIR", default))


def load_mnist(directory=None, take=None) -> tuple[Dataset, Dataset]:
    """(train, test) datasets from the four standard IDX files.

    `take` caps each split by first-N truncation; an int applies to both,
    a (train_n, test_n) pair caps them separately.
    """
    directory = data_dir() if directory is None else Path(directory)
    arrays = {key: read_idx_file(_resolve(directory, stem)) for key, stem in MNIST_FILES.items()}
    if arrays["train_images"].ndim != 3 or arrays["test_images"].ndim != 3:
        raise IdxFormatError("image files did not parse as 3-D blocks")
    train = Dataset(arrays["train_images"], arrays["train_labels"], class_count=10, split="train")
    test = Dataset(arrays["test_images"], arrays["test_labels"], class_count=10, split="test")
    if take is not None:
        train_n, test_n = (take, take) if isinstance(take, int) else take
        train, test = train.take(train_n), test.take(test_n)
    return train, test
