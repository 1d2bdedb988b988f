from .dataset import DataError, Dataset, batches
from .idx import (
    IdxFormatError,
    MNIST_FILES,
    data_dir,
    load_mnist,
    parse_idx,
    read_idx_file,
    serialize_idx,
)
from .synth import synth_blobs
from .transforms import SqueezerSpec, bit_depth_reduce, median_filter, resize_rotate

__all__ = [
    "DataError", "Dataset", "IdxFormatError", "MNIST_FILES", "SqueezerSpec",
    "batches", "bit_depth_reduce", "data_dir", "load_mnist", "median_filter",
    "parse_idx", "read_idx_file", "resize_rotate", "serialize_idx", "synth_blobs",
]
