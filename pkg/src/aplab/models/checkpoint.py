"""Checkpoint persistence: magic "APLAB", versioned JSON header, raw
little-endian float64 parameter blobs, trailing 64-bit content hash.
Round trips are bit-exact; any payload corruption fails the hash check.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .classifier import ClassifierParams
from .logit_decoder import LogitDecoderParams
from .vae import VaeParams

MAGIC = b"APLAB"
VERSION = 1


class CheckpointError(ValueError):
    pass


def _kind_of(params) -> str:
    if isinstance(params, ClassifierParams):
        return "classifier"
    if isinstance(params, VaeParams):
        return "vae"
    if isinstance(params, LogitDecoderParams):
        return "logit_decoder"
    raise CheckpointError(f"unsupported params type {type(params).__name__}")


def _fields_of(params) -> dict:
    if isinstance(params, ClassifierParams):
        return {"sizes": list(params.sizes), "loss_kind": params.loss_kind,
                "smoothing": params.smoothing, "p_drop": params.p_drop,
                "reversed_logits": params.reversed_logits, "meta": params.meta}
    if isinstance(params, VaeParams):
        return {"z_dim": params.z_dim, "hidden": params.hidden,
                "in_dim": params.in_dim, "meta": params.meta}
    return {"sizes": list(params.sizes), "meta": params.meta}


def _build(kind: str, fields: dict, weights: dict):
    if kind == "classifier":
        return ClassifierParams(weights=weights, sizes=tuple(fields["sizes"]),
                                loss_kind=fields["loss_kind"], smoothing=fields["smoothing"],
                                p_drop=fields["p_drop"], reversed_logits=fields["reversed_logits"],
                                meta=fields.get("meta", {}))
    if kind == "vae":
        return VaeParams(weights=weights, z_dim=fields["z_dim"], hidden=fields["hidden"],
                         in_dim=fields["in_dim"], meta=fields.get("meta", {}))
    if kind == "logit_decoder":
        return LogitDecoderParams(weights=weights, sizes=tuple(fields["sizes"]),
                                  meta=fields.get("meta", {}))
    raise CheckpointError(f"unknown checkpoint kind {kind!r}")


def checkpoint_bytes(params) -> bytes:
    names = sorted(params.weights)
    header = {
        "kind": _kind_of(params),
        "fields": _fields_of(params),
        "arrays": [[name, list(params.weights[name].shape)] for name in names],
    }
    header_bytes = json.dumps(header, sort_keys=True).encode()
    body = b"".join(np.ascontiguousarray(params.weights[n], dtype="<f8").tobytes() for n in names)
    prefix = MAGIC + struct.pack("<II", VERSION, len(header_bytes)) + header_bytes + body
    return prefix + hashlib.sha256(prefix).digest()[:8]


def save_checkpoint(params, path) -> str:
    """Write the checkpoint; returns its content hash (hex)."""
    blob = checkpoint_bytes(params)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(blob)
    return blob[-8:].hex()


def load_checkpoint(path):
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 16 or raw[:len(MAGIC)] != MAGIC:
        raise CheckpointError(f"not a checkpoint file: {path}")
    if hashlib.sha256(raw[:-8]).digest()[:8] != raw[-8:]:
        raise CheckpointError(f"content hash mismatch in {path}")
    offset = len(MAGIC)
    version, header_len = struct.unpack_from("<II", raw, offset)
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    offset += 8
    header = json.loads(raw[offset:offset + header_len].decode())
    offset += header_len
    weights = {}
    for name, shape in header["arrays"]:
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).reshape(shape)
        weights[name] = arr.astype(np.float64)
        offset += count * 8
    return _build(header["kind"], header["fields"], weights)


def checkpoint_hash(path) -> str:
    raw = Path(path).read_bytes()
    return raw[-8:].hex()
