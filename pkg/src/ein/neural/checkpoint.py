"""Binary checkpoints.

Layout: the magic bytes ``EIN1``, an unsigned 64-bit little-endian header
length, the UTF-8 JSON header, then every tensor as little-endian float32 in
header order. Offsets in the header are relative to the payload start.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .config import EinConfig
from .model import EinModel

MAGIC = b"EIN1"
FORMAT_VERSION = 1
_F32 = np.dtype("<f4")


class CheckpointError(ValueError):
    pass


def save_checkpoint(model: EinModel, path) -> None:
    tensors, offset = [], 0
    names = sorted(model.params)
    for name in names:
        arr = model.params[name]
        nbytes = arr.size * _F32.itemsize
        tensors.append({"name": name, "shape": list(arr.shape), "offset": offset, "nbytes": nbytes})
        offset += nbytes
    header = {
        "version": FORMAT_VERSION,
        "config": model.config.to_dict(),
        "labels": model.labels,
        "vocab": model.vocab,
        "emotion_names": model.emotion_names,
        "stop_words": sorted(model.stop_words),
        "tensors": tensors,
    }
    blob = json.dumps(header, sort_keys=True, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for name in names:
            fh.write(np.ascontiguousarray(model.params[name], dtype=_F32).tobytes())


def load_checkpoint(path) -> EinModel:
    """Load a model; parameters come back as float32."""
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise CheckpointError(f"{path}: not an EIN1 checkpoint")
    if len(data) < 12:
        raise CheckpointError(f"{path}: truncated header")
    (hlen,) = struct.unpack("<Q", data[4:12])
    try:
        header = json.loads(data[12:12 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: corrupt header ({exc})") from None
    if header.get("version") != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported version {header.get('version')}")
    payload = memoryview(data)[12 + hlen:]
    params = {}
    for t in header["tensors"]:
        end = t["offset"] + t["nbytes"]
        if end > len(payload):
            raise CheckpointError(f"{path}: payload truncated in {t['name']}")
        arr = np.frombuffer(payload[t["offset"]:end], dtype=_F32).astype(np.float32)
        params[t["name"]] = arr.reshape(t["shape"])
    return EinModel(EinConfig.from_dict(header["config"]), header["vocab"], header["labels"],
                    header["emotion_names"], params, header["stop_words"])
