"""Versioned binary container for precomputed operators.

Layout (all integers little-endian):

    bytes 0..3    magic "SRPM"
    bytes 4..5    format version (u16), currently 1
    bytes 6..7    reserved, zero
    bytes 8..11   header length in bytes (u32)
    header        JSON object with sorted keys:
                    kind: operator kind tag
                    meta: small scalars (dimensions, counts, hash inputs)
                    params_hash: hex digest tying the cache to its config
                    arrays: list of {name, dtype, shape} in payload order
    payload       raw array bytes, C-order, little-endian; complex values
                  are interleaved (re, im) float64

Saving the same content twice produces byte-identical files, and
load(save(x)) round-trips bit-exactly.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import CacheFormatError

MAGIC = b"SRPM"
VERSION = 1

_DTYPES = {"<f8": np.dtype("<f8"), "<c16": np.dtype("<c16"), "<i8": np.dtype("<i8")}


@dataclass(frozen=True)
class CacheBundle:
    kind: str
    meta: dict
    arrays: dict
    params_hash: str


def _wire_dtype(arr: np.ndarray) -> str:
    kind = arr.dtype.kind
    if kind == "f":
        return "<f8"
    if kind == "c":
        return "<c16"
    if kind in ("i", "u"):
        return "<i8"
    raise CacheFormatError(f"unsupported array dtype {arr.dtype}")


def save_cache(path: str, kind: str, arrays: dict, meta: dict,
               params_hash: str) -> None:
    """Write an operator bundle; `arrays` is an ordered name -> ndarray map."""
    entries = []
    payloads = []
    for name, arr in arrays.items():
        arr = np.asarray(arr)
        wire = _wire_dtype(arr)
        data = np.ascontiguousarray(arr).astype(_DTYPES[wire], copy=False)
        entries.append({"name": name, "dtype": wire, "shape": list(arr.shape)})
        payloads.append(data.tobytes(order="C"))
    header = json.dumps({"arrays": entries, "kind": kind, "meta": meta,
                         "params_hash": params_hash},
                        sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HH", VERSION, 0))
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for blob in payloads:
            fh.write(blob)


def load_cache(path: str) -> CacheBundle:
    """Read an operator bundle written by `save_cache`."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise CacheFormatError(f"{path}: not an operator cache (bad magic bytes)")
    version, _ = struct.unpack_from("<HH", blob, 4)
    if version != VERSION:
        raise CacheFormatError(f"{path}: unsupported cache version {version}")
    (header_len,) = struct.unpack_from("<I", blob, 8)
    header_end = 12 + header_len
    if header_end > len(blob):
        raise CacheFormatError(f"{path}: truncated header")
    try:
        header = json.loads(blob[12:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CacheFormatError(f"{path}: corrupt header") from exc
    arrays = {}
    offset = header_end
    for entry in header["arrays"]:
        dtype = _DTYPES.get(entry["dtype"])
        if dtype is None:
            raise CacheFormatError(f"{path}: unknown dtype {entry['dtype']!r}")
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * dtype.itemsize
        if offset + nbytes > len(blob):
            raise CacheFormatError(f"{path}: truncated payload for {entry['name']!r}")
        arrays[entry["name"]] = np.frombuffer(
            blob, dtype=dtype, count=count, offset=offset).reshape(shape).copy()
        offset += nbytes
    return CacheBundle(kind=header["kind"], meta=header["meta"], arrays=arrays,
                       params_hash=header["params_hash"])
