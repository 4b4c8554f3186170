"""Binary model files.

Layout (all little-endian)::

    b"QCNN"  version:u8  n:u8  negative_slope:f64  widths:4 x u32
    parameter_count:u64  parameters:f64[parameter_count]  crc32:u32

Parameters are concatenated array by array in stage order.  A JSON sidecar
``<file>.json`` carries the layer table and training provenance.
"""

from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from .network import NetworkSpec, Parameters, build_template_network

MAGIC = b"QCNN"
VERSION = 1
_HEADER = struct.Struct("<BBd4IQ")


class ModelFormatError(ValueError):
    """Unreadable model file; ``code`` names the failure."""

    def __init__(self, code: str, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code


def save_model(spec: NetworkSpec, params: Parameters, path, provenance: dict | None = None) -> Path:
    params.check(spec)
    path = Path(path)
    body = MAGIC + _HEADER.pack(
        VERSION, spec.n, spec.negative_slope, *spec.linear_widths, spec.parameter_count
    )
    body += params.flat().astype("<f8").tobytes()
    body += struct.pack("<I", zlib.crc32(body))
    path.write_bytes(body)
    sidecar = {
        "format": "QCNN",
        "version": VERSION,
        "n": spec.n,
        "linear_widths": list(spec.linear_widths),
        "negative_slope": spec.negative_slope,
        "parameter_count": spec.parameter_count,
        "parameter_sha256": params.checksum(),
        "stages": [[s.kind, list(s.in_shape), list(s.out_shape)] for s in spec.stages],
        "provenance": provenance or {},
    }
    Path(str(path) + ".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return path


def load_model(path) -> tuple[NetworkSpec, Parameters]:
    data = Path(path).read_bytes()
    head = len(MAGIC) + _HEADER.size
    if len(data) < len(MAGIC) or data[:len(MAGIC)] != MAGIC:
        raise ModelFormatError("bad_magic", f"{path} is not a QCNN model file")
    if len(data) < head:
        raise ModelFormatError("truncated", f"{path} ends inside the header")
    version, n, slope, w1, w2, w3, w4, count = _HEADER.unpack(data[len(MAGIC):head])
    if version != VERSION:
        raise ModelFormatError("bad_version", f"{path} has format version {version}, expected {VERSION}")
    try:
        spec = build_template_network(n, (w1, w2, w3, w4), slope)
    except ValueError as exc:
        raise ModelFormatError("bad_header", str(exc)) from None
    if count != spec.parameter_count:
        raise ModelFormatError(
            "shape_mismatch", f"header declares {count} parameters, network has {spec.parameter_count}"
        )
    end = head + 8 * count
    if len(data) < end + 4:
        raise ModelFormatError("truncated", f"{path} is truncated")
    if len(data) > end + 4:
        raise ModelFormatError("trailing_data", f"{path} has unexpected trailing bytes")
    (crc,) = struct.unpack("<I", data[end:end + 4])
    if crc != zlib.crc32(data[:end]):
        raise ModelFormatError("checksum", f"{path} failed its CRC check")
    flat = np.frombuffer(data, dtype="<f8", count=count, offset=head)
    return spec, Parameters.from_flat(spec, flat)


def read_sidecar(path) -> dict:
    side = Path(str(path) + ".json")
    return json.loads(side.read_text()) if side.exists() else {}
