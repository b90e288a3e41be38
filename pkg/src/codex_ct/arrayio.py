"""Array and artifact serialization.

Arrays travel as flat little-endian float32 binaries (<name>.f32) next
to a JSON sidecar (<name>.json) holding the shape, dtype, and any role
metadata.  Previews are 8-bit binary PGM with min-max windowing, so no
imaging library is needed.  All writes go through a temp file plus
rename, which keeps partially written outputs out of result
directories.
"""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path

import numpy as np


def _atomic_write_bytes(path: Path, payload: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def atomic_write_text(path, text: str) -> None:
    _atomic_write_bytes(Path(path), text.encode("utf-8"))


def save_array(base, arr, meta: dict | None = None) -> None:
    """Write <base>.f32 and <base>.json."""
    base = Path(base)
    arr = np.asarray(arr)
    payload = arr.astype("<f4").tobytes(order="C")
    sidecar = {"shape": list(arr.shape), "dtype": "float32", "order": "C"}
    if meta:
        sidecar.update(meta)
    _atomic_write_bytes(base.with_suffix(".f32"), payload)
    atomic_write_text(base.with_suffix(".json"), json.dumps(sidecar, indent=2, sort_keys=True))


def load_array(base):
    """Read (<base>.f32, <base>.json) back as (float64 array, sidecar dict)."""
    base = Path(base)
    with open(base.with_suffix(".json")) as fh:
        meta = json.load(fh)
    raw = np.fromfile(base.with_suffix(".f32"), dtype="<f4")
    shape = tuple(meta["shape"])
    if raw.size != int(np.prod(shape)):
        raise ValueError(f"{base}: payload has {raw.size} values, sidecar says {shape}")
    return raw.reshape(shape).astype(np.float64), meta


def write_pgm(path, values) -> None:
    """8-bit binary PGM preview, min-max windowed."""
    values = np.asarray(values, dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        scaled = np.zeros(values.shape, dtype=np.uint8)
    else:
        scaled = np.round(255.0 * (values - lo) / (hi - lo)).astype(np.uint8)
    header = f"P5\n{values.shape[1]} {values.shape[0]}\n255\n".encode("ascii")
    _atomic_write_bytes(Path(path), header + scaled.tobytes(order="C"))


def write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    atomic_write_text(path, buf.getvalue())
