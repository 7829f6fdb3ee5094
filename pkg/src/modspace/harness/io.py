"""Binary and JSON serialization of signals and coefficient tables, plus CSV helpers."""

from __future__ import annotations

import csv
import io
import json
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..gabor import GaborCoefficients
from ..grid import GridSpec, SampledSignal

MAGIC = b"MSK1"
HEADER = struct.Struct("<4s7I")  # magic, kind, d, L, n, extension length, two reserved words
KIND_TIME, KIND_FREQ, KIND_GABOR = 0, 1, 2
_KINDS = {"time": KIND_TIME, "freq": KIND_FREQ}


class FormatError(ValueError):
    pass


def _pack(kind: int, spec: GridSpec, data: np.ndarray, extension: bytes = b"") -> bytes:
    header = HEADER.pack(MAGIC, kind, spec.dim, spec.period_units, spec.samples_per_unit, len(extension), 0, 0)
    body = np.ascontiguousarray(data, dtype="<c16").tobytes()
    return header + extension + body


def encode_signal(f: SampledSignal) -> bytes:
    return _pack(_KINDS[f.domain], f.spec, f.data)


def encode_coefficients(c: GaborCoefficients) -> bytes:
    """Coefficient tables carry their lattice ranges as ``(start, count)`` pairs per axis."""
    d, L, n = c.spec.dim, c.spec.period_units, c.spec.samples_per_unit
    ranges = [(-L // 2, L)] * d + [(-n, 2 * n)] * d
    ext = struct.pack(f"<{4 * d}i", *[v for pair in ranges for v in pair])
    return _pack(KIND_GABOR, c.spec, c.values, ext)


def decode(blob: bytes) -> SampledSignal | GaborCoefficients:
    if len(blob) < HEADER.size:
        raise FormatError("file shorter than the header")
    magic, kind, d, L, n, ext_len, _, _ = HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    spec = GridSpec(d, L, n)
    start = HEADER.size + ext_len
    data = np.frombuffer(blob, dtype="<c16", offset=start).astype(complex)
    if kind == KIND_GABOR:
        shape = (L,) * d + (2 * n,) * d
        ranges = struct.unpack_from(f"<{4 * d}i", blob, HEADER.size)
        if list(ranges[1::2]) != list(shape):
            raise FormatError("lattice ranges do not match the grid")
        return GaborCoefficients(spec, data.reshape(shape))
    if kind not in (KIND_TIME, KIND_FREQ):
        raise FormatError(f"unknown record kind {kind}")
    if data.size != spec.size**d:
        raise FormatError("payload size does not match the grid")
    domain = "time" if kind == KIND_TIME else "freq"
    return SampledSignal(spec, data.reshape(spec.shape), domain)


def save(obj: SampledSignal | GaborCoefficients, path: str | Path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(to_json(obj)))
        return
    blob = encode_coefficients(obj) if isinstance(obj, GaborCoefficients) else encode_signal(obj)
    path.write_bytes(blob)


def load(path: str | Path) -> SampledSignal | GaborCoefficients:
    path = Path(path)
    if path.suffix == ".json":
        return from_json(json.loads(path.read_text()))
    return decode(path.read_bytes())


def to_json(obj: SampledSignal | GaborCoefficients) -> dict:
    """Sidecar form for small records."""
    spec = obj.spec
    flat = (obj.values if isinstance(obj, GaborCoefficients) else obj.data).ravel()
    kind = "gabor" if isinstance(obj, GaborCoefficients) else obj.domain
    return {
        "format": "MSK1",
        "kind": kind,
        "d": spec.dim,
        "L": spec.period_units,
        "n": spec.samples_per_unit,
        "re": flat.real.tolist(),
        "im": flat.imag.tolist(),
    }


def from_json(obj: dict) -> SampledSignal | GaborCoefficients:
    if obj.get("format") != "MSK1":
        raise FormatError("not an MSK1 JSON record")
    spec = GridSpec(int(obj["d"]), int(obj["L"]), int(obj["n"]))
    data = np.asarray(obj["re"], float) + 1j * np.asarray(obj["im"], float)
    if obj["kind"] == "gabor":
        d, L, n = spec.dim, spec.period_units, spec.samples_per_unit
        return GaborCoefficients(spec, data.reshape((L,) * d + (2 * n,) * d))
    return SampledSignal(spec, data.reshape(spec.shape), obj["kind"])


def coefficient_rows(c: GaborCoefficients) -> Iterable[dict]:
    """``(j, k, re, im)`` rows; multi-indices are joined with ``;``."""
    d = c.spec.dim
    L, n = c.spec.period_units, c.spec.samples_per_unit
    for idx in np.ndindex(*c.values.shape):
        v = c.values[idx]
        j = ";".join(str(i - L // 2) for i in idx[:d])
        k = ";".join(str(i - n) for i in idx[d:])
        yield {"j": j, "k": k, "re": repr(float(v.real)), "im": repr(float(v.imag))}


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def csv_text(rows: Sequence[dict], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(row.get(h)) for h in header])
    return buf.getvalue()


def write_csv(path: str | Path, rows: Sequence[dict], header: Sequence[str]) -> None:
    Path(path).write_text(csv_text(rows, header))
