"""On-disk formats for fields and states.

Field dump layout::

    bytes 0..7    little-endian uint64, length L of the JSON header
    bytes 8..8+L  UTF-8 JSON header (grids, shape, state_label, trace_target)
    remainder     little-endian float64 values, row-major

Hybrid fields are indexed (i_re, i_im, i_theta, i_phi).  State files are
plain JSON holding real and imaginary parts separately.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DumpFormatError
from .grids import CvGrid, SphereGrid
from .operators import Ket, Operator
from .wigner import HybridField

FIELD_FORMAT = "hybridwigner-field"
STATE_FORMAT = "hybridwigner-state"
_PREFIX = struct.Struct("<Q")

__all__ = [
    "FieldDump",
    "write_field",
    "read_field",
    "write_csv",
    "write_state",
    "read_state",
]


@dataclass
class FieldDump:
    kind: str  # "cv", "dv" or "hybrid"
    values: np.ndarray
    cv_grid: Optional[CvGrid] = None
    sphere_grid: Optional[SphereGrid] = None
    state_label: str = ""
    trace_target: float = 1.0

    def to_hybrid(self):
        return HybridField.from_values(
            self.values, self.cv_grid, self.sphere_grid, self.state_label, self.trace_target
        )


def _header(kind, shape, cv_grid, sphere_grid, state_label, trace_target):
    return {
        "format": FIELD_FORMAT,
        "version": 1,
        "kind": kind,
        "dtype": "<f8",
        "order": "row-major",
        "shape": list(shape),
        "cv_grid": cv_grid.to_dict() if cv_grid is not None else None,
        "sphere_grid": sphere_grid.to_dict() if sphere_grid is not None else None,
        "state_label": state_label,
        "trace_target": float(trace_target),
    }


def write_field(path, field, cv_grid=None, sphere_grid=None, state_label="", trace_target=1.0):
    """Write a HybridField, or a 2-D array with exactly one of the grids."""
    if isinstance(field, HybridField):
        head = _header("hybrid", field.shape, field.cv_grid, field.sphere_grid,
                       field.state_label, field.trace_target)
        chunks = (v for _, _, v in field.iter_slabs())
    else:
        values = np.asarray(field, dtype=float)
        kind = "cv" if cv_grid is not None else "dv"
        grid = cv_grid if cv_grid is not None else sphere_grid
        if grid is None or values.shape != grid.shape:
            raise DumpFormatError(f"field shape {values.shape} does not match its grid")
        head = _header(kind, values.shape, cv_grid, sphere_grid, state_label, trace_target)
        chunks = iter([values])
    raw = json.dumps(head, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(_PREFIX.pack(len(raw)))
        fh.write(raw)
        for chunk in chunks:
            fh.write(np.ascontiguousarray(chunk, dtype="<f8").tobytes())


def read_field(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _PREFIX.size:
        raise DumpFormatError("file too short for the header-length prefix", offset=0)
    (hlen,) = _PREFIX.unpack_from(blob)
    start = _PREFIX.size
    if start + hlen > len(blob):
        raise DumpFormatError(f"header length {hlen} runs past end of file", offset=0)
    try:
        head = json.loads(blob[start:start + hlen].decode())
    except UnicodeDecodeError as exc:
        raise DumpFormatError("header is not UTF-8", offset=start + exc.start) from None
    except json.JSONDecodeError as exc:
        raise DumpFormatError(f"header is not JSON: {exc.msg}", offset=start + exc.pos) from None
    if not isinstance(head, dict) or head.get("format") != FIELD_FORMAT:
        raise DumpFormatError("not a field dump header", offset=start)
    try:
        kind = head["kind"]
        shape = tuple(int(s) for s in head["shape"])
        cv = CvGrid.from_dict(head["cv_grid"]) if head.get("cv_grid") else None
        sp = SphereGrid.from_dict(head["sphere_grid"]) if head.get("sphere_grid") else None
    except (KeyError, TypeError, ValueError) as exc:
        raise DumpFormatError(f"incomplete header: {exc}", offset=start) from None
    data_start = start + hlen
    n_bytes = int(np.prod(shape)) * 8
    if len(blob) - data_start != n_bytes:
        raise DumpFormatError(
            f"expected {n_bytes} data bytes for shape {shape}, found {len(blob) - data_start}",
            offset=data_start,
        )
    values = np.frombuffer(blob, dtype="<f8", offset=data_start).reshape(shape).astype(float)
    return FieldDump(kind, values, cv, sp, head.get("state_label", ""),
                     float(head.get("trace_target", 1.0)))


def write_csv(path, values, cv_grid=None, sphere_grid=None):
    """Long-format CSV of a 2-D field: coordinate columns plus W."""
    values = np.asarray(values)
    if cv_grid is not None:
        names, x, y = ("re_alpha", "im_alpha"), cv_grid.re, cv_grid.im
    elif sphere_grid is not None:
        names, x, y = ("theta", "phi"), sphere_grid.theta, sphere_grid.phi
    else:
        raise DumpFormatError("write_csv needs a grid")
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow([*names, "W"])
        for i, xi in enumerate(x):
            for j, yj in enumerate(y):
                out.writerow([repr(float(xi)), repr(float(yj)), repr(float(values[i, j]))])


def write_state(path, state, spec=None, report=None):
    data = np.asarray(state.data)
    doc = {
        "format": STATE_FORMAT,
        "kind": "ket" if isinstance(state, Ket) else "density",
        "dim_field": state.dim_field,
        "dim_atom": state.dim_atom,
        "real": data.real.tolist(),
        "imag": data.imag.tolist(),
        "spec": spec,
        "report": report,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def read_state(path):
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DumpFormatError(f"state file is not JSON: {exc.msg}", offset=exc.pos) from None
    if not isinstance(doc, dict) or doc.get("format") != STATE_FORMAT:
        raise DumpFormatError("not a state file", offset=0)
    try:
        data = np.asarray(doc["real"]) + 1j * np.asarray(doc["imag"])
        cls = Ket if doc["kind"] == "ket" else Operator
        return cls(data, int(doc["dim_field"]), int(doc["dim_atom"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DumpFormatError(f"incomplete state file: {exc}", offset=0) from None
