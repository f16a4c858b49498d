"""Field serialization.

This module is the single place that fixes the on-disk format.  A field is a
JSON record

    {
      "grid": {"d": int, "N": [int, ...], "L": [float, ...]},
      "components": int,
      "mean_zero": bool,
      "coeffs": [re, im, re, im, ...]
    }

where coeffs interleaves real and imaginary parts in row-major (C) order over
(component, wavenumber lattice), the lattice in FFT index order.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .spectral import Grid, SpectralField

__all__ = ["field_to_record", "field_from_record", "save_field", "load_field"]


def field_to_record(field: SpectralField) -> dict:
    flat = field.coeffs.ravel(order="C")
    interleaved = np.empty(2 * flat.size)
    interleaved[0::2] = flat.real
    interleaved[1::2] = flat.imag
    return {
        "grid": {
            "d": field.grid.dimension,
            "N": list(field.grid.modes),
            "L": list(field.grid.periods),
        },
        "components": field.components,
        "mean_zero": field.mean_zero,
        "coeffs": interleaved.tolist(),
    }


def field_from_record(record: dict) -> SpectralField:
    g = record["grid"]
    grid = Grid(tuple(int(n) for n in g["N"]), tuple(float(L) for L in g["L"]))
    if int(g["d"]) != grid.dimension:
        raise ValueError("grid record dimension does not match mode list")
    m = int(record["components"])
    raw = np.asarray(record["coeffs"], dtype=float)
    expected = 2 * m * int(np.prod(grid.modes))
    if raw.size != expected:
        raise ValueError(
            f"coefficient payload has {raw.size} floats, expected {expected}"
        )
    flat = raw[0::2] + 1j * raw[1::2]
    coeffs = flat.reshape((m,) + grid.shape, order="C")
    return SpectralField(grid, coeffs, bool(record.get("mean_zero", False)))


def save_field(field: SpectralField, path) -> None:
    Path(path).write_text(json.dumps(field_to_record(field)))


def load_field(path) -> SpectralField:
    return field_from_record(json.loads(Path(path).read_text()))
