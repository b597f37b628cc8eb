"""JSON and CSV codecs for complex numbers and numpy arrays.

Complex numbers serialize as ``{"re": ..., "im": ...}`` objects, arrays as nested lists of
those objects (or plain floats for real arrays). CSV rows split complex values into
``<name>_re`` / ``<name>_im`` columns.
"""

from math import isinf, isnan
from typing import Annotated, Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, PlainSerializer, PlainValidator

__all__ = [
    "ComplexArray",
    "RealArray",
    "complex_columns",
    "complex_from_json",
    "complex_to_json",
    "frozen_array",
    "to_json_serializable",
]


def complex_to_json(z: complex) -> dict[str, float]:
    """Encode a complex number as a ``{"re", "im"}`` record."""
    z = complex(z)
    return {"re": float(z.real), "im": float(z.imag)}


def complex_from_json(v: object) -> complex:
    """Decode a complex number from a ``{"re", "im"}`` record or a plain number."""
    if isinstance(v, dict):
        return complex(float(v["re"]), float(v.get("im", 0.0)))
    if isinstance(v, complex | float | int | np.number):
        return complex(v)
    raise TypeError(f"Invalid complex value {v!r}")


def _decode_nested(v: object) -> object:
    if isinstance(v, dict):
        return complex_from_json(v)
    if isinstance(v, list | tuple):
        return [_decode_nested(x) for x in v]
    return v


def frozen_array(v: object, dtype: type = np.complex128) -> NDArray[Any]:
    """Copy ``v`` into a new read-only array of the given dtype."""
    if not isinstance(v, np.ndarray):
        v = _decode_nested(v)
    arr = np.array(v, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _to_complex_array(v: object) -> NDArray[np.complex128]:
    return frozen_array(v, np.complex128)


def _to_real_array(v: object) -> NDArray[np.float64]:
    return frozen_array(v, np.float64)


def _complex_array_to_json(arr: NDArray[np.complex128]) -> object:
    if arr.ndim == 0:
        return complex_to_json(complex(arr))
    return [_complex_array_to_json(row) for row in arr]


def _real_array_to_json(arr: NDArray[np.float64]) -> object:
    return arr.tolist()


ComplexArray = Annotated[
    np.ndarray,
    PlainValidator(_to_complex_array),
    PlainSerializer(_complex_array_to_json, when_used="json"),
]

RealArray = Annotated[
    np.ndarray,
    PlainValidator(_to_real_array),
    PlainSerializer(_real_array_to_json, when_used="json"),
]


def complex_columns(name: str, z: complex) -> dict[str, float]:
    """Split a complex value into ``<name>_re`` / ``<name>_im`` CSV columns."""
    z = complex(z)
    return {f"{name}_re": float(z.real), f"{name}_im": float(z.imag)}


def to_json_serializable(value: object) -> object:
    # None and JSON primitives
    if value is None or isinstance(value, str | int | bool):
        return value

    # Floats need special handling for nan/inf
    if isinstance(value, float | np.floating):
        if isnan(value) or isinf(value):
            raise ValueError(f"Cannot serialize {value} to JSON")
        return float(value)

    if isinstance(value, np.integer):
        return int(value)

    if isinstance(value, complex | np.complexfloating):
        return complex_to_json(complex(value))

    # Pydantic models
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")

    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return _complex_array_to_json(value)
        return to_json_serializable(value.tolist())

    if isinstance(value, dict):
        return {str(k): to_json_serializable(v) for k, v in value.items()}

    if isinstance(value, list | tuple):
        return [to_json_serializable(v) for v in value]

    raise TypeError(f"Cannot serialize {type(value).__name__} to JSON: {value!r}")
