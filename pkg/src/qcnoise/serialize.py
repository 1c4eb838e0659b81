"""JSON encoding of states, channels and results.

Complex numbers travel as ``[re, im]`` pairs and matrices as row-major
nested lists of such pairs.  Floats are rounded to 12 significant digits on
output, so identical inputs give byte-identical documents.
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Any

import numpy as np

from .channels import ChannelClass, KrausChannel, validate_channel
from .classicality import ClassicalityVerdict
from .errors import BadParameter, DimensionMismatch, MalformedInput
from .measures import CCState, MeasureResult
from .numerics import DEFAULT_TOL, DensityMatrix, ProductBasis, Tolerances, validate_density

DIGITS = 12


def round_float(x: float) -> float | str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{DIGITS}g}") + 0.0


def encode_complex(z: complex) -> list:
    return [round_float(float(np.real(z))), round_float(float(np.imag(z)))]


def encode_matrix(a) -> list:
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {a.shape}")
    return [[encode_complex(z) for z in row] for row in a]


def _decode_number(x) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x, 0.0)
    raise MalformedInput(f"expected a [re, im] pair, got {x!r}")


def decode_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise MalformedInput("matrix must be a non-empty list of rows")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise MalformedInput("matrix rows have different lengths")
    return np.array([[_decode_number(x) for x in r] for r in rows], dtype=complex)


def to_jsonable(obj: Any) -> Any:
    """Recursively convert results to JSON-ready values."""
    if isinstance(obj, (ClassicalityVerdict, MeasureResult, ChannelClass)) or hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, DensityMatrix):
        return state_to_dict(obj)
    if isinstance(obj, ProductBasis):
        return [encode_matrix(u) for u in obj.unitaries]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if obj.ndim == 2:
                return encode_matrix(obj)
            if obj.ndim == 1:
                return [encode_complex(z) for z in obj]
            return [to_jsonable(x) for x in obj]
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None


# --------------------------------------------------------------------------
# states and channels


def state_to_dict(rho: DensityMatrix) -> dict:
    return {"dims": list(rho.dims), "matrix": encode_matrix(rho.matrix)}


def state_from_dict(doc, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise MalformedInput('state JSON needs a "matrix" field')
    dims = doc.get("dims")
    if dims is not None and (not isinstance(dims, list) or not all(isinstance(d, int) for d in dims)):
        raise MalformedInput('"dims" must be a list of integers')
    return validate_density(decode_matrix(doc["matrix"]), dims, tol)


def channel_to_dict(ch: KrausChannel) -> dict:
    return {"dim": ch.dim, "kraus": [encode_matrix(k) for k in ch.kraus]}


def channel_from_dict(doc, tol: Tolerances = DEFAULT_TOL) -> KrausChannel:
    if not isinstance(doc, dict) or "kraus" not in doc or not isinstance(doc["kraus"], list):
        raise MalformedInput('channel JSON needs a "kraus" list')
    kraus = [decode_matrix(k) for k in doc["kraus"]]
    ch = validate_channel(kraus, tol.trace)
    if "dim" in doc and doc["dim"] != ch.dim:
        raise DimensionMismatch(f'"dim" is {doc["dim"]} but Kraus operators are {ch.dim}x{ch.dim}')
    return ch


def cc_state_from_dict(doc) -> CCState:
    try:
        probs = np.array(doc["probs"], dtype=float)
        basis = ProductBasis(tuple(decode_matrix(u) for u in doc["basis"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"malformed CC state: {exc}") from None
    return CCState(probs, basis)


def measure_result_from_dict(doc) -> MeasureResult:
    try:
        return MeasureResult(doc["kind"], float(doc["value"]), cc_state_from_dict(doc["witness"]),
                             dict(doc.get("diagnostics", {})))
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"malformed measure result: {exc}") from None


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise BadParameter(f"cannot read {path}: {exc.strerror}") from None


def load_state(path: str, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    return state_from_dict(read_json(path), tol)


def load_channel(path: str, tol: Tolerances = DEFAULT_TOL) -> KrausChannel:
    return channel_from_dict(read_json(path), tol)
