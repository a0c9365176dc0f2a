"""JSON encodings for matrices, channels, stochastic matrices and codes.

Matrix: ``{"dim": n, "entries": [[re, im], ...]}`` in row-major order.
Channels carry a ``"type"`` tag: ``kraus``, ``holevo`` or ``preconditioner``.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .channel_reps import (
    HolevoChannel,
    KrausChannel,
    PreconditionerChannel,
    StinespringIsometry,
    preconditioner,
)
from .errors import EncodingError, QPrecondError
from .holevo_semigroup import StochasticMatrix
from .info_metrics import Code


def _real(x, what: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise EncodingError(f"{what}: expected a number, got {x!r}")
    if not np.isfinite(x):
        raise EncodingError(f"{what}: non-finite value")
    return float(x)


def matrix_to_json(A) -> dict:
    A = np.asarray(A, dtype=np.complex128)
    return {"dim": int(A.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in A.ravel()]}


def matrix_from_json(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict) or "dim" not in obj or "entries" not in obj:
        raise EncodingError("matrix must be an object with 'dim' and 'entries'")
    n = obj["dim"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise EncodingError(f"matrix dim must be a positive integer, got {n!r}")
    entries = obj["entries"]
    if not isinstance(entries, list) or len(entries) != n * n:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise EncodingError(f"matrix of dim {n} needs {n * n} entries, got {got}")
    vals = []
    for k, e in enumerate(entries):
        if not isinstance(e, list) or len(e) != 2:
            raise EncodingError(f"entry {k} must be a [re, im] pair")
        vals.append(complex(_real(e[0], f"entry {k}"), _real(e[1], f"entry {k}")))
    return np.array(vals, dtype=np.complex128).reshape(n, n)


def rect_to_json(V) -> dict:
    V = np.asarray(V, dtype=np.complex128)
    return {
        "rows": int(V.shape[0]),
        "cols": int(V.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in V.ravel()],
    }


def _matrix_list(obj, key: str) -> list[np.ndarray]:
    items = obj.get(key)
    if not isinstance(items, list) or not items:
        raise EncodingError(f"'{key}' must be a non-empty list of matrices")
    return [matrix_from_json(m) for m in items]


def channel_to_json(ch) -> dict:
    if isinstance(ch, KrausChannel):
        return {"type": "kraus", "dim": ch.dim, "ops": [matrix_to_json(K) for K in ch.kraus_ops]}
    if isinstance(ch, HolevoChannel):
        return {
            "type": "holevo",
            "povm": [matrix_to_json(F) for F in ch.povm],
            "densities": [matrix_to_json(R) for R in ch.densities],
        }
    if isinstance(ch, PreconditionerChannel):
        if ch.partition is None:
            raise EncodingError("only coordinate-block preconditioners have a JSON encoding")
        return {
            "type": "preconditioner",
            "unitary": matrix_to_json(ch.U),
            "partition": [list(b) for b in ch.partition],
        }
    if isinstance(ch, StinespringIsometry):
        return {
            "type": "stinespring",
            "input_dim": ch.input_dim,
            "env_dim": ch.env_dim,
            "isometry": rect_to_json(ch.V),
        }
    raise EncodingError(f"no JSON encoding for {type(ch).__name__}")


def channel_from_json(obj: Any):
    """Decode a channel; invariant violations surface as :class:`EncodingError`."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise EncodingError("channel must be an object with a 'type' field")
    kind = obj["type"]
    try:
        if kind == "kraus":
            ops = _matrix_list(obj, "ops")
            dim = obj.get("dim", ops[0].shape[0])
            return KrausChannel(dim, tuple(ops))
        if kind == "holevo":
            return HolevoChannel(tuple(_matrix_list(obj, "povm")), tuple(_matrix_list(obj, "densities")))
        if kind == "preconditioner":
            U = matrix_from_json(obj.get("unitary"))
            partition = obj.get("partition")
            if partition is not None and (
                not isinstance(partition, list) or not all(isinstance(b, list) for b in partition)
            ):
                raise EncodingError("'partition' must be a list of index lists")
            return preconditioner(U, partition)
    except EncodingError:
        raise
    except (QPrecondError, ValueError) as exc:
        raise EncodingError(f"invalid {kind} channel: {exc}") from exc
    raise EncodingError(f"unknown channel type {kind!r}")


def stochastic_to_json(A: StochasticMatrix) -> dict:
    return {"size": A.size, "entries": [[float(x) for x in row] for row in A.entries]}


def stochastic_from_json(obj: Any) -> StochasticMatrix:
    if not isinstance(obj, dict) or "size" not in obj or "entries" not in obj:
        raise EncodingError("stochastic matrix must be an object with 'size' and 'entries'")
    rows = obj["entries"]
    r = obj["size"]
    if not isinstance(rows, list) or len(rows) != r or any(not isinstance(x, list) or len(x) != r for x in rows):
        raise EncodingError(f"stochastic matrix of size {r} needs {r} rows of {r} entries")
    try:
        return StochasticMatrix(np.array([[_real(x, "entry") for x in row] for row in rows]))
    except ValueError as exc:
        raise EncodingError(str(exc)) from exc


def code_to_json(code: Code) -> dict:
    return {
        "block_length": code.block_length,
        "states": [matrix_to_json(S) for S in code.states],
        "observable": [matrix_to_json(M) for M in code.observable],
    }


def code_from_json(obj: Any) -> Code:
    if not isinstance(obj, dict) or "block_length" not in obj:
        raise EncodingError("code must be an object with 'block_length', 'states' and 'observable'")
    n = obj["block_length"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise EncodingError(f"block_length must be a positive integer, got {n!r}")
    try:
        return Code(n, tuple(_matrix_list(obj, "states")), tuple(_matrix_list(obj, "observable")))
    except EncodingError:
        raise
    except (QPrecondError, ValueError) as exc:
        raise EncodingError(f"invalid code: {exc}") from exc


def load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise EncodingError(f"{path}: malformed JSON ({exc})") from exc
