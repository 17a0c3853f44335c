"""Embedding JSON serialization.

Format: {"n": int, "k": int, "vectors": [[...], ...]} with row v holding the
coordinates of vertex v. The same format carries factor vectors of a lifted
Gram matrix (k = factor dimension).
"""

from __future__ import annotations

import json

import numpy as np


def embedding_to_dict(y) -> dict:
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError("embedding must be (n,) or (n,k)")
    return {
        "n": int(arr.shape[0]),
        "k": int(arr.shape[1]),
        "vectors": [[float(x) for x in row] for row in arr],
    }


def embedding_to_json(y) -> str:
    return json.dumps(embedding_to_dict(y), sort_keys=True, separators=(",", ":"))


def embedding_from_dict(data: dict) -> np.ndarray:
    for key in ("n", "k", "vectors"):
        if key not in data:
            raise ValueError(f"embedding JSON missing {key!r}")
    arr = np.array(data["vectors"], dtype=float)
    if arr.ndim == 1 and data["k"] == 1:
        arr = arr[:, None]
    if arr.shape != (data["n"], data["k"]):
        raise ValueError(
            f"vectors shape {arr.shape} does not match (n,k)=({data['n']},{data['k']})")
    if not np.all(np.isfinite(arr)):
        raise ValueError("embedding entries must be finite")
    return arr


def embedding_from_json(text: str) -> np.ndarray:
    return embedding_from_dict(json.loads(text))
