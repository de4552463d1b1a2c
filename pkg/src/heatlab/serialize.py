"""Report serialization: canonical JSON documents, delimited traces and the
run-manifest hash that makes experiments reproducible.

Reports are deterministic: identical manifests serialize to identical bytes.
Timestamps live in a dedicated field excluded from the hash.
"""

from __future__ import annotations

import csv
import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if np.isnan(x):
            return None
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    return obj


def canonical_json(doc: dict) -> str:
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2)


def manifest_hash(manifest: dict) -> str:
    """sha256 of the manifest minus volatile fields."""
    core = {k: v for k, v in manifest.items()
            if k not in ("created_at", "hash", "outputs")}
    payload = json.dumps(_jsonable(core), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def build_manifest(command: str, params: dict, tolerances: dict = None) -> dict:
    manifest = {
        "command": command,
        "params": _jsonable(params),
        "tolerances": _jsonable(tolerances or {}),
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    manifest["hash"] = manifest_hash(manifest)
    return manifest


def write_json(path, doc: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(doc) + "\n")
    return path


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_csv_cell(x) for x in row])
    return path


def _csv_cell(x):
    if isinstance(x, (float, np.floating)):
        if np.isnan(x):
            return "nan"
        return repr(float(x))
    return x
