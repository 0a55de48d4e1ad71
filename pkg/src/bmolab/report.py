"""Report serialization: stable JSON (sorted keys, UTF-8) and CSV with a
header row and LF line endings.  Identical payloads produce byte-identical
files, which the CLI relies on for reproducibility."""

from __future__ import annotations

import json
from pathlib import Path

__version__ = "0.1.0"

__all__ = ["write_json", "write_csv", "tool_stamp", "__version__"]


def tool_stamp(config: dict, seed=None) -> dict:
    from . import _core

    stamp = {
        "tool": "bmolab",
        "version": __version__,
        "backend": _core.BACKEND,
        "config": config,
    }
    if seed is not None:
        stamp["seed"] = seed
    return stamp


def _jsonable(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    return str(obj)


def write_json(path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2)
    path.write_bytes((text + "\n").encode("utf-8"))


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    def cell(v):
        import numpy as np

        if isinstance(v, (np.floating, np.integer)):
            v = v.item()
        if isinstance(v, float):
            return repr(v)
        if isinstance(v, (list, tuple, np.ndarray)):
            return "(" + " ".join(repr(float(x)) for x in np.atleast_1d(v)) + ")"
        return str(v)

    lines = [",".join(str(h) for h in header)]
    lines.extend(",".join(cell(v) for v in row) for row in rows)
    path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
