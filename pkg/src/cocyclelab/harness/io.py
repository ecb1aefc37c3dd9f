"""Deterministic file emission: CSV, JSON, hashes, run manifests.

All floats are serialized with 17 significant digits; CSV is RFC-4180
(CRLF, UTF-8, '.' decimal); JSON objects keep stable key order.  Given
the same resolved config and seed, every byte written here is identical
across runs.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

__all__ = ["fmt", "RunContext", "write_csv", "write_json", "write_text",
           "finish_manifest"]


def fmt(x) -> str:
    """17-significant-digit text form of a float; ints and strs pass through."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)):
        return str(x)
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


@dataclass
class RunContext:
    """Output directory plus artifact bookkeeping for one run."""

    outdir: Path
    reproducible: bool = False
    artifacts: list = field(default_factory=list)

    def path(self, name: str) -> Path:
        self.outdir.mkdir(parents=True, exist_ok=True)
        p = self.outdir / name
        self.artifacts.append(p)
        return p


def write_csv(ctx: RunContext, name: str, header, rows) -> Path:
    p = ctx.path(name)
    with open(p, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)  # csv default lineterminator is CRLF per RFC-4180
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    return p


def _jsonable(obj):
    import numpy as np
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, float) and obj != obj:  # NaN is not valid JSON
        return None
    if isinstance(obj, float) and obj in (float("inf"), float("-inf")):
        return "inf" if obj > 0 else "-inf"
    return obj


def write_json(ctx: RunContext, name: str, obj) -> Path:
    p = ctx.path(name)
    with open(p, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, sort_keys=True, indent=2)
        fh.write("\n")
    return p


def write_text(ctx: RunContext, name: str, text: str) -> Path:
    p = ctx.path(name)
    with open(p, "w", encoding="utf-8") as fh:
        fh.write(text)
    return p


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def finish_manifest(ctx: RunContext, experiment: str, resolved_config) -> Path:
    """Hash every artifact and write the run manifest."""
    entries = []
    for p in ctx.artifacts:
        entries.append({
            "path": p.name,
            "sha256": _sha256(p),
            "bytes": p.stat().st_size,
        })
    manifest = {
        "experiment": experiment,
        "config": _jsonable(resolved_config),
        "artifacts": entries,
        "status": "ok",
    }
    if not ctx.reproducible:
        manifest["timestamp"] = datetime.now(timezone.utc).isoformat()
    p = ctx.outdir / "manifest.json"
    with open(p, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return p
