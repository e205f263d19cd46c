"""Wire formats: graph JSON/CSV, sample CSV with JSON sidecar, reports.

All JSON is written with sorted keys and a trailing newline and carries no
timestamps, so rerunning a command with identical inputs and seed produces
byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from . import graphspace as gs
from .errors import ValidationError
from .frechet import SampleSet


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def digest(obj) -> str:
    """Stable sha256 of the canonical JSON encoding of ``obj``."""
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def write_json(obj, path) -> None:
    Path(path).write_text(canonical_json(obj))


def load_graph(path) -> tuple[int, np.ndarray]:
    """Load one network from JSON or CSV.

    JSON: ``{"d": d, "weights": [...]}`` or ``{"d": d, "adjacency": [[...]]}``.
    CSV: a d x d adjacency matrix, header row ignored.  All floats are
    parsed at 64-bit precision.  Returns ``(d, weight_vector)``.
    """
    p = Path(path)
    if p.suffix.lower() == ".csv":
        rows = []
        with open(p, newline="") as fh:
            reader = csv.reader(fh)
            next(reader, None)  # header ignored
            for row in reader:
                if row:
                    rows.append([float(v) for v in row])
        w = gs.vectorize(np.asarray(rows, dtype=float))
        return gs.node_count(w.shape[0]), w
    obj = json.loads(p.read_text())
    if "d" not in obj:
        raise ValidationError(f"{path}: graph JSON must carry 'd'")
    d = int(obj["d"])
    if "weights" in obj:
        return d, gs.as_weight_vector(obj["weights"], d)
    if "adjacency" in obj:
        a = np.asarray(obj["adjacency"], dtype=float)
        if a.shape != (d, d):
            raise ValidationError(f"{path}: adjacency shape {a.shape} does not match d={d}")
        return d, gs.vectorize(a)
    raise ValidationError(f"{path}: graph JSON needs 'weights' or 'adjacency'")


def graph_to_json(d: int, w) -> dict:
    return {"d": int(d), "weights": [float(v) for v in gs.as_weight_vector(w, d)]}


def load_samples(path, d: int | None = None) -> SampleSet:
    """Load a sample set: JSON ``{"d":..., "samples": [[...], ...]}`` or a
    CSV of weight-vector rows (header row ignored, ``d`` inferred or given).
    A JSON sidecar ``<path>.meta.json`` is honored for CSV metadata."""
    p = Path(path)
    if p.suffix.lower() == ".json":
        obj = json.loads(p.read_text())
        dd = int(obj["d"]) if "d" in obj else d
        return SampleSet(
            d=dd,
            samples=np.asarray(obj["samples"], dtype=float),
            seed=obj.get("seed"),
            aligned=bool(obj.get("aligned", False)),
        )
    rows = []
    with open(p, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header and _is_float_row(header):
            rows.append([float(v) for v in header])
        for row in reader:
            if row:
                rows.append([float(v) for v in row])
    arr = np.asarray(rows, dtype=float)
    meta_path = p.with_suffix(p.suffix + ".meta.json")
    seed = None
    aligned = False
    d_known = d is not None
    if meta_path.exists():
        meta = json.loads(meta_path.read_text())
        if "d" in meta:
            d = meta["d"]
            d_known = True
        seed = meta.get("seed")
        aligned = bool(meta.get("aligned", False))
    if not d_known:
        d = gs.node_count(arr.shape[1])
    return SampleSet(d=None if d is None else int(d), samples=arr, seed=seed, aligned=aligned)


def _is_float_row(row) -> bool:
    try:
        [float(v) for v in row]
        return True
    except ValueError:
        return False


def write_samples_csv(s: SampleSet, path, provenance: dict | None = None) -> None:
    """One row per network plus a JSON metadata sidecar ``<path>.meta.json``."""
    p = Path(path)
    with open(p, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"w{k}" for k in range(s.D)])
        for row in s.samples:
            writer.writerow([repr(float(v)) for v in row])
    meta = {"d": s.d, "n": s.n, "seed": s.seed, "aligned": s.aligned}
    if provenance:
        meta["provenance"] = provenance
    write_json(meta, p.with_suffix(p.suffix + ".meta.json"))


def write_csv_rows(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
