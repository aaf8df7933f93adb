"""CSV / JSON emission and run manifests.

Floats are written with 17 significant digits so that reading a file back
reproduces the in-memory doubles exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from ..analysis.inequalities import InequalityReport
from ..dynamics import Trajectory
from ..errors import OutputError

NORM_COLUMNS = ("t", "L2", "Linf", "Lr_target", "Hhalf", "mass", "energy", "boundary_mass_fraction")
INEQUALITY_COLUMNS = ("sample_id", "form", "s", "p", "lhs", "rhs", "ratio")


def fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _inside(outdir: Path, name: str) -> Path:
    root = outdir.resolve()
    path = (root / name).resolve()
    if root != path and root not in path.parents:
        raise OutputError(f"refusing to write {path}: outside the run directory {root}")
    return path


def prepare_outdir(outdir: str | Path) -> Path:
    path = Path(outdir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {path}: {exc.strerror}") from None
    return path


def write_table(outdir: Path, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a CSV file (header always present) inside ``outdir``."""
    path = _inside(outdir, name)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(outdir: Path, name: str, payload: Any) -> Path:
    path = _inside(outdir, name)
    try:
        path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None
    return path


def norm_rows(traj: Trajectory | None, target_key: str | None) -> list[list[float]]:
    if traj is None or len(traj.times) == 0:
        return []
    rec = traj.records
    nan = np.full(len(traj.times), math.nan)
    target = rec.get(target_key, nan) if target_key else nan
    cols = [traj.times, rec["L2"], rec["Linf"], target, rec["Hhalf"], rec["mass"], rec["energy"],
            rec["boundary_mass_fraction"]]
    return [list(row) for row in zip(*cols)]


def write_norms(outdir: Path, traj: Trajectory | None, target_key: str | None, name: str = "norms.csv") -> Path:
    """``norms.csv``; ``Lr_target`` holds the record named ``target_key`` (NaN if absent)."""
    return write_table(outdir, name, NORM_COLUMNS, norm_rows(traj, target_key))


def write_series(outdir: Path, traj: Trajectory, name: str = "series.csv") -> Path:
    """Every per-snapshot record of ``traj`` (all exponents and hooks)."""
    keys = sorted(traj.records)
    rows = [[t, *(traj.records[k][i] for k in keys)] for i, t in enumerate(traj.times)]
    return write_table(outdir, name, ["t", *keys], rows)


def write_inequalities(outdir: Path, reports: Sequence[InequalityReport], name: str = "inequality.csv") -> Path:
    rows = [
        [e.sample_id, e.form, e.s, e.p, e.lhs, e.rhs, e.ratio]
        for rep in reports
        for e in rep.entries
    ]
    return write_table(outdir, name, INEQUALITY_COLUMNS, rows)


def read_table(path: str | Path) -> dict[str, np.ndarray | list[str]]:
    """Read a CSV written by :func:`write_table`; numeric columns become float arrays."""
    p = Path(path)
    try:
        with p.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
    except (OSError, StopIteration) as exc:
        raise OutputError(f"cannot read {p}: {getattr(exc, 'strerror', None) or 'empty file'}") from None
    out: dict[str, np.ndarray | list[str]] = {}
    for j, name in enumerate(header):
        column = [r[j] for r in rows]
        try:
            out[name] = np.array([float(v) for v in column])
        except ValueError:
            out[name] = column
    return out


def sha256(path: str | Path) -> str:
    p = Path(path)
    digest = hashlib.sha256()
    try:
        with p.open("rb") as fh:
            for block in iter(lambda: fh.read(1 << 20), b""):
                digest.update(block)
    except OSError as exc:
        raise OutputError(f"cannot hash {p}: {exc.strerror}") from None
    return digest.hexdigest()


def write_manifest(outdir: Path, manifest: dict[str, Any], files: Sequence[Path]) -> Path:
    """Write ``manifest.json`` listing every file in ``files`` with its SHA-256."""
    manifest = dict(manifest)
    manifest["files"] = {Path(f).name: sha256(f) for f in files}
    return write_json(outdir, "manifest.json", manifest)


def verify_manifest(outdir: str | Path) -> list[str]:
    """Names of listed files whose current hash differs from the manifest (or that are missing)."""
    root = Path(outdir)
    path = root / "manifest.json"
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror}") from None
    bad = []
    for name, digest in data.get("files", {}).items():
        target = root / name
        if not target.exists() or sha256(target) != digest:
            bad.append(name)
    return bad


__all__ = [
    "NORM_COLUMNS",
    "INEQUALITY_COLUMNS",
    "fmt",
    "prepare_outdir",
    "write_table",
    "write_json",
    "write_norms",
    "write_series",
    "write_inequalities",
    "read_table",
    "sha256",
    "write_manifest",
    "verify_manifest",
]
