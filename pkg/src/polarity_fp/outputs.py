"""Persistence: trajectory CSVs, snapshots, and the atomic run manifest.

Trajectory files are written with 17 significant digits so identical runs
produce byte-identical output.  The manifest is JSON written to a temporary
file and renamed into place: a killed run leaves either no manifest or a
complete one, never a partial one.  A manifest listing files that are absent
or whose digests changed marks a corrupt run.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .diagnostics import DiagnosticsRecord

__all__ = [
    "TRAJECTORY_COLUMNS",
    "EXCHANGE_COLUMNS",
    "write_trajectory_csv",
    "RunManifest",
    "write_manifest",
    "load_manifest",
    "verify_manifest",
]

TRAJECTORY_COLUMNS = (
    "t", "mass", "J", "Jshift", "alpha", "c_left", "c_right",
    "entropy", "fisher", "lyapunov", "dissipation", "supnorm",
)
EXCHANGE_COLUMNS = TRAJECTORY_COLUMNS + ("mu_left", "mu_right", "total_mass")


def _row(rec: DiagnosticsRecord, exchange: bool) -> str:
    vals = [
        rec.t, rec.mass, rec.J, rec.J_shift, rec.alpha, rec.c_left,
        rec.c_right, rec.entropy, rec.fisher, rec.lyapunov,
        rec.dissipation, rec.sup_norm,
    ]
    if exchange:
        vals += [rec.mu_left, rec.mu_right, rec.total_mass]
    return ",".join(f"{v:.17g}" for v in vals)


def write_trajectory_csv(records: list[DiagnosticsRecord], path: str | Path,
                         exchange: bool = False) -> None:
    path = Path(path)
    columns = EXCHANGE_COLUMNS if exchange else TRAJECTORY_COLUMNS
    with path.open("w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for rec in records:
            fh.write(_row(rec, exchange) + "\n")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Echo of the config plus provenance and the produced-file digest list."""

    config: dict
    code_version: str
    started_utc: str
    finished_utc: str
    status: str
    files: dict[str, str]   # file name (relative to the manifest) -> sha256
    blowup_time: float | None = None
    reason: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": "polarity-fp/manifest/v1",
                "config": self.config,
                "code_version": self.code_version,
                "started_utc": self.started_utc,
                "finished_utc": self.finished_utc,
                "status": self.status,
                "blowup_time": self.blowup_time,
                "reason": self.reason,
                "files": self.files,
            },
            indent=2,
            sort_keys=True,
        )


def write_manifest(manifest: RunManifest, path: str | Path) -> None:
    """Atomic write: temp file in the same directory, then rename."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(manifest.to_json() + "\n")
    os.replace(tmp, path)


def digest_files(directory: Path, names: list[str]) -> dict[str, str]:
    return {name: _sha256(directory / name) for name in names}


def load_manifest(path: str | Path) -> dict:
    with Path(path).open() as fh:
        return json.load(fh)


def verify_manifest(path: str | Path) -> bool:
    """True iff every listed file exists next to the manifest with its digest."""
    path = Path(path)
    data = load_manifest(path)
    for name, digest in data.get("files", {}).items():
        target = path.parent / name
        if not target.is_file() or _sha256(target) != digest:
            return False
    return True
