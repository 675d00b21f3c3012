"""Diagnostics CSV, binary field snapshots and the run manifest.

CSV bodies are reproducible byte for byte: floats are written with
`repr`, which is the shortest round-tripping decimal form.  Snapshots use
the `RES2D v1` format: one UTF-8 header line

    RES2D v1 <N1> <N2> <L1> <L2> <t> <field-name>\\n

followed by N1*N2 little-endian float64 physical samples, row major.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diagnostics import DIAG_COLUMNS, DiagRecord, Trajectory
from .grid import PeriodicGrid


class SnapshotFormatError(ValueError):
    """Bad magic, header or payload size when reading a snapshot."""


def _fmt(x: float) -> str:
    return repr(float(x))


def write_diag_csv(rows: list[DiagRecord], path: str | Path) -> None:
    path = Path(path)
    lines = [",".join(DIAG_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(getattr(row, c)) for c in DIAG_COLUMNS))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_diag_csv(path: str | Path) -> dict[str, np.ndarray]:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    if data.size == 0:
        return {name: np.empty(0) for name in header}
    return {name: data[:, i] for i, name in enumerate(header)}


def write_snapshot(path: str | Path, grid: PeriodicGrid, phys: np.ndarray,
                   t: float, name: str) -> None:
    if phys.shape != grid.shape:
        raise ValueError(f"field shape {phys.shape} does not match grid {grid.shape}")
    if any(ch.isspace() for ch in name) or not name:
        raise ValueError("field name must be non-empty and whitespace-free")
    header = f"RES2D v1 {grid.n1} {grid.n2} {_fmt(grid.l1)} {_fmt(grid.l2)} {_fmt(t)} {name}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8"))
        fh.write(np.ascontiguousarray(phys, dtype="<f8").tobytes())


@dataclass(frozen=True)
class Snapshot:
    n1: int
    n2: int
    l1: float
    l2: float
    t: float
    name: str
    samples: np.ndarray


def read_snapshot(path: str | Path) -> Snapshot:
    with open(path, "rb") as fh:
        header = fh.readline().decode("utf-8")
        payload = fh.read()
    parts = header.split()
    if len(parts) != 8 or parts[0] != "RES2D" or parts[1] != "v1":
        raise SnapshotFormatError(f"{path}: not a RES2D v1 snapshot")
    try:
        n1, n2 = int(parts[2]), int(parts[3])
        l1, l2, t = float(parts[4]), float(parts[5]), float(parts[6])
    except ValueError as exc:
        raise SnapshotFormatError(f"{path}: malformed header: {exc}") from None
    expected = n1 * n2 * 8
    if len(payload) != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {len(payload)} bytes, header promises {expected}")
    samples = np.frombuffer(payload, dtype="<f8").reshape(n1, n2).copy()
    return Snapshot(n1, n2, l1, l2, t, parts[7], samples)


def write_state_snapshots(outdir: str | Path, grid: PeriodicGrid, state) -> list[Path]:
    """Write the five physical component fields of a state."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    comps = {
        "v1": state.v.u1, "v2": state.v.u2,
        "s11": state.s.s11, "s12": state.s.s12, "s22": state.s.s22,
    }
    for name, spec in comps.items():
        p = outdir / f"{name}.res2d"
        write_snapshot(p, grid, grid.inverse(spec), state.t, name)
        paths.append(p)
    return paths


def write_manifest(path: str | Path, config_echo: dict, stepper: str, version: str,
                   seed: int, started: float, status: str,
                   blowup_t: float | None = None, error: str | None = None) -> None:
    """One manifest per run; only the wall times vary between reruns."""
    doc = {
        "config": config_echo,
        "stepper": stepper,
        "version": version,
        "seed": seed,
        "started_unix": started,
        "ended_unix": time.time(),
        "status": status,
    }
    if blowup_t is not None:
        doc["blowup_t"] = blowup_t
    if error is not None:
        doc["error"] = error
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def trajectory_status(traj: Trajectory) -> tuple[str, float | None]:
    if traj.status == "blowup":
        return "blowup", traj.blowup_time
    return "completed", None
