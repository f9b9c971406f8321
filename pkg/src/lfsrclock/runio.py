"""CSV emission and run manifests.

CSV files carry no timestamps or wall times so that identical inputs give
byte-identical files; timing lives only in the JSON manifest.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy

from . import __version__

FLOAT_FMT = "%.12e"


def format_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT % float(x)
    if x is None:
        return ""
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_cell(x) for x in row])
    return path


def write_dict_rows(path: Path, rows: list[dict], columns: Sequence[str] | None = None) -> Path:
    columns = list(columns or (rows[0].keys() if rows else []))
    return write_csv(path, columns, ([r.get(c) for c in columns] for r in rows))


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def canonical_hash(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=str).encode()).hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


@dataclass
class RunManifest:
    command: list
    spec_hash: str
    seed: int
    versions: dict = field(
        default_factory=lambda: {
            "lfsrclock": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        }
    )
    wall_time: float = 0.0
    outputs: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @classmethod
    def start(cls, argv: Sequence[str], settings: dict, seed: int) -> "RunManifest":
        m = cls(list(argv), canonical_hash(settings), seed)
        m._t0 = time.perf_counter()
        return m

    def record(self, path: Path):
        self.outputs[Path(path).name] = sha256_file(path)

    def finish(self, out_dir: Path, name: str = "manifest.json") -> Path:
        self.wall_time = time.perf_counter() - getattr(self, "_t0", time.perf_counter())
        return write_json(Path(out_dir) / name, asdict(self))


def stdout_json(obj):
    json.dump(_jsonable(obj), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
