"""CSV and JSON artifact writers.

Every file carries the tool version, the resolved configuration and the
random-number algorithm and seed.  CSV headers are ``#`` comment lines;
floats are written with ``repr`` so values round-trip exactly and the bytes
depend only on the numbers.  Nothing time- or host-dependent is written.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from . import __version__
from .noise import RNG_ALGORITHM

SCHEMA_VERSION = 1


def _plain(x):
    """Convert numpy scalars/arrays (recursively) to JSON-friendly Python values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.generic):
        return _plain(x.item())
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def provenance(config: dict, seed: int) -> dict:
    return {
        "tool": "geogate",
        "version": __version__,
        "rng": RNG_ALGORITHM,
        "seed": int(seed),
        "config": _plain(config),
    }


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def csv_text(columns, rows, prov: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# tool: {prov['tool']} {prov['version']}\n")
    buf.write(f"# rng: {prov['rng']}\n")
    buf.write(f"# seed: {prov['seed']}\n")
    buf.write(f"# config: {json.dumps(prov['config'], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path, columns, rows, prov: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(columns, rows, prov))
    return path


def write_json(path, kind: str, payload: dict, prov: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind, **prov, "result": _plain(payload)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_csv(path):
    """Header dict and data rows of a file written by :func:`write_csv`."""
    header, lines = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].rstrip("\n").partition(": ")
                header[key] = json.loads(value) if key == "config" else value
            else:
                lines.append(line)
    rows = list(csv.reader(lines))
    return header, rows[0], rows[1:]
