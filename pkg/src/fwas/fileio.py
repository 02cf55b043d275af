"""File formats: atom files, objective files, trace CSV, and JSON reports.

All floats are emitted with 17 significant digits so reports round-trip
exactly; files are written atomically (temp file + rename).
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .atoms import AtomMatrix
from .objectives import CompositeObjective, Objective, ObjectiveError, QuadraticObjective


class ParseError(Exception):
    pass


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


def _json17(obj, indent: int = 0) -> str:
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_json17(v, indent + 2)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}  {_json17(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, np.ndarray):
        return _json17(obj.tolist(), indent)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj) -> None:
    atomic_write_text(path, _json17(obj) + "\n")


def read_atoms(path) -> AtomMatrix:
    """Atom file: CSV with one atom per line, or JSON {"m":…, "atoms": [[…],…]}."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
            atoms = np.asarray(data["atoms"], dtype=float)
            if atoms.ndim != 2:
                raise ValueError("atoms must be a list of vectors")
            if "m" in data and int(data["m"]) != atoms.shape[1]:
                raise ValueError("declared dimension disagrees with the atom vectors")
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"bad atom JSON {path}: {exc}") from exc
        return AtomMatrix.from_rows(atoms)
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: not a decimal row: {line!r}") from exc
    if not rows:
        raise ParseError(f"{path}: no atoms")
    if len({len(r) for r in rows}) != 1:
        raise ParseError(f"{path}: rows have inconsistent field counts")
    return AtomMatrix.from_rows(np.array(rows))


def write_atoms_csv(path, atoms: AtomMatrix) -> None:
    lines = [",".join(fmt_float(t) for t in atoms.atom(j)) for j in range(atoms.n)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_objective(path) -> Objective:
    """Objective file: JSON {kind: "quadratic"|"composite", Q|E, b, mu?, L?, h?}."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse objective {path}: {exc}") from exc
    kind = data.get("kind")
    try:
        if kind == "quadratic":
            return QuadraticObjective(np.asarray(data["Q"], dtype=float),
                                      np.asarray(data["b"], dtype=float))
        if kind == "composite":
            return CompositeObjective.with_builtin(
                np.asarray(data["E"], dtype=float), np.asarray(data["b"], dtype=float),
                data.get("h", "half-squared-norm"), mu=data.get("mu"), lipschitz=data.get("L"))
        raise ParseError(f"{path}: unknown objective kind {kind!r}")
    except ObjectiveError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"{path}: bad objective payload: {exc}") from exc


def write_trace_csv(path, trace) -> None:
    """Columns: k, f, step_kind, gamma, gamma_max, support_size, fw_gap."""
    lines = ["k,f,step_kind,gamma,gamma_max,support_size,fw_gap"]
    for rec in trace.records:
        kind = rec.step_kind if rec.step_kind is not None else "stop"
        gamma = fmt_float(rec.gamma) if rec.gamma is not None else ""
        gmax = fmt_float(rec.gamma_max) if rec.gamma_max is not None else ""
        lines.append(f"{rec.k},{fmt_float(rec.f_value)},{kind},{gamma},{gmax},"
                     f"{rec.support_size},{fmt_float(rec.fw_gap)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_csv(path, header: list[str], rows) -> None:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(fmt_float(v) if isinstance(v, (float, np.floating)) else str(v)
                            for v in row))
    atomic_write_text(path, "\n".join(out) + "\n")


def read_csv_rows(path) -> list[dict]:
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))
