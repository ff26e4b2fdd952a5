"""File formats: tabular CSV output and the solved policy/value JSON file.

Policy file layout (``format: gigcontract.policy/1``)::

    {
      "format": "gigcontract.policy/1",
      "params": {"c": .., "gamma": .., "beta": .., "delta": .., "sigma": ..},
      "grid": {"r_min": .., "r_max": .., "points": ..},
      "values": [...],          # V at the grid nodes
      "chi": [0/1, ...],        # contract decision at the nodes
      "s": [...],               # share at the nodes, 0 where chi is 0
      "solver": {"tol": .., "max_iter": .., "quad_nodes": .., "iterations": ..,
                 "final_sup_norm_delta": .., "converged": .., ...}
    }

Floats are written with ``repr`` precision so a file round-trips exactly.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

import numpy as np

from .dp import GridSpec, PolicyTable, SolverReport, ValueTable
from .model import ModelParams, validate_params

POLICY_FORMAT = "gigcontract.policy/1"


def fmt(x) -> str:
    """Fixed CSV number format: 12 significant digits, booleans as 0/1."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0:
        return "0"  # no "-0"
    return format(x, ".12g")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=",", lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def policy_document(params: ModelParams, value: ValueTable, policy: PolicyTable,
                    report: SolverReport, tol: float, max_iter: int, quad_nodes: int) -> dict:
    g = value.grid
    solver = {"tol": tol, "max_iter": max_iter, "quad_nodes": quad_nodes}
    solver.update(report.as_dict())
    return {
        "format": POLICY_FORMAT,
        "params": params.as_dict(),
        "grid": {"r_min": g.r_min, "r_max": g.r_max, "points": g.points},
        "values": [float(x) for x in value.values],
        "chi": [int(bool(x)) for x in policy.chi],
        "s": [float(x) for x in policy.s],
        "solver": solver,
    }


def write_policy_file(path, document: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(document, fh, indent=1)
        fh.write("\n")


def read_policy_file(path):
    """Load a policy file. Returns ``(params, ValueTable, PolicyTable, solver_meta)``."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != POLICY_FORMAT:
        raise ValueError(f"{path}: not a {POLICY_FORMAT} file")
    p = doc["params"]
    params = validate_params(p["c"], p["gamma"], p["beta"], p["delta"], p["sigma"])
    g = doc["grid"]
    grid = GridSpec(float(g["r_min"]), float(g["r_max"]), int(g["points"]))
    values = np.asarray(doc["values"], dtype=np.float64)
    chi = np.asarray(doc["chi"], dtype=bool)
    s = np.asarray(doc["s"], dtype=np.float64)
    if not (values.shape == chi.shape == s.shape == (grid.points,)):
        raise ValueError(f"{path}: table lengths do not match grid.points={grid.points}")
    return params, ValueTable(grid, values), PolicyTable(grid, chi, s), doc.get("solver", {})
