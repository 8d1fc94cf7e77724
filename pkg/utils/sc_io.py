import json
import os
from typing import Iterable, List, Sequence

import numpy as np

import utils.sc_logging
import utils.sc_lib


def _ensure_parent(path: str):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def save_json(path: str, data):
    """Write JSON with a fixed layout so identical data gives identical bytes"""
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(utils.sc_lib.to_jsonable(data), f, indent=2)
        f.write("\n")
    utils.sc_logging.update_debug_log(f"Wrote {path}")


def load_json(path: str):
    """Read a JSON document; raises OSError or json.JSONDecodeError for the caller to wrap"""
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def write_vector_csv(path: str, values: Iterable[float]):
    """One value per line"""
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for value in values:
            f.write(utils.sc_lib.format_float(value) + "\n")


def write_matrix_csv(path: str, matrix: np.ndarray):
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for row in np.atleast_2d(matrix):
            f.write(utils.sc_lib.format_row(float(v) for v in row) + "\n")


def write_table_csv(path: str, header: Sequence[str], rows: List[Sequence]):
    """Header line plus one formatted line per row (gnuplot-friendly, comma separated)"""
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(utils.sc_lib.format_row(row) + "\n")
    utils.sc_logging.update_debug_log(f"Wrote table {path} ({len(rows)} rows)")


def export_signal(path: str, values, sidecar: dict):
    """Signal CSV plus `<path>.json` sidecar"""
    write_vector_csv(path, values)
    save_json(path + ".json", sidecar)


def export_matrix_with_sidecar(path: str, matrix: np.ndarray, sidecar: dict):
    write_matrix_csv(path, matrix)
    save_json(path + ".json", sidecar)


def export_points(path: str, points: np.ndarray):
    """Node coordinates as x,y lines"""
    write_table_csv(path, ["x", "y"], [tuple(float(v) for v in p) for p in points])
