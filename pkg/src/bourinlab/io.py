"""Matrix JSON files, report streams and atomic writes."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable

import numpy as np

from .dense import InvalidInputError


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    return {"n": int(a.shape[0]), "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        n = int(obj["n"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros((n, n))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed matrix object: {exc}") from exc
    if re.shape != (n, n) or im.shape != (n, n):
        raise InvalidInputError(f"matrix arrays do not have shape ({n}, {n})")
    if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
        raise InvalidInputError("matrix has non-finite entries")
    return re + 1j * im


def read_matrix(path) -> np.ndarray:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read matrix file {path}: {exc}") from exc
    return matrix_from_json(obj)


def write_matrix(path, a) -> None:
    atomic_write_text(path, json.dumps(matrix_to_json(a), allow_nan=False) + "\n")


def atomic_write_text(path, text: str) -> None:
    """Write to a sibling temp file, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def reports_to_jsonl(reports: Iterable) -> str:
    return "".join(r.to_jsonl() + "\n" for r in reports)


def rows_to_csv(header: list[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


SUMMARY_HEADER = ["check_id", "trials", "failures", "max_margin"]
SWEEP_HEADER = ["t", "margin", "kyfan_worst_a"]


def summary_csv(rows) -> str:
    return rows_to_csv(SUMMARY_HEADER, ((r.check_id, r.trials, r.failures, r.max_margin) for r in rows))
