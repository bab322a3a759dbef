"""CSV persistence with pinned column schemas.

Every file starts with a header row; the first two columns are
``schema_version`` and ``rng`` (the name of the bit generator behind the
numbers).  Floats are written with ``repr`` so a rerun reproduces the bytes
exactly, ``eta`` is written as a decimal or the literal ``inf``, booleans
as ``0``/``1`` and missing values as an empty field.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from ..noise import format_eta
from .rates import RNG_NAME

SCHEMA_VERSION = 1

_META = ("schema_version", "rng")

SCHEMAS: dict[str, tuple[str, ...]] = {
    "rates": (
        "experiment", "code", "pi_xz", "pi_yz", "L", "p", "eta", "decoder", "chi",
        "trials", "master_seed", "p_logical", "std_error", "converged_fraction",
    ),
    "fss": (
        "code", "p_th", "nu", "A", "B", "C", "residual", "reduced_chi2",
        "p_th_err", "nu_err", "low_confidence",
    ),
    "sweep3x3": ("pattern", "L", "p", "eta", "p_logical"),
    "dprime": ("pi_xz", "pi_yz", "L", "p", "eta", "samples", "master_seed", "delta_dprime", "std_error"),
    "percolation": (
        "pi_xz", "pi_yz", "L", "realizations", "master_seed", "spanning_prob", "largest_cluster",
        "mean_path", "tau_fit", "tau_hist", "path_exponent",
    ),
    "cluster": ("eta", "c", "p_th", "hashing_bound"),
    "hashing": ("eta", "p_hb"),
}


def _fmt(key: str, value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if key == "eta":
        return format_eta(float(value))
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    if hasattr(value, "item"):  # numpy scalars
        return _fmt(key, value.item())
    return str(value)


def format_rows(schema: str, rows) -> str:
    cols = SCHEMAS[schema]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_META + cols)
    for row in rows:
        extra = set(row) - set(cols)
        if extra:
            raise KeyError(f"columns {sorted(extra)} are not in the {schema!r} schema")
        w.writerow([SCHEMA_VERSION, RNG_NAME] + [_fmt(c, row.get(c)) for c in cols])
    return buf.getvalue()


def write_csv(path, schema: str, rows) -> Path:
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_rows(schema, rows))
    return path


def read_csv(path) -> tuple[list[str], list[dict[str, str]]]:
    """Header and rows of a file written by :func:`write_csv`; an empty file gives no rows."""
    text = Path(path).read_text()
    if not text.strip():
        return [], []
    reader = csv.DictReader(io.StringIO(text))
    rows = list(reader)
    header = list(reader.fieldnames or [])
    if header[: len(_META)] != list(_META):
        raise ValueError(f"{path}: missing schema_version/rng columns")
    for r in rows:
        if r["schema_version"] != str(SCHEMA_VERSION):
            raise ValueError(f"{path}: unsupported schema_version {r['schema_version']!r}")
    return header, rows


def detect_schema(header: list[str]) -> str | None:
    cols = tuple(header[len(_META):])
    for name, spec in SCHEMAS.items():
        if spec == cols:
            return name
    return None


__all__ = ["SCHEMAS", "SCHEMA_VERSION", "detect_schema", "format_rows", "read_csv", "write_csv"]
