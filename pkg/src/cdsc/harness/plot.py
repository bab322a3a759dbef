"""Deterministic SVG plots of harness CSV files.

The SVG backend is pinned to a fixed hash salt and no date stamp, so the same
CSV always produces the same bytes.
"""

from __future__ import annotations

import logging
import math
import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiments import histogram_bins  # noqa: E402
from .io import detect_schema, read_csv  # noqa: E402

log = logging.getLogger(__name__)

PLOT_KINDS = ("subthreshold", "threshold", "phase", "histogram")
_EXPECTED = {"subthreshold": "rates", "threshold": "rates", "phase": "rates", "histogram": "sweep3x3"}
_RC = {"svg.hashsalt": "cdsc", "svg.fonttype": "path", "path.simplify": False}


def _num(v: str) -> float:
    return float(v) if v not in ("", None) else math.nan


def _curves(rows, key, x, y="p_logical", err="std_error"):
    groups: dict = {}
    for r in rows:
        groups.setdefault(key(r), []).append((_num(r[x]), _num(r[y]), _num(r.get(err, ""))))
    return {k: sorted(v) for k, v in sorted(groups.items())}


def _draw(ax, kind: str, rows) -> None:
    if kind == "histogram":
        rates = [_num(r["p_logical"]) for r in rows]
        ax.hist([v for v in rates if v > 0], bins=histogram_bins(rates), color="tab:blue")
        ax.set_xscale("log")
        ax.set_xlabel("logical error rate")
        ax.set_ylabel("number of codes")
        return
    if kind == "subthreshold":
        curves = _curves(rows, lambda r: (r["code"], r["p"], r["eta"]), "L")
        ax.set_xlabel("L")
    elif kind == "threshold":
        curves = _curves(rows, lambda r: (r["code"], int(r["L"]), r["eta"]), "p")
        ax.set_xlabel("p")
    else:
        curves = _curves(rows, lambda r: (r["code"], int(r["L"])), "p")
        ax.set_xlabel("p")
    for label, pts in curves.items():
        xs, ys, es = zip(*pts)
        name = " ".join(str(v) for v in label)
        ax.errorbar(xs, ys, yerr=es, marker="o", ms=3, capsize=2, label=name)
    ax.set_yscale("log")
    ax.set_ylabel("logical error rate")
    if curves:
        ax.legend(fontsize=6)


def emit_plot(csv_path, kind: str, out_path) -> Path:
    """Render ``csv_path`` as an SVG of the given kind.

    A CSV without data rows gives empty axes and a warning rather than an error.
    """
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; expected one of {', '.join(PLOT_KINDS)}")
    header, rows = read_csv(csv_path)
    if header:
        schema = detect_schema(header)
        if schema != _EXPECTED[kind]:
            raise ValueError(f"{csv_path} has schema {schema!r}; plot kind {kind!r} needs {_EXPECTED[kind]!r}")
    out_path = Path(out_path)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        if rows:
            _draw(ax, kind, rows)
        else:
            warnings.warn(f"{csv_path} has no data rows; writing empty axes", RuntimeWarning, stacklevel=2)
            ax.set_title(f"{kind}: no data")
        fig.tight_layout()
        fig.savefig(out_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return out_path


__all__ = ["PLOT_KINDS", "emit_plot"]
