"""Shared file formats.

* Dense matrices: headerless CSV, one row per line, entries printed with 17
  significant digits (lossless float round trip), LF line endings.
* Graphs: edge-list TSV with a ``#nodes=p`` first line followed by
  ``i<TAB>j<TAB>weight`` for i < j, 0-based, nonzero edges only.
* Diagnostics and reports: plain CSV with a header row.
* Heatmaps: standalone grayscale SVG, fixed row/column order.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .graphs import validate_adjacency

__all__ = [
    "write_matrix_csv",
    "read_matrix_csv",
    "write_edges_tsv",
    "read_edges_tsv",
    "write_csv_rows",
    "write_heatmap_svg",
]

_FMT = "%.17g"


def write_matrix_csv(path, mat) -> None:
    arr = np.atleast_2d(np.asarray(mat, dtype=float))
    np.savetxt(path, arr, fmt=_FMT, delimiter=",", newline="\n")


def read_matrix_csv(path) -> np.ndarray:
    try:
        arr = np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError:
        raise
    except ValueError as exc:
        raise ValidationError(f"{path}: not a valid matrix CSV: {exc}") from exc
    return arr


def write_edges_tsv(path, weights) -> None:
    arr = validate_adjacency(weights)
    p = arr.shape[0]
    lines = [f"#nodes={p}"]
    for i in range(p):
        for j in range(i + 1, p):
            if arr[i, j] != 0.0:
                lines.append(f"{i}\t{j}\t{_FMT % arr[i, j]}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_edges_tsv(path) -> np.ndarray:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#nodes="):
        raise ValidationError(f"{path}: missing '#nodes=' header line")
    try:
        p = int(lines[0].split("=", 1)[1])
    except ValueError as exc:
        raise ValidationError(f"{path}: bad node count in header") from exc
    if p < 1:
        raise ValidationError(f"{path}: node count must be positive, got {p}")
    weights = np.zeros((p, p))
    for ln in lines[1:]:
        parts = ln.split("\t")
        if len(parts) != 3:
            raise ValidationError(f"{path}: malformed edge line {ln!r}")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ValidationError(f"{path}: malformed edge line {ln!r}") from exc
        if not 0 <= i < j < p:
            raise ValidationError(f"{path}: edge ({i},{j}) out of range for {p} nodes")
        weights[i, j] = weights[j, i] = w
    return validate_adjacency(weights)


def write_csv_rows(path, header, rows) -> None:
    """Write a header plus rows; floats get the lossless 17-digit format."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [_FMT % v if isinstance(v, float) else v for v in row]
            )


def write_heatmap_svg(path, mat, cell: int = 12, title: str | None = None) -> None:
    """Grayscale heatmap: 0 maps to white, the matrix maximum to black."""
    arr = np.atleast_2d(np.asarray(mat, dtype=float))
    rows, cols = arr.shape
    top = float(np.abs(arr).max())
    header_h = 18 if title else 0
    width, height = cols * cell, rows * cell + header_h
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    ]
    if title:
        parts.append(f'<text x="2" y="13" font-size="12" font-family="monospace">{title}</text>')
    for i in range(rows):
        for j in range(cols):
            level = 0.0 if top == 0.0 else abs(arr[i, j]) / top
            shade = 255 - int(round(255 * level))
            parts.append(
                f'<rect x="{j * cell}" y="{i * cell + header_h}" width="{cell}" '
                f'height="{cell}" fill="#{shade:02x}{shade:02x}{shade:02x}"/>'
            )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
