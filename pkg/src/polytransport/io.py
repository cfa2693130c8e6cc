"""Surrogate files and point CSVs.

Floats are written with 17 significant digits so every value round-trips
bit-exactly; all text files use LF line endings.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .multiindex import MultiIndexSet, is_downward_closed
from .surrogate import PolynomialSurrogate

FORMAT_VERSION = 1
BASIS_TAG = "legendre01"
META_KEYS = ("method", "n", "seed", "rounds")


class FormatError(ValueError):
    """A file does not follow the expected layout."""


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def save_surrogate(g: PolynomialSurrogate, path) -> None:
    lines = [
        f"version {FORMAT_VERSION}",
        f"dim {g.dim}",
        f"basis {BASIS_TAG}",
        f"size {len(g.index_set)}",
    ]
    for nu, c in zip(g.index_set.indices.tolist(), g.coeffs):
        lines.append(" ".join(str(v) for v in nu) + " " + _fmt(c))
    meta = dict(g.meta)
    if "n" not in meta and "evaluations" in meta:
        meta["n"] = meta["evaluations"]
    for key in META_KEYS:
        lines.append(f"meta {key} {meta.get(key, 'none')}")
    for key in sorted(set(meta) - set(META_KEYS) - {"evaluations"}):
        lines.append(f"meta {key} {meta[key]}")
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def _meta_value(text):
    if text == "none":
        return None
    try:
        return int(text)
    except ValueError:
        return text


def load_surrogate(path) -> PolynomialSurrogate:
    lines = Path(path).read_text().splitlines()
    header = {}
    pos = 0
    for key in ("version", "dim", "basis", "size"):
        if pos >= len(lines) or not lines[pos].startswith(key + " "):
            raise FormatError(f"{path}: expected '{key}' on line {pos + 1}")
        header[key] = lines[pos].split(None, 1)[1].strip()
        pos += 1
    if header["version"] != str(FORMAT_VERSION):
        raise FormatError(f"{path}: unsupported version {header['version']}")
    if header["basis"] != BASIS_TAG:
        raise FormatError(f"{path}: unsupported basis {header['basis']}")
    try:
        dim, size = int(header["dim"]), int(header["size"])
    except ValueError:
        raise FormatError(f"{path}: malformed header") from None
    body = lines[pos : pos + size]
    if len(body) != size:
        raise FormatError(f"{path}: expected {size} coefficient lines")
    idx = np.empty((size, dim), dtype=np.int64)
    coeffs = np.empty(size)
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != dim + 1:
            raise FormatError(f"{path}: line {pos + i + 1} has {len(parts)} fields, expected {dim + 1}")
        try:
            idx[i] = [int(v) for v in parts[:dim]]
            coeffs[i] = float(parts[dim])
        except ValueError:
            raise FormatError(f"{path}: malformed line {pos + i + 1}") from None
    meta = {}
    for line in lines[pos + size :]:
        parts = line.split(None, 2)
        if len(parts) == 3 and parts[0] == "meta":
            meta[parts[1]] = _meta_value(parts[2])
        elif line.strip():
            raise FormatError(f"{path}: unexpected footer line {line!r}")
    lam = MultiIndexSet(idx)
    if len(lam) != size or np.any(lam.indices != idx):
        raise FormatError(f"{path}: multi-indices are not in strict lexicographic order")
    if not is_downward_closed(lam):
        raise FormatError(f"{path}: multi-index set is not downward closed")
    return PolynomialSurrogate(lam, coeffs, meta)


def load_index_set(path) -> MultiIndexSet:
    """Whitespace-separated integer rows, one multi-index per line."""
    rows = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    try:
        lam = MultiIndexSet.from_indices([[int(v) for v in r] for r in rows])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if len(lam) == 0 or not is_downward_closed(lam):
        raise FormatError(f"{path}: index set must be nonempty and downward closed")
    return lam


def write_points(path, points: np.ndarray, dim: int | None = None) -> None:
    points = np.asarray(points, dtype=float)
    dim = points.shape[1] if dim is None else dim
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{j + 1}" for j in range(dim)])
        for row in points.reshape(-1, dim):
            w.writerow([_fmt(v) for v in row])


def read_points(path, dim: int) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path}: empty file")
    body = rows[1:] if rows[0] and rows[0][0].strip().startswith("x") else rows
    out = np.empty((len(body), dim))
    for i, row in enumerate(body):
        if len(row) != dim:
            raise FormatError(f"{path}: row {i + 1} has {len(row)} columns, expected {dim}")
        try:
            out[i] = [float(v) for v in row]
        except ValueError:
            raise FormatError(f"{path}: row {i + 1} is not numeric") from None
    return out
