"""Data ingestion, normalization, synthetic generators and corruption.

Sample matrices are plain ``numpy`` arrays of shape ``(d, n)``: one column
per sample. Labels travel as :class:`LabelVector`.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Raised for malformed input files or invalid data arguments."""


@dataclass(frozen=True)
class LabelVector:
    """Integer class ids with a per-sample "label is known" mask."""

    labels: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        mask = np.asarray(self.mask, dtype=bool)
        if labels.ndim != 1 or mask.shape != labels.shape:
            raise DataError("labels and mask must be 1-D arrays of equal length")
        if np.any(labels[mask] < 0):
            raise DataError("class ids must be nonnegative")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def known(cls, labels) -> "LabelVector":
        labels = np.asarray(labels, dtype=np.int64)
        return cls(labels, np.ones(labels.shape, dtype=bool))

    def __len__(self):
        return self.labels.shape[0]

    @property
    def n_classes(self) -> int:
        known = self.labels[self.mask]
        return int(known.max()) + 1 if known.size else 0


def check_sample_matrix(X, name="X") -> np.ndarray:
    """Validate a sample matrix and return it as a float64 array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DataError(f"{name} must be 2-D (d x n), got shape {X.shape}")
    d, n = X.shape
    if d < 1 or n < 2:
        raise DataError(f"{name} needs d >= 1 and n >= 2, got {d} x {n}")
    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(X))[0]
        raise DataError(f"{name} has a non-finite entry at row {bad[0]}, column {bad[1]}")
    return X


# --------------------------------------------------------------------------
# CSV

def load_matrix_csv(path, has_header=False) -> np.ndarray:
    """Read a comma-separated matrix; each row is one feature dimension."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if has_header and rows:
        rows = rows[1:]
    rows = [r for r in rows if r and any(field.strip() for field in r)]
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])
    offset = 2 if has_header else 1
    values = np.empty((len(rows), width), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"{path}: ragged row {i + offset}: expected {width} fields, got {len(row)}"
            )
        for j, field in enumerate(row):
            try:
                values[i, j] = float(field)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric field {field!r} at row {i + offset}, column {j + 1}"
                ) from None
    return values


def format_float(x: float) -> str:
    # repr round-trips exactly and is platform independent
    return repr(float(x))


def write_matrix_csv(path, A, header=None):
    A = np.atleast_2d(np.asarray(A))
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header is not None:
            writer.writerow(header)
        for row in A:
            writer.writerow([format_float(v) for v in row])


# --------------------------------------------------------------------------
# IDX

_IDX_UBYTE = 0x08


def _read_idx(path) -> np.ndarray:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if len(raw) < 4:
        raise DataError(f"{path}: file too short for an IDX header")
    zero0, zero1, dtype, ndim = raw[0], raw[1], raw[2], raw[3]
    if zero0 != 0 or zero1 != 0 or dtype != _IDX_UBYTE or ndim == 0:
        magic = struct.unpack(">I", raw[:4])[0]
        raise DataError(f"{path}: bad magic number 0x{magic:08x}")
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise DataError(f"{path}: truncated dimension header")
    dims = struct.unpack(f">{ndim}I", raw[4:header])
    expected = math.prod(dims)
    payload = len(raw) - header
    if payload != expected:
        raise DataError(
            f"{path}: size mismatch: dims {dims} imply {expected} bytes, found {payload}"
        )
    return np.frombuffer(raw, dtype=np.uint8, offset=header).reshape(dims)


def load_idx(images_path, labels_path=None):
    """Load IDX images (and optionally labels).

    Every image is flattened row-major into one column and scaled to [0, 1].
    Returns ``(X, labels)`` where ``labels`` is ``None`` when no label file
    is given.
    """
    images = _read_idx(images_path)
    if images.ndim < 2:
        raise DataError(f"{images_path}: image file needs at least 2 dimensions")
    count = images.shape[0]
    X = images.reshape(count, -1).T.astype(np.float64) / 255.0
    if labels_path is None:
        return X, None
    labels = _read_idx(labels_path)
    if labels.ndim != 1:
        raise DataError(f"{labels_path}: label file must be 1-D")
    if labels.shape[0] != count:
        raise DataError(f"count mismatch: {count} images but {labels.shape[0]} labels")
    return X, LabelVector.known(labels.astype(np.int64))


def write_idx(path, array):
    """Write a uint8 array in IDX format (used by tests and fixtures)."""
    array = np.ascontiguousarray(array, dtype=np.uint8)
    head = bytes([0, 0, _IDX_UBYTE, array.ndim]) + struct.pack(f">{array.ndim}I", *array.shape)
    Path(path).write_bytes(head + array.tobytes())


# --------------------------------------------------------------------------
# normalization and generators

def normalize_columns(X) -> np.ndarray:
    """Center each column to zero mean, then scale it to unit Euclidean norm."""
    X = check_sample_matrix(X)
    centered = X - X.mean(axis=0, keepdims=True)
    norms = np.linalg.norm(centered, axis=0)
    scale = np.maximum(np.abs(X).max(axis=0), 1.0)
    constant = np.flatnonzero(norms <= 1e-12 * scale)
    if constant.size:
        raise DataError(f"constant column(s) cannot be normalized: {constant.tolist()}")
    return centered / norms


def synth_blobs(k, d, n_per, sep, noise_sigma, seed):
    """Isotropic Gaussian clusters whose centers are pairwise >= ``sep`` apart.

    Centers are placed on scaled coordinate axes, ``sep / sqrt(2)`` along
    axis ``c`` (cycled with sign flips when ``k > d``), then randomly
    rotated so that no feature is special.
    """
    if k < 2 or d < 2 or n_per < 2:
        raise DataError(f"synth_blobs needs k >= 2, d >= 2, n_per >= 2 (got {k}, {d}, {n_per})")
    if not sep > 0 or not noise_sigma >= 0:
        raise DataError("synth_blobs needs sep > 0 and noise_sigma >= 0")
    if k > 2 * d:
        raise DataError(f"synth_blobs supports at most 2*d = {2 * d} clusters")
    rng = np.random.default_rng(seed)
    centers = np.zeros((d, k))
    for c in range(k):
        centers[c % d, c] = sep / math.sqrt(2.0) * (1.0 if c < d else -1.0)
    # antipodal pairs sit sep*sqrt(2) apart, orthogonal ones exactly sep
    rotation, _ = np.linalg.qr(rng.standard_normal((d, d)))
    centers = rotation @ centers
    labels = np.repeat(np.arange(k), n_per)
    X = centers[:, labels] + noise_sigma * rng.standard_normal((d, k * n_per))
    return X, LabelVector.known(labels)


def synth_subspaces(k, d, sub_dim, n_per, noise_sigma, seed):
    """Samples from a union of ``k`` random ``sub_dim``-dimensional subspaces."""
    if not 1 <= sub_dim < d:
        raise DataError(f"synth_subspaces needs 1 <= sub_dim < d (got sub_dim={sub_dim}, d={d})")
    if k < 1 or n_per < 1 or k * n_per < 4:
        raise DataError("synth_subspaces needs k * n_per >= 4")
    if noise_sigma < 0:
        raise DataError("noise_sigma must be >= 0")
    rng = np.random.default_rng(seed)
    blocks = []
    for _ in range(k):
        basis, _ = np.linalg.qr(rng.standard_normal((d, sub_dim)))
        blocks.append(basis @ rng.standard_normal((sub_dim, n_per)))
    X = np.hstack(blocks) + noise_sigma * rng.standard_normal((d, k * n_per))
    return X, LabelVector.known(np.repeat(np.arange(k), n_per))


CORRUPTION_MODES = ("gaussian_columns", "sparse_entries", "block_missing")


def corrupt(X, mode, fraction, magnitude, seed) -> np.ndarray:
    """Return a corrupted copy of ``X``.

    ``gaussian_columns`` adds N(0, magnitude) noise (``magnitude`` is the
    variance) to ``ceil(fraction * n)`` columns. ``sparse_entries`` replaces
    ``ceil(fraction * d)`` entries of every column with ``+-magnitude``.
    ``block_missing`` zeroes a contiguous block of ``ceil(fraction * d)``
    rows in ``ceil(fraction * n)`` columns.
    """
    X = check_sample_matrix(X)
    if mode not in CORRUPTION_MODES:
        raise DataError(f"unknown corruption mode {mode!r}; choose from {CORRUPTION_MODES}")
    if not 0.0 <= fraction <= 1.0:
        raise DataError(f"fraction must be in [0, 1], got {fraction}")
    if magnitude < 0:
        raise DataError(f"magnitude must be >= 0, got {magnitude}")
    d, n = X.shape
    out = X.copy()
    if fraction == 0:
        return out
    rng = np.random.default_rng(seed)
    if mode == "gaussian_columns":
        cols = np.sort(rng.choice(n, size=math.ceil(fraction * n), replace=False))
        noise = math.sqrt(magnitude) * rng.standard_normal((d, cols.size))
        out[:, cols] += noise
    elif mode == "sparse_entries":
        per_col = math.ceil(fraction * d)
        for j in range(n):
            rows = rng.choice(d, size=per_col, replace=False)
            out[rows, j] = magnitude * rng.choice([-1.0, 1.0], size=per_col)
    else:
        cols = np.sort(rng.choice(n, size=math.ceil(fraction * n), replace=False))
        length = math.ceil(fraction * d)
        for j in cols:
            start = rng.integers(0, d - length + 1)
            out[start:start + length, j] = 0.0
    return out
