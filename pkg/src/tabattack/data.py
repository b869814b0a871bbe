"""Loading, encoding and splitting of tabular datasets.

The encoded attack space is a [0,1] box: numerical features are min-max
scaled with statistics of the train split only, categorical features are
expanded to one-hot blocks. Encoding order follows the schema's feature
order. Decoding inverts the scaling and resolves each one-hot block by
argmax with ties broken toward the lowest column index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .schema import FeatureSchema, SchemaError


class DataError(ValueError):
    """Raised for unusable data files (empty, unreadable, wrong values)."""


@dataclass(frozen=True)
class RawTable:
    """Typed row store produced by :func:`load_dataset`.

    values: object array of shape (n_rows, n_features) holding floats for
    numerical columns and level strings for categorical ones, in schema
    feature order. labels: binary vector from the target column.
    """

    schema: FeatureSchema
    values: np.ndarray
    labels: np.ndarray
    dropped_count: int

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])


def load_dataset(csv_path: str, schema: FeatureSchema) -> RawTable:
    """Read a CSV and type its cells against the schema.

    Rows with unparsable numerics, unknown categorical levels, unknown
    target labels or missing cells in schema columns are dropped and
    counted.
    """
    try:
        frame = pd.read_csv(csv_path, dtype=str, keep_default_na=False)
    except FileNotFoundError as exc:
        raise DataError(f"dataset file not found: {csv_path}") from exc
    needed = set(schema.feature_names) | {schema.target}
    missing = needed - set(frame.columns)
    if missing:
        raise SchemaError(f"{csv_path}: missing columns {sorted(missing)}")

    n = len(frame)
    keep = np.ones(n, dtype=bool)
    cols: list[np.ndarray] = []
    for spec in schema.features:
        raw = frame[spec.name].to_numpy()
        if spec.is_numerical:
            parsed = pd.to_numeric(pd.Series(raw), errors="coerce").to_numpy()
            keep &= np.isfinite(parsed)
            cols.append(parsed)
        else:
            ok = np.isin(raw, spec.levels)
            keep &= ok
            cols.append(raw)
    target_raw = frame[schema.target].to_numpy()
    keep &= target_raw != ""

    values = np.empty((int(keep.sum()), len(schema.features)), dtype=object)
    for j, col in enumerate(cols):
        values[:, j] = col[keep]
    labels = (target_raw[keep] == schema.positive_label).astype(np.int64)
    dropped = int(n - keep.sum())
    if values.shape[0] == 0:
        raise DataError(f"{csv_path}: no usable rows (dropped {dropped})")
    return RawTable(schema=schema, values=values, labels=labels, dropped_count=dropped)


@dataclass(frozen=True)
class EncoderState:
    """Fitted encoding parameters for one dataset."""

    schema: FeatureSchema
    num_min: dict[str, float]
    num_max: dict[str, float]
    # feature name -> (start, stop) column slice in the encoded vector
    blocks: dict[str, tuple[int, int]] = field(repr=False)
    dim: int = 0

    def level_columns(self, name: str) -> tuple[int, int]:
        return self.blocks[name]


def _build_blocks(schema: FeatureSchema) -> tuple[dict[str, tuple[int, int]], int]:
    blocks: dict[str, tuple[int, int]] = {}
    pos = 0
    for spec in schema.features:
        width = 1 if spec.is_numerical else len(spec.levels)
        blocks[spec.name] = (pos, pos + width)
        pos += width
    return blocks, pos


@dataclass(frozen=True)
class EncodedDataset:
    X_train: np.ndarray
    X_test: np.ndarray
    y_train: np.ndarray
    y_test: np.ndarray
    encoder: EncoderState
    schema: FeatureSchema
    train_indices: np.ndarray
    test_indices: np.ndarray
    dropped_count: int = 0

    @property
    def dim(self) -> int:
        return self.encoder.dim


def stratified_split(labels: np.ndarray, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic stratified index split.

    The total train count is floor(train_fraction * N); per-class counts
    are allocated by largest fractional remainder so the total is exact
    regardless of class sizes.
    """
    n = len(labels)
    target_total = int(np.floor(train_fraction * n))
    classes = np.unique(labels)
    exact = {c: train_fraction * int((labels == c).sum()) for c in classes}
    base = {c: int(np.floor(exact[c])) for c in classes}
    leftover = target_total - sum(base.values())
    # distribute remaining slots to classes with the largest fractional part
    order = sorted(classes, key=lambda c: (-(exact[c] - base[c]), c))
    for c in order[: max(leftover, 0)]:
        base[c] += 1

    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for c in classes:
        idx = np.flatnonzero(labels == c)
        perm = rng.permutation(len(idx))
        take = base[c]
        train_parts.append(idx[perm[:take]])
        test_parts.append(idx[perm[take:]])
    train_idx = np.sort(np.concatenate(train_parts))
    test_idx = np.sort(np.concatenate(test_parts))
    return train_idx, test_idx


class SplitError(ValueError):
    """Raised when a split would leave a class without train rows."""


def fit_encoder(table: RawTable, train_fraction: float = 0.8, seed: int = 42) -> EncodedDataset:
    """Split, fit scaling on the train rows and encode both splits."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    schema = table.schema
    classes, counts = np.unique(table.labels, return_counts=True)
    if len(classes) < 2 or counts.min() < 2:
        raise SplitError("need at least 2 rows per class")
    train_idx, test_idx = stratified_split(table.labels, train_fraction, seed)
    if len(np.unique(table.labels[train_idx])) < len(classes):
        raise SplitError("a class is absent from the train split")

    num_min: dict[str, float] = {}
    num_max: dict[str, float] = {}
    for j, spec in enumerate(schema.features):
        if spec.is_numerical:
            col = table.values[train_idx, j].astype(np.float64)
            num_min[spec.name] = float(col.min())
            num_max[spec.name] = float(col.max())
    blocks, dim = _build_blocks(schema)
    enc = EncoderState(schema=schema, num_min=num_min, num_max=num_max, blocks=blocks, dim=dim)

    X_all = encode_table(table.values, enc)
    return EncodedDataset(
        X_train=X_all[train_idx],
        X_test=X_all[test_idx],
        y_train=table.labels[train_idx],
        y_test=table.labels[test_idx],
        encoder=enc,
        schema=schema,
        train_indices=train_idx,
        test_indices=test_idx,
        dropped_count=table.dropped_count,
    )


class EncodingError(ValueError):
    """Raised for values that cannot be encoded under the fitted state."""


def encode_table(values: np.ndarray, enc: EncoderState) -> np.ndarray:
    """Vectorized encoding of an object array in schema feature order."""
    n = values.shape[0]
    out = np.zeros((n, enc.dim), dtype=np.float64)
    for j, spec in enumerate(enc.schema.features):
        start, stop = enc.blocks[spec.name]
        if spec.is_numerical:
            lo, hi = enc.num_min[spec.name], enc.num_max[spec.name]
            col = values[:, j].astype(np.float64)
            span = hi - lo
            scaled = np.zeros(n) if span == 0.0 else (col - lo) / span
            out[:, start] = np.clip(scaled, 0.0, 1.0)
        else:
            level_pos = {lv: k for k, lv in enumerate(spec.levels)}
            for i in range(n):
                try:
                    out[i, start + level_pos[values[i, j]]] = 1.0
                except KeyError:
                    raise EncodingError(
                        f"unknown level {values[i, j]!r} for feature {spec.name!r}"
                    ) from None
    return out


def encode_row(row: dict, enc: EncoderState) -> np.ndarray:
    """Encode one original-space row given as a feature -> value mapping.

    Numerics outside the fitted train range are clipped to [0,1] so the
    encoded space stays a box even for perturbed queries.
    """
    values = np.empty((1, len(enc.schema.features)), dtype=object)
    for j, spec in enumerate(enc.schema.features):
        values[0, j] = row[spec.name]
    return encode_table(values, enc)[0]


def decode_row(vec: np.ndarray, enc: EncoderState) -> dict:
    """Decode one encoded vector back to original-space values.

    Total on length-D vectors: numerics are inverse-scaled without
    clipping, each categorical block resolves to the argmax level.
    """
    vec = np.asarray(vec, dtype=np.float64)
    if vec.shape != (enc.dim,):
        raise ValueError(f"expected length {enc.dim}, got shape {vec.shape}")
    row: dict = {}
    for spec in enc.schema.features:
        start, stop = enc.blocks[spec.name]
        if spec.is_numerical:
            lo, hi = enc.num_min[spec.name], enc.num_max[spec.name]
            row[spec.name] = lo + float(vec[start]) * (hi - lo)
        else:
            block = vec[start:stop]
            row[spec.name] = spec.levels[int(np.argmax(block))]
    return row


def decode_levels(X: np.ndarray, enc: EncoderState) -> dict[str, np.ndarray]:
    """Vectorized categorical decode: feature name -> level index per row."""
    out: dict[str, np.ndarray] = {}
    for spec in enc.schema.categorical_features:
        start, stop = enc.blocks[spec.name]
        out[spec.name] = np.argmax(X[:, start:stop], axis=1)
    return out
