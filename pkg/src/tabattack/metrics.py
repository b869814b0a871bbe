"""Quantitative imperceptibility metrics over encoded adversarial examples.

Proximity (l1/l2/l-inf), sparsity, Mahalanobis deviation, sensitivity, and
success rate, with per-cell aggregation.

Choices that affect values:

- feature statistics use the population form (divisor m) on train rows;
- the covariance matrix spans the FULL encoded train matrix, one-hot
  columns included, with a ridge-regularized pseudo-inverse because one-hot
  blocks make it singular;
- sensitivity sums over numerical features only; features whose train
  standard deviation is below 1e-12 are skipped and listed in the stats
  diagnostics;
- sparsity counts in original feature space: a numerical feature counts
  when its encoded coordinate moved by more than tol, a categorical
  feature when its decoded argmax level changed;
- cell means run over ALL generated examples, with separate successful and
  unsuccessful sub-summaries.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attacks import AdversarialExample
from .data import EncodedDataset, EncoderState
from .schema import FeatureSchema

SPARSITY_TOL = 1e-8
SDV_FLOOR = 1e-12


class MetricError(ValueError):
    """Contract violation in metric computation."""


@dataclass(frozen=True)
class FeatureStats:
    numerical_names: tuple[str, ...]
    mean: np.ndarray
    sdv: np.ndarray
    covariance: np.ndarray
    pinv: np.ndarray
    ridge: float
    excluded: tuple[str, ...]


def fit_feature_stats(dataset: EncodedDataset, ridge: float = 1e-6) -> FeatureStats:
    Xtr = np.asarray(dataset.X_train, dtype=np.float64)
    if len(Xtr) < 2:
        raise MetricError("need at least 2 train rows to fit feature stats")
    enc = dataset.encoder
    names = tuple(f.name for f in dataset.schema.numerical_features)
    cols = [enc.blocks[n][0] for n in names]
    mean = Xtr[:, cols].mean(axis=0)
    sdv = Xtr[:, cols].std(axis=0)
    excluded = tuple(n for n, s in zip(names, sdv) if s < SDV_FLOOR)
    centered = Xtr - Xtr.mean(axis=0, keepdims=True)
    cov = centered.T @ centered / len(Xtr)
    pinv = np.linalg.pinv(cov + ridge * np.eye(enc.dim))
    return FeatureStats(numerical_names=names, mean=mean, sdv=sdv,
                        covariance=cov, pinv=pinv, ridge=ridge, excluded=excluded)


def _check_pair(x_adv: np.ndarray, x: np.ndarray) -> np.ndarray:
    x_adv = np.asarray(x_adv, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x_adv.shape != x.shape:
        raise MetricError("vector length mismatch")
    return x_adv - x


def proximity_lp(x_adv, x, p) -> float:
    delta = _check_pair(x_adv, x)
    if p == 1:
        return float(np.abs(delta).sum())
    if p == 2:
        return float(np.sqrt((delta * delta).sum()))
    if p in (np.inf, "inf"):
        return float(np.abs(delta).max()) if delta.size else 0.0
    raise MetricError(f"unsupported norm order {p!r}")


def sparsity(x_adv, x, schema: FeatureSchema, enc: EncoderState,
             tol: float = SPARSITY_TOL) -> int:
    delta = _check_pair(x_adv, x)
    x_adv = np.asarray(x_adv, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    count = 0
    for feat in schema.features:
        start, stop = enc.blocks[feat.name]
        if feat.kind == "numerical":
            if abs(delta[start]) > tol:
                count += 1
        else:
            if int(np.argmax(x_adv[start:stop])) != int(np.argmax(x[start:stop])):
                count += 1
    return count


def mahalanobis_deviation(x_adv, x, stats: FeatureStats) -> float:
    delta = _check_pair(x_adv, x)
    quad = float(delta @ stats.pinv @ delta)
    return float(np.sqrt(max(quad, 0.0)))


def sensitivity(x_adv, x, stats: FeatureStats, schema: FeatureSchema,
                enc: EncoderState) -> float:
    delta = _check_pair(x_adv, x)
    total = 0.0
    for name, s in zip(stats.numerical_names, stats.sdv):
        if s < SDV_FLOOR:
            continue
        start, _ = enc.blocks[name]
        total += abs(delta[start]) / s
    return float(total)


def success_rate(examples: list[AdversarialExample]) -> float:
    if not examples:
        raise MetricError("success_rate over an empty list")
    return float(np.mean([ex.adversarial_pred != ex.true_label for ex in examples]))


@dataclass(frozen=True)
class MetricRecord:
    l1: float
    l2: float
    linf: float
    sparsity: int
    deviation_md: float
    sensitivity: float
    success: bool


def compute_record(ex: AdversarialExample, stats: FeatureStats,
                   schema: FeatureSchema, enc: EncoderState,
                   tol: float = SPARSITY_TOL) -> MetricRecord:
    return MetricRecord(
        l1=proximity_lp(ex.perturbed, ex.original, 1),
        l2=proximity_lp(ex.perturbed, ex.original, 2),
        linf=proximity_lp(ex.perturbed, ex.original, np.inf),
        sparsity=sparsity(ex.perturbed, ex.original, schema, enc, tol),
        deviation_md=mahalanobis_deviation(ex.perturbed, ex.original, stats),
        sensitivity=sensitivity(ex.perturbed, ex.original, stats, schema, enc),
        success=bool(ex.success),
    )


def compute_records(examples: list[AdversarialExample], stats: FeatureStats,
                    schema: FeatureSchema, enc: EncoderState,
                    tol: float = SPARSITY_TOL) -> list[MetricRecord]:
    return [compute_record(ex, stats, schema, enc, tol) for ex in examples]


def five_number(values: np.ndarray) -> tuple[float, float, float, float, float]:
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise MetricError("five-number summary of an empty group")
    q = np.percentile(v, [0, 25, 50, 75, 100])
    return tuple(float(x) for x in q)


GROUP_METRICS = ("l2", "deviation_md", "sensitivity")


@dataclass(frozen=True)
class CellAggregate:
    n_examples: int
    success_rate: float
    mean_sparsity: float
    mean_l1: float
    mean_l2: float
    mean_linf: float
    mean_md: float
    mean_sen: float
    n_successful: int
    n_unsuccessful: int
    n_degenerate: int
    # five-number summaries keyed by (group, metric); groups with no
    # members are absent
    group_summaries: dict


def aggregate(records: list[MetricRecord],
              examples: list[AdversarialExample]) -> CellAggregate:
    if not records:
        raise MetricError("aggregate over an empty cell")
    arr = {
        "l1": np.array([r.l1 for r in records]),
        "l2": np.array([r.l2 for r in records]),
        "linf": np.array([r.linf for r in records]),
        "sparsity": np.array([r.sparsity for r in records], dtype=np.float64),
        "deviation_md": np.array([r.deviation_md for r in records]),
        "sensitivity": np.array([r.sensitivity for r in records]),
    }
    succ = np.array([r.success for r in records], dtype=bool)
    summaries = {}
    for group, mask in (("successful", succ), ("unsuccessful", ~succ)):
        if mask.any():
            for metric in GROUP_METRICS:
                summaries[(group, metric)] = five_number(arr[metric][mask])
    return CellAggregate(
        n_examples=len(records),
        success_rate=float(succ.mean()),
        mean_sparsity=float(arr["sparsity"].mean()),
        mean_l1=float(arr["l1"].mean()),
        mean_l2=float(arr["l2"].mean()),
        mean_linf=float(arr["linf"].mean()),
        mean_md=float(arr["deviation_md"].mean()),
        mean_sen=float(arr["sensitivity"].mean()),
        n_successful=int(succ.sum()),
        n_unsuccessful=int((~succ).sum()),
        n_degenerate=int(sum(1 for ex in examples if ex.degenerate)),
        group_summaries=summaries,
    )
