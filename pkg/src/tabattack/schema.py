"""Declarative dataset schemas.

A schema describes one tabular dataset: the ordered feature list with
per-feature kind (numerical or categorical), the target column and its
positive label, immutability flags, feasibility ranges in original units,
and interdependency rules that tie a derived categorical feature to bins
of a numerical source feature. Schemas are data, not code: they ship as
YAML files and are loaded with :func:`load_schema`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import yaml

NUMERICAL = "numerical"
CATEGORICAL = "categorical"


class SchemaError(ValueError):
    """Raised when a schema file or schema object violates its contract."""


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str
    levels: tuple[str, ...] = ()
    immutable: bool = False
    feasible_range: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.kind not in (NUMERICAL, CATEGORICAL):
            raise SchemaError(f"feature {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == CATEGORICAL:
            if not self.levels:
                raise SchemaError(f"feature {self.name!r}: categorical with no levels")
            if len(set(self.levels)) != len(self.levels):
                raise SchemaError(f"feature {self.name!r}: duplicate levels")
            if self.feasible_range is not None:
                raise SchemaError(
                    f"feature {self.name!r}: feasible_range is only valid on numerical features"
                )
        else:
            if self.levels:
                raise SchemaError(f"feature {self.name!r}: numerical feature with levels")
            if self.feasible_range is not None:
                lo, hi = self.feasible_range
                if not lo <= hi:
                    raise SchemaError(f"feature {self.name!r}: feasible_range lo > hi")

    @property
    def is_numerical(self) -> bool:
        return self.kind == NUMERICAL


@dataclass(frozen=True)
class Bin:
    """One interval of an interdependency binning table.

    Bounds are in source-feature units; None means unbounded on that side.
    """

    level: str
    lo: float | None = None
    hi: float | None = None
    lo_inclusive: bool = True
    hi_inclusive: bool = True

    def contains(self, value: float) -> bool:
        lo = -math.inf if self.lo is None else self.lo
        hi = math.inf if self.hi is None else self.hi
        above = value > lo or (self.lo_inclusive and value == lo) or self.lo is None
        below = value < hi or (self.hi_inclusive and value == hi) or self.hi is None
        return above and below


@dataclass(frozen=True)
class InterdependencyRule:
    source: str
    derived: str
    bins: tuple[Bin, ...]

    def level_for(self, value: float) -> str | None:
        for b in self.bins:
            if b.contains(value):
                return b.level
        return None


@dataclass(frozen=True)
class FeatureSchema:
    dataset_name: str
    features: tuple[FeatureSpec, ...]
    target: str
    positive_label: str
    rules: tuple[InterdependencyRule, ...] = field(default=())

    def __post_init__(self) -> None:
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate feature names")
        if self.target in names:
            raise SchemaError("target listed among features")
        by_name = {f.name: f for f in self.features}
        for rule in self.rules:
            src = by_name.get(rule.source)
            der = by_name.get(rule.derived)
            if src is None or der is None:
                raise SchemaError(
                    f"interdependency rule references undeclared feature "
                    f"({rule.source!r} -> {rule.derived!r})"
                )
            if not src.is_numerical:
                raise SchemaError(f"rule source {rule.source!r} must be numerical")
            if der.is_numerical:
                raise SchemaError(f"rule derived {rule.derived!r} must be categorical")
            for b in rule.bins:
                if b.level not in der.levels:
                    raise SchemaError(
                        f"rule bin level {b.level!r} not among levels of {der.name!r}"
                    )

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    @property
    def numerical_features(self) -> tuple[FeatureSpec, ...]:
        return tuple(f for f in self.features if f.is_numerical)

    @property
    def categorical_features(self) -> tuple[FeatureSpec, ...]:
        return tuple(f for f in self.features if not f.is_numerical)

    @property
    def numeric_only(self) -> bool:
        return not self.categorical_features

    def feature(self, name: str) -> FeatureSpec:
        for f in self.features:
            if f.name == name:
                return f
        raise KeyError(name)


def _parse_bin(raw: dict) -> Bin:
    return Bin(
        level=str(raw["level"]),
        lo=None if raw.get("min") is None else float(raw["min"]),
        hi=None if raw.get("max") is None else float(raw["max"]),
        lo_inclusive=bool(raw.get("min_inclusive", True)),
        hi_inclusive=bool(raw.get("max_inclusive", True)),
    )


def load_schema(path: str) -> FeatureSchema:
    """Load a dataset schema from a YAML file."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: schema file must be a mapping")
    try:
        features = []
        for f in raw["features"]:
            fr = f.get("feasible_range")
            features.append(
                FeatureSpec(
                    name=str(f["name"]),
                    kind=str(f["kind"]),
                    levels=tuple(str(v) for v in f.get("levels", ())),
                    immutable=bool(f.get("immutable", False)),
                    feasible_range=None if fr is None else (float(fr[0]), float(fr[1])),
                )
            )
        rules = tuple(
            InterdependencyRule(
                source=str(r["source"]),
                derived=str(r["derived"]),
                bins=tuple(_parse_bin(b) for b in r["bins"]),
            )
            for r in raw.get("interdependencies", ())
        )
        return FeatureSchema(
            dataset_name=str(raw["dataset"]),
            features=tuple(features),
            target=str(raw["target"]["column"]),
            positive_label=str(raw["target"]["positive"]),
            rules=rules,
        )
    except KeyError as exc:
        raise SchemaError(f"{path}: missing schema key {exc}") from exc
