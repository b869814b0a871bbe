"""Rule-based qualitative checks over decoded adversarial examples.

Three properties, each evaluated in original feature space after decoding:

- immutability: designated features must not change. A categorical
  feature changes when its decoded argmax level changes; a numerical one
  when its encoded coordinate moves by more than the sparsity tolerance.
- feasibility: perturbed numerical values must stay inside their declared
  closed range [lo, hi]. Unperturbed features never violate, even when
  the raw data already sits outside the range.
- interdependency: a derived categorical level must agree with the bin of
  its source numerical feature. Only examples that actually touched the
  source or the derived feature can violate, so unperturbed rows never
  flag even if the raw data is inconsistent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attacks import AdversarialExample
from .data import EncoderState, decode_row
from .metrics import SPARSITY_TOL
from .schema import FeatureSchema, InterdependencyRule


def _changed_features(ex: AdversarialExample, schema: FeatureSchema,
                      enc: EncoderState, tol: float) -> set[str]:
    changed = set()
    for feat in schema.features:
        start, stop = enc.blocks[feat.name]
        if feat.kind == "numerical":
            if abs(ex.perturbed[start] - ex.original[start]) > tol:
                changed.add(feat.name)
        else:
            before = int(np.argmax(ex.original[start:stop]))
            after = int(np.argmax(ex.perturbed[start:stop]))
            if before != after:
                changed.add(feat.name)
    return changed


def check_immutability(ex: AdversarialExample, schema: FeatureSchema,
                       enc: EncoderState, tol: float = SPARSITY_TOL) -> set[str]:
    changed = _changed_features(ex, schema, enc, tol)
    return {f.name for f in schema.features if f.immutable and f.name in changed}


def check_feasibility(ex: AdversarialExample, schema: FeatureSchema,
                      enc: EncoderState, tol: float = SPARSITY_TOL) -> dict[str, bool]:
    changed = _changed_features(ex, schema, enc, tol)
    decoded = decode_row(ex.perturbed, enc)
    verdicts: dict[str, bool] = {}
    for feat in schema.features:
        if feat.feasible_range is None:
            continue
        lo, hi = feat.feasible_range
        value = float(decoded[feat.name])
        verdicts[feat.name] = feat.name in changed and not (lo <= value <= hi)
    return verdicts


def check_interdependency(ex: AdversarialExample, rules: list[InterdependencyRule],
                          schema: FeatureSchema, enc: EncoderState,
                          tol: float = SPARSITY_TOL) -> list[InterdependencyRule]:
    changed = _changed_features(ex, schema, enc, tol)
    decoded = decode_row(ex.perturbed, enc)
    violated = []
    for rule in rules:
        if rule.source not in changed and rule.derived not in changed:
            continue
        expected = rule.level_for(float(decoded[rule.source]))
        if expected is not None and expected != decoded[rule.derived]:
            violated.append(rule)
    return violated


def perturbation_counts(examples: list[AdversarialExample], schema: FeatureSchema,
                        enc: EncoderState, tol: float = SPARSITY_TOL) -> dict[str, int]:
    if not examples:
        raise ValueError("perturbation_counts over an empty list")
    counts = {f.name: 0 for f in schema.features}
    for ex in examples:
        for name in _changed_features(ex, schema, enc, tol):
            counts[name] += 1
    return counts


@dataclass(frozen=True)
class ViolationReport:
    n_examples: int
    immutability_counts: dict
    feasibility_violations: dict
    interdependency_violations: int


def build_report(examples: list[AdversarialExample], schema: FeatureSchema,
                 enc: EncoderState, tol: float = SPARSITY_TOL) -> ViolationReport:
    immut = {f.name: 0 for f in schema.features if f.immutable}
    feas = {f.name: 0 for f in schema.features if f.feasible_range is not None}
    inter = 0
    for ex in examples:
        for name in check_immutability(ex, schema, enc, tol):
            immut[name] += 1
        for name, bad in check_feasibility(ex, schema, enc, tol).items():
            if bad:
                feas[name] += 1
        if schema.rules and check_interdependency(ex, schema.rules, schema, enc, tol):
            inter += 1
    return ViolationReport(
        n_examples=len(examples),
        immutability_counts=immut,
        feasibility_violations=feas,
        interdependency_violations=inter,
    )
