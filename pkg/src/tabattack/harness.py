"""Benchmark orchestration: config, cell execution, report emission.

A run walks every (dataset x model x attack) cell: trains the model once
per (dataset, model), attacks the full test split, computes quantitative
metrics and qualitative violation reports, applies the effectiveness gate
(success rate below the threshold marks the cell's imperceptibility
metrics as excluded), and writes CSV plus Markdown artifacts.

Every emitted file starts with comment lines carrying the config hash and
the seed. Reruns with the same config are byte-identical; `timings.csv`
is the one wall-clock-dependent artifact and is excluded from that
promise. LowProFool cells on schemas with categorical features are
skipped, not errors. Cell failures are captured per cell and surface as
exit code 3 without aborting the rest of the sweep.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict, fields as dc_fields, replace, field
from pathlib import Path

import numpy as np
import yaml

from . import attacks as attacks_mod
from . import metrics as metrics_mod
from . import qualitative as qual_mod
from .attacks import AttackConfig, AttackError, default_attack_config, run_attack_batch
from .data import DataError, EncodedDataset, EncodingError, SplitError, fit_encoder, load_dataset
from .models import MODEL_KINDS, Classifier, TrainConfig, TrainingMetrics, default_config, train
from .schema import FeatureSchema, SchemaError, load_schema

DEFAULT_THRESHOLD = 0.30
ATTACK_ORDER = ("FGSM", "PGD", "DeepFool", "CW", "LowProFool")
MAX_CASES_PER_CELL = 3


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 1)."""


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    schema_path: str
    csv_path: str


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[DatasetEntry, ...]
    models: tuple[str, ...]
    attacks: tuple[AttackConfig, ...]
    seed: int = 42
    threshold: float = DEFAULT_THRESHOLD
    output_dir: str = "out"
    parallelism: int = 1
    train_fraction: float = 0.8
    ridge: float = 1e-6
    sparsity_tol: float = 1e-8
    training: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.datasets:
            raise ConfigError("config needs at least one dataset")
        if not self.models:
            raise ConfigError("config needs at least one model")
        if not self.attacks:
            raise ConfigError("config needs at least one attack")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("threshold must lie in [0, 1]")
        for kind in self.models:
            if kind not in MODEL_KINDS:
                raise ConfigError(f"unknown model kind {kind!r}")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be at least 1")
        if not isinstance(self.training, dict):
            raise ConfigError("training must map dataset names to per-model overrides")
        known = {d.name for d in self.datasets}
        hyper_names = {f.name for f in dc_fields(TrainConfig)}
        for ds_name, per_model in self.training.items():
            if ds_name not in known:
                raise ConfigError(f"training override for unknown dataset {ds_name!r}")
            if not isinstance(per_model, dict):
                raise ConfigError(f"training.{ds_name} must map model kinds to overrides")
            for kind, overrides in per_model.items():
                if kind not in MODEL_KINDS:
                    raise ConfigError(f"training override for unknown model kind {kind!r}")
                if not isinstance(overrides, dict):
                    raise ConfigError(f"training.{ds_name}.{kind} must be a mapping")
                for key, value in overrides.items():
                    if key not in hyper_names:
                        raise ConfigError(
                            f"unknown training parameter {key!r} in training.{ds_name}.{kind}")
                    if not isinstance(value, (int, float)) or isinstance(value, bool):
                        raise ConfigError(
                            f"training.{ds_name}.{kind}.{key} must be a number")

    def train_config_for(self, dataset_name: str, kind: str) -> TrainConfig:
        base = default_config(kind)
        overrides = self.training.get(dataset_name, {}).get(kind, {})
        return replace(base, **overrides) if overrides else base


_ATTACK_KEYS = {"kind", "epsilon", "step_size", "max_iter", "overshoot",
                "initial_constant", "search_steps", "confidence", "tradeoff",
                "norm", "early_stop"}


def _parse_attack(entry) -> AttackConfig:
    if isinstance(entry, str):
        return default_attack_config(entry)
    if not isinstance(entry, dict) or "kind" not in entry:
        raise ConfigError(f"attack entry needs a 'kind': {entry!r}")
    unknown = set(entry) - _ATTACK_KEYS
    if unknown:
        raise ConfigError(f"unknown attack keys {sorted(unknown)}")
    try:
        return default_attack_config(entry["kind"],
                                     **{k: v for k, v in entry.items() if k != "kind"})
    except AttackError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")

    base = path.parent

    def resolve(p: str) -> str:
        q = Path(p)
        return str(q if q.is_absolute() else (base / q))

    try:
        entries = tuple(
            DatasetEntry(name=d["name"], schema_path=resolve(d["schema"]),
                         csv_path=resolve(d["csv"]))
            for d in raw.get("datasets", [])
        )
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"dataset entries need name/schema/csv: {exc}") from exc
    attacks_list = tuple(_parse_attack(a) for a in raw.get("attacks", []))
    return ExperimentConfig(
        datasets=entries,
        models=tuple(raw.get("models", list(MODEL_KINDS))),
        attacks=attacks_list,
        seed=int(raw.get("seed", 42)),
        threshold=float(raw.get("threshold", DEFAULT_THRESHOLD)),
        output_dir=raw.get("output_dir", "out"),
        parallelism=int(raw.get("jobs", 1)),
        train_fraction=float(raw.get("train_fraction", 0.8)),
        ridge=float(raw.get("ridge", 1e-6)),
        sparsity_tol=float(raw.get("sparsity_tol", 1e-8)),
        training=raw.get("training", {}) or {},
    )


def apply_only(cfg: ExperimentConfig, only: str | None) -> ExperimentConfig:
    """Restrict a config to the cells selected by an `--only` expression
    such as `dataset=diabetes,model=LR,attack=DeepFool`."""
    if not only:
        return cfg
    datasets, models, attack_kinds = None, None, None
    for clause in only.split(","):
        if "=" not in clause:
            raise ConfigError(f"bad --only clause {clause!r}")
        key, value = clause.split("=", 1)
        key, value = key.strip(), value.strip()
        if key == "dataset":
            datasets = (datasets or set()) | {value.lower()}
        elif key == "model":
            models = (models or set()) | {value}
        elif key == "attack":
            attack_kinds = (attack_kinds or set()) | {value}
        else:
            raise ConfigError(f"unknown --only key {key!r}")
    new_datasets = cfg.datasets if datasets is None else tuple(
        d for d in cfg.datasets if d.name.lower() in datasets)
    new_models = cfg.models if models is None else tuple(
        m for m in cfg.models if m in models)
    new_attacks = cfg.attacks if attack_kinds is None else tuple(
        a for a in cfg.attacks if a.kind in attack_kinds)
    if not new_datasets or not new_models or not new_attacks:
        raise ConfigError(f"--only selection matched nothing: {only!r}")
    return replace(cfg, datasets=new_datasets, models=new_models, attacks=new_attacks)


def config_digest(cfg: ExperimentConfig) -> str:
    """Hash of everything that influences computed values. Output paths and
    worker counts are excluded on purpose: they change where or how fast
    results land, never what they are."""
    payload = {
        "datasets": [{"name": d.name, "schema": d.schema_path, "csv": d.csv_path}
                     for d in cfg.datasets],
        "models": list(cfg.models),
        "attacks": [asdict(a) for a in cfg.attacks],
        "seed": cfg.seed,
        "threshold": cfg.threshold,
        "train_fraction": cfg.train_fraction,
        "ridge": cfg.ridge,
        "sparsity_tol": cfg.sparsity_tol,
        "training": cfg.training,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# -- prepared inputs ---------------------------------------------------------

@dataclass
class PreparedDataset:
    entry: DatasetEntry
    schema: FeatureSchema
    dataset: EncodedDataset
    stats: metrics_mod.FeatureStats
    importance: np.ndarray


def prepare_dataset(entry: DatasetEntry, cfg: ExperimentConfig) -> PreparedDataset:
    schema = load_schema(entry.schema_path)
    table = load_dataset(entry.csv_path, schema)
    dataset = fit_encoder(table, train_fraction=cfg.train_fraction, seed=cfg.seed)
    stats = metrics_mod.fit_feature_stats(dataset, ridge=cfg.ridge)
    importance = attacks_mod.pearson_importance(dataset)
    return PreparedDataset(entry=entry, schema=schema, dataset=dataset,
                          stats=stats, importance=importance)


# -- cell results ------------------------------------------------------------

@dataclass
class ModelCell:
    dataset: str
    model: str
    metrics: TrainingMetrics | None
    seconds: float
    error: str | None = None


@dataclass
class AttackCell:
    dataset: str
    model: str
    attack: str
    status: str  # ok | skipped | error
    aggregate: metrics_mod.CellAggregate | None = None
    violations: qual_mod.ViolationReport | None = None
    counts: dict | None = None
    gated: bool | None = None
    seconds: float = 0.0
    detail: str | None = None


@dataclass
class BenchmarkResult:
    config: ExperimentConfig
    digest: str
    model_cells: list
    attack_cells: list
    training_seconds: float
    attack_seconds: float
    prepare_seconds: float
    case_texts: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return (any(c.error for c in self.model_cells)
                or any(c.status == "error" for c in self.attack_cells))


def attack_cell(model: Classifier, prepared: PreparedDataset, acfg: AttackConfig,
                cfg: ExperimentConfig):
    """Run one attack cell over the full test split; returns the raw
    examples alongside the aggregate and qualitative reports."""
    if acfg.kind == "LowProFool" and prepared.schema.categorical_features:
        raise AttackError("LowProFool requires a numerical-only schema")
    ds = prepared.dataset
    examples = run_attack_batch(model, ds.X_test, ds.y_test, acfg,
                                importance=prepared.importance, seed=cfg.seed)
    records = metrics_mod.compute_records(examples, prepared.stats, prepared.schema,
                                          ds.encoder, cfg.sparsity_tol)
    agg = metrics_mod.aggregate(records, examples)
    report = qual_mod.build_report(examples, prepared.schema, ds.encoder,
                                   cfg.sparsity_tol)
    counts = qual_mod.perturbation_counts(examples, prepared.schema, ds.encoder,
                                          cfg.sparsity_tol)
    return examples, agg, report, counts


def compare_groups(agg: metrics_mod.CellAggregate):
    """Successful-vs-unsuccessful five-number summaries for l2, deviation
    and sensitivity; None when either group is empty (flagged cells)."""
    out = {}
    for metric in metrics_mod.GROUP_METRICS:
        s = agg.group_summaries.get(("successful", metric))
        u = agg.group_summaries.get(("unsuccessful", metric))
        if s is None or u is None:
            return None
        out[metric] = (s, u)
    return out


def _run_model_block(prepared: PreparedDataset, kind: str, cfg: ExperimentConfig,
                     train_only: bool = False):
    """Train one model and run all its attack cells; returns the cells plus
    the case-report text for this (dataset, model) pair."""
    name = prepared.entry.name
    t0 = time.perf_counter()
    try:
        hyper = cfg.train_config_for(name, kind)
        model = train(prepared.dataset, kind, hyper=hyper, seed=cfg.seed)
    except Exception:
        err = traceback.format_exc(limit=3)
        mc = ModelCell(dataset=name, model=kind, metrics=None,
                       seconds=time.perf_counter() - t0, error=err)
        cells = [] if train_only else [
            AttackCell(dataset=name, model=kind, attack=a.kind,
                       status="error", detail="training failed")
            for a in cfg.attacks]
        return mc, cells, "", None
    mc = ModelCell(dataset=name, model=kind, metrics=model.metrics,
                   seconds=time.perf_counter() - t0)
    if train_only:
        return mc, [], "", model

    cells = []
    kept_examples = {}
    for acfg in cfg.attacks:
        if acfg.kind == "LowProFool" and prepared.schema.categorical_features:
            cells.append(AttackCell(dataset=name, model=kind, attack=acfg.kind,
                                    status="skipped", detail="mixed schema"))
            continue
        t1 = time.perf_counter()
        try:
            examples, agg, report, counts = attack_cell(model, prepared, acfg, cfg)
        except Exception:
            cells.append(AttackCell(dataset=name, model=kind, attack=acfg.kind,
                                    status="error",
                                    detail=traceback.format_exc(limit=3),
                                    seconds=time.perf_counter() - t1))
            continue
        cells.append(AttackCell(
            dataset=name, model=kind, attack=acfg.kind, status="ok",
            aggregate=agg, violations=report, counts=counts,
            gated=agg.success_rate < cfg.threshold,
            seconds=time.perf_counter() - t1,
        ))
        kept_examples[acfg.kind] = examples
    cases = _render_cases(prepared, kind, kept_examples, cfg)
    return mc, cells, cases, model


# -- case reports ------------------------------------------------------------

def _case_rows(prepared: PreparedDataset, kept: dict, cfg: ExperimentConfig):
    schema, enc = prepared.schema, prepared.dataset.encoder
    interesting = []
    seen = set()
    for kind, examples in kept.items():
        for i, ex in enumerate(examples):
            if i in seen:
                continue
            hit = bool(qual_mod.check_immutability(ex, schema, enc, cfg.sparsity_tol))
            if not hit:
                hit = any(qual_mod.check_feasibility(ex, schema, enc,
                                                     cfg.sparsity_tol).values())
            if not hit and schema.rules:
                hit = bool(qual_mod.check_interdependency(ex, schema.rules, schema,
                                                          enc, cfg.sparsity_tol))
            if hit:
                interesting.append(i)
                seen.add(i)
            if len(interesting) >= MAX_CASES_PER_CELL:
                return sorted(interesting)
    if not interesting:
        for kind, examples in kept.items():
            for i, ex in enumerate(examples):
                if ex.success:
                    return [i]
    return sorted(interesting)


def _render_cases(prepared: PreparedDataset, model_kind: str, kept: dict,
                  cfg: ExperimentConfig) -> str:
    from .data import decode_row

    if not kept:
        return ""
    rows = _case_rows(prepared, kept, cfg)
    if not rows:
        return ""
    schema = prepared.schema
    enc = prepared.dataset.encoder
    order = [k for k in ATTACK_ORDER if k in kept]
    lines = []
    for i in rows:
        any_ex = kept[order[0]][i]
        lines.append(f"== case {i} ({prepared.entry.name}, {model_kind}, "
                     f"true label {any_ex.true_label}) ==")
        decoded_orig = decode_row(any_ex.original, enc)
        decoded_adv = {k: decode_row(kept[k][i].perturbed, enc) for k in order}
        header = "feature | original | " + " | ".join(order)
        lines.append(header)
        for feat in schema.features:
            vals = []
            for k in order:
                v = decoded_adv[k][feat.name]
                vals.append(f"{v:.6g}" if isinstance(v, float) else str(v))
            o = decoded_orig[feat.name]
            otxt = f"{o:.6g}" if isinstance(o, float) else str(o)
            lines.append(f"{feat.name} | {otxt} | " + " | ".join(vals))
        lines.append("")
    return "\n".join(lines)


# -- benchmark driver --------------------------------------------------------

def run_benchmark(cfg: ExperimentConfig, save_models_to: str | Path | None = None,
                  train_only: bool = False) -> BenchmarkResult:
    digest = config_digest(cfg)
    t_prep = time.perf_counter()
    prepared = [prepare_dataset(entry, cfg) for entry in cfg.datasets]
    prepare_seconds = time.perf_counter() - t_prep

    blocks = [(p, kind) for p in prepared for kind in cfg.models]
    t_all = time.perf_counter()
    if cfg.parallelism > 1:
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            outcomes = list(pool.map(
                lambda bk: _run_model_block(bk[0], bk[1], cfg, train_only),
                blocks))
    else:
        outcomes = [_run_model_block(p, kind, cfg, train_only)
                    for p, kind in blocks]
    total = time.perf_counter() - t_all

    model_cells, attack_cells, case_texts = [], [], {}
    training_seconds = 0.0
    for (p, kind), (mc, cells, cases, model) in zip(blocks, outcomes):
        model_cells.append(mc)
        attack_cells.extend(cells)
        training_seconds += mc.seconds
        if cases:
            case_texts[(p.entry.name, kind)] = cases
        if model is not None and save_models_to is not None:
            mdir = Path(save_models_to)
            mdir.mkdir(parents=True, exist_ok=True)
            model.save(str(mdir / f"{p.entry.name}_{kind}.npz"))

    return BenchmarkResult(
        config=cfg, digest=digest, model_cells=model_cells,
        attack_cells=attack_cells, training_seconds=training_seconds,
        attack_seconds=max(total - training_seconds, 0.0),
        prepare_seconds=prepare_seconds, case_texts=case_texts,
    )


# -- report emission ---------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return str(v)


def _write_csv(path: Path, digest: str, seed: int,
               columns: list, rows: list) -> None:
    buf = io.StringIO()
    buf.write(f"# config_hash: {digest}\n")
    buf.write(f"# seed: {seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue())


_METRIC_TABLES = {
    "l1": "mean_l1", "l2": "mean_l2", "linf": "mean_linf",
    "sparsity": "mean_sparsity", "md": "mean_md", "sen": "mean_sen",
}
_QUARTILE_COLS = [
    f"{grp}_{met}_{stat}"
    for grp in ("succ", "unsucc")
    for met in ("l2", "md", "sen")
    for stat in ("min", "q1", "med", "q3", "max")
]
_GROUP_KEY = {"succ": "successful", "unsucc": "unsuccessful"}
_METRIC_KEY = {"l2": "l2", "md": "deviation_md", "sen": "sensitivity"}


def emit_reports(result: BenchmarkResult, out_dir: str | Path,
                 scope: str = "full") -> list[str]:
    """Write artifacts under out_dir. scope: 'train' (accuracy only),
    'attack' (machine CSVs), 'full' (everything plus Markdown and cases)."""
    if not result.model_cells:
        raise ConfigError("refusing to emit reports for an empty run")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    digest = result.digest
    written = []

    def emit(name, columns, rows):
        _write_csv(out / name, digest, cfg.seed, columns, rows)
        written.append(name)

    emit("accuracy.csv",
         ["dataset", "model", "accuracy", "precision", "recall", "converged",
          "iterations"],
         [[c.dataset, c.model,
           c.metrics.accuracy if c.metrics else None,
           c.metrics.precision if c.metrics else None,
           c.metrics.recall if c.metrics else None,
           c.metrics.converged if c.metrics else None,
           c.metrics.iterations if c.metrics else None]
          for c in result.model_cells])

    emit("timings.csv",
         ["phase", "dataset", "model", "attack", "seconds"],
         [["prepare", "", "", "", result.prepare_seconds],
          ["training_total", "", "", "", result.training_seconds],
          ["attacks_total", "", "", "", result.attack_seconds]]
         + [["train", c.dataset, c.model, "", c.seconds] for c in result.model_cells]
         + [["attack", c.dataset, c.model, c.attack, c.seconds]
            for c in result.attack_cells])

    if scope == "train":
        return written

    cells = result.attack_cells
    attack_kinds = [a.kind for a in cfg.attacks]
    pairs = [(d.name, m) for d in cfg.datasets for m in cfg.models]
    by_key = {(c.dataset, c.model, c.attack): c for c in cells}

    # master per-cell metric table
    cols = (["dataset", "model", "attack", "status", "n_examples", "success_rate",
             "mean_sparsity", "mean_l1", "mean_l2", "mean_linf", "mean_md",
             "mean_sen", "n_degenerate", "gated"] + _QUARTILE_COLS)
    rows = []
    for c in cells:
        row = [c.dataset, c.model, c.attack, c.status]
        if c.aggregate is None:
            row += [None] * (10 + len(_QUARTILE_COLS))
        else:
            a = c.aggregate
            row += [a.n_examples, a.success_rate, a.mean_sparsity, a.mean_l1,
                    a.mean_l2, a.mean_linf, a.mean_md, a.mean_sen,
                    a.n_degenerate, c.gated]
            for col in _QUARTILE_COLS:
                grp, met, stat = col.split("_")
                summary = a.group_summaries.get((_GROUP_KEY[grp], _METRIC_KEY[met]))
                if summary is None:
                    row.append(None)
                else:
                    row.append(summary[("min", "q1", "med", "q3", "max").index(stat)])
        rows.append(row)
    emit("cell_metrics.csv", cols, rows)

    def pivot(value_of):
        prows = []
        for dname, m in pairs:
            prow = [dname, m]
            for kind in attack_kinds:
                c = by_key.get((dname, m, kind))
                prow.append(None if c is None or c.aggregate is None else value_of(c))
            prows.append(prow)
        return prows

    emit("success_rates.csv", ["dataset", "model"] + attack_kinds,
         pivot(lambda c: c.aggregate.success_rate))
    for short, attr in _METRIC_TABLES.items():
        emit(f"metric_{short}.csv", ["dataset", "model"] + attack_kinds,
             pivot(lambda c, attr=attr: getattr(c.aggregate, attr)))
    emit("gated.csv", ["dataset", "model"] + attack_kinds,
         pivot(lambda c: c.gated))

    emit("heatmap.csv", ["dataset", "model", "attack", "feature", "count"],
         [[c.dataset, c.model, c.attack, feat, n]
          for c in cells if c.counts
          for feat, n in c.counts.items()])

    vrows = []
    for c in cells:
        if not c.violations:
            continue
        for feat, n in c.violations.immutability_counts.items():
            vrows.append([c.dataset, c.model, c.attack, "immutability", feat, n])
        for feat, n in c.violations.feasibility_violations.items():
            vrows.append([c.dataset, c.model, c.attack, "feasibility", feat, n])
        vrows.append([c.dataset, c.model, c.attack, "interdependency", "",
                      c.violations.interdependency_violations])
    emit("violations.csv", ["dataset", "model", "attack", "check", "feature",
                            "count"], vrows)

    brows = []
    for c in cells:
        if not c.aggregate:
            continue
        for (group, metric), summary in sorted(c.aggregate.group_summaries.items()):
            brows.append([c.dataset, c.model, c.attack, group, metric] + list(summary))
    emit("boxplot.csv", ["dataset", "model", "attack", "group", "metric",
                         "min", "q1", "median", "q3", "max"], brows)

    if scope == "attack":
        return written

    case_texts = result.case_texts
    if case_texts:
        cdir = out / "cases"
        cdir.mkdir(exist_ok=True)
        for (dname, m), text in sorted(case_texts.items()):
            head = f"# config_hash: {digest}\n# seed: {cfg.seed}\n"
            (cdir / f"{dname}_{m}.txt").write_text(head + text)
            written.append(f"cases/{dname}_{m}.txt")

    (out / "report.md").write_text(_render_markdown(result))
    written.append("report.md")
    return written


def _render_markdown(result: BenchmarkResult) -> str:
    cfg = result.config
    lines = [f"<!-- config_hash: {result.digest} -->",
             f"<!-- seed: {cfg.seed} -->",
             "", "# Benchmark report", ""]
    lines += ["## Model quality", "",
              "| dataset | model | accuracy | precision | recall |",
              "|---|---|---|---|---|"]
    for c in result.model_cells:
        if c.metrics:
            lines.append(f"| {c.dataset} | {c.model} | {c.metrics.accuracy:.4f} "
                         f"| {c.metrics.precision:.4f} | {c.metrics.recall:.4f} |")
        else:
            lines.append(f"| {c.dataset} | {c.model} | failed | | |")
    attack_kinds = [a.kind for a in cfg.attacks]
    pairs = [(d.name, m) for d in cfg.datasets for m in cfg.models]
    by_key = {(c.dataset, c.model, c.attack): c for c in result.attack_cells}

    def table(title, value_of, mark_gated):
        lines.extend(["", f"## {title}", "",
                      "| dataset | model | " + " | ".join(attack_kinds) + " |",
                      "|---|---|" + "---|" * len(attack_kinds)])
        for dname, m in pairs:
            vals = []
            for kind in attack_kinds:
                c = by_key.get((dname, m, kind))
                if c is None or c.aggregate is None:
                    vals.append("–" if c is None or c.status == "skipped" else "error")
                    continue
                v = value_of(c)
                txt = f"{v:.4f}"
                if mark_gated and c.gated:
                    txt = "† " + txt
                vals.append(txt)
            lines.append(f"| {dname} | {m} | " + " | ".join(vals) + " |")

    table("Success rates", lambda c: c.aggregate.success_rate, False)
    for short, attr in _METRIC_TABLES.items():
        table(f"Mean {short}", lambda c, attr=attr: getattr(c.aggregate, attr), True)
    lines.extend(["", "† success rate below the effectiveness threshold "
                  f"({cfg.threshold:.2f}); imperceptibility values excluded "
                  "from comparisons.", ""])

    lines.extend(["## Qualitative violations", "",
                  "| dataset | model | attack | immutable changes | "
                  "feasibility violations | interdependency violations |",
                  "|---|---|---|---|---|---|"])
    for c in result.attack_cells:
        if not c.violations:
            continue
        imm = sum(c.violations.immutability_counts.values())
        fea = sum(c.violations.feasibility_violations.values())
        lines.append(f"| {c.dataset} | {c.model} | {c.attack} | {imm} | {fea} "
                     f"| {c.violations.interdependency_violations} |")
    lines.extend(["", f"Training wall time: {result.training_seconds:.1f} s; "
                  f"attack sweep: {result.attack_seconds:.1f} s.", ""])
    return "\n".join(lines)
