"""Benchmark toolkit for adversarial examples on tabular classifiers."""

from .schema import (Bin, FeatureSchema, FeatureSpec, InterdependencyRule,
                     SchemaError, load_schema)
from .data import (DataError, EncodedDataset, EncoderState, EncodingError,
                   RawTable, SplitError, decode_levels, decode_row, encode_row,
                   encode_table, fit_encoder, load_dataset, stratified_split)
from .models import (Classifier, LinearSVMModel, LogisticRegressionModel,
                     MLPModel, ModelOutput, TrainConfig, TrainingMetrics,
                     input_gradient, load_classifier, predict, train)
from .attacks import (AdversarialExample, AttackConfig, AttackError,
                      carlini_wagner_l2, deepfool, default_attack_config, fgsm,
                      lowprofool, pearson_importance, pgd, run_attack_batch)
from .metrics import (CellAggregate, FeatureStats, MetricError, MetricRecord,
                      aggregate, compute_record, compute_records,
                      fit_feature_stats, five_number, mahalanobis_deviation,
                      proximity_lp, sensitivity, sparsity, success_rate)
from .qualitative import (ViolationReport, build_report, check_feasibility,
                          check_immutability, check_interdependency,
                          perturbation_counts)
from .harness import (AttackCell, BenchmarkResult, ConfigError, DatasetEntry,
                      ExperimentConfig, ModelCell, apply_only, attack_cell,
                      compare_groups, config_digest, emit_reports, load_config,
                      prepare_dataset, run_benchmark)

__version__ = "0.1.0"
