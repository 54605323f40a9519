"""Experiment orchestration: config parsing, feature-matrix assembly and
the full ingest -> extract -> select -> cross-validate run."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import learn, select
from .errors import ConfigError
from .features import FEATURE_CATALOG, extract_all
from .ingest import (CLASS_MAPS, Experiment, Manifest, load_manifest,
                     segments_for_experiment)
from .learn import CvScheme
from .models import ModelSpec
from .select import FeatureMatrix


@dataclass
class ExperimentConfig:
    manifest_path: Path
    experiment: Experiment
    models: list[ModelSpec]
    cv: list[CvScheme]
    correlation_threshold: float
    rfe_k: int
    selection_mode: str
    seed: int
    output_dir: Path
    sample_rate_hz: float = 4.0
    plots: bool = True

    @staticmethod
    def from_dict(doc: dict, base_dir: Path = Path(".")) -> "ExperimentConfig":
        try:
            seed = doc["seed"]
        except KeyError:
            raise ConfigError("config requires an explicit seed")
        try:
            experiment = Experiment(doc["experiment"])
            sel = doc.get("selection", {})
            mode = sel.get("mode", "global")
            if mode not in ("global", "nested"):
                raise ConfigError(f"unknown selection mode {mode!r}")
            model_specs = []
            for m in doc.get("models", [{"kind": "lda"}]):
                m = dict(m)
                m.setdefault("seed", seed)
                model_specs.append(ModelSpec(**m))
            schemes = []
            for s in doc.get("cv", [{"scheme": "loso"}]):
                kind = s.get("scheme", "loso")
                if kind == "loso":
                    schemes.append(CvScheme("loso"))
                elif kind == "stratified_kfold":
                    schemes.append(CvScheme("stratified_kfold",
                                            k=int(s.get("k", 5)),
                                            seed=int(s.get("seed", seed))))
                else:
                    raise ConfigError(f"unknown CV scheme {kind!r}")
            manifest_path = Path(doc["manifest"])
            if not manifest_path.is_absolute():
                manifest_path = base_dir / manifest_path
            output_dir = Path(doc.get("output_dir", "out"))
            if not output_dir.is_absolute():
                output_dir = base_dir / output_dir
            return ExperimentConfig(
                manifest_path=manifest_path,
                experiment=experiment,
                models=model_specs,
                cv=schemes,
                correlation_threshold=float(
                    sel.get("correlation_threshold", select.CORRELATION_THRESHOLD)),
                rfe_k=int(sel.get("rfe_k", select.RFE_TOP_K)),
                selection_mode=mode,
                seed=int(seed),
                output_dir=output_dir,
                sample_rate_hz=float(doc.get("sample_rate_hz", 4.0)),
                plots=bool(doc.get("plots", True)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad experiment config: {exc}")

    @staticmethod
    def load(path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        return ExperimentConfig.from_dict(json.loads(path.read_text()),
                                          base_dir=path.parent)

    def echo(self) -> dict:
        """JSON-serializable echo of the effective configuration."""
        return {
            "manifest": str(self.manifest_path),
            "experiment": self.experiment.value,
            "models": [vars(m) for m in self.models],
            "cv": [{"scheme": s.kind, "k": s.k, "seed": s.seed} if
                   s.kind == "stratified_kfold" else {"scheme": s.kind}
                   for s in self.cv],
            "selection": {
                "correlation_threshold": self.correlation_threshold,
                "rfe_k": self.rfe_k,
                "mode": self.selection_mode,
            },
            "seed": self.seed,
            "sample_rate_hz": self.sample_rate_hz,
        }


def class_names_for(experiment: Experiment) -> tuple:
    mapping = CLASS_MAPS[experiment]
    names = [None] * len(mapping)
    for cond, idx in mapping.items():
        names[idx] = cond.value
    return tuple(names)


def build_feature_matrix(manifest: Manifest, experiment: Experiment,
                         sample_rate_hz: float = 4.0) -> FeatureMatrix:
    """Extract the full catalog for every usable (subject, window) observation."""
    mapping = CLASS_MAPS[experiment]
    segments = segments_for_experiment(manifest, experiment, sample_rate_hz)
    rows = []
    subject_ids = []
    labels = []
    for seg in segments:
        if seg.label not in mapping:
            raise ConfigError(
                f"condition {seg.label.value!r} not valid for "
                f"{experiment.value} (subject {seg.subject_id})")
        fv = extract_all(seg)
        rows.append([np.nan if fv.values[n] is None else fv.values[n]
                     for n in FEATURE_CATALOG])
        subject_ids.append(seg.subject_id)
        labels.append(mapping[seg.label])
    if not rows:
        raise ConfigError("manifest yielded no observations")
    return FeatureMatrix(list(FEATURE_CATALOG), np.array(rows, dtype=float),
                         subject_ids, np.array(labels, dtype=int))


def boxplot_summary(matrix: FeatureMatrix, feature_names: list[str],
                    class_names: tuple) -> list[dict]:
    """Five-number summary per (feature, class) over observed values."""
    out = []
    for name in feature_names:
        j = matrix.feature_names.index(name)
        for c, cname in enumerate(class_names):
            col = matrix.values[matrix.labels == c, j]
            col = col[~np.isnan(col)]
            if col.size == 0:
                out.append({"feature": name, "class": cname})
                continue
            q25, q50, q75 = np.percentile(col, [25, 50, 75])
            out.append({
                "feature": name, "class": cname,
                "min": float(col.min()), "q25": float(q25),
                "median": float(q50), "q75": float(q75),
                "max": float(col.max()),
            })
    return out


def run_experiment(config: ExperimentConfig) -> dict:
    """Execute the configured run and return the full report structure."""
    manifest = load_manifest(config.manifest_path)
    matrix = build_feature_matrix(manifest, config.experiment,
                                  config.sample_rate_hz)
    names = class_names_for(config.experiment)
    n_classes = len(names)
    positive_class = 1 if n_classes == 2 else None

    selection_doc: dict
    if config.selection_mode == "global":
        sel_report = select.global_selection(matrix,
                                             config.correlation_threshold,
                                             config.rfe_k)
        working = matrix.restrict(sel_report.selected)
        selection_doc = {"mode": "global", **sel_report.to_dict()}
        selected = sel_report.selected
    else:
        working = matrix
        selection_doc = {"mode": "nested"}
        selected = list(matrix.feature_names)

    results: dict = {}
    for spec in config.models:
        per_scheme = {}
        for scheme in config.cv:
            report = learn.run_cv(
                working, spec, scheme,
                selection_mode=config.selection_mode,
                positive_class=positive_class,
                correlation_threshold=config.correlation_threshold,
                rfe_k=config.rfe_k,
                class_names=names,
            )
            per_scheme[scheme.display_name()] = report
        results[spec.display_name()] = per_scheme

    return {
        "config": config.echo(),
        "class_names": names,
        "n_observations": len(matrix.labels),
        "n_subjects": len(set(matrix.subject_ids)),
        "selection": selection_doc,
        "selected_features": selected,
        "matrix": matrix,
        "boxplot": boxplot_summary(matrix, selected, names),
        "results": results,
    }
