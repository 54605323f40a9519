"""Report serialization: JSON/CSV artifacts plus rendered figures.

All delimited output uses repr() for floats so reruns are byte-identical.
Artifacts are staged in a temporary sibling directory and moved into place
in one rename, so an interrupted run never leaves partial output.
"""
from __future__ import annotations

import json
import shutil
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .features import FEATURE_CATALOG
from .learn import CvReport
from .select import FeatureMatrix


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and np.isnan(v)):
        return ""
    return repr(float(v))


def features_csv(matrix: FeatureMatrix, class_names: tuple) -> str:
    lines = ["subject_id,label," + ",".join(matrix.feature_names)]
    for sid, label, row in zip(matrix.subject_ids, matrix.labels,
                               matrix.values):
        cells = [sid, class_names[label]] + [_fmt(v) for v in row]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def confusion_csv(cm) -> str:
    header = "," + ",".join(cm.class_names)
    lines = [header]
    for name, row in zip(cm.class_names, cm.counts):
        lines.append(name + "," + ",".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def boxplot_csv(summary: list[dict]) -> str:
    cols = ["feature", "class", "min", "q25", "median", "q75", "max"]
    lines = [",".join(cols)]
    for row in summary:
        lines.append(",".join(
            str(row[c]) if c in ("feature", "class") else _fmt(row.get(c))
            for c in cols))
    return "\n".join(lines) + "\n"


def cv_report_doc(report: CvReport) -> dict:
    return {
        "aggregate": report.aggregate,
        "pooled_confusion": {
            "class_names": list(report.pooled_confusion.class_names),
            "counts": report.pooled_confusion.counts.tolist(),
        },
        "folds": [
            {
                "test_subjects": f.test_subjects,
                "y_true": f.y_true,
                "y_pred": f.y_pred,
                "metrics": f.metrics,
            }
            for f in report.folds
        ],
    }


def report_json(run: dict) -> str:
    doc = {
        "config": run["config"],
        "class_names": list(run["class_names"]),
        "n_observations": run["n_observations"],
        "n_subjects": run["n_subjects"],
        "selection": run["selection"],
        "selected_features": run["selected_features"],
        "results": {
            model: {scheme: cv_report_doc(rep)
                    for scheme, rep in per_scheme.items()}
            for model, per_scheme in run["results"].items()
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _render_boxplots(run: dict, out: Path) -> None:
    matrix: FeatureMatrix = run["matrix"]
    names = run["class_names"]
    for feature in run["selected_features"]:
        j = matrix.feature_names.index(feature)
        groups = []
        for c in range(len(names)):
            col = matrix.values[matrix.labels == c, j]
            groups.append(col[~np.isnan(col)])
        fig, ax = plt.subplots(figsize=(4, 3))
        ax.boxplot(groups, tick_labels=list(names))
        ax.set_title(feature)
        ax.set_ylabel("value")
        fig.tight_layout()
        fig.savefig(out / f"boxplot_{feature}.png", dpi=120)
        plt.close(fig)


def _render_confusions(run: dict, out: Path) -> None:
    for model, per_scheme in run["results"].items():
        for scheme, rep in per_scheme.items():
            cm = rep.pooled_confusion
            fig, ax = plt.subplots(figsize=(4, 3.5))
            im = ax.imshow(cm.counts, cmap="Blues")
            ax.set_xticks(range(len(cm.class_names)),
                          labels=cm.class_names, rotation=45)
            ax.set_yticks(range(len(cm.class_names)), labels=cm.class_names)
            ax.set_xlabel("predicted")
            ax.set_ylabel("true")
            ax.set_title(f"{model} / {scheme}")
            vmax = cm.counts.max() if cm.counts.max() > 0 else 1
            for (r, c), v in np.ndenumerate(cm.counts):
                ax.text(c, r, str(int(v)), ha="center", va="center",
                        color="white" if v > vmax / 2 else "black")
            fig.colorbar(im, ax=ax, shrink=0.8)
            fig.tight_layout()
            fig.savefig(out / f"confusion_{model}_{scheme}.png", dpi=120)
            plt.close(fig)


def write_run_outputs(run: dict, output_dir: Path, plots: bool = True) -> None:
    """Stage every artifact, then atomically move the directory into place."""
    output_dir = Path(output_dir)
    tmp = output_dir.with_name(output_dir.name + ".tmp")
    if tmp.exists():
        shutil.rmtree(tmp)
    tmp.mkdir(parents=True)
    try:
        (tmp / "report.json").write_text(report_json(run))
        (tmp / "features.csv").write_text(
            features_csv(run["matrix"], run["class_names"]))
        (tmp / "boxplot_data.csv").write_text(boxplot_csv(run["boxplot"]))
        for model, per_scheme in run["results"].items():
            for scheme, rep in per_scheme.items():
                (tmp / f"confusion_{model}_{scheme}.csv").write_text(
                    confusion_csv(rep.pooled_confusion))
        if plots:
            _render_boxplots(run, tmp)
            _render_confusions(run, tmp)
    except Exception:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    if output_dir.exists():
        shutil.rmtree(output_dir)
    tmp.rename(output_dir)


def write_features_output(matrix: FeatureMatrix, class_names: tuple,
                          path: Path) -> None:
    """Atomic single-file write of the feature CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(features_csv(matrix, class_names))
    tmp.replace(path)
