"""Experiment reports: per-epoch records plus CSV / JSON / SVG emission."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional

from .metrics import ConfusionMatrix
from .svgplot import line_plot

__all__ = ["EpochRecord", "ExperimentReport", "emit_report", "CSV_BASE_COLUMNS"]

CSV_BASE_COLUMNS = ("epoch", "train_loss", "test_loss", "train_acc", "test_acc", "seconds")


@dataclass
class EpochRecord:
    """Metrics captured at the end of one training epoch."""

    epoch: int
    train_loss: float
    test_loss: float
    train_acc: float
    test_acc: float
    seconds: float
    betas: dict = field(default_factory=dict)  # 1-based layer index -> beta value

    def to_json_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "train_loss": self.train_loss,
            "test_loss": self.test_loss,
            "train_acc": self.train_acc,
            "test_acc": self.test_acc,
            "seconds": self.seconds,
            "betas": {str(k): v for k, v in self.betas.items()},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "EpochRecord":
        return cls(
            epoch=int(data["epoch"]),
            train_loss=float(data["train_loss"]),
            test_loss=float(data["test_loss"]),
            train_acc=float(data["train_acc"]),
            test_acc=float(data["test_acc"]),
            seconds=float(data["seconds"]),
            betas={int(k): float(v) for k, v in data.get("betas", {}).items()},
        )


@dataclass
class ExperimentReport:
    """Full outcome of one training run plus a snapshot of its configuration."""

    records: List[EpochRecord]
    train_confusion: Optional[ConfusionMatrix]
    test_confusion: Optional[ConfusionMatrix]
    config: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for rec in self.records:
            for value in (rec.train_acc, rec.test_acc):
                if math.isfinite(value) and not 0.0 <= value <= 1.0:
                    raise ValueError(f"accuracy {value} outside [0, 1]")

    @property
    def epochs(self) -> int:
        return len(self.records)

    @property
    def final(self) -> EpochRecord:
        if not self.records:
            raise ValueError("report has no epoch records")
        return self.records[-1]

    def beta_layers(self) -> List[int]:
        layers = set()
        for rec in self.records:
            layers.update(rec.betas)
        return sorted(layers)

    def csv_columns(self) -> List[str]:
        return list(CSV_BASE_COLUMNS) + [f"beta_layer{k}" for k in self.beta_layers()]

    def to_csv(self) -> str:
        beta_keys = self.beta_layers()
        lines = [",".join(self.csv_columns())]
        for rec in self.records:
            cells = [
                str(rec.epoch),
                repr(float(rec.train_loss)),
                repr(float(rec.test_loss)),
                repr(float(rec.train_acc)),
                repr(float(rec.test_acc)),
                repr(float(rec.seconds)),
            ]
            cells += [repr(float(rec.betas[k])) for k in beta_keys]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "records": [rec.to_json_dict() for rec in self.records],
            "train_confusion": self.train_confusion.to_lists() if self.train_confusion else None,
            "test_confusion": self.test_confusion.to_lists() if self.test_confusion else None,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentReport":
        def matrix(rows):
            return ConfusionMatrix(rows) if rows is not None else None

        return cls(
            records=[EpochRecord.from_json_dict(r) for r in data["records"]],
            train_confusion=matrix(data.get("train_confusion")),
            test_confusion=matrix(data.get("test_confusion")),
            config=dict(data.get("config", {})),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        return cls.from_json_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "ExperimentReport":
        return cls.from_json(Path(path).read_text())

    def plot_svgs(self) -> dict:
        """SVG documents keyed by metric name (accuracy, loss, time, beta)."""
        epochs = [rec.epoch for rec in self.records]
        svgs = {
            "accuracy": line_plot(
                [
                    ("train accuracy", epochs, [r.train_acc for r in self.records]),
                    ("test accuracy", epochs, [r.test_acc for r in self.records]),
                ],
                title="Accuracy per epoch", xlabel="epoch", ylabel="accuracy",
            ),
            "loss": line_plot(
                [
                    ("train loss", epochs, [r.train_loss for r in self.records]),
                    ("test loss", epochs, [r.test_loss for r in self.records]),
                ],
                title="Loss per epoch", xlabel="epoch", ylabel="cross-entropy",
            ),
            "time": line_plot(
                [("seconds", epochs, [r.seconds for r in self.records])],
                title="Time per epoch", xlabel="epoch", ylabel="seconds",
            ),
        }
        beta_keys = self.beta_layers()
        if beta_keys:
            svgs["beta"] = line_plot(
                [
                    (f"beta_layer{k}", epochs, [r.betas.get(k, math.nan) for r in self.records])
                    for k in beta_keys
                ],
                title="Beta per epoch", xlabel="epoch", ylabel="beta",
            )
        return svgs


def emit_report(report: ExperimentReport, out_dir, basename: str,
                formats: Iterable[str] = ("csv", "json", "svg")) -> List[Path]:
    """Write the report in the requested formats; returns the created paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    for fmt in formats:
        if fmt == "csv":
            path = out_dir / f"{basename}.csv"
            path.write_text(report.to_csv())
            written.append(path)
        elif fmt == "json":
            path = out_dir / f"{basename}.json"
            path.write_text(report.to_json())
            written.append(path)
        elif fmt == "svg":
            for name, svg in report.plot_svgs().items():
                path = out_dir / f"{basename}_{name}.svg"
                path.write_text(svg)
                written.append(path)
        else:
            raise ValueError(f"unknown report format {fmt!r}")
    return written
