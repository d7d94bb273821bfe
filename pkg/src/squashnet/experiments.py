"""Experiment protocols: toy replications, activation benchmark, gate runs."""
from __future__ import annotations

from dataclasses import dataclass, asdict, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .datasets import (
    FOUR_LINE_DEFAULT,
    TWO_LINE_DEFAULT,
    LabeledDataset,
    gen_circle,
    gen_gaussian,
    gen_halfplane_region,
    gen_spiral,
    load_idx,
    split,
    stratified_subset,
)
from .gates import GateExplanation, GateNetworkSpec, build_gate_network, explain_gate_network
from .nn import LINEAR, TrainConfig, activation_from_name, build_network, squashing_activation, train
from .report import ExperimentReport

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "TOY_PROTOCOLS",
    "GATE_PROTOCOLS",
    "GATE_LEARNING_RATE",
    "DEFAULT_BENCHMARK_ACTIVATIONS",
    "FASHION_FILES",
    "GateRunResult",
    "run_toy_experiment",
    "run_gate_experiment",
    "run_activation_benchmark",
    "load_benchmark_data",
]


class ConfigError(ValueError):
    """Unusable experiment configuration."""


# Architecture, schedule and initial sharpness for the three toy replications.
TOY_PROTOCOLS = {
    "gaussian": {"layer_sizes": [2, 2], "epochs": 10, "learning_rate": 0.1, "beta0": 0.1},
    "circle": {"layer_sizes": [2, 8, 2], "epochs": 150, "learning_rate": 0.1, "beta0": 1e-6},
    "spiral": {"layer_sizes": [2, 64, 128, 2], "epochs": 2000, "learning_rate": 0.001, "beta0": 0.1},
}

GATE_PROTOCOLS = {
    "two_line": {"k": 2, "epochs": 750, "lines": TWO_LINE_DEFAULT},
    "four_line": {"k": 4, "epochs": 4000, "lines": FOUR_LINE_DEFAULT},
}
GATE_LEARNING_RATE = 0.02

DEFAULT_BENCHMARK_ACTIVATIONS = ("relu", "sigmoid", "tanh", "squashing-nl", "squashing")

FASHION_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}

_EXPERIMENT_IDS = (
    "toy:gaussian", "toy:circle", "toy:spiral",
    "gates:two_line", "gates:four_line",
    "bench",
)


@dataclass
class ExperimentConfig:
    """Flat, JSON-serializable experiment settings; None means protocol default."""

    experiment: str = ""
    seed: int = 0
    out_dir: str = "runs"
    epochs: Optional[int] = None
    learning_rate: Optional[float] = None
    batch_size: Optional[int] = None
    beta0: Optional[float] = None
    beta_layer1: Optional[float] = None
    beta_gate: Optional[float] = None
    n_per_class: Optional[int] = None
    n_points: Optional[int] = None
    noise: Optional[float] = None
    turns: Optional[float] = None
    test_fraction: Optional[float] = None
    activation: Optional[str] = None
    activations: Optional[List[str]] = None
    data_dir: Optional[str] = None
    train_limit: Optional[int] = None
    test_limit: Optional[int] = None
    formats: Optional[List[str]] = None

    def validate(self) -> "ExperimentConfig":
        if self.experiment and self.experiment not in _EXPERIMENT_IDS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; expected one of {_EXPERIMENT_IDS}"
            )
        for name in ("epochs", "batch_size", "n_per_class", "n_points",
                     "train_limit", "test_limit"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigError(f"{name} must be nonnegative, got {value}")
        for name in ("learning_rate", "turns"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.test_fraction is not None and not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must be in (0, 1)")
        return self

    def to_json_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            config = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        return config.validate()


def _pick(value, default):
    return default if value is None else value


def _toy_dataset(which: str, n_per_class: int, seed: int,
                 noise: Optional[float], turns: Optional[float]) -> LabeledDataset:
    if which == "gaussian":
        return gen_gaussian(n_per_class, seed)
    if which == "circle":
        return gen_circle(n_per_class, seed)
    if which == "spiral":
        return gen_spiral(
            n_per_class,
            turns=_pick(turns, 1.75),
            noise=_pick(noise, 0.1),
            seed=seed,
        )
    raise ConfigError(f"unknown toy experiment {which!r}")


def run_toy_experiment(
    which: str,
    seed: int = 0,
    *,
    epochs: Optional[int] = None,
    learning_rate: Optional[float] = None,
    batch_size: Optional[int] = None,
    beta0: Optional[float] = None,
    n_per_class: int = 250,
    test_fraction: float = 0.2,
    noise: Optional[float] = None,
    turns: Optional[float] = None,
    callback=None,
) -> ExperimentReport:
    """One toy replication run: squashing net with trainable per-layer beta."""
    if which not in TOY_PROTOCOLS:
        raise ConfigError(f"unknown toy experiment {which!r}")
    proto = TOY_PROTOCOLS[which]
    epochs = _pick(epochs, proto["epochs"])
    learning_rate = _pick(learning_rate, proto["learning_rate"])
    beta0 = _pick(beta0, proto["beta0"])
    batch_size = _pick(batch_size, 0)

    dataset = _toy_dataset(which, n_per_class, seed, noise, turns)
    train_data, test_data = split(dataset, test_fraction, seed)
    activation = squashing_activation(beta0=beta0, trainable=True)
    net = build_network(proto["layer_sizes"], activation, seed=seed)
    config = TrainConfig(
        epochs=epochs, learning_rate=learning_rate, batch_size=batch_size, seed=seed
    )
    report = train(
        net, train_data.features, train_data.labels, config,
        test_data.features, test_data.labels, callback,
    )
    report.config = {
        "experiment": f"toy:{which}",
        "layer_sizes": list(proto["layer_sizes"]),
        "activation": "squashing",
        "beta0": beta0,
        "test_fraction": test_fraction,
        "dataset": dataset.provenance,
        **config.snapshot(),
    }
    return report


@dataclass
class GateRunResult:
    """Gate experiment outcome: report plus the extracted explanations."""

    report: ExperimentReport
    explanation: Optional[GateExplanation]
    train_data: LabeledDataset
    test_data: LabeledDataset


def run_gate_experiment(
    which: str,
    seed: int = 0,
    *,
    activation: str = "squashing",
    epochs: Optional[int] = None,
    learning_rate: Optional[float] = None,
    beta_layer1: Optional[float] = None,
    beta_gate: Optional[float] = None,
    n_points: int = 500,
    test_fraction: float = 0.2,
    callback=None,
) -> GateRunResult:
    """Train a k-line gate network on its half-plane region dataset.

    ``activation`` other than "squashing" runs the same frozen-gate
    architecture as a negative control; explanations are only extracted for
    squashing runs.
    """
    if which not in GATE_PROTOCOLS:
        raise ConfigError(f"unknown gate experiment {which!r}")
    proto = GATE_PROTOCOLS[which]
    epochs = _pick(epochs, proto["epochs"])
    learning_rate = _pick(learning_rate, GATE_LEARNING_RATE)
    spec = GateNetworkSpec(
        k=proto["k"],
        beta_layer1=_pick(beta_layer1, 1.0),
        beta_gate=_pick(beta_gate, 1.0),
    )
    dataset = gen_halfplane_region(proto["lines"], n=n_points, seed=seed)
    train_data, test_data = split(dataset, test_fraction, seed)
    net = build_gate_network(spec, seed=seed, activation=activation)
    config = TrainConfig(epochs=epochs, learning_rate=learning_rate, batch_size=0, seed=seed)
    report = train(
        net, train_data.features, train_data.labels, config,
        test_data.features, test_data.labels, callback,
    )
    explanation = explain_gate_network(net) if activation == "squashing" else None
    report.config = {
        "experiment": f"gates:{which}",
        "k": spec.k,
        "activation": activation,
        "beta_layer1": spec.beta_layer1,
        "beta_gate": spec.beta_gate,
        "test_fraction": test_fraction,
        "dataset": dataset.provenance,
        **config.snapshot(),
    }
    return GateRunResult(report, explanation, train_data, test_data)


def run_activation_benchmark(
    train_data: LabeledDataset,
    test_data: LabeledDataset,
    *,
    activations: Sequence[str] = DEFAULT_BENCHMARK_ACTIVATIONS,
    hidden: Sequence[int] = (128,),
    epochs: int = 10,
    learning_rate: float = 1e-4,
    batch_size: int = 32,
    seed: int = 0,
    beta0: float = 0.1,
    callback=None,
) -> Dict[str, ExperimentReport]:
    """Run the same protocol once per activation and collect aligned reports.

    Every run sees bit-identical data order and identically seeded weight
    initialization (the draw depends only on seed and shapes), so curves are
    directly comparable.
    """
    if len(activations) < 2:
        raise ConfigError("benchmark needs at least two activations")
    sizes = [train_data.dim, *hidden, train_data.n_classes]
    reports: Dict[str, ExperimentReport] = {}
    for name in activations:
        kind = activation_from_name(name, beta0=beta0)
        per_layer = [kind] * (len(sizes) - 2) + [LINEAR]
        net = build_network(sizes, per_layer, seed=seed)
        config = TrainConfig(
            epochs=epochs, learning_rate=learning_rate, batch_size=batch_size, seed=seed
        )
        report = train(
            net, train_data.features, train_data.labels, config,
            test_data.features, test_data.labels, callback,
        )
        report.config = {
            "experiment": "bench",
            "activation": name,
            "layer_sizes": sizes,
            "beta0": beta0,
            "dataset": train_data.provenance,
            **config.snapshot(),
        }
        reports[name] = report
    return reports


def _resolve_idx(data_dir: Path, filename: str) -> Path:
    for candidate in (data_dir / filename, data_dir / (filename + ".gz")):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"missing IDX file {filename}[.gz] under {data_dir}")


def load_benchmark_data(
    data_dir,
    train_limit: int = 6000,
    test_limit: int = 1000,
    seed: int = 0,
):
    """Load the IDX train/test pairs and take stratified subsets."""
    data_dir = Path(data_dir)
    train_full = load_idx(
        _resolve_idx(data_dir, FASHION_FILES["train_images"]),
        _resolve_idx(data_dir, FASHION_FILES["train_labels"]),
    )
    test_full = load_idx(
        _resolve_idx(data_dir, FASHION_FILES["test_images"]),
        _resolve_idx(data_dir, FASHION_FILES["test_labels"]),
    )
    train_data = stratified_subset(train_full, train_limit, seed) if train_limit else train_full
    test_data = stratified_subset(test_full, test_limit, seed) if test_limit else test_full
    return train_data, test_data
