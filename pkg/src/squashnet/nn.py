"""Minimal dense-network engine.

Hand-derived backpropagation for one layer type, Adam with bias correction,
per-parameter freezing, and the benchmark activation set (relu / sigmoid /
tanh / squashing with a per-layer beta that may itself be trained).
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from .logic import SquashingParams, sigmoid as logistic, squash
from .metrics import ConfusionMatrix
from .report import EpochRecord, ExperimentReport

__all__ = [
    "ActivationKind",
    "RELU",
    "SIGMOID",
    "TANH",
    "LINEAR",
    "squashing_activation",
    "activation_from_name",
    "DenseLayer",
    "Network",
    "TrainConfig",
    "LayerGrads",
    "AdamState",
    "DivergenceError",
    "init_params",
    "build_network",
    "forward",
    "softmax_cross_entropy",
    "backward",
    "adam_step",
    "evaluate",
    "train",
]

_ACTIVATION_NAMES = ("linear", "relu", "sigmoid", "tanh", "squashing")

# independent seed streams so weight draws never alias batch shuffling
_INIT_STREAM = 0
_SHUFFLE_STREAM = 1


@dataclass(frozen=True)
class ActivationKind:
    """One of the benchmark activations; squashing carries its parameters."""

    name: str
    a: float = 0.5
    lam: float = 1.0
    beta0: float = 0.1
    trainable_beta: bool = False

    def __post_init__(self) -> None:
        if self.name not in _ACTIVATION_NAMES:
            raise ValueError(f"unknown activation {self.name!r}")
        if self.name == "squashing":
            SquashingParams(self.a, self.lam, self.beta0)  # reuse invariant checks

    @property
    def has_beta(self) -> bool:
        return self.name == "squashing"


RELU = ActivationKind("relu")
SIGMOID = ActivationKind("sigmoid")
TANH = ActivationKind("tanh")
LINEAR = ActivationKind("linear")


def squashing_activation(a: float = 0.5, lam: float = 1.0, beta0: float = 0.1,
                         trainable: bool = True) -> ActivationKind:
    return ActivationKind("squashing", a=a, lam=lam, beta0=beta0, trainable_beta=trainable)


def activation_from_name(name: str, beta0: float = 0.1) -> ActivationKind:
    """Resolve benchmark names; 'squashing-nl' is the static-beta variant."""
    if name == "squashing":
        return squashing_activation(beta0=beta0, trainable=True)
    if name == "squashing-nl":
        return squashing_activation(beta0=beta0, trainable=False)
    return ActivationKind(name)


class DenseLayer:
    """Fully-connected layer y = act(x @ W.T + b) with per-parameter freezing."""

    def __init__(self, weights, bias, activation: ActivationKind, *,
                 trainable_weights: bool = True, trainable_bias: bool = True,
                 beta: Optional[float] = None):
        self.weights = np.array(weights, dtype=float)
        self.bias = np.array(bias, dtype=float)
        if self.weights.ndim != 2:
            raise ValueError("weights must be a (fan_out, fan_in) matrix")
        if self.bias.shape != (self.weights.shape[0],):
            raise ValueError(
                f"bias shape {self.bias.shape} does not match fan_out {self.weights.shape[0]}"
            )
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("layer parameters must be finite")
        self.activation = activation
        self.trainable_weights = bool(trainable_weights)
        self.trainable_bias = bool(trainable_bias)
        if activation.has_beta:
            self.beta: Optional[float] = float(beta) if beta is not None else activation.beta0
            self.trainable_beta = activation.trainable_beta
        else:
            if beta is not None:
                raise ValueError("beta only applies to squashing layers")
            self.beta = None
            self.trainable_beta = False

    @property
    def fan_out(self) -> int:
        return self.weights.shape[0]

    @property
    def fan_in(self) -> int:
        return self.weights.shape[1]

    def squashing_params(self) -> SquashingParams:
        return SquashingParams(self.activation.a, self.activation.lam, self.beta)

    def activate(self, z: np.ndarray) -> np.ndarray:
        name = self.activation.name
        if name == "linear":
            return z
        if name == "relu":
            return np.maximum(z, 0.0)
        if name == "sigmoid":
            return logistic(z)
        if name == "tanh":
            return np.tanh(z)
        return squash(z, self.squashing_params())


class Network:
    """Ordered dense layers; fan_in of each layer equals fan_out of the previous."""

    def __init__(self, layers: Sequence[DenseLayer]):
        layers = list(layers)
        if not layers:
            raise ValueError("network needs at least one layer")
        for i, (prev, nxt) in enumerate(zip(layers, layers[1:])):
            if nxt.fan_in != prev.fan_out:
                raise ValueError(
                    f"layer {i + 1} fan_in {nxt.fan_in} != layer {i} fan_out {prev.fan_out}"
                )
        self.layers = layers

    @property
    def input_dim(self) -> int:
        return self.layers[0].fan_in

    @property
    def output_dim(self) -> int:
        return self.layers[-1].fan_out

    def forward(self, x):
        """Run the network; returns (outputs, cache) consumable by backward()."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.input_dim:
            raise ValueError(
                f"expected input of shape (batch, {self.input_dim}), got {x.shape}"
            )
        cache = []
        h = x
        for layer in self.layers:
            z = h @ layer.weights.T + layer.bias
            y = layer.activate(z)
            cache.append((h, z, y))
            h = y
        return h, cache

    def predict(self, x) -> np.ndarray:
        logits, _ = self.forward(x)
        return np.argmax(logits, axis=1)

    def beta_values(self) -> dict:
        """Current beta per squashing layer, keyed by 1-based layer index."""
        return {
            i + 1: layer.beta
            for i, layer in enumerate(self.layers)
            if layer.beta is not None
        }


def forward(net: Network, x):
    return net.forward(x)


@dataclass
class TrainConfig:
    """Optimization settings; batch_size 0 means full batch."""

    epochs: int
    learning_rate: float
    batch_size: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    init_scheme: str = "glorot_uniform"

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 0:
            raise ValueError("batch_size must be >= 0")

    def snapshot(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "adam": [self.adam_beta1, self.adam_beta2, self.adam_eps],
            "seed": self.seed,
            "init_scheme": self.init_scheme,
        }


def init_params(shape, scheme: str, rng: np.random.Generator) -> np.ndarray:
    """Seeded parameter init. 'glorot_uniform' scales by fan sizes."""
    shape = tuple(int(s) for s in shape)
    if scheme == "zeros":
        return np.zeros(shape)
    if scheme == "glorot_uniform":
        if len(shape) != 2:
            raise ValueError("glorot_uniform expects a (fan_out, fan_in) shape")
        fan_out, fan_in = shape
        limit = np.sqrt(6.0 / max(fan_in + fan_out, 1))
        return rng.uniform(-limit, limit, size=shape)
    raise ValueError(f"unknown init scheme {scheme!r}")


def build_network(
    layer_sizes: Sequence[int],
    activation: Union[ActivationKind, Sequence[ActivationKind]],
    seed: int = 0,
    init_scheme: str = "glorot_uniform",
) -> Network:
    """Dense network over the given size chain, e.g. [2, 8, 2].

    ``activation`` is either one kind shared by all layers or one per layer.
    The weight draw depends only on (seed, shapes, scheme), so two networks
    with different activations but the same sizes start bit-identical.
    """
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2:
        raise ValueError("need at least an input and an output size")
    n_layers = len(sizes) - 1
    if isinstance(activation, ActivationKind):
        kinds = [activation] * n_layers
    else:
        kinds = list(activation)
        if len(kinds) != n_layers:
            raise ValueError(f"expected {n_layers} activations, got {len(kinds)}")
    rng = np.random.default_rng([seed, _INIT_STREAM])
    layers = []
    for fan_in, fan_out, kind in zip(sizes, sizes[1:], kinds):
        weights = init_params((fan_out, fan_in), init_scheme, rng)
        layers.append(DenseLayer(weights, np.zeros(fan_out), kind))
    return Network(layers)


def _squash_backward(z, y, params: SquashingParams):
    """(dS/dz, dS/dbeta) sharing the two logistic evaluations; y = squash(z)."""
    u_lo = z - (params.a - params.lam / 2.0)
    u_hi = z - (params.a + params.lam / 2.0)
    s_lo = 0.5 * (1.0 + np.tanh(0.5 * params.beta * u_lo))
    s_hi = 0.5 * (1.0 + np.tanh(0.5 * params.beta * u_hi))
    dz = (s_lo - s_hi) / params.lam
    dbeta = ((u_lo * s_lo - u_hi * s_hi) / params.lam - y) / params.beta
    return dz, dbeta


def softmax_cross_entropy(logits, labels):
    """Mean cross-entropy over the batch plus d(loss)/d(logits)."""
    logits = np.asarray(logits, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or labels.ndim != 1 or logits.shape[0] != labels.shape[0]:
        raise ValueError("logits must be (batch, classes) and labels (batch,)")
    n, k = logits.shape
    if n == 0:
        raise ValueError("empty batch")
    if labels.min() < 0 or labels.max() >= k:
        raise ValueError(f"labels outside [0, {k})")
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    denom = exp.sum(axis=1)
    idx = np.arange(n)
    loss = float(np.mean(np.log(denom) - shifted[idx, labels]))
    dlogits = exp / denom[:, None]
    dlogits[idx, labels] -= 1.0
    dlogits /= n
    return loss, dlogits


@dataclass
class LayerGrads:
    weights: np.ndarray
    bias: np.ndarray
    beta: Optional[float] = None


def backward(net: Network, cache, dlogits) -> List[LayerGrads]:
    """Per-layer gradients (dW, db, dbeta) from a matching forward cache.

    Gradients are reported for frozen parameters too; the optimizer is the
    one that must not apply them.
    """
    if len(cache) != len(net.layers):
        raise ValueError("cache does not match network depth")
    g = np.asarray(dlogits, dtype=float)
    grads: List[Optional[LayerGrads]] = [None] * len(net.layers)
    for i in reversed(range(len(net.layers))):
        layer = net.layers[i]
        x, z, y = cache[i]
        name = layer.activation.name
        dbeta = None
        if name == "linear":
            dz = g
        elif name == "relu":
            dz = g * (z > 0.0)
        elif name == "sigmoid":
            dz = g * (y * (1.0 - y))
        elif name == "tanh":
            dz = g * (1.0 - y * y)
        else:
            dz_factor, dbeta_factor = _squash_backward(z, y, layer.squashing_params())
            dz = g * dz_factor
            dbeta = float(np.sum(g * dbeta_factor))
        grads[i] = LayerGrads(weights=dz.T @ x, bias=dz.sum(axis=0), beta=dbeta)
        if i > 0:
            g = dz @ layer.weights
    return grads  # type: ignore[return-value]


class AdamState:
    """First/second moment slots per parameter tensor plus the step counter."""

    def __init__(self, net: Network):
        self.t = 0
        self.slots = []
        for layer in net.layers:
            slot = {
                "weights": [np.zeros_like(layer.weights), np.zeros_like(layer.weights)],
                "bias": [np.zeros_like(layer.bias), np.zeros_like(layer.bias)],
            }
            if layer.beta is not None:
                slot["beta"] = [0.0, 0.0]
            self.slots.append(slot)


def _adam_update(value, grad, slot, t, lr, b1, b2, eps):
    slot[0] = b1 * slot[0] + (1.0 - b1) * grad
    slot[1] = b2 * slot[1] + (1.0 - b2) * grad * grad
    m_hat = slot[0] / (1.0 - b1 ** t)
    v_hat = slot[1] / (1.0 - b2 ** t)
    return value - lr * m_hat / (np.sqrt(v_hat) + eps)


def adam_step(net: Network, grads: Sequence[LayerGrads], state: AdamState,
              config: TrainConfig) -> None:
    """One bias-corrected Adam step in place; frozen parameters untouched."""
    state.t += 1
    args = (state.t, config.learning_rate, config.adam_beta1, config.adam_beta2,
            config.adam_eps)
    for layer, g, slot in zip(net.layers, grads, state.slots):
        if layer.trainable_weights:
            layer.weights = _adam_update(layer.weights, g.weights, slot["weights"], *args)
        if layer.trainable_bias:
            layer.bias = _adam_update(layer.bias, g.bias, slot["bias"], *args)
        if layer.beta is not None and layer.trainable_beta:
            layer.beta = float(_adam_update(layer.beta, g.beta, slot["beta"], *args))


def evaluate(net: Network, features, labels):
    """(mean loss, accuracy) on the given data without touching parameters."""
    logits, _ = net.forward(features)
    loss, _ = softmax_cross_entropy(logits, labels)
    accuracy = float(np.mean(np.argmax(logits, axis=1) == np.asarray(labels)))
    return loss, accuracy


class DivergenceError(RuntimeError):
    """Training loss left the finite range."""

    def __init__(self, message: str, epoch: int):
        super().__init__(message)
        self.epoch = epoch


def train(
    net: Network,
    features,
    labels,
    config: TrainConfig,
    test_features=None,
    test_labels=None,
    callback: Optional[Callable[[EpochRecord], None]] = None,
) -> ExperimentReport:
    """Train in place and return the per-epoch report.

    Deterministic for a fixed (seed, config, dataset): batch order comes from
    a dedicated seeded stream. Wall time per epoch is measured around the
    update loop only. A non-finite loss aborts with DivergenceError naming
    the epoch.
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    if features.ndim != 2 or features.shape[0] != labels.shape[0]:
        raise ValueError("features must be (n, d) with one label per row")
    n = features.shape[0]
    if n == 0:
        raise ValueError("empty training set")
    has_test = test_features is not None
    if has_test and test_labels is None:
        raise ValueError("test_labels required when test_features given")

    state = AdamState(net)
    shuffle_rng = np.random.default_rng([config.seed, _SHUFFLE_STREAM])
    records: List[EpochRecord] = []
    for epoch in range(1, config.epochs + 1):
        start = time.perf_counter()
        if config.batch_size and config.batch_size < n:
            order = shuffle_rng.permutation(n)
            batches = [
                order[s:s + config.batch_size] for s in range(0, n, config.batch_size)
            ]
        else:
            batches = [slice(None)]
        for batch in batches:
            logits, cache = net.forward(features[batch])
            loss, dlogits = softmax_cross_entropy(logits, labels[batch])
            if not np.isfinite(loss):
                raise DivergenceError(
                    f"training diverged: non-finite loss at epoch {epoch}", epoch
                )
            adam_step(net, backward(net, cache, dlogits), state, config)
        seconds = time.perf_counter() - start

        train_loss, train_acc = evaluate(net, features, labels)
        if not np.isfinite(train_loss):
            raise DivergenceError(
                f"training diverged: non-finite loss at epoch {epoch}", epoch
            )
        if has_test:
            test_loss, test_acc = evaluate(net, test_features, test_labels)
        else:
            test_loss, test_acc = float("nan"), float("nan")
        record = EpochRecord(
            epoch=epoch,
            train_loss=train_loss,
            test_loss=test_loss,
            train_acc=train_acc,
            test_acc=test_acc,
            seconds=seconds,
            betas=net.beta_values(),
        )
        records.append(record)
        if callback is not None:
            callback(record)

    k = net.output_dim
    cm_train = ConfusionMatrix.from_predictions(labels, net.predict(features), k)
    cm_test = None
    if has_test:
        cm_test = ConfusionMatrix.from_predictions(
            np.asarray(test_labels, dtype=np.int64), net.predict(test_features), k
        )
    return ExperimentReport(
        records=records,
        train_confusion=cm_train,
        test_confusion=cm_test,
        config=config.snapshot(),
    )
