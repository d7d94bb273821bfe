"""Shallow logic-gate networks: trainable inequality layer, frozen AND gate.

The gate layer is a perceptron with unit weights and bias -(k-1); under the
cutting (or squashing) activation that is exactly the k-ary conjunction, so
the trained first layer can be read back as a list of half-plane
inequalities.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from .logic import NilpotentOperatorSpec, cut
from .nn import (
    ActivationKind,
    DenseLayer,
    LINEAR,
    Network,
    init_params,
    squashing_activation,
)

__all__ = [
    "GateNetworkSpec",
    "build_gate_network",
    "AndTree",
    "flatten_and_tree",
    "eval_and_tree",
    "crisp_decision_region",
    "LineExplanation",
    "GateExplanation",
    "extract_line_explanations",
    "explain_gate_network",
]

_INIT_STREAM = 0

#: nested binary AND tree: a leaf input index or a pair of subtrees
AndTree = Union[int, tuple]


@dataclass(frozen=True)
class GateNetworkSpec:
    """Shape and initial sharpness of a k-line gate network."""

    k: int
    beta_layer1: float = 1.0
    beta_gate: float = 1.0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")


def build_gate_network(spec: GateNetworkSpec, seed: int = 0,
                       activation: str = "squashing") -> Network:
    """Two learnable-inequality layers plus a fixed head.

    Layer 1: k perceptrons on raw (x, y) coordinates, fully trainable.
    Layer 2: the AND gate, weights all 1 and bias -(k-1), both frozen;
    only its beta may train. The head maps the gate output o to the fixed
    2-class logits (1-o, o) and never trains.

    ``activation`` swaps the two squashing activations for relu / sigmoid /
    tanh, keeping the frozen gate parameters, for negative-control runs.
    """
    k = spec.k
    if activation == "squashing":
        act1 = squashing_activation(a=0.5, lam=1.0, beta0=spec.beta_layer1, trainable=True)
        act_gate = squashing_activation(a=0.5, lam=1.0, beta0=spec.beta_gate, trainable=True)
    else:
        act1 = act_gate = ActivationKind(activation)
    rng = np.random.default_rng([seed, _INIT_STREAM])
    layer1 = DenseLayer(init_params((k, 2), "glorot_uniform", rng), np.zeros(k), act1)
    gate = DenseLayer(
        np.ones((1, k)),
        np.array([-(k - 1.0)]),
        act_gate,
        trainable_weights=False,
        trainable_bias=False,
    )
    head = DenseLayer(
        np.array([[-1.0], [1.0]]),
        np.array([1.0, 0.0]),
        LINEAR,
        trainable_weights=False,
        trainable_bias=False,
    )
    return Network([layer1, gate, head])


def _collect_leaves(tree: AndTree, out: List[int]) -> None:
    if isinstance(tree, (int, np.integer)):
        out.append(int(tree))
    elif isinstance(tree, tuple) and len(tree) == 2:
        _collect_leaves(tree[0], out)
        _collect_leaves(tree[1], out)
    else:
        raise ValueError(f"tree nodes must be leaf indices or pairs, got {tree!r}")


def eval_and_tree(tree: AndTree, values) -> float:
    """Crisp evaluation of a nested tree of two-input conjunctions."""
    values = np.asarray(values, dtype=float)
    if isinstance(tree, (int, np.integer)):
        return float(values[int(tree)])
    left = eval_and_tree(tree[0], values)
    right = eval_and_tree(tree[1], values)
    return float(cut(left + right - 1.0))


def flatten_and_tree(tree: AndTree) -> NilpotentOperatorSpec:
    """Collapse nested two-input ANDs into one gate with adapted bias.

    The flattened gate has unit weights and bias -(k-1) over the k distinct
    leaf inputs; on Boolean inputs it matches the nested tree exactly.
    """
    leaves: List[int] = []
    _collect_leaves(tree, leaves)
    if len(set(leaves)) != len(leaves):
        raise ValueError("tree leaves must be distinct inputs")
    k = len(leaves)
    return NilpotentOperatorSpec(weights=(1.0,) * k, bias=-(k - 1.0))


def crisp_decision_region(net: Network) -> Callable[[np.ndarray], np.ndarray]:
    """Point-wise classifier with every squashing activation replaced by cut.

    A layer whose beta went negative uses the decreasing counterpart 1 - cut,
    so a negative-beta gate outputs the complement of the AND of its inputs.
    Returns a predicate mapping (n, 2) points to 0/1 labels.
    """
    layers = list(net.layers)

    def predicate(points: np.ndarray) -> np.ndarray:
        h = np.atleast_2d(np.asarray(points, dtype=float))
        for layer in layers:
            z = h @ layer.weights.T + layer.bias
            if layer.activation.name == "squashing":
                h = cut(z, layer.activation.a, layer.activation.lam)
                if layer.beta < 0:
                    h = 1.0 - h
            elif layer.activation.name == "linear":
                h = z
            else:
                raise ValueError(
                    f"crisp region undefined for activation {layer.activation.name!r}"
                )
        return np.argmax(h, axis=1).astype(np.int64)

    return predicate


@dataclass(frozen=True)
class LineExplanation:
    """One learned inequality `wx*x + wy*y + bias (sense) 0`."""

    wx: float
    wy: float
    bias: float
    sense: str  # ">=" when the unit fires above the line, "<=" below

    @property
    def vacuous(self) -> bool:
        """True when the row carries no direction (an always-soft condition)."""
        return abs(self.wx) < 1e-9 and abs(self.wy) < 1e-9

    def satisfied(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        value = self.wx * points[..., 0] + self.wy * points[..., 1] + self.bias
        return value >= 0.0 if self.sense == ">=" else value <= 0.0

    def text(self) -> str:
        if self.vacuous:
            return "vacuous condition (zero-weight row)"
        return f"{self.wx:.6g}*x + {self.wy:.6g}*y + {self.bias:.6g} {self.sense} 0"

    def to_dict(self) -> dict:
        return {
            "wx": self.wx,
            "wy": self.wy,
            "bias": self.bias,
            "sense": self.sense,
            "vacuous": self.vacuous,
            "text": self.text(),
        }


@dataclass
class GateExplanation:
    """All learned inequalities plus the gate's crisp semantics."""

    lines: List[LineExplanation]
    negated: bool  # True when the gate computes the complement of the AND

    def predict(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        inside = np.ones(points.shape[0], dtype=bool)
        for line in self.lines:
            if not line.vacuous:
                inside &= line.satisfied(points)
        if self.negated:
            inside = ~inside
        return inside.astype(np.int64)

    def to_text(self) -> str:
        head = "region = complement of AND(" if self.negated else "region = AND("
        body = ",\n    ".join(line.text() for line in self.lines)
        return f"{head}\n    {body}\n)"

    def to_json_dict(self) -> dict:
        return {
            "gate": "NOT AND" if self.negated else "AND",
            "lines": [line.to_dict() for line in self.lines],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


def explain_gate_network(net: Network) -> GateExplanation:
    """Read the trained first layer back as half-plane inequalities."""
    if len(net.layers) < 2:
        raise ValueError("expected a gate network with at least two layers")
    first, gate = net.layers[0], net.layers[1]
    for layer in (first, gate):
        if layer.activation.name != "squashing":
            raise ValueError("explanations are defined for squashing gate networks")
    sense = ">=" if first.beta >= 0 else "<="
    lines = [
        LineExplanation(float(row[0]), float(row[1]), float(bias), sense)
        for row, bias in zip(first.weights, first.bias)
    ]
    return GateExplanation(lines=lines, negated=bool(gate.beta < 0))


def extract_line_explanations(net: Network) -> List[LineExplanation]:
    return explain_gate_network(net).lines
