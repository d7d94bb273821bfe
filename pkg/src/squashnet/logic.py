"""Continuous-logic math kernels.

Cutting and squashing functions, their derivatives, generator functions,
and the bounded (nilpotent) operator family built from clamped affine
combinations. Everything here is a pure function of its arguments and safe
to call concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

__all__ = [
    "SquashingParams",
    "GeneratorFn",
    "IDENTITY",
    "NilpotentOperatorSpec",
    "OPERATOR_CONSTANTS",
    "cut",
    "sigmoid",
    "squash",
    "squash_dx",
    "squash_dbeta",
    "general_operator",
    "weighted_operator",
    "named_operator",
    "conjunction",
    "disjunction",
    "implication",
    "arithmetic_mean",
    "preference",
    "aggregative",
]

Floats = Union[float, np.ndarray]


@dataclass(frozen=True)
class SquashingParams:
    """Parameters of one squashing function.

    ``a`` is the center of the transition region, ``lam`` its width and
    ``beta`` its sharpness. A negative ``beta`` flips the function into its
    decreasing counterpart; ``beta`` must be nonzero and ``lam`` positive.
    """

    a: float = 0.5
    lam: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.beta != 0:
            raise ValueError("beta must be nonzero")


def cut(x: Floats, a: float = 0.5, lam: float = 1.0) -> Floats:
    """Generalized cutting function: the [0, 1]-clamped ramp through ``a``.

    Exactly 0 below ``a - lam/2`` and exactly 1 above ``a + lam/2``, linear
    in between. With the default parameters this is the plain clamp of x to
    the unit interval.
    """
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    x = np.asarray(x, dtype=float)
    return np.clip((x - (a - lam / 2.0)) / lam, 0.0, 1.0)


def sigmoid(x: Floats, d: float = 0.0, beta: float = 1.0) -> Floats:
    """Logistic function centered at ``d`` with slope parameter ``beta``.

    Evaluated through tanh so large |beta * (x - d)| saturates instead of
    overflowing.
    """
    z = beta * (np.asarray(x, dtype=float) - d)
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def squash(x: Floats, params: SquashingParams) -> Floats:
    """Smooth, parametric approximation of :func:`cut`.

    Computed as a difference of softplus terms (via ``logaddexp``) so the
    value stays finite for arbitrarily large ``beta * x``. Increasing in x
    for positive ``beta``, decreasing for negative, and converging to the
    cutting function as ``beta`` grows.
    """
    x = np.asarray(x, dtype=float)
    lo = params.beta * (x - (params.a - params.lam / 2.0))
    hi = params.beta * (x - (params.a + params.lam / 2.0))
    return (np.logaddexp(0.0, lo) - np.logaddexp(0.0, hi)) / (params.lam * params.beta)


def squash_dx(x: Floats, params: SquashingParams) -> Floats:
    """Slope of the squashing function: a scaled difference of logistics."""
    lo = params.a - params.lam / 2.0
    hi = params.a + params.lam / 2.0
    return (sigmoid(x, lo, params.beta) - sigmoid(x, hi, params.beta)) / params.lam


def squash_dbeta(x: Floats, params: SquashingParams) -> Floats:
    """Sensitivity of the squashing value to the sharpness parameter.

    Derived by differentiating the closed form; zero at the center ``a``
    and signed like ``x - a`` for positive ``beta`` (sharpening pushes
    values toward the step).
    """
    x = np.asarray(x, dtype=float)
    u_lo = x - (params.a - params.lam / 2.0)
    u_hi = x - (params.a + params.lam / 2.0)
    s_lo = sigmoid(x, params.a - params.lam / 2.0, params.beta)
    s_hi = sigmoid(x, params.a + params.lam / 2.0, params.beta)
    value = squash(x, params)
    return ((u_lo * s_lo - u_hi * s_hi) / params.lam - value) / params.beta


@dataclass(frozen=True)
class GeneratorFn:
    """Increasing bijection of [0, 1] through which operator sums are taken."""

    name: str
    forward: Callable[[Floats], Floats]
    inverse: Callable[[Floats], Floats]

    def validate(self, n_grid: int = 101, tol: float = 1e-12) -> None:
        """Check bijection requirements on a sampled grid; raise if violated."""
        grid = np.linspace(0.0, 1.0, n_grid)
        fwd = np.asarray(self.forward(grid), dtype=float)
        if abs(float(fwd[0])) > tol or abs(float(fwd[-1]) - 1.0) > tol:
            raise ValueError(f"generator {self.name!r} must map 0 to 0 and 1 to 1")
        if not np.all(np.diff(fwd) > 0):
            raise ValueError(f"generator {self.name!r} is not strictly increasing")
        back = np.asarray(self.inverse(fwd), dtype=float)
        if float(np.max(np.abs(back - grid))) > tol:
            raise ValueError(f"generator {self.name!r}: inverse does not undo forward")


IDENTITY = GeneratorFn("identity", lambda t: t, lambda t: t)


@dataclass(frozen=True)
class NilpotentOperatorSpec:
    """Weights and bias of a threshold-based operator (a logic perceptron)."""

    weights: tuple
    bias: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.weights) == 0:
            raise ValueError("weights must be nonempty")

    @property
    def arity(self) -> int:
        return len(self.weights)

    @classmethod
    def from_thresholds(
        cls,
        weights: Sequence[float],
        nu: float,
        nu_inputs: Sequence[float],
        f: GeneratorFn = IDENTITY,
    ) -> "NilpotentOperatorSpec":
        """Build from a decision level ``nu`` and per-input thresholds.

        The bias is ``f(nu) - sum_i w_i * f(nu_i)``.
        """
        weights = tuple(float(w) for w in weights)
        nu_inputs = tuple(float(v) for v in nu_inputs)
        if len(nu_inputs) != len(weights):
            raise ValueError("need one threshold per weight")
        bias = float(f.forward(nu)) - sum(
            w * float(f.forward(v)) for w, v in zip(weights, nu_inputs)
        )
        return cls(weights, bias)


def _require_unit_interval(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise ValueError(f"{what} must lie in [0, 1]")
    return arr


def general_operator(xs: Sequence[float], nu: float, f: GeneratorFn = IDENTITY) -> float:
    """Single-parameter operator family over unit-interval truth values.

    Conjunctive at ``nu=1``, disjunctive at ``nu=0``, self-dual at
    ``nu = f^{-1}(1/2)``. The clamped sum is taken in generator space and
    mapped back through the generator's inverse.
    """
    xs = _require_unit_interval(xs, "inputs")
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("inputs must be a nonempty 1-D vector")
    _require_unit_interval(nu, "nu")
    total = float(np.sum(f.forward(xs))) - (xs.size - 1) * float(f.forward(nu))
    return float(f.inverse(cut(total)))


def weighted_operator(
    xs,
    spec: NilpotentOperatorSpec,
    f: GeneratorFn = IDENTITY,
    soft: Optional[SquashingParams] = None,
) -> Floats:
    """Clamped weighted affine combination in generator space.

    Crisp evaluation clips with :func:`cut`; passing ``soft`` squashing
    parameters clips smoothly instead, which makes the operator
    differentiable everywhere. Accepts a single input vector or a batch
    with vectors in the last axis.
    """
    xs = _require_unit_interval(xs, "inputs")
    weights = np.asarray(spec.weights, dtype=float)
    if xs.ndim == 0 or xs.shape[-1] != spec.arity:
        raise ValueError(
            f"operator of arity {spec.arity} applied to input of shape {xs.shape}"
        )
    pre = f.forward(xs) @ weights + spec.bias
    clipped = cut(pre) if soft is None else squash(pre, soft)
    out = f.inverse(clipped)
    return float(out) if np.ndim(out) == 0 else out


#: (w1, w2, bias) for the standard two-input operators under any generator.
OPERATOR_CONSTANTS = {
    "disjunction": (1.0, 1.0, 0.0),
    "conjunction": (1.0, 1.0, -1.0),
    "implication": (-1.0, 1.0, 1.0),
    "mean": (0.5, 0.5, 0.0),
    "preference": (-0.5, 0.5, 0.5),
    "aggregative": (1.0, 1.0, -0.5),
}


def named_operator(
    kind: str,
    x: Floats,
    y: Floats,
    soft: Optional[SquashingParams] = None,
    f: GeneratorFn = IDENTITY,
) -> Floats:
    """Two-input operator from the standard constant table, vectorized in x, y."""
    try:
        w1, w2, bias = OPERATOR_CONSTANTS[kind]
    except KeyError:
        raise ValueError(
            f"unknown operator {kind!r}; expected one of {sorted(OPERATOR_CONSTANTS)}"
        ) from None
    x = _require_unit_interval(x, "x")
    y = _require_unit_interval(y, "y")
    pre = (w1 * f.forward(x) + w2 * f.forward(y)) + bias
    clipped = cut(pre) if soft is None else squash(pre, soft)
    out = f.inverse(clipped)
    return float(out) if np.ndim(out) == 0 else out


def conjunction(x, y, soft=None):
    return named_operator("conjunction", x, y, soft)


def disjunction(x, y, soft=None):
    return named_operator("disjunction", x, y, soft)


def implication(x, y, soft=None):
    return named_operator("implication", x, y, soft)


def arithmetic_mean(x, y, soft=None):
    return named_operator("mean", x, y, soft)


def preference(x, y, soft=None):
    return named_operator("preference", x, y, soft)


def aggregative(x, y, soft=None):
    return named_operator("aggregative", x, y, soft)
