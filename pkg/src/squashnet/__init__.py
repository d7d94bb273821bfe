"""Squashing activations, nilpotent logic operators, and a dense-net engine."""

from .logic import (
    IDENTITY,
    GeneratorFn,
    NilpotentOperatorSpec,
    SquashingParams,
    aggregative,
    arithmetic_mean,
    conjunction,
    cut,
    disjunction,
    general_operator,
    implication,
    named_operator,
    preference,
    sigmoid,
    squash,
    squash_dbeta,
    squash_dx,
    weighted_operator,
)
from .metrics import ConfusionMatrix
from .nn import (
    LINEAR,
    RELU,
    SIGMOID,
    TANH,
    ActivationKind,
    AdamState,
    DenseLayer,
    DivergenceError,
    Network,
    TrainConfig,
    activation_from_name,
    adam_step,
    backward,
    build_network,
    evaluate,
    init_params,
    softmax_cross_entropy,
    squashing_activation,
    train,
)
from .datasets import (
    LabeledDataset,
    LineSpec,
    dataset_to_csv,
    gen_circle,
    gen_gaussian,
    gen_halfplane_region,
    gen_spiral,
    load_idx,
    split,
)
from .gates import (
    GateExplanation,
    GateNetworkSpec,
    LineExplanation,
    build_gate_network,
    crisp_decision_region,
    eval_and_tree,
    explain_gate_network,
    extract_line_explanations,
    flatten_and_tree,
)
from .report import EpochRecord, ExperimentReport, emit_report
from .experiments import (
    ConfigError,
    ExperimentConfig,
    run_activation_benchmark,
    run_gate_experiment,
    run_toy_experiment,
)

__version__ = "0.1.0"
