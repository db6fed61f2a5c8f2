"""Compute-vs-communication projection for distributed Transformer training.

The library projects how much of a training iteration is spent computing
versus communicating, for Transformer models described by their hyperparameters
(hidden size, sequence length, batch), sliced with tensor and data
parallelism, on hardware described by peak math throughput and ring
all-reduce bandwidth. It combines:

* exact closed-form per-layer op counts and communication byte counts,
* operator-level runtime models (roofline or calibrated from profiles),
* whole-iteration breakdowns with overlap/exposure accounting,
* grid sweeps and figure-style plot-data reports.
"""

__version__ = "0.1.0"

from .analytic import (
    DEFAULT_TREND_ASSIGNMENTS,
    EdgeSlack,
    LayerCommBytes,
    LayerOpCounts,
    TrendPoint,
    amdahl_edge,
    attention_gemm_ops,
    backprop_fc_ops,
    edge_slack,
    estimate_tp,
    estimate_tp_raw,
    fc_gemm_ops,
    layer_compute_ops,
    linear_gemm_ops,
    memory_demand_proxy,
    next_pow2,
    serialized_ar_bytes,
    slack_advantage,
    trend_series,
)
from .config import (
    DEFAULT_HARDWARE,
    MODEL_ZOO,
    ZOO_ORDER,
    ConfigError,
    HardwareConfig,
    ParallelismConfig,
    TransformerConfig,
    load_config,
    to_document,
    validate_pair,
    zoo_lookup,
)
from .costmodel import (
    CostModel,
    OperatorRecord,
    ProfileError,
    ar_time,
    parse_profile,
    roofline_gemm_time,
)
from .projector import (
    IterationBreakdown,
    apply_flop_vs_bw,
    combined_breakdown,
    overlap_percentage,
    project_iteration,
    scale_dp_comm,
    serialized_fraction,
)
from .reference import reference_cost_model, reference_scenario
from .sweep import SweepPoint, SweepSpec, build_grid, emit_report, run_sweep, trend_table

__all__ = [
    "__version__",
    "DEFAULT_HARDWARE",
    "DEFAULT_TREND_ASSIGNMENTS",
    "MODEL_ZOO",
    "ZOO_ORDER",
    "ConfigError",
    "CostModel",
    "EdgeSlack",
    "HardwareConfig",
    "IterationBreakdown",
    "LayerCommBytes",
    "LayerOpCounts",
    "OperatorRecord",
    "ParallelismConfig",
    "ProfileError",
    "SweepPoint",
    "SweepSpec",
    "TransformerConfig",
    "TrendPoint",
    "amdahl_edge",
    "apply_flop_vs_bw",
    "ar_time",
    "attention_gemm_ops",
    "backprop_fc_ops",
    "build_grid",
    "combined_breakdown",
    "edge_slack",
    "emit_report",
    "estimate_tp",
    "estimate_tp_raw",
    "fc_gemm_ops",
    "layer_compute_ops",
    "linear_gemm_ops",
    "load_config",
    "memory_demand_proxy",
    "next_pow2",
    "overlap_percentage",
    "parse_profile",
    "project_iteration",
    "reference_cost_model",
    "reference_scenario",
    "roofline_gemm_time",
    "run_sweep",
    "scale_dp_comm",
    "serialized_ar_bytes",
    "serialized_fraction",
    "slack_advantage",
    "to_document",
    "trend_series",
    "trend_table",
    "validate_pair",
    "zoo_lookup",
]
