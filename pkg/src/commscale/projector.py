"""Whole-iteration projections: compute, serialized and overlapped communication.

A training iteration decomposes into three critical-path buckets plus one
hidden bucket:

* compute            - forward and backward GEMMs across all layers,
* serialized comm    - tensor-parallel activation/error all-reduces (4 per
  layer), which sit on the critical path,
* exposed DP comm    - the part of the data-parallel gradient all-reduce that
  exceeds the backward compute available to hide it,
* hidden DP comm     - the part overlapped under backward compute (not on the
  critical path, reported for visibility).

Backward GEMM work is modeled as exactly twice the forward op count of each
sub-layer (weight-gradient plus input-gradient GEMMs of the forward shape).
Overlap is assessed at whole-backward-pass granularity: aggregate DP
communication against aggregate backward compute, not per-sub-layer schedules.
Degenerate degrees price to zero: TP=1 slices nothing so there is no
serialized all-reduce, and DP=1 has no replicas to synchronize.

The hardware-evolution knob ``apply_flop_vs_bw`` divides compute time by a
factor f >= 1 and leaves every byte count and communication time untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import analytic
from .config import ParallelismConfig, TransformerConfig, validate_pair
from .costmodel import CostModel


@dataclass(frozen=True)
class IterationBreakdown:
    """Projected times (seconds) and critical-path fractions for one iteration."""

    compute_time: float
    backprop_compute_time: float
    serialized_comm_time: float
    dp_comm_time: float
    overlapped_hidden_time: float
    exposed_dp_time: float
    critical_path_time: float
    frac_compute: float
    frac_serialized: float
    frac_exposed: float
    frac_hidden: float

    @classmethod
    def from_times(cls, compute: float, backprop_compute: float,
                   serialized: float, dp_comm: float) -> "IterationBreakdown":
        """Derive overlap, exposure and fractions from the four base times."""
        for label, value in (("compute", compute),
                             ("backprop_compute", backprop_compute),
                             ("serialized", serialized),
                             ("dp_comm", dp_comm)):
            if value < 0:
                raise ValueError(f"{label} time must be >= 0 (got {value!r})")
        # Refine the hidden/exposed split so hidden + exposed == dp_comm holds
        # bit-exactly (Sterbenz: dp_comm - hidden is exact once hidden lands
        # in [dp_comm/2, dp_comm]).
        hidden = dp_comm - max(0.0, dp_comm - backprop_compute)
        exposed = dp_comm - hidden
        critical = compute + serialized + exposed
        if critical > 0:
            fracs = (compute / critical, serialized / critical,
                     exposed / critical, hidden / critical)
        else:
            fracs = (0.0, 0.0, 0.0, 0.0)
        return cls(
            compute_time=compute,
            backprop_compute_time=backprop_compute,
            serialized_comm_time=serialized,
            dp_comm_time=dp_comm,
            overlapped_hidden_time=hidden,
            exposed_dp_time=exposed,
            critical_path_time=critical,
            frac_compute=fracs[0],
            frac_serialized=fracs[1],
            frac_exposed=fracs[2],
            frac_hidden=fracs[3],
        )

    def to_dict(self) -> dict:
        return {
            "compute_s": self.compute_time,
            "backprop_compute_s": self.backprop_compute_time,
            "serialized_comm_s": self.serialized_comm_time,
            "dp_comm_s": self.dp_comm_time,
            "hidden_s": self.overlapped_hidden_time,
            "exposed_s": self.exposed_dp_time,
            "critical_path_s": self.critical_path_time,
            "frac_compute": self.frac_compute,
            "frac_serialized": self.frac_serialized,
            "frac_exposed": self.frac_exposed,
            "frac_hidden": self.frac_hidden,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def project_iteration(model: TransformerConfig, parallelism: ParallelismConfig,
                      costs: CostModel) -> IterationBreakdown:
    """Price one training iteration of ``model`` under ``parallelism``.

    Per layer: forward GEMM time is the sum of the FC, attention and linear
    GEMM projections; backward time prices the weight-gradient and
    input-gradient GEMMs (two forward-sized GEMMs per sub-layer). Serialized
    communication is 4 all-reduces of the activation payload across the TP
    group; DP communication is one all-reduce of the FC weight-gradient
    payload across the DP group, scaled by the configured slowdown.
    """
    validate_pair(model, parallelism)
    counts = analytic.layer_compute_ops(model, parallelism)
    comm = analytic.serialized_ar_bytes(model, parallelism)
    layers = model.num_layers

    fwd = sum(costs.project_time("gemm", ops)
              for ops in (counts.fc_ops, counts.attn_ops, counts.linear_ops))
    bwd = 2.0 * fwd
    compute = layers * (fwd + bwd)
    backprop = layers * bwd

    if parallelism.tp_degree >= 2:
        serialized = layers * 4 * costs.allreduce_time(
            comm.serialized_bytes_per_ar, parallelism.tp_degree)
    else:
        serialized = 0.0

    if parallelism.dp_degree >= 2:
        dp_comm = (layers
                   * costs.allreduce_time(comm.dp_fc_weight_bytes, parallelism.dp_degree)
                   * parallelism.dp_comm_slowdown)
    else:
        dp_comm = 0.0

    return IterationBreakdown.from_times(compute, backprop, serialized, dp_comm)


def serialized_fraction(breakdown: IterationBreakdown) -> float:
    """Share of the critical path spent on serialized communication, in [0, 1]."""
    if breakdown.critical_path_time <= 0:
        raise ValueError("serialized fraction is undefined for a zero critical path")
    return breakdown.serialized_comm_time / breakdown.critical_path_time


def overlap_percentage(breakdown: IterationBreakdown) -> float:
    """DP communication as a percentage of backward compute time.

    Values above 100 mean the communication cannot be fully hidden and the
    excess lands on the critical path.
    """
    if breakdown.backprop_compute_time <= 0:
        raise ValueError("overlap percentage is undefined without backward compute")
    return 100.0 * breakdown.dp_comm_time / breakdown.backprop_compute_time


def scale_dp_comm(breakdown: IterationBreakdown, slowdown: float) -> IterationBreakdown:
    """Multiply DP communication time by ``slowdown`` >= 1 and re-derive."""
    if slowdown < 1:
        raise ValueError(f"dp_comm_slowdown must be >= 1 (got {slowdown!r})")
    return IterationBreakdown.from_times(
        breakdown.compute_time,
        breakdown.backprop_compute_time,
        breakdown.serialized_comm_time,
        breakdown.dp_comm_time * slowdown,
    )


def apply_flop_vs_bw(breakdown: IterationBreakdown, factor: float) -> IterationBreakdown:
    """Divide all compute-time fields by ``factor`` >= 1; communication is untouched."""
    if factor < 1:
        raise ValueError(f"flop_vs_bw factor must be >= 1 (got {factor!r})")
    return IterationBreakdown.from_times(
        breakdown.compute_time / factor,
        breakdown.backprop_compute_time / factor,
        breakdown.serialized_comm_time,
        breakdown.dp_comm_time,
    )


def combined_breakdown(model: TransformerConfig, parallelism: ParallelismConfig,
                       costs: CostModel, flop_vs_bw: float = 1.0,
                       dp_slowdown: float = 1.0) -> IterationBreakdown:
    """Full pipeline: project, apply the DP slowdown, then the evolution scale."""
    breakdown = project_iteration(model, parallelism, costs)
    breakdown = scale_dp_comm(breakdown, dp_slowdown)
    return apply_flop_vs_bw(breakdown, flop_vs_bw)
