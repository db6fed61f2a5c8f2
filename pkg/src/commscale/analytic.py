"""Closed-form per-layer operation counts, communication bytes, and ratios.

All compute costs count GEMM multiply-adds as 2 operations (2*M*N*K per
GEMM); non-GEMM element-wise work is treated as fused into the adjacent GEMM
and not counted. With tensor parallelism of degree TP, each device holds a
1/TP slice of every weight matrix, so op counts carry an H/TP factor and are
exact integers whenever H is divisible by TP.

Two dimensionless ratios summarize compute's margin over communication:

* ``amdahl_edge``   - forward compute ops per serialized all-reduce byte
  (critical-path communication under tensor parallelism).
* ``slack_advantage`` - overlappable backward FC ops per data-parallel
  weight-gradient byte (communication hideable under data parallelism).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .config import MODEL_ZOO, ParallelismConfig, TransformerConfig, ZOO_ORDER


@dataclass(frozen=True)
class LayerOpCounts:
    """Exact GEMM op counts for one Transformer layer on one device."""

    fc_ops: int
    attn_ops: int
    linear_ops: int
    total_fwd_ops: int
    bp_fc_ops: int


@dataclass(frozen=True)
class LayerCommBytes:
    """Per-layer all-reduce traffic on one device."""

    serialized_ar_count: int
    serialized_bytes_per_ar: int
    serialized_bytes_total: int
    dp_fc_weight_bytes: int


@dataclass(frozen=True)
class EdgeSlack:
    """Compute-to-communication ratios (ops per byte)."""

    edge_ratio: float
    slack_ratio: float


def _check_divisible(hidden: int, tp: int) -> None:
    if hidden % tp != 0:
        raise ValueError(f"hidden size {hidden} is not divisible by TP degree {tp}")


def fc_gemm_ops(hidden: int, seq_len: int, batch: int, tp: int, ffn_mult: int = 4) -> int:
    """Ops of the fully connected GEMM: 2 * ffn_mult * H * (H/TP) * SL * B."""
    _check_divisible(hidden, tp)
    return 2 * ffn_mult * hidden * (hidden // tp) * seq_len * batch


def attention_gemm_ops(hidden: int, seq_len: int, batch: int, tp: int) -> int:
    """Ops of the attention-score GEMM: 2 * (H/TP) * SL * SL * B."""
    _check_divisible(hidden, tp)
    return 2 * (hidden // tp) * seq_len * seq_len * batch


def linear_gemm_ops(hidden: int, seq_len: int, batch: int, tp: int) -> int:
    """Ops of the three Q/K/V projection GEMMs: 3 * 2 * (H/TP) * H * SL * B."""
    _check_divisible(hidden, tp)
    return 6 * (hidden // tp) * hidden * seq_len * batch


def backprop_fc_ops(hidden: int, seq_len: int, batch: int, tp: int, ffn_mult: int = 4) -> int:
    """Ops of the FC weight-gradient plus input-gradient GEMMs (2x forward)."""
    _check_divisible(hidden, tp)
    return 4 * ffn_mult * hidden * (hidden // tp) * seq_len * batch


def layer_compute_ops(model: TransformerConfig, parallelism: ParallelismConfig) -> LayerOpCounts:
    """All per-layer GEMM op counts for a model under a parallel layout."""
    h, sl, b, tp = model.hidden, model.seq_len, model.batch, parallelism.tp_degree
    fc = fc_gemm_ops(h, sl, b, tp, model.ffn_mult)
    attn = attention_gemm_ops(h, sl, b, tp)
    lin = linear_gemm_ops(h, sl, b, tp)
    return LayerOpCounts(
        fc_ops=fc,
        attn_ops=attn,
        linear_ops=lin,
        total_fwd_ops=fc + attn + lin,
        bp_fc_ops=backprop_fc_ops(h, sl, b, tp, model.ffn_mult),
    )


def serialized_ar_bytes(model: TransformerConfig, parallelism: ParallelismConfig) -> LayerCommBytes:
    """Per-layer all-reduce traffic.

    Four serialized activation/error all-reduces per layer, each of
    (precision/8) * H * SL * B bytes, plus the data-parallel FC weight-gradient
    payload of (precision/8) * ffn_mult * H * (H/TP) bytes.
    """
    _check_divisible(model.hidden, parallelism.tp_degree)
    elem = model.bytes_per_element
    per_ar = elem * model.hidden * model.seq_len * model.batch
    dp_bytes = elem * model.ffn_mult * model.hidden * (model.hidden // parallelism.tp_degree)
    return LayerCommBytes(
        serialized_ar_count=4,
        serialized_bytes_per_ar=per_ar,
        serialized_bytes_total=4 * per_ar,
        dp_fc_weight_bytes=dp_bytes,
    )


def amdahl_edge(model: TransformerConfig, parallelism: ParallelismConfig) -> float:
    """Forward compute ops per serialized all-reduce byte.

    Equals 4 * ((ffn_mult + 3) * H + SL) / (precision_bits * TP); batch size
    cancels exactly.
    """
    ops = layer_compute_ops(model, parallelism).total_fwd_ops
    comm = serialized_ar_bytes(model, parallelism).serialized_bytes_total
    return ops / comm


def slack_advantage(model: TransformerConfig, parallelism: ParallelismConfig) -> float:
    """Overlappable backward FC ops per data-parallel gradient byte.

    Equals 32 * SL * B / precision_bits; independent of H, TP and ffn_mult.
    """
    counts = layer_compute_ops(model, parallelism)
    comm = serialized_ar_bytes(model, parallelism)
    return counts.bp_fc_ops / comm.dp_fc_weight_bytes


def edge_slack(model: TransformerConfig, parallelism: ParallelismConfig) -> EdgeSlack:
    return EdgeSlack(
        edge_ratio=amdahl_edge(model, parallelism),
        slack_ratio=slack_advantage(model, parallelism),
    )


def memory_demand_proxy(model: TransformerConfig) -> int:
    """H * SL, a proxy for how model scaling stresses device memory."""
    return model.hidden * model.seq_len


MEGATRON_BERT_PARAMS = 3.9e9
MEGATRON_BERT_TP = 8


def next_pow2(value: float) -> int:
    """Smallest power of two >= value (value > 0)."""
    if value <= 0:
        raise ValueError(f"value must be positive (got {value!r})")
    n = 1
    while n < value:
        n <<= 1
    return n


def estimate_tp_raw(param_count: float,
                    mem_capacity_scale: float = 1.0,
                    base_param_count: float = MEGATRON_BERT_PARAMS,
                    base_tp: int = MEGATRON_BERT_TP) -> float:
    """Unrounded tensor-parallel degree: base_tp * (params/base_params) / s.

    The anchor is the first widely sliced 3.9e9-parameter model at TP=8; the
    memory-capacity scale s discounts per-device capacity growth since then.
    """
    for label, value in (("param_count", param_count),
                         ("mem_capacity_scale", mem_capacity_scale),
                         ("base_param_count", base_param_count),
                         ("base_tp", base_tp)):
        if not value > 0:
            raise ValueError(f"{label} must be positive (got {value!r})")
    return base_tp * (param_count / base_param_count) / mem_capacity_scale


def estimate_tp(param_count: float,
                mem_capacity_scale: float = 1.0,
                base_param_count: float = MEGATRON_BERT_PARAMS,
                base_tp: int = MEGATRON_BERT_TP,
                rounding: str = "ceil") -> int:
    """Tensor-parallel degree a model of ``param_count`` parameters needs.

    ``rounding`` is ``"ceil"`` or ``"next_pow2"`` (practical TP degrees are
    powers of two).
    """
    raw = estimate_tp_raw(param_count, mem_capacity_scale, base_param_count, base_tp)
    if rounding == "ceil":
        return max(1, math.ceil(raw))
    if rounding == "next_pow2":
        return next_pow2(raw)
    raise ValueError(f"rounding must be 'ceil' or 'next_pow2' (got {rounding!r})")


# Batch size and TP degree assigned to each zoo model for trend studies.
# These are inputs, not published values: batch sizes shrink and TP degrees
# grow with model scale, with the 3.9e9-parameter anchor at TP=8 and the
# largest models at batch 1. Callers may pass their own assignments.
DEFAULT_TREND_ASSIGNMENTS: dict[str, dict[str, int]] = {
    "BERT":    {"B": 16, "TP": 1},
    "T5":      {"B": 16, "TP": 1},
    "GPT-2":   {"B": 8,  "TP": 1},
    "Mega-LM": {"B": 4,  "TP": 8},
    "T-NLG":   {"B": 4,  "TP": 16},
    "GPT-3":   {"B": 2,  "TP": 64},
    "MT-NLG":  {"B": 1,  "TP": 128},
    "PaLM":    {"B": 1,  "TP": 128},
}


@dataclass(frozen=True)
class TrendPoint:
    model: str
    batch: int
    tp_degree: int
    slack_ratio: float
    edge_ratio: float
    slack_norm: float
    edge_norm: float


def trend_series(zoo: Mapping[str, TransformerConfig] = MODEL_ZOO,
                 assignments: Mapping[str, Mapping[str, int]] = DEFAULT_TREND_ASSIGNMENTS,
                 order: Sequence[str] = ZOO_ORDER) -> list[TrendPoint]:
    """Edge and slack ratios across a model lineup, normalized to the first.

    ``assignments`` maps each model name to its per-study batch size and TP
    degree; a missing assignment is an error.
    """
    points: list[TrendPoint] = []
    first_slack = first_edge = None
    for name in order:
        if name not in zoo:
            raise ValueError(f"model {name!r} is not in the zoo")
        if name not in assignments:
            raise ValueError(f"no batch/TP assignment for model {name!r}")
        entry = assignments[name]
        cfg = replace(zoo[name], batch=int(entry["B"]))
        par = ParallelismConfig(tp_degree=int(entry["TP"]))
        ratios = edge_slack(cfg, par)
        if first_slack is None:
            first_slack, first_edge = ratios.slack_ratio, ratios.edge_ratio
        points.append(TrendPoint(
            model=name,
            batch=cfg.batch,
            tp_degree=par.tp_degree,
            slack_ratio=ratios.slack_ratio,
            edge_ratio=ratios.edge_ratio,
            slack_norm=ratios.slack_ratio / first_slack,
            edge_norm=ratios.edge_ratio / first_edge,
        ))
    return points
