"""Bundled reference fixture: a synthetic calibrated cost model.

The package ships a synthetic operator profile
(``data/reference_profile.csv``) whose per-size GEMM and all-reduce times are
tuned so that projections built on it land on the headline communication
fractions of the large-model case study this library targets. It is a
regression anchor for tests and demos, not a measurement of any real device:
individual baseline times should not be read as hardware truth.

The reference scenario is a large futuristic Transformer: H=64K, SL=4K, B=1,
sliced 128-way with 256 data-parallel replicas, studied at a 4x
compute-vs-bandwidth hardware-evolution factor.
"""

from __future__ import annotations

from importlib import resources

from .config import HardwareConfig, ParallelismConfig, TransformerConfig
from .costmodel import CostModel, parse_profile

REFERENCE_HARDWARE = HardwareConfig(
    peak_flops=80e12,
    flops_efficiency=0.85,
    ar_bandwidth=150e9,
    ar_ref_devices=4,
    flop_vs_bw_scale=1.0,
)

# Parallel layout used by the reference scenario and the fixture-based
# demos/tests: TP group of 128, 256 data-parallel replicas.
REFERENCE_DP_DEGREE = 256


def reference_profile_text() -> str:
    return (resources.files("commscale") / "data" / "reference_profile.csv").read_text()


def reference_cost_model() -> CostModel:
    """The bundled calibrated cost model."""
    records = parse_profile(reference_profile_text())
    return CostModel.calibrate(records, REFERENCE_HARDWARE)


def reference_scenario() -> tuple[TransformerConfig, ParallelismConfig]:
    """The large futuristic configuration anchoring the combined case study."""
    model = TransformerConfig(
        name="futuristic-64K",
        num_layers=128,
        hidden=65536,
        seq_len=4096,
        batch=1,
        precision_bits=16,
    )
    parallelism = ParallelismConfig(
        tp_degree=128,
        dp_degree=REFERENCE_DP_DEGREE,
    )
    return model, parallelism
