"""Domain types, validation, and configuration parsing.

Three immutable configuration records drive every projection:

* :class:`TransformerConfig` - model hyperparameters that set operation sizes.
* :class:`ParallelismConfig` - tensor/data parallel degrees and the data-parallel
  communication slowdown factor.
* :class:`HardwareConfig`    - peak math throughput and effective ring
  all-reduce bandwidth, plus the compute-vs-bandwidth evolution scale.

A built-in model zoo carries published Transformer configurations (BERT
through PaLM) so sweeps and trend studies can be driven by name.

Configuration files are JSON documents with top-level keys ``model``,
``parallelism`` and ``hardware``; see :func:`load_config` for the schema.
Unknown keys are rejected, never ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Optional


class ConfigError(ValueError):
    """Raised for malformed documents or invariant violations."""


_VALID_PRECISIONS = (8, 16, 32, 64)


@dataclass(frozen=True)
class TransformerConfig:
    """Hyperparameters of one Transformer model.

    ``hidden`` (H), ``seq_len`` (SL) and ``batch`` (B) set the sizes of every
    GEMM and collective. ``ffn_mult`` is the fully connected expansion factor
    (FC dim = ffn_mult * H). ``num_heads`` is carried for display only; no
    cost expression consumes it.
    """

    name: str
    num_layers: int
    hidden: int
    seq_len: int
    batch: int = 1
    ffn_mult: int = 4
    precision_bits: int = 16
    param_count: Optional[float] = None
    num_heads: Optional[int] = None

    def __post_init__(self) -> None:
        for fname in ("num_layers", "hidden", "seq_len", "batch", "ffn_mult"):
            value = getattr(self, fname)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"model.{fname} must be an integer >= 1 (got {value!r})")
        if self.precision_bits not in _VALID_PRECISIONS:
            raise ConfigError(
                f"model.precision_bits must be one of {_VALID_PRECISIONS} "
                f"(got {self.precision_bits!r})"
            )
        if self.param_count is not None and not self.param_count > 0:
            raise ConfigError(f"model.param_count must be > 0 (got {self.param_count!r})")
        if self.num_heads is not None and self.num_heads < 1:
            raise ConfigError(f"model.num_heads must be >= 1 (got {self.num_heads!r})")

    @property
    def bytes_per_element(self) -> int:
        return self.precision_bits // 8

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "num_layers": self.num_layers,
            "hidden": self.hidden,
            "seq_len": self.seq_len,
            "batch": self.batch,
            "ffn_mult": self.ffn_mult,
            "precision_bits": self.precision_bits,
        }
        if self.param_count is not None:
            out["param_count"] = self.param_count
        if self.num_heads is not None:
            out["num_heads"] = self.num_heads
        return out


@dataclass(frozen=True)
class ParallelismConfig:
    """Distributed-training layout.

    ``tp_degree`` devices hold slices of every layer (activations are
    all-reduced on the critical path); ``dp_degree`` model replicas all-reduce
    weight gradients during the backward pass. ``dp_comm_slowdown`` is a
    dimensionless >= 1 factor applied to data-parallel all-reduce time to model
    slower inter-node links and interference.
    """

    tp_degree: int = 1
    dp_degree: int = 1
    node_device_count: int = 4
    dp_comm_slowdown: float = 1.0

    def __post_init__(self) -> None:
        for fname in ("tp_degree", "dp_degree", "node_device_count"):
            value = getattr(self, fname)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"parallelism.{fname} must be an integer >= 1 (got {value!r})")
        if not self.dp_comm_slowdown >= 1:
            raise ConfigError(
                f"parallelism.dp_comm_slowdown must be >= 1 (got {self.dp_comm_slowdown!r})"
            )

    def to_dict(self) -> dict:
        return {
            "tp": self.tp_degree,
            "dp": self.dp_degree,
            "node_devices": self.node_device_count,
            "dp_comm_slowdown": self.dp_comm_slowdown,
        }


@dataclass(frozen=True)
class HardwareConfig:
    """Device and interconnect capability at the configured precision.

    ``ar_bandwidth`` is the effective ring all-reduce bandwidth in bytes/s as
    measured with ``ar_ref_devices`` participants; projections rescale it with
    the ring traffic factor (N-1)/N for other device counts.
    ``flop_vs_bw_scale`` models compute throughput outgrowing network
    bandwidth across hardware generations; it divides compute time only.
    """

    peak_flops: float = 80e12
    flops_efficiency: float = 0.85
    ar_bandwidth: float = 150e9
    ar_ref_devices: int = 4
    flop_vs_bw_scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.peak_flops > 0:
            raise ConfigError(f"hardware.peak_flops must be > 0 (got {self.peak_flops!r})")
        if not 0 < self.flops_efficiency <= 1:
            raise ConfigError(
                f"hardware.flops_efficiency must be in (0, 1] (got {self.flops_efficiency!r})"
            )
        if not self.ar_bandwidth > 0:
            raise ConfigError(f"hardware.ar_bandwidth must be > 0 (got {self.ar_bandwidth!r})")
        if not isinstance(self.ar_ref_devices, int) or self.ar_ref_devices < 2:
            raise ConfigError(
                f"hardware.ar_ref_devices must be an integer >= 2 (got {self.ar_ref_devices!r})"
            )
        if not self.flop_vs_bw_scale >= 1:
            raise ConfigError(
                f"hardware.flop_vs_bw_scale must be >= 1 (got {self.flop_vs_bw_scale!r})"
            )

    @property
    def effective_flops(self) -> float:
        return self.peak_flops * self.flops_efficiency

    def to_dict(self) -> dict:
        return {
            "peak_flops": self.peak_flops,
            "flops_efficiency": self.flops_efficiency,
            "ar_bandwidth": self.ar_bandwidth,
            "ar_ref_devices": self.ar_ref_devices,
            "flop_vs_bw_scale": self.flop_vs_bw_scale,
        }


DEFAULT_HARDWARE = HardwareConfig()


def validate_pair(model: TransformerConfig, parallelism: ParallelismConfig) -> None:
    """Check cross-record invariants; raises ConfigError on violation."""
    if model.hidden % parallelism.tp_degree != 0:
        raise ConfigError(
            f"hidden size {model.hidden} is not divisible by tensor-parallel "
            f"degree {parallelism.tp_degree}"
        )


# Published model configurations. "K" entries are multiples of 1024; exact
# published values (1600, 4256, ...) are stored verbatim. Batch defaults to 1
# and is meant to be overridden per study.
_ZOO_ROWS = (
    ("BERT",    24, 1024,  512,  16, 0.34e9),
    ("T5",      24, 1024,  512, 128, 11e9),
    ("GPT-2",   48, 1600, 1024,  25, 1.54e9),
    ("Mega-LM", 74, 3072, 1024,  24, 8.3e9),
    ("T-NLG",   78, 4256, 1024,  28, 17e9),
    ("GPT-3",   96, 12288, 2048, 96, 175e9),
    ("MT-NLG", 105, 20480, 2048, 128, 530e9),
    ("PaLM",   118, 18432, 2048,  48, 540e9),
)

MODEL_ZOO: dict[str, TransformerConfig] = {
    name: TransformerConfig(
        name=name,
        num_layers=layers,
        hidden=hidden,
        seq_len=seq_len,
        num_heads=heads,
        param_count=params,
    )
    for name, layers, hidden, seq_len, heads, params in _ZOO_ROWS
}

ZOO_ORDER = tuple(name for name, *_ in _ZOO_ROWS)


def zoo_lookup(name: str) -> TransformerConfig:
    """Return the zoo entry for ``name`` (case-insensitive)."""
    for key, cfg in MODEL_ZOO.items():
        if key.lower() == name.lower():
            return cfg
    raise ConfigError(
        f"unknown model {name!r}; available: {', '.join(ZOO_ORDER)}"
    )


_MODEL_KEYS = {
    "zoo", "name", "num_layers", "hidden", "seq_len", "batch",
    "ffn_mult", "precision_bits", "param_count", "num_heads",
}
_PARALLELISM_KEYS = {"tp", "dp", "node_devices", "dp_comm_slowdown"}
_HARDWARE_KEYS = {
    "peak_flops", "flops_efficiency", "ar_bandwidth", "ar_ref_devices",
    "flop_vs_bw_scale",
}


def _reject_unknown(section: str, given: dict, allowed: set) -> None:
    unknown = sorted(set(given) - allowed)
    if unknown:
        raise ConfigError(
            f"unknown key(s) in {section}: {', '.join(unknown)}; "
            f"allowed: {', '.join(sorted(allowed))}"
        )


def _as_int(section: str, key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{section}.{key} must be an integer (got {value!r})")
    return value


def _parse_model(block: dict) -> TransformerConfig:
    _reject_unknown("model", block, _MODEL_KEYS)
    if "zoo" in block:
        base = zoo_lookup(str(block["zoo"]))
        overrides = {k: v for k, v in block.items() if k != "zoo"}
        for key in ("num_layers", "hidden", "seq_len", "batch", "ffn_mult",
                    "precision_bits", "num_heads"):
            if key in overrides:
                overrides[key] = _as_int("model", key, overrides[key])
        try:
            return replace(base, **overrides)
        except TypeError as exc:
            raise ConfigError(f"bad model override: {exc}") from exc
    required = ("hidden", "seq_len")
    for key in required:
        if key not in block:
            raise ConfigError(f"model.{key} is required when no zoo entry is named")
    kwargs = dict(block)
    kwargs.setdefault("name", "custom")
    kwargs.setdefault("num_layers", 1)
    for key in ("num_layers", "hidden", "seq_len", "batch", "ffn_mult",
                "precision_bits", "num_heads"):
        if key in kwargs:
            kwargs[key] = _as_int("model", key, kwargs[key])
    return TransformerConfig(**kwargs)


def _parse_parallelism(block: dict) -> ParallelismConfig:
    _reject_unknown("parallelism", block, _PARALLELISM_KEYS)
    kwargs = {}
    if "tp" in block:
        kwargs["tp_degree"] = _as_int("parallelism", "tp", block["tp"])
    if "dp" in block:
        kwargs["dp_degree"] = _as_int("parallelism", "dp", block["dp"])
    if "node_devices" in block:
        kwargs["node_device_count"] = _as_int("parallelism", "node_devices",
                                              block["node_devices"])
    if "dp_comm_slowdown" in block:
        kwargs["dp_comm_slowdown"] = float(block["dp_comm_slowdown"])
    return ParallelismConfig(**kwargs)


def hardware_from_dict(block: dict) -> HardwareConfig:
    """Parse a ``hardware`` section (same schema as in a configuration file)."""
    _reject_unknown("hardware", block, _HARDWARE_KEYS)
    kwargs = dict(block)
    if "ar_ref_devices" in kwargs:
        kwargs["ar_ref_devices"] = _as_int("hardware", "ar_ref_devices",
                                           kwargs["ar_ref_devices"])
    for key in ("peak_flops", "flops_efficiency", "ar_bandwidth", "flop_vs_bw_scale"):
        if key in kwargs:
            kwargs[key] = float(kwargs[key])
    return HardwareConfig(**kwargs)


def load_config(document) -> tuple[TransformerConfig, ParallelismConfig, HardwareConfig]:
    """Parse a configuration document.

    ``document`` is a JSON string (or an already-decoded dict) with top-level
    keys ``model``, ``parallelism`` and ``hardware``, all optional except
    ``model``. The model block either names a zoo entry::

        {"model": {"zoo": "GPT-3", "batch": 4}}

    or spells out fields explicitly (``hidden`` and ``seq_len`` required)::

        {"model": {"hidden": 4096, "seq_len": 2048, "num_layers": 32}}

    Missing sections get defaults (serial parallelism, default hardware).
    Unknown keys anywhere are an error. The hidden size must be divisible by
    the tensor-parallel degree; violations report both offending values.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError(f"configuration root must be an object (got {type(document).__name__})")
    _reject_unknown("document", document, {"model", "parallelism", "hardware"})
    if "model" not in document:
        raise ConfigError("configuration must contain a 'model' section")

    model = _parse_model(dict(document["model"]))
    parallelism = _parse_parallelism(dict(document.get("parallelism", {})))
    hardware = hardware_from_dict(dict(document.get("hardware", {})))
    validate_pair(model, parallelism)
    return model, parallelism, hardware


def to_document(model: TransformerConfig, parallelism: ParallelismConfig,
                hardware: HardwareConfig) -> dict:
    """Serialize a configuration triple; ``load_config`` round-trips it."""
    return {
        "model": model.to_dict(),
        "parallelism": parallelism.to_dict(),
        "hardware": hardware.to_dict(),
    }
