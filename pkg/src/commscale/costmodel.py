"""Operator runtime models: profile ingestion, calibration, and projection.

Each operator kind carries a single size metric:

* ``gemm``      - op count (2*M*N*K),
* ``layernorm`` - element count (H*SL*B),
* ``allreduce`` - payload bytes.

A calibrated :class:`CostModel` stores measured (size, time) baselines per
kind and projects the runtime at another size by scaling the nearest baseline
at or below the target proportionally (below the smallest baseline, the
smallest is used). Anchoring on the nearest smaller size bounds the
distortion caused by operator efficiency improving with size and keeps
projection deterministic.

A roofline :class:`CostModel` needs no profile: GEMM time is
ops / (peak_flops * flops_efficiency * flop_vs_bw_scale) and all-reduce time
follows the ring model below. Roofline mode has no memory-bandwidth term, so
layernorm projection requires calibration.

Ring all-reduce time: per-device traffic grows with (N-1)/N of the payload,
so ``ar_time`` rescales the configured bandwidth, which was measured at
``ar_ref_devices`` participants, by [(N-1)/N] / [(N_ref-1)/N_ref].

Calibrated projections checked against real accelerators are expected to
carry roughly 15% (GEMM), 7% (layernorm) and 11% (all-reduce) geometric-mean
error; individual small-size projections can be worse because operator
efficiency improves with size. These figures are documentation, not test
assertions.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable

from .config import HardwareConfig

KINDS = ("gemm", "layernorm", "allreduce")


class ProfileError(ValueError):
    """Raised for malformed profile rows or unusable calibration data."""


@dataclass(frozen=True)
class OperatorRecord:
    """One measured operator execution."""

    kind: str
    size_metric: float
    measured_time: float

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ProfileError(f"unknown operator kind {self.kind!r}; expected one of {KINDS}")
        if not self.size_metric > 0:
            raise ProfileError(f"size_metric must be > 0 (got {self.size_metric!r})")
        if not self.measured_time > 0:
            raise ProfileError(f"measured_time must be > 0 (got {self.measured_time!r})")


PROFILE_HEADER = "kind,size_metric,time_s"


def parse_profile(text: str) -> list[OperatorRecord]:
    """Parse profile CSV text into operator records.

    Schema: header ``kind,size_metric,time_s``; one record per row; lines
    starting with ``#`` and blank lines are skipped. All malformed rows are
    reported together, each with its line number.
    """
    records: list[OperatorRecord] = []
    problems: list[str] = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != PROFILE_HEADER:
                raise ProfileError(
                    f"line {lineno}: expected header {PROFILE_HEADER!r}, got {line!r}"
                )
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            problems.append(f"line {lineno}: expected 3 fields, got {len(parts)}")
            continue
        kind = parts[0].strip()
        try:
            size = float(parts[1])
            time_s = float(parts[2])
        except ValueError:
            problems.append(f"line {lineno}: size_metric and time_s must be numbers")
            continue
        try:
            records.append(OperatorRecord(kind=kind, size_metric=size, measured_time=time_s))
        except ProfileError as exc:
            problems.append(f"line {lineno}: {exc}")
    if not header_seen:
        raise ProfileError(f"profile is empty; expected header {PROFILE_HEADER!r}")
    if problems:
        raise ProfileError("malformed profile rows:\n  " + "\n  ".join(problems))
    return records


def _ring_factor(n_devices: int) -> float:
    return (n_devices - 1) / n_devices


def ar_time(hardware: HardwareConfig, payload_bytes: float, n_devices: int) -> float:
    """Ring all-reduce time for ``payload_bytes`` across ``n_devices``.

    The configured bandwidth applies at ``ar_ref_devices`` participants; other
    device counts scale with the ring traffic factor (N-1)/N.
    """
    if n_devices < 2:
        raise ValueError(f"all-reduce needs at least 2 devices (got {n_devices})")
    base = payload_bytes / hardware.ar_bandwidth
    return base * _ring_factor(n_devices) / _ring_factor(hardware.ar_ref_devices)


def roofline_gemm_time(hardware: HardwareConfig, ops: float) -> float:
    """Ideal GEMM time: ops / (peak * efficiency * flop_vs_bw_scale)."""
    return ops / (hardware.effective_flops * hardware.flop_vs_bw_scale)


@dataclass(frozen=True)
class CostModel:
    """Prices operator executions, either from calibration or a roofline.

    ``baselines`` maps kind to a tuple of (size_metric, time_s) pairs sorted
    by strictly increasing size; it is empty in roofline mode. The model is
    immutable once built; projections are pure.
    """

    mode: str
    hardware: HardwareConfig
    baselines: dict[str, tuple[tuple[float, float], ...]]

    def __post_init__(self) -> None:
        if self.mode not in ("roofline", "calibrated"):
            raise ValueError(f"mode must be 'roofline' or 'calibrated' (got {self.mode!r})")
        for kind, entries in self.baselines.items():
            if kind not in KINDS:
                raise ValueError(f"unknown baseline kind {kind!r}")
            sizes = [size for size, _ in entries]
            if sizes != sorted(sizes) or len(set(sizes)) != len(sizes):
                raise ValueError(f"{kind} baselines must be strictly increasing in size")

    @classmethod
    def roofline(cls, hardware: HardwareConfig) -> "CostModel":
        return cls(mode="roofline", hardware=hardware, baselines={})

    @classmethod
    def calibrate(cls, records: Iterable[OperatorRecord],
                  hardware: HardwareConfig) -> "CostModel":
        """Build a calibrated model from measured records.

        Records of the same kind and size are averaged; baselines are stored
        sorted ascending by size.
        """
        grouped: dict[str, dict[float, list[float]]] = {}
        count = 0
        for rec in records:
            count += 1
            grouped.setdefault(rec.kind, {}).setdefault(float(rec.size_metric), []).append(
                float(rec.measured_time)
            )
        if count == 0:
            raise ProfileError("cannot calibrate from an empty record set")
        baselines = {
            kind: tuple(
                (size, sum(times) / len(times))
                for size, times in sorted(by_size.items())
            )
            for kind, by_size in grouped.items()
        }
        return cls(mode="calibrated", hardware=hardware, baselines=baselines)

    def baseline_counts(self) -> dict[str, int]:
        return {kind: len(entries) for kind, entries in self.baselines.items()}

    def project_time(self, kind: str, size_metric: float) -> float:
        """Projected runtime of one ``kind`` operator at ``size_metric``.

        Calibrated mode scales the nearest baseline at or below the target
        (the smallest baseline when the target is below all of them).
        Roofline mode prices gemm and allreduce analytically; layernorm has
        no roofline term and requires calibration.
        """
        if kind not in KINDS:
            raise ValueError(f"unknown operator kind {kind!r}; expected one of {KINDS}")
        if size_metric < 0:
            raise ValueError(f"size_metric must be >= 0 (got {size_metric!r})")
        if size_metric == 0:
            return 0.0
        if self.mode == "roofline":
            if kind == "gemm":
                return roofline_gemm_time(self.hardware, size_metric)
            if kind == "allreduce":
                return size_metric / self.hardware.ar_bandwidth
            raise ValueError(
                "layernorm has no roofline model; calibrate from a profile instead"
            )
        entries = self.baselines.get(kind)
        if not entries:
            raise ValueError(f"calibrated model has no {kind!r} baselines")
        sizes = [size for size, _ in entries]
        idx = bisect_right(sizes, size_metric) - 1
        if idx < 0:
            idx = 0
        base_size, base_time = entries[idx]
        return base_time * (size_metric / base_size)

    def allreduce_time(self, payload_bytes: float, n_devices: int) -> float:
        """All-reduce time at ``n_devices``, ring-factor-normalized.

        The per-byte cost (calibrated baseline or roofline bandwidth) applies
        at the hardware's reference device count; other counts scale with
        (N-1)/N.
        """
        if n_devices < 2:
            raise ValueError(f"all-reduce needs at least 2 devices (got {n_devices})")
        base = self.project_time("allreduce", payload_bytes)
        return base * _ring_factor(n_devices) / _ring_factor(self.hardware.ar_ref_devices)

    def to_json(self) -> str:
        payload = {
            "mode": self.mode,
            "baselines": {
                kind: [[size, time] for size, time in entries]
                for kind, entries in sorted(self.baselines.items())
            },
            "hardware": self.hardware.to_dict(),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CostModel":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"cost-model file is not valid JSON: {exc}") from exc
        for key in ("mode", "baselines", "hardware"):
            if key not in payload:
                raise ValueError(f"cost-model file missing key {key!r}")
        hw_block = dict(payload["hardware"])
        if "ar_ref_devices" in hw_block:
            hw_block["ar_ref_devices"] = int(hw_block["ar_ref_devices"])
        hardware = HardwareConfig(**hw_block)
        baselines = {
            kind: tuple((float(size), float(time)) for size, time in entries)
            for kind, entries in payload["baselines"].items()
        }
        return cls(mode=payload["mode"], hardware=hardware, baselines=baselines)
