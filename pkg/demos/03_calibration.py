#!/usr/bin/env python3
"""Calibrating operator runtime models from a profile and projecting sizes.

A small synthetic profile (the kind a kernel profiler would produce) is
parsed, calibrated into per-kind baselines, and used to project runtimes at
sizes that were never measured. Projection scales the nearest baseline at or
below the target, which bounds the error introduced by operator efficiency
improving with size.
"""

from commscale import CostModel, parse_profile
from commscale.config import HardwareConfig

PROFILE = """\
kind,size_metric,time_s
# GEMMs: size is the op count (2*M*N*K)
gemm,1073741824,0.00020
gemm,8589934592,0.00105
gemm,68719476736,0.00780
# layer normalization: size is the element count (H*SL*B)
layernorm,524288,0.0000049
layernorm,4194304,0.0000302
# ring all-reduce: size is the payload in bytes
allreduce,1048576,0.000041
allreduce,16777216,0.00021
allreduce,268435456,0.0024
"""

hardware = HardwareConfig(peak_flops=90e12, ar_bandwidth=140e9, ar_ref_devices=4)
records = parse_profile(PROFILE)
model = CostModel.calibrate(records, hardware)
print("baselines per kind:", model.baseline_counts())
print()

print("GEMM projections (anchor scales to the queried size):")
for ops in (2**29, 2**33, 2**38):
    print(f"  {ops:>14,} ops -> {model.project_time('gemm', ops) * 1e6:9.1f} us")

print("all-reduce projections, including the ring device-count factor:")
for n in (2, 4, 64):
    t = model.allreduce_time(64 * 2**20, n)
    print(f"  64 MiB across {n:3d} devices -> {t * 1e6:9.1f} us")

print()
roofline = CostModel.roofline(hardware)
ops = 8589934592
print(f"calibrated vs roofline for a {ops:,}-op GEMM: "
      f"{model.project_time('gemm', ops) * 1e6:.1f} us vs "
      f"{roofline.project_time('gemm', ops) * 1e6:.1f} us")

text = model.to_json()
assert CostModel.from_json(text) == model
print("cost-model JSON round-trips bit-exactly "
      f"({len(text.splitlines())} lines)")
