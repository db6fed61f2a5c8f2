#!/usr/bin/env python3
"""Data-parallel communication as a percentage of backward compute.

Uses the bundled reference cost model at a fixed tensor-parallel degree of 16
and sweeps hidden size against the sequence-length * batch product. Values
under 100% can be fully hidden under backward GEMMs; values above 100% leave
communication exposed on the critical path. Small hidden sizes sit higher
because small all-reduces use the network poorly, and large SL*B products sit
lower because they fatten the GEMMs without adding gradient traffic.
"""

from commscale import overlap_percentage, project_iteration, reference_cost_model
from commscale.config import ParallelismConfig, TransformerConfig
from commscale.sweep import TABLE3_B, TABLE3_H, TABLE3_SL

costs = reference_cost_model()
par = ParallelismConfig(tp_degree=16, dp_degree=256)

combos = sorted({(sl * b, sl, b) for sl in TABLE3_SL for b in TABLE3_B})
print("overlap % (DP all-reduce time / backward GEMM time), TP=16")
print("         " + "".join(f"SLxB={slb // 1024:3d}K" for slb, _, _ in combos))
values = []
for h in TABLE3_H:
    row = []
    for slb, sl, b in combos:
        model = TransformerConfig(name="d", num_layers=1, hidden=h,
                                  seq_len=sl, batch=b)
        pct = overlap_percentage(project_iteration(model, par, costs))
        row.append(pct)
        values.append(pct)
    print(f"H={h // 1024:3d}K  " + "".join(f"{v:9.1f}" for v in row))

print()
print(f"band: {min(values):.1f}% to {max(values):.1f}% "
      f"({sum(1 for v in values if v > 100)} of {len(values)} points exposed)")
