#!/usr/bin/env python3
"""Per-layer GEMM op counts and all-reduce bytes for one configuration.

Shows the exact integer accounting behind every projection: the three
forward GEMM groups, the backward FC GEMMs, the four serialized activation
all-reduces a tensor-parallel layer needs, and the data-parallel
weight-gradient payload.
"""

from commscale import layer_compute_ops, serialized_ar_bytes, edge_slack
from commscale.config import ParallelismConfig, TransformerConfig

model = TransformerConfig(name="demo", num_layers=96, hidden=12288,
                          seq_len=2048, batch=1)
for tp in (8, 64):
    par = ParallelismConfig(tp_degree=tp)
    counts = layer_compute_ops(model, par)
    comm = serialized_ar_bytes(model, par)
    ratios = edge_slack(model, par)
    print(f"H={model.hidden}, SL={model.seq_len}, B={model.batch}, TP={tp}")
    print(f"  FC GEMM ops        {counts.fc_ops:>22,}")
    print(f"  attention GEMM ops {counts.attn_ops:>22,}")
    print(f"  linear GEMM ops    {counts.linear_ops:>22,}")
    print(f"  forward total      {counts.total_fwd_ops:>22,}")
    print(f"  backward FC ops    {counts.bp_fc_ops:>22,}")
    print(f"  serialized ARs     {comm.serialized_ar_count} x "
          f"{comm.serialized_bytes_per_ar:,} B = {comm.serialized_bytes_total:,} B")
    print(f"  DP gradient payload{comm.dp_fc_weight_bytes:>22,} B")
    print(f"  edge {ratios.edge_ratio:,.1f} ops/B   slack {ratios.slack_ratio:,.1f} ops/B")
    print()

print("Doubling TP halves per-device compute and the edge ratio; the slack")
print("ratio depends only on SL * B and the precision.")
