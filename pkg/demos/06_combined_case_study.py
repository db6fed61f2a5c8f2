#!/usr/bin/env python3
"""Combined case study: a large futuristic Transformer, end to end.

Projects the bundled reference scenario (H=64K, SL=4K, B=1, TP=128, DP=256)
with the reference cost model under three conditions: today's hardware
balance, compute scaled 4x ahead of bandwidth, and additionally an 8x
data-parallel link slowdown. The stacked composition shows serialized
communication taking over the critical path and previously hidden DP traffic
becoming exposed.
"""

from commscale import combined_breakdown, reference_cost_model, reference_scenario

costs = reference_cost_model()
model, par = reference_scenario()
print(f"scenario: H={model.hidden}, SL={model.seq_len}, B={model.batch}, "
      f"layers={model.num_layers}, TP={par.tp_degree}, DP={par.dp_degree}")
print()

cases = (
    ("balanced hardware            ", 1.0, 1.0),
    ("compute 4x ahead of bandwidth", 4.0, 1.0),
    ("... plus 8x slower DP links  ", 4.0, 8.0),
)
print(f"{'case':30s} {'compute':>8s} {'serial':>8s} {'exposed':>8s} {'hidden':>8s}")
for label, f, dp_slow in cases:
    b = combined_breakdown(model, par, costs, flop_vs_bw=f, dp_slowdown=dp_slow)
    print(f"{label:30s} {b.frac_compute:8.3f} {b.frac_serialized:8.3f} "
          f"{b.frac_exposed:8.3f} {b.frac_hidden:8.3f}")

b = combined_breakdown(model, par, costs, flop_vs_bw=4.0, dp_slowdown=1.0)
print()
print(f"at 4x evolution, {100 * b.frac_serialized:.0f}% of the iteration is "
      f"serialized communication and {100 * b.frac_hidden:.0f}% is overlapped "
      "communication hidden under backward compute;")
print("with slow DP links the hidden share spills onto the critical path.")
