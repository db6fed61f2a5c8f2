#!/usr/bin/env python3
"""How compute's edge and slack over communication erode as models scale.

Walks the built-in model zoo (BERT through PaLM) with documented batch-size
and tensor-parallel assignments, prints the raw ratios, and normalizes them
to the first entry. Two forces drive the erosion: batch sizes shrink toward 1
(cutting the slack available to hide data-parallel all-reduces) and TP
degrees grow (cutting compute's per-byte edge over serialized all-reduces).
"""

from commscale import DEFAULT_TREND_ASSIGNMENTS, memory_demand_proxy, trend_series
from commscale.config import MODEL_ZOO, ZOO_ORDER

print("Per-model assignments (inputs to the study, not published values):")
for name in ZOO_ORDER:
    entry = DEFAULT_TREND_ASSIGNMENTS[name]
    cfg = MODEL_ZOO[name]
    print(f"  {name:8s}  H={cfg.hidden:6d}  SL={cfg.seq_len:5d}  "
          f"B={entry['B']:3d}  TP={entry['TP']:4d}  "
          f"mem proxy H*SL={memory_demand_proxy(cfg):,}")

print()
print(f"{'model':8s} {'slack (ops/B)':>14s} {'edge (ops/B)':>13s} "
      f"{'slack norm':>11s} {'edge norm':>10s}")
for point in trend_series():
    print(f"{point.model:8s} {point.slack_ratio:14.1f} {point.edge_ratio:13.1f} "
          f"{point.slack_norm:11.3f} {point.edge_norm:10.3f}")

points = trend_series()
print()
print(f"From {points[0].model} to {points[-1].model}: slack shrinks by "
      f"{100 * (1 - points[-1].slack_norm):.0f}%, edge by "
      f"{100 * (1 - points[-1].edge_norm):.0f}%.")
