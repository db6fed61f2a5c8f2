#!/usr/bin/env python3
"""Serialized-communication fraction across the design-space grid.

Sweeps the default grid under roofline pricing and prints, for a fixed
sequence length, how the serialized (critical-path) communication share moves
with the tensor-parallel degree and the hidden size, then how hardware
evolution (compute outgrowing bandwidth 2x and 4x) amplifies it.
"""

from commscale import CostModel
from commscale.config import HardwareConfig
from commscale.sweep import SweepSpec, build_grid, run_sweep

costs = CostModel.roofline(HardwareConfig())
spec = SweepSpec(sl_values=(2048,), b_values=(1,), f_values=(1.0, 2.0, 4.0))
table = run_sweep(build_grid(spec), costs)

by_key = {(r["H"], r["TP"], r["f"]): r["frac_serial"] for r in table}
h_values = sorted({r["H"] for r in table})
tp_values = sorted({r["TP"] for r in table})

for f in (1.0, 2.0, 4.0):
    print(f"serialized fraction of critical path, SL=2K, B=1, evolution x{f:g}")
    print("        " + "".join(f"TP={tp:<5d}" for tp in tp_values))
    for h in h_values:
        cells = "".join(f"{by_key[(h, tp, f)]:8.3f}" for tp in tp_values)
        print(f"H={h // 1024:3d}K {cells}")
    print()

f1 = [r["frac_serial"] for r in table if r["f"] == 1.0]
f4 = [r["frac_serial"] for r in table if r["f"] == 4.0]
print(f"ranges: x1 -> [{min(f1):.2f}, {max(f1):.2f}], "
      f"x4 -> [{min(f4):.2f}, {max(f4):.2f}]")
print("Larger TP raises the share; larger H lowers it; faster compute at")
print("fixed bandwidth raises it everywhere.")
