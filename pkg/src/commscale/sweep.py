"""Grid sweeps over model and hardware-evolution parameters, plus reporting.

The default grid is the design-space study: hidden sizes 1K..64K (powers of
two), sequence lengths 1K..8K, batch sizes {1, 4}, tensor-parallel degrees
4..256 (powers of two), one evolution factor. (H, TP) pairs that violate
divisibility are filtered out, not errored. Each surviving configuration is
evaluated independently; a failing row records its error string and never
aborts the sweep. Evaluation is sequential and deterministic: identical spec
and cost model produce byte-identical output.

Reports are either the full result table (CSV or JSON) or tidy long-format
plot data (``figure,x,series,y``) reshaped for one of the built-in figure
layouts; reshaping never alters values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from . import analytic, projector
from .config import (
    HardwareConfig,
    ParallelismConfig,
    TransformerConfig,
    hardware_from_dict,
)
from .costmodel import CostModel

TABLE3_H = (1024, 2048, 4096, 8192, 16384, 32768, 65536)
TABLE3_SL = (1024, 2048, 4096, 8192)
TABLE3_B = (1, 4)
TABLE3_TP = (4, 8, 16, 32, 64, 128, 256)

RESULT_COLUMNS = (
    "H", "SL", "B", "TP", "DP", "f",
    "compute_s", "serial_comm_s", "dp_comm_s", "hidden_s", "exposed_s",
    "frac_compute", "frac_serial", "frac_exposed",
    "edge_ratio", "slack_ratio", "error",
)

PLOT_COLUMNS = ("figure", "x", "series", "y")

FIGURES = ("none", "fig7", "fig10", "fig11", "fig12", "fig13", "fig14")


@dataclass(frozen=True)
class SweepPoint:
    """One fully specified grid configuration."""

    hidden: int
    seq_len: int
    batch: int
    tp_degree: int
    flop_vs_bw: float
    dp_degree: int
    dp_comm_slowdown: float
    num_layers: int
    precision_bits: int
    ffn_mult: int


@dataclass(frozen=True)
class SweepSpec:
    """Value lists to sweep plus the fixed context shared by every point.

    ``filters`` are predicates over (H, SL, B, TP, f); a point survives only
    if every predicate accepts it. Divisibility of H by TP is always enforced
    by filtering. ``hardware`` optionally pins the device description used
    when the sweep is priced with a roofline model.
    """

    h_values: Sequence[int] = TABLE3_H
    sl_values: Sequence[int] = TABLE3_SL
    b_values: Sequence[int] = TABLE3_B
    tp_values: Sequence[int] = TABLE3_TP
    f_values: Sequence[float] = (1.0,)
    dp_degree: int = 4
    dp_comm_slowdown: float = 1.0
    num_layers: int = 1
    precision_bits: int = 16
    ffn_mult: int = 4
    hardware: Optional[HardwareConfig] = None
    filters: Sequence[Callable[[int, int, int, int, float], bool]] = ()

    def __post_init__(self) -> None:
        for label, values in (("h_values", self.h_values), ("sl_values", self.sl_values),
                              ("b_values", self.b_values), ("tp_values", self.tp_values),
                              ("f_values", self.f_values)):
            if not values:
                raise ValueError(f"sweep spec {label} must be non-empty")

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        """Build a spec from a JSON document.

        Recognized keys: ``H``, ``SL``, ``B``, ``TP``, ``f`` (value lists),
        ``dp``, ``dp_comm_slowdown``, ``num_layers``, ``precision_bits``,
        ``ffn_mult`` (fixed scalars), ``hardware`` (same block as a
        configuration file) and ``filters`` (an object; the only declarative
        filter is ``{"sl_times_b": <int>}``).
        """
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"sweep spec is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ValueError("sweep spec root must be an object")
        known = {"H", "SL", "B", "TP", "f", "dp", "dp_comm_slowdown",
                 "num_layers", "precision_bits", "ffn_mult", "hardware", "filters"}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ValueError(f"unknown sweep spec key(s): {', '.join(unknown)}")
        kwargs = {}
        for json_key, attr in (("H", "h_values"), ("SL", "sl_values"),
                               ("B", "b_values"), ("TP", "tp_values")):
            if json_key in doc:
                kwargs[attr] = tuple(int(v) for v in doc[json_key])
        if "f" in doc:
            kwargs["f_values"] = tuple(float(v) for v in doc["f"])
        for json_key, attr in (("dp", "dp_degree"), ("num_layers", "num_layers"),
                               ("precision_bits", "precision_bits"),
                               ("ffn_mult", "ffn_mult")):
            if json_key in doc:
                kwargs[attr] = int(doc[json_key])
        if "dp_comm_slowdown" in doc:
            kwargs["dp_comm_slowdown"] = float(doc["dp_comm_slowdown"])
        if "hardware" in doc:
            kwargs["hardware"] = hardware_from_dict(dict(doc["hardware"]))
        filters = []
        for name, value in dict(doc.get("filters", {})).items():
            if name == "sl_times_b":
                target = int(value)
                filters.append(lambda h, sl, b, tp, f, _t=target: sl * b == _t)
            else:
                raise ValueError(f"unknown declarative filter {name!r}")
        kwargs["filters"] = tuple(filters)
        return cls(**kwargs)


def build_grid(spec: SweepSpec) -> list[SweepPoint]:
    """Filtered cartesian product in lexicographic (H, SL, B, TP, f) order."""
    points: list[SweepPoint] = []
    for hidden in sorted(set(spec.h_values)):
        for seq_len in sorted(set(spec.sl_values)):
            for batch in sorted(set(spec.b_values)):
                for tp in sorted(set(spec.tp_values)):
                    if hidden % tp != 0:
                        continue
                    for f in sorted(set(spec.f_values)):
                        if not all(flt(hidden, seq_len, batch, tp, f)
                                   for flt in spec.filters):
                            continue
                        points.append(SweepPoint(
                            hidden=hidden, seq_len=seq_len, batch=batch,
                            tp_degree=tp, flop_vs_bw=f,
                            dp_degree=spec.dp_degree,
                            dp_comm_slowdown=spec.dp_comm_slowdown,
                            num_layers=spec.num_layers,
                            precision_bits=spec.precision_bits,
                            ffn_mult=spec.ffn_mult,
                        ))
    return points


def _point_configs(point: SweepPoint) -> tuple[TransformerConfig, ParallelismConfig]:
    model = TransformerConfig(
        name=f"H{point.hidden}-SL{point.seq_len}-B{point.batch}",
        num_layers=point.num_layers,
        hidden=point.hidden,
        seq_len=point.seq_len,
        batch=point.batch,
        ffn_mult=point.ffn_mult,
        precision_bits=point.precision_bits,
    )
    parallelism = ParallelismConfig(
        tp_degree=point.tp_degree,
        dp_degree=point.dp_degree,
        dp_comm_slowdown=point.dp_comm_slowdown,
    )
    return model, parallelism


def evaluate_point(point: SweepPoint, costs: CostModel) -> dict:
    """One result row; errors are captured in the ``error`` column."""
    row = {
        "H": point.hidden, "SL": point.seq_len, "B": point.batch,
        "TP": point.tp_degree, "DP": point.dp_degree, "f": point.flop_vs_bw,
        "compute_s": None, "serial_comm_s": None, "dp_comm_s": None,
        "hidden_s": None, "exposed_s": None,
        "frac_compute": None, "frac_serial": None, "frac_exposed": None,
        "edge_ratio": None, "slack_ratio": None, "error": "",
    }
    try:
        model, parallelism = _point_configs(point)
        ratios = analytic.edge_slack(model, parallelism)
        breakdown = projector.combined_breakdown(
            model, parallelism, costs, flop_vs_bw=point.flop_vs_bw)
        row.update({
            "compute_s": breakdown.compute_time,
            "serial_comm_s": breakdown.serialized_comm_time,
            "dp_comm_s": breakdown.dp_comm_time,
            "hidden_s": breakdown.overlapped_hidden_time,
            "exposed_s": breakdown.exposed_dp_time,
            "frac_compute": breakdown.frac_compute,
            "frac_serial": breakdown.frac_serialized,
            "frac_exposed": breakdown.frac_exposed,
            "edge_ratio": ratios.edge_ratio,
            "slack_ratio": ratios.slack_ratio,
        })
    except (ValueError, ArithmeticError) as exc:
        row["error"] = str(exc)
    return row


def run_sweep(grid: Sequence[SweepPoint], costs: CostModel) -> list[dict]:
    """Evaluate every grid point, in grid order. Rows are independent."""
    if not grid:
        raise ValueError("sweep grid is empty")
    return [evaluate_point(point, costs) for point in grid]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _table_csv(table: Sequence[dict]) -> str:
    lines = [",".join(RESULT_COLUMNS)]
    for row in table:
        lines.append(",".join(_cell(row.get(col)) for col in RESULT_COLUMNS))
    return "\n".join(lines) + "\n"


def _table_json(table: Sequence[dict]) -> str:
    return json.dumps([{col: row.get(col) for col in RESULT_COLUMNS} for row in table],
                      indent=2) + "\n"


def _fmt_size(value: int) -> str:
    if value >= 1024 and value % 1024 == 0:
        return f"{value // 1024}K"
    return str(value)


def _require_ok_rows(table: Sequence[dict], figure: str) -> list[dict]:
    rows = [row for row in table if not row.get("error")]
    if not rows:
        raise ValueError(f"no successful rows to reshape for {figure}")
    return rows


def _plot_rows_fig10(table: Sequence[dict], with_f: bool) -> list[tuple]:
    figure = "fig12" if with_f else "fig10"
    out = []
    for row in _require_ok_rows(table, figure):
        series = f"H={_fmt_size(row['H'])}/SL={_fmt_size(row['SL'])}/B={row['B']}"
        if with_f:
            series += f"/f={row['f']:g}"
        out.append((figure, row["TP"], series, row["frac_serial"]))
    return out


def _plot_rows_fig11(table: Sequence[dict], with_f: bool) -> list[tuple]:
    # Backward compute is exactly 2/3 of total compute (backward GEMMs do
    # twice the forward work), so overlap % is recoverable from the table.
    figure = "fig13" if with_f else "fig11"
    out = []
    for row in _require_ok_rows(table, figure):
        backprop = row["compute_s"] * (2.0 / 3.0)
        if backprop <= 0:
            raise ValueError(f"row H={row['H']} has zero compute; cannot derive overlap")
        dp_comm = row["hidden_s"] + row["exposed_s"]
        overlap_pct = 100.0 * dp_comm / backprop
        series = f"H={_fmt_size(row['H'])}"
        if with_f:
            series += f"/f={row['f']:g}"
        out.append((figure, row["SL"] * row["B"], series, overlap_pct))
    return out


def _plot_rows_fig14(table: Sequence[dict]) -> list[tuple]:
    out = []
    for row in _require_ok_rows(table, "fig14"):
        label = (f"H={_fmt_size(row['H'])}/SL={_fmt_size(row['SL'])}/B={row['B']}"
                 f"/TP={row['TP']}/f={row['f']:g}")
        for series, column in (("compute", "frac_compute"),
                               ("serialized", "frac_serial"),
                               ("exposed", "frac_exposed")):
            out.append(("fig14", label, series, row[column]))
    return out


def trend_table(points: Sequence[analytic.TrendPoint]) -> list[dict]:
    """Tabulate a trend series so it can be emitted like sweep results."""
    return [
        {"model": p.model, "B": p.batch, "TP": p.tp_degree,
         "slack_ratio": p.slack_ratio, "edge_ratio": p.edge_ratio,
         "slack_norm": p.slack_norm, "edge_norm": p.edge_norm}
        for p in points
    ]


def _plot_rows_fig7(table: Sequence[dict]) -> list[tuple]:
    out = []
    for row in table:
        for key in ("model", "slack_norm", "edge_norm"):
            if key not in row:
                raise ValueError(f"fig7 needs column {key!r}; build the table "
                                 "with trend_table()")
        out.append(("fig7", row["model"], "slack", row["slack_norm"]))
        out.append(("fig7", row["model"], "edge", row["edge_norm"]))
    return out


def _plot_csv(rows: Iterable[tuple]) -> str:
    lines = [",".join(PLOT_COLUMNS)]
    for figure, x, series, y in rows:
        lines.append(",".join((figure, _cell(x), series, _cell(y))))
    return "\n".join(lines) + "\n"


def emit_report(table: Sequence[dict], fmt: str = "csv", figure: str = "none") -> str:
    """Render a result table, either in full or reshaped as figure plot data.

    ``fmt`` in {csv, json} applies to the full table; figure modes always emit
    plot-data CSV with columns ``figure,x,series,y``. ``fig7`` reshapes a
    table built with :func:`trend_table`; the others reshape sweep results.
    """
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; expected one of {FIGURES}")
    if figure == "none":
        if fmt == "csv":
            return _table_csv(table)
        if fmt == "json":
            return _table_json(table)
        raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")
    if figure == "fig7":
        return _plot_csv(_plot_rows_fig7(table))
    if figure == "fig10":
        return _plot_csv(_plot_rows_fig10(table, with_f=False))
    if figure == "fig12":
        return _plot_csv(_plot_rows_fig10(table, with_f=True))
    if figure == "fig11":
        return _plot_csv(_plot_rows_fig11(table, with_f=False))
    if figure == "fig13":
        return _plot_csv(_plot_rows_fig11(table, with_f=True))
    return _plot_csv(_plot_rows_fig14(table))
