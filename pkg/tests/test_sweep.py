import json

import pytest

from commscale import analytic
from commscale.config import HardwareConfig
from commscale.costmodel import CostModel, OperatorRecord
from commscale.sweep import (
    PLOT_COLUMNS,
    RESULT_COLUMNS,
    SweepPoint,
    SweepSpec,
    build_grid,
    emit_report,
    evaluate_point,
    run_sweep,
    trend_table,
)

HW = HardwareConfig(peak_flops=100e12, ar_bandwidth=150e9)
ROOFLINE = CostModel.roofline(HW)


class TestBuildGrid:
    def test_default_grid_has_392_points(self):
        grid = build_grid(SweepSpec())
        assert len(grid) == 392  # 7 H x 4 SL x 2 B x 7 TP, all divisible

    def test_all_default_pairs_pass_divisibility(self):
        grid = build_grid(SweepSpec())
        assert all(point.hidden % point.tp_degree == 0 for point in grid)

    def test_single_values_give_single_point(self):
        spec = SweepSpec(h_values=(4096,), sl_values=(1024,), b_values=(1,),
                         tp_values=(8,), f_values=(1.0,))
        assert len(build_grid(spec)) == 1

    def test_indivisible_pairs_filtered_not_errored(self):
        spec = SweepSpec(h_values=(1000, 1024), sl_values=(64,), b_values=(1,),
                         tp_values=(256,), f_values=(1.0,))
        grid = build_grid(spec)
        assert [point.hidden for point in grid] == [1024]

    def test_seq_times_batch_filter(self):
        spec = SweepSpec(filters=(lambda h, sl, b, tp, f: sl * b == 4096,))
        grid = build_grid(spec)
        assert len(grid) == 98  # (SL=1K,B=4) and (SL=4K,B=1): 7 H x 7 TP x 2
        assert {(p.seq_len, p.batch) for p in grid} == {(1024, 4), (4096, 1)}

    def test_lexicographic_order(self):
        grid = build_grid(SweepSpec())
        keys = [(p.hidden, p.seq_len, p.batch, p.tp_degree, p.flop_vs_bw)
                for p in grid]
        assert keys == sorted(keys)

    def test_empty_after_filtering_is_not_an_error(self):
        spec = SweepSpec(filters=(lambda h, sl, b, tp, f: False,))
        assert build_grid(spec) == []

    def test_grid_count_matches_independent_enumeration(self):
        spec = SweepSpec(h_values=(96, 512, 1000, 4096), sl_values=(64, 256),
                         b_values=(1, 2, 3), tp_values=(1, 8, 32, 250),
                         f_values=(1.0, 2.0),
                         filters=(lambda h, sl, b, tp, f: h * b % 3 != 1,))
        expected = sum(
            1
            for h in spec.h_values for sl in spec.sl_values
            for b in spec.b_values for tp in spec.tp_values
            for f in spec.f_values
            if h % tp == 0 and h * b % 3 != 1
        )
        assert len(build_grid(spec)) == expected > 0

    def test_empty_value_list_rejected(self):
        with pytest.raises(ValueError, match="h_values"):
            SweepSpec(h_values=())

    def test_from_json(self):
        spec = SweepSpec.from_json(
            '{"H": [1024, 2048], "SL": [512], "B": [1], "TP": [4], '
            '"f": [1, 4], "dp": 8, "filters": {"sl_times_b": 512}}')
        grid = build_grid(spec)
        assert len(grid) == 4
        assert all(p.dp_degree == 8 for p in grid)

    def test_from_json_rejects_unknown_keys(self):
        with pytest.raises(ValueError, match="headroom"):
            SweepSpec.from_json('{"headroom": 2}')

    def test_from_json_hardware_block(self):
        spec = SweepSpec.from_json(
            '{"H": [1024], "hardware": {"peak_flops": 9e13, "ar_bandwidth": 2e11}}')
        assert spec.hardware.peak_flops == 9e13
        assert spec.hardware.ar_bandwidth == 2e11


class TestRunSweep:
    def test_row_fractions_close(self):
        table = run_sweep(build_grid(SweepSpec()), ROOFLINE)
        assert len(table) == 392
        for row in table:
            assert row["error"] == ""
            total = row["frac_compute"] + row["frac_serial"] + row["frac_exposed"]
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_rows_match_direct_evaluation(self):
        grid = build_grid(SweepSpec(h_values=(4096,), sl_values=(2048,),
                                    b_values=(4,), tp_values=(16,)))
        row = run_sweep(grid, ROOFLINE)[0]
        assert row["edge_ratio"] == pytest.approx(
            4 * (7 * 4096 + 2048) / (16 * 16), rel=1e-12)
        assert row["slack_ratio"] == pytest.approx(32 * 2048 * 4 / 16, rel=1e-12)

    def test_deterministic(self):
        table1 = run_sweep(build_grid(SweepSpec()), ROOFLINE)
        table2 = run_sweep(build_grid(SweepSpec()), ROOFLINE)
        assert emit_report(table1) == emit_report(table2)

    def test_row_error_is_isolated(self):
        good = build_grid(SweepSpec(h_values=(1024,), sl_values=(512,),
                                    b_values=(1,), tp_values=(4,)))[0]
        bad = SweepPoint(hidden=1000, seq_len=512, batch=1, tp_degree=256,
                         flop_vs_bw=1.0, dp_degree=4, dp_comm_slowdown=1.0,
                         num_layers=1, precision_bits=16, ffn_mult=4)
        table = run_sweep([good, bad, good], ROOFLINE)
        assert table[0]["error"] == "" and table[2]["error"] == ""
        assert "1000" in table[1]["error"]
        assert table[1]["compute_s"] is None

    def test_pricing_failure_recorded_per_row(self):
        # allreduce-only calibration cannot price gemm work
        crippled = CostModel.calibrate([OperatorRecord("allreduce", 1e6, 1e-5)], HW)
        grid = build_grid(SweepSpec(h_values=(1024,), sl_values=(512,),
                                    b_values=(1,), tp_values=(4,)))
        table = run_sweep(grid, crippled)
        assert "gemm" in table[0]["error"]

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            run_sweep([], ROOFLINE)


class TestEmitReport:
    def _small_table(self):
        spec = SweepSpec(h_values=(1024, 2048), sl_values=(512,), b_values=(1, 4),
                         tp_values=(4, 8), f_values=(1.0,))
        return run_sweep(build_grid(spec), ROOFLINE)

    def test_csv_header_matches_contract(self):
        table = self._small_table()
        header = emit_report(table).splitlines()[0]
        assert header == ",".join(RESULT_COLUMNS)
        assert header == ("H,SL,B,TP,DP,f,compute_s,serial_comm_s,dp_comm_s,"
                          "hidden_s,exposed_s,frac_compute,frac_serial,"
                          "frac_exposed,edge_ratio,slack_ratio,error")

    def test_csv_and_json_carry_identical_values(self):
        table = self._small_table()
        csv_lines = emit_report(table, fmt="csv").splitlines()[1:]
        json_rows = json.loads(emit_report(table, fmt="json"))
        assert len(csv_lines) == len(json_rows)
        for line, row in zip(csv_lines, json_rows):
            cells = line.split(",")
            assert int(cells[0]) == row["H"]
            assert float(cells[6]) == row["compute_s"]
            assert float(cells[14]) == row["edge_ratio"]

    def test_fig10_is_a_pure_reshape(self):
        table = self._small_table()
        lines = emit_report(table, figure="fig10").splitlines()
        assert lines[0] == ",".join(PLOT_COLUMNS)
        assert len(lines) - 1 == len(table)
        by_key = {(row["TP"], row["H"], row["SL"], row["B"]): row["frac_serial"]
                  for row in table}
        for line in lines[1:]:
            figure, x, series, y = line.split(",")
            assert figure == "fig10"
            parts = dict(item.split("=") for item in series.split("/"))
            key = (int(x), 1024 * int(parts["H"].rstrip("K")),
                   int(parts["SL"]), int(parts["B"]))
            assert float(y) == by_key[key]

    def test_fig11_overlap_percentages(self):
        table = self._small_table()
        lines = emit_report(table, figure="fig11").splitlines()[1:]
        for line, row in zip(lines, table):
            _, x, _, y = line.split(",")
            assert int(x) == row["SL"] * row["B"]
            dp_comm = row["hidden_s"] + row["exposed_s"]
            assert float(y) == pytest.approx(
                100 * dp_comm / (row["compute_s"] * 2 / 3), rel=1e-12)

    def test_fig12_and_fig13_add_f_series(self):
        spec = SweepSpec(h_values=(1024,), sl_values=(512,), b_values=(1,),
                         tp_values=(4,), f_values=(1.0, 4.0))
        table = run_sweep(build_grid(spec), ROOFLINE)
        for figure in ("fig12", "fig13"):
            lines = emit_report(table, figure=figure).splitlines()[1:]
            assert any("/f=1" in line for line in lines)
            assert any("/f=4" in line for line in lines)

    def test_fig14_components_sum_to_one(self):
        table = self._small_table()[:1]
        lines = emit_report(table, figure="fig14").splitlines()[1:]
        assert len(lines) == 3
        assert sum(float(line.split(",")[3]) for line in lines) == pytest.approx(
            1.0, abs=1e-9)

    def test_fig7_from_trend_table(self):
        table = trend_table(analytic.trend_series())
        lines = emit_report(table, figure="fig7").splitlines()
        assert lines[0] == "figure,x,series,y"
        assert lines[1].startswith("fig7,BERT,slack,1.0")
        assert len(lines) - 1 == 16  # 8 models x 2 series

    def test_fig7_requires_trend_columns(self):
        with pytest.raises(ValueError, match="fig7"):
            emit_report(self._small_table(), figure="fig7")

    def test_unknown_figure_rejected(self):
        with pytest.raises(ValueError, match="figure"):
            emit_report(self._small_table(), figure="fig99")

    def test_error_rows_are_skipped_in_plots(self):
        bad = SweepPoint(hidden=1000, seq_len=512, batch=1, tp_degree=256,
                         flop_vs_bw=1.0, dp_degree=4, dp_comm_slowdown=1.0,
                         num_layers=1, precision_bits=16, ffn_mult=4)
        table = run_sweep([bad], ROOFLINE)
        with pytest.raises(ValueError, match="no successful rows"):
            emit_report(table, figure="fig10")
