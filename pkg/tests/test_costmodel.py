import math

import pytest
from hypothesis import given, strategies as st

from commscale.config import HardwareConfig
from commscale.costmodel import (
    CostModel,
    OperatorRecord,
    ProfileError,
    ar_time,
    parse_profile,
    roofline_gemm_time,
)

HW = HardwareConfig(peak_flops=100e12, flops_efficiency=0.85,
                    ar_bandwidth=150e9, ar_ref_devices=4)


class TestParseProfile:
    def test_basic_rows(self):
        text = ("kind,size_metric,time_s\n"
                "gemm,8053063680,0.000095\n"
                "allreduce,4194304,0.000028\n")
        records = parse_profile(text)
        assert records[0] == OperatorRecord("gemm", 8053063680.0, 0.000095)
        assert records[1] == OperatorRecord("allreduce", 4194304.0, 2.8e-5)

    def test_comments_and_blank_lines_skipped(self):
        text = ("# synthetic\n\nkind,size_metric,time_s\n"
                "# mid comment\n"
                "layernorm,524288,0.000005\n")
        records = parse_profile(text)
        assert len(records) == 1 and records[0].kind == "layernorm"

    def test_header_mismatch(self):
        with pytest.raises(ProfileError, match="header"):
            parse_profile("kind,size,time\ngemm,1,1\n")

    def test_non_positive_size_reports_line(self):
        text = "kind,size_metric,time_s\ngemm,0,0.0001\n"
        with pytest.raises(ProfileError, match="line 2"):
            parse_profile(text)

    def test_unknown_kind_reports_line(self):
        text = "kind,size_metric,time_s\ngemm,1,1e-6\nconv,5,1e-6\n"
        with pytest.raises(ProfileError, match="line 3.*conv"):
            parse_profile(text)

    def test_all_bad_rows_reported(self):
        text = ("kind,size_metric,time_s\n"
                "gemm,abc,1e-6\n"
                "gemm,1,-1\n")
        with pytest.raises(ProfileError) as err:
            parse_profile(text)
        assert "line 2" in str(err.value) and "line 3" in str(err.value)

    def test_empty_profile(self):
        with pytest.raises(ProfileError, match="empty"):
            parse_profile("# nothing here\n")


class TestCalibrate:
    def test_single_record(self):
        model = CostModel.calibrate([OperatorRecord("gemm", 1e9, 1e-5)], HW)
        assert model.mode == "calibrated"
        assert model.baselines["gemm"] == ((1e9, 1e-5),)

    def test_duplicate_sizes_averaged(self):
        records = [OperatorRecord("gemm", 1e9, 10e-6),
                   OperatorRecord("gemm", 1e9, 20e-6)]
        model = CostModel.calibrate(records, HW)
        (size, time), = model.baselines["gemm"]
        assert size == 1e9
        assert time == pytest.approx(15e-6, rel=1e-12)

    def test_unsorted_input_stored_sorted(self):
        records = [OperatorRecord("allreduce", 4e6, 3e-5),
                   OperatorRecord("allreduce", 1e6, 1e-5),
                   OperatorRecord("allreduce", 2e6, 2e-5)]
        model = CostModel.calibrate(records, HW)
        sizes = [size for size, _ in model.baselines["allreduce"]]
        assert sizes == [1e6, 2e6, 4e6]

    def test_empty_records(self):
        with pytest.raises(ProfileError, match="empty"):
            CostModel.calibrate([], HW)


class TestProjectTime:
    def test_gemm_proportional_example(self):
        model = CostModel.calibrate([OperatorRecord("gemm", 1e9, 10e-6)], HW)
        assert model.project_time("gemm", 8e9) == pytest.approx(80e-6, rel=1e-12)

    def test_allreduce_proportional_example(self):
        model = CostModel.calibrate([OperatorRecord("allreduce", 2**20, 8e-6)], HW)
        assert model.project_time("allreduce", 4 * 2**20) == pytest.approx(32e-6, rel=1e-12)

    def test_layernorm_joint_scaling_example(self):
        # element count H*SL*B: doubling H and SL quadruples the size metric
        base_elems = 1024 * 512
        model = CostModel.calibrate([OperatorRecord("layernorm", base_elems, 5e-6)], HW)
        assert model.project_time("layernorm", 2048 * 1024) == pytest.approx(20e-6, rel=1e-12)

    def test_nearest_baseline_selection(self):
        model = CostModel.calibrate(
            [OperatorRecord("gemm", 1e6, 1e-6),
             OperatorRecord("gemm", 4e6, 3e-6),
             OperatorRecord("gemm", 16e6, 9e-6)], HW)
        # below the smallest baseline: scale the smallest down
        assert model.project_time("gemm", 5e5) == pytest.approx(0.5e-6, rel=1e-12)
        # between baselines: anchor on the largest baseline at or below
        assert model.project_time("gemm", 2e6) == pytest.approx(2e-6, rel=1e-12)
        assert model.project_time("gemm", 8e6) == pytest.approx(6e-6, rel=1e-12)
        # at and above the largest baseline
        assert model.project_time("gemm", 16e6) == pytest.approx(9e-6, rel=1e-12)
        assert model.project_time("gemm", 64e6) == pytest.approx(36e-6, rel=1e-12)

    def test_missing_kind_in_calibrated_mode(self):
        model = CostModel.calibrate([OperatorRecord("gemm", 1e9, 1e-5)], HW)
        with pytest.raises(ValueError, match="allreduce"):
            model.project_time("allreduce", 1e6)

    def test_zero_size_is_free(self):
        model = CostModel.roofline(HW)
        assert model.project_time("gemm", 0) == 0.0

    @given(st.floats(1e-12, 1e-3), st.lists(st.integers(1, 10**12),
                                            min_size=1, max_size=8, unique=True),
           st.floats(1.0, 1e12))
    def test_proportional_round_trip(self, per_unit, sizes, query):
        # records drawn from t = c * size are reproduced exactly at any size
        records = [OperatorRecord("gemm", float(s), per_unit * s) for s in sizes]
        model = CostModel.calibrate(records, HW)
        assert model.project_time("gemm", query) == pytest.approx(per_unit * query,
                                                                  rel=1e-12)

    @given(st.floats(1e-9, 1e-3), st.floats(1.0, 1e9), st.floats(1.0, 1e9),
           st.floats(1.0, 1e9))
    def test_projection_transitivity(self, per_unit, a, b, c):
        model_a = CostModel.calibrate([OperatorRecord("gemm", a, per_unit * a)], HW)
        t_b = model_a.project_time("gemm", b)
        model_b = CostModel.calibrate([OperatorRecord("gemm", b, t_b)], HW)
        assert model_b.project_time("gemm", c) == pytest.approx(
            model_a.project_time("gemm", c), rel=1e-12)

    @given(st.floats(1e-9, 1e-3),
           st.lists(st.integers(1, 10**10), min_size=1, max_size=6, unique=True),
           st.floats(1.0, 2e10), st.floats(1.0, 2e10))
    def test_monotone_under_proportional_baselines(self, per_unit, sizes, q1, q2):
        records = [OperatorRecord("allreduce", float(s), per_unit * s) for s in sizes]
        model = CostModel.calibrate(records, HW)
        lo, hi = min(q1, q2), max(q1, q2)
        assert model.project_time("allreduce", lo) <= model.project_time(
            "allreduce", hi) * (1 + 1e-12)

    def test_monotone_within_anchor_segment(self):
        model = CostModel.calibrate(
            [OperatorRecord("gemm", 1e6, 5e-6), OperatorRecord("gemm", 1e9, 8e-6)], HW)
        previous = 0.0
        for size in (1e6, 2e6, 1e7, 1e8, 9.9e8):  # all anchored on the 1e6 baseline
            t = model.project_time("gemm", size)
            assert t >= previous
            previous = t


class TestRoofline:
    def test_gemm_example(self):
        assert roofline_gemm_time(HW, 8.053e9) == pytest.approx(
            8.053e9 / (100e12 * 0.85), rel=1e-12)

    def test_evolution_scale_divides_compute(self):
        hw4 = HardwareConfig(peak_flops=100e12, flops_efficiency=0.85,
                             ar_bandwidth=150e9, flop_vs_bw_scale=4.0)
        assert roofline_gemm_time(hw4, 8.053e9) == pytest.approx(
            roofline_gemm_time(HW, 8.053e9) / 4, rel=1e-12)

    def test_zero_ops(self):
        assert roofline_gemm_time(HW, 0) == 0.0

    def test_roofline_model_prices_gemm_and_allreduce(self):
        model = CostModel.roofline(HW)
        assert model.project_time("gemm", 8.5e13) == pytest.approx(1.0, rel=1e-12)
        assert model.project_time("allreduce", 150e9) == pytest.approx(1.0, rel=1e-12)

    def test_roofline_layernorm_unsupported(self):
        model = CostModel.roofline(HW)
        with pytest.raises(ValueError, match="layernorm"):
            model.project_time("layernorm", 1e6)


class TestArTime:
    def test_reference_count_matches_bandwidth(self):
        t = ar_time(HW, 4_194_304, 4)
        assert t == pytest.approx(4_194_304 / 150e9, rel=1e-12)
        assert t == pytest.approx(27.96e-6, rel=1e-3)

    def test_large_n_limit(self):
        t_huge = ar_time(HW, 4_194_304, 10**9)
        limit = (4 / 3) * 4_194_304 / 150e9
        assert t_huge == pytest.approx(limit, rel=1e-6)

    def test_two_device_normalization_identity(self):
        hw2 = HardwareConfig(peak_flops=1e12, ar_bandwidth=150e9, ar_ref_devices=2)
        assert ar_time(hw2, 300e9, 2) == pytest.approx(2.0, rel=1e-12)

    def test_rejects_single_device(self):
        with pytest.raises(ValueError, match="at least 2"):
            ar_time(HW, 1024, 1)

    @given(st.floats(1.0, 1e12), st.floats(0.1, 10.0))
    def test_linear_in_bytes(self, payload, scale):
        assert ar_time(HW, payload * scale, 8) == pytest.approx(
            ar_time(HW, payload, 8) * scale, rel=1e-12)

    @given(st.integers(2, 4096), st.integers(2, 4096))
    def test_device_count_ratio(self, n1, n2):
        ratio = ar_time(HW, 1e9, n1) / ar_time(HW, 1e9, n2)
        expected = ((n1 - 1) / n1) / ((n2 - 1) / n2)
        assert ratio == pytest.approx(expected, rel=1e-12)

    def test_cost_model_allreduce_time_matches_ar_time(self):
        roof = CostModel.roofline(HW)
        for n in (2, 4, 16, 256):
            assert roof.allreduce_time(1e8, n) == pytest.approx(
                ar_time(HW, 1e8, n), rel=1e-12)


class TestSerialization:
    def test_round_trip_is_bit_exact(self):
        model = CostModel.calibrate(
            [OperatorRecord("gemm", 1e9, 1.05e-5),
             OperatorRecord("gemm", 3.7e11, 2.345678901234e-3),
             OperatorRecord("allreduce", 2**20, 8e-6),
             OperatorRecord("layernorm", 524288.0, 5e-6)], HW)
        text = model.to_json()
        restored = CostModel.from_json(text)
        assert restored == model
        assert restored.to_json() == text

    def test_missing_key_rejected(self):
        with pytest.raises(ValueError, match="baselines"):
            CostModel.from_json('{"mode": "calibrated", "hardware": {}}')

    def test_invalid_json_rejected(self):
        with pytest.raises(ValueError, match="not valid JSON"):
            CostModel.from_json("{")

    def test_baselines_must_increase(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            CostModel(mode="calibrated", hardware=HW,
                      baselines={"gemm": ((2e6, 1e-6), (1e6, 2e-6))})
