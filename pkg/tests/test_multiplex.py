"""Tests for delays, switch schedules, lane assignment, and the pipeline."""

import json
import math

import numpy as np
import pytest

from cvmbqc.gates import (
    HomodyneSetting,
    TwoNodeCluster,
    output_covariance,
    run_steps,
)
from cvmbqc.multiplex import (
    DelaySpec,
    admissible_frequencies,
    delayed_vlf,
    events_to_jsonl,
    schedule_lanes,
    simulate_pipeline,
)
from cvmbqc.quadrature import x_quad, y_quad


class TestDelayedVlf:
    def test_zero_delay_reduces_to_four_y(self):
        res = delayed_vlf(0.0, 1.7, 0.06, 5.0)
        assert res.lhs == 4 * 0.06
        assert res.entangled

    def test_grid_frequencies_reduce_exactly(self):
        period = 6.0
        for n in (1, 2, 5, 50):
            tau = n * period
            for k in range(-3, 4):
                omega = 2.0 * math.pi * k / tau
                res = delayed_vlf(tau, omega, 0.11, 1e6)
                assert res.lhs == 4 * 0.11

    def test_off_grid_with_large_x_fails(self):
        tau = 6.0
        omega = math.pi / tau  # half a cycle off the grid
        res = delayed_vlf(tau, omega, 0.01, 10.0)
        assert res.lhs > 0.5
        assert not res.entangled

    def test_periodic_in_tau(self):
        omega = 2.0
        period = 2.0 * math.pi / omega
        for tau in (0.3, 1.1, 2.9):
            a = delayed_vlf(tau, omega, 0.04, 3.0)
            b = delayed_vlf(tau + period, omega, 0.04, 3.0)
            assert a.lhs == pytest.approx(b.lhs, rel=1e-9)

    def test_lhs_bounded_by_variances(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            tau, omega = rng.uniform(0.1, 10.0, size=2)
            y, x = rng.uniform(0.0, 2.0, size=2)
            lhs = delayed_vlf(tau, omega, y, x).lhs
            assert 4 * min(x, y) - 1e-12 <= lhs <= 4 * max(x, y) + 1e-12

    def test_boundary_strict(self):
        res = delayed_vlf(0.0, 0.0, 0.125, 0.125)  # lhs exactly 0.5
        assert res.lhs == 0.5
        assert not res.entangled

    def test_rejects_negative_variances(self):
        with pytest.raises(ValueError):
            delayed_vlf(1.0, 1.0, -0.1, 1.0)


class TestAdmissibleFrequencies:
    def test_direct_formula(self):
        omegas = admissible_frequencies(6.0, [1])
        assert omegas[0] == pytest.approx(2 * math.pi / 6.0, rel=1e-15)

    def test_sin_vanishes_on_grid(self):
        tau = 7.3
        for omega in admissible_frequencies(tau, range(-5, 6)):
            assert abs(math.sin(omega * tau / 2.0)) < 1e-12

    def test_k_zero_is_whole_pulse(self):
        assert admissible_frequencies(3.0, [0])[0] == 0.0

    def test_rejects_zero_tau(self):
        with pytest.raises(ValueError):
            admissible_frequencies(0.0, [1])


class TestDelaySpec:
    def test_aligned_multiple(self):
        spec = DelaySpec(12.0, 6.0)
        assert spec.aligned and spec.multiple == 2

    def test_off_grid(self):
        spec = DelaySpec(7.0, 6.0)
        assert not spec.aligned and spec.multiple is None


class TestScheduleLanes:
    def test_single_lane_sequence(self):
        delay, schedule, assignment = schedule_lanes(6.0, 1.0, 1, 2)
        assert delay.tau == 1.0  # one lane: loop delay equals the gap
        phases = [iv.phase for iv in schedule.intervals]
        assert phases == [math.pi, 0.0, math.pi]  # inject, circulate, eject
        assert assignment.lane_of_cluster_pulse[(0, 0)] == 0
        assert assignment.lane_of_cluster_pulse[(1, 1)] == 0

    def test_two_lanes_interleave(self):
        delay, schedule, assignment = schedule_lanes(6.0, 1.0, 2, 4)
        assert delay.tau == 2.0
        assert assignment.lane_of_cluster_pulse[(0, 0)] == 0
        assert assignment.lane_of_cluster_pulse[(1, 0)] == 1
        assert assignment.lane_of_cluster_pulse[(2, 0)] == 0
        assert assignment.lane_of_cluster_pulse[(3, 0)] == 1

    def test_equal_counts_pigeonhole(self):
        _, _, assignment = schedule_lanes(6.0, 1.0, 3, 3)
        lanes = [assignment.lane_of_cluster_pulse[(m, 0)] for m in range(3)]
        assert sorted(lanes) == [0, 1, 2]

    def test_infeasible_counts_rejected(self):
        with pytest.raises(ValueError):
            schedule_lanes(6.0, 1.0, 3, 2)

    def test_schedule_is_valid(self):
        _, schedule, _ = schedule_lanes(6.0, 1.0, 2, 6)
        prev_end = -1.0
        for iv in schedule.intervals:
            assert iv.start >= prev_end
            assert iv.phase in (0.0, math.pi)
            prev_end = iv.end


def _pipeline_fixture(n_lanes=2, v=0.05):
    cluster = TwoNodeCluster.from_y_variances(v, v)
    clusters = [cluster] * (2 * n_lanes)
    inputs = [(x_quad(0), y_quad(0)) for _ in range(n_lanes)]
    settings = [
        [HomodyneSetting(0.9 + 0.1 * lane, 0.2), HomodyneSetting(1.4, 0.6 + 0.05 * lane)]
        for lane in range(n_lanes)
    ]
    return inputs, clusters, settings


class TestPipeline:
    def test_single_lane_identity_gates(self):
        cluster = TwoNodeCluster.from_y_variances(0.05, 0.05)
        ident = HomodyneSetting(math.pi / 4, -math.pi / 4)
        result = simulate_pipeline(5.0, 1.0, [(x_quad(0), y_quad(0))],
                                   [cluster, cluster], [[ident, ident]])
        out = result.outputs[0]
        np.testing.assert_allclose(out.signal_matrix, np.eye(2), atol=1e-14)
        cov = output_covariance(out, {0: np.diag([0.25, 0.25])})
        np.testing.assert_allclose(cov, 0.25 * np.eye(2) + 4 * 0.05 * np.eye(2),
                                   atol=1e-12)

    def test_lane_isolation(self):
        inputs, clusters, settings = _pipeline_fixture(2)
        result = simulate_pipeline(5.0, 1.0, inputs, clusters, settings)
        assert result.collisions() == 0
        for lane in range(2):
            direct = run_steps(inputs[lane], clusters[lane::2], settings[lane])
            pipe = result.outputs[lane]
            assert np.max(np.abs(pipe.signal_matrix - direct.signal_matrix)) == 0.0
            ca = output_covariance(pipe, {0: np.diag([0.25, 0.25])})
            cb = output_covariance(direct, {0: np.diag([0.25, 0.25])})
            assert np.max(np.abs(ca - cb)) < 1e-12

    def test_swapping_lanes_swaps_outputs(self):
        inputs, clusters, settings = _pipeline_fixture(2)
        fwd = simulate_pipeline(5.0, 1.0, inputs, clusters, settings)
        rev = simulate_pipeline(5.0, 1.0, inputs[::-1], clusters, settings[::-1])
        for a, b in zip(fwd.outputs, rev.outputs[::-1]):
            assert a.exprs == b.exprs
            assert np.array_equal(a.signal_matrix, b.signal_matrix)

    def test_event_log_structure(self):
        inputs, clusters, settings = _pipeline_fixture(2)
        result = simulate_pipeline(5.0, 1.0, inputs, clusters, settings)
        text = events_to_jsonl(result.events)
        lines = [json.loads(line) for line in text.splitlines()]
        assert len(lines) == len(result.events)
        for entry in lines:
            assert set(entry) == {"t", "tick", "element", "lane", "action"}
        injects = [e for e in lines if e["action"] == "inject"]
        ejects = [e for e in lines if e["action"] == "eject"]
        assert len(injects) == 2 and len(ejects) == 2

    def test_ticks_reject_off_grid_duration(self):
        inputs, clusters, settings = _pipeline_fixture(1)
        with pytest.raises(ValueError, match="tick grid"):
            simulate_pipeline(5.0 + 1e-4, 1.0, inputs[:1], clusters[:2],
                              settings[:1], ticks_per_gap=10)

    def test_counts_validated(self):
        inputs, clusters, settings = _pipeline_fixture(2)
        with pytest.raises(ValueError, match="clusters"):
            simulate_pipeline(5.0, 1.0, inputs, clusters[:3], settings)
        with pytest.raises(ValueError, match="setting"):
            simulate_pipeline(5.0, 1.0, inputs, clusters, settings[:1])

    def test_three_lanes_isolated(self):
        inputs, clusters, settings = _pipeline_fixture(3)
        result = simulate_pipeline(5.0, 1.0, inputs, clusters, settings)
        assert result.collisions() == 0
        assert len(result.outputs) == 3
        for lane in range(3):
            direct = run_steps(inputs[lane], clusters[lane::3], settings[lane])
            assert result.outputs[lane].exprs == direct.exprs
