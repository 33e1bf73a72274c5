"""The capped/standard greedy stages, the fallback branch, and the sweep."""

import numpy as np
import pytest

import submax as sm
from submax import CapParam, ConfigError, EstimatorConfig, Point, RunConfig

from helpers import random_constraint, random_coverage, random_function


@pytest.fixture
def one_arc_k1():
    return sm.DirectedCut(2, [(0, 1, 1.0)]), sm.CardinalityPolytope(2, 1)


class TestRunConfig:
    def test_defaults(self):
        run = RunConfig()
        assert run.alpha == 0.5 and run.delta == 0.005
        assert run.total_steps == 200
        assert 0.18 in run.theta_grid
        assert len(run.theta_grid) == 51
        assert run.theta_grid[0] == 0.0 and run.theta_grid[-1] == 1.0

    def test_every_default_theta_is_a_step_multiple(self):
        run = RunConfig()
        for t in run.theta_grid:
            k = round(t / run.delta)
            assert abs(t - k * run.delta) <= 1e-12

    def test_alpha_range(self):
        with pytest.raises(ConfigError):
            RunConfig(alpha=0.4)
        with pytest.raises(ConfigError):
            RunConfig(alpha=1.01)
        RunConfig(alpha=1.0, delta=0.01)

    def test_delta_must_divide_one(self):
        with pytest.raises(ConfigError):
            RunConfig(delta=0.3, theta_grid=(0.0,))
        RunConfig(delta=0.25, theta_grid=(0.0, 0.25, 1.0))

    def test_theta_must_be_step_multiple(self):
        with pytest.raises(ConfigError):
            RunConfig(delta=0.25, theta_grid=(0.1,))

    def test_empty_grid_rejected(self):
        with pytest.raises(ConfigError):
            RunConfig(theta_grid=())

    def test_unsorted_grid_rejected(self):
        with pytest.raises(ConfigError):
            RunConfig(delta=0.25, theta_grid=(0.5, 0.25))


class TestDampenedStage:
    def test_single_step_hand_trace(self, one_arc_k1):
        f, C = one_arc_k1
        run = RunConfig(alpha=0.5, delta=0.1, theta_grid=(0.1,))
        x_theta, v_theta, traj = sm.dampened_stage(f, C, run, 0.1)
        assert np.allclose(traj.directions[0].v, [0.5, 0.0])
        assert np.allclose(x_theta.v, [0.05, 0.0])
        assert len(traj) == 1

    def test_theta_zero(self, one_arc_k1):
        f, C = one_arc_k1
        run = RunConfig(delta=0.1, theta_grid=(0.0, 0.1))
        x_theta, v_theta, traj = sm.dampened_stage(f, C, run, 0.0)
        assert np.all(x_theta.v == 0.0)
        assert len(traj) == 0
        direct = C.linear_maximize(sm.residual_gradient(f, np.zeros(2)),
                                   CapParam(run.alpha))
        assert np.allclose(v_theta.v, direct.v)

    def test_linf_envelope_at_every_step(self):
        rng = np.random.default_rng(77)
        f = random_function(rng, 8)
        C = random_constraint(rng, 8)
        run = RunConfig(alpha=0.5, delta=0.02, theta_grid=(0.5,))
        x_theta, _, traj = sm.dampened_stage(f, C, run, 0.5)
        damp = 1.0 - run.delta * run.alpha
        for j, pt in enumerate(traj.points):
            assert pt.norm_inf() <= 1.0 - damp**j + 1e-12
        k = len(traj)
        assert x_theta.norm_inf() <= 1.0 - damp**k + 1e-12

    def test_directions_obey_cap_and_membership(self):
        rng = np.random.default_rng(5)
        f = random_function(rng, 6)
        C = random_constraint(rng, 6)
        run = RunConfig(alpha=0.5, delta=0.05, theta_grid=(0.4,))
        _, v_theta, traj = sm.dampened_stage(f, C, run, 0.4)
        for v in traj.directions + [v_theta]:
            assert v.norm_inf() <= run.alpha + 1e-12
            assert C.contains_point(v)

    def test_trajectory_lists_share_length(self):
        rng = np.random.default_rng(6)
        f = random_function(rng, 5)
        C = random_constraint(rng, 5)
        run = RunConfig(delta=0.1, theta_grid=(0.3,))
        _, _, traj = sm.dampened_stage(f, C, run, 0.3)
        assert len(traj.times) == len(traj.points) \
            == len(traj.directions) == len(traj.inner_products) == 3


class TestStandardStage:
    def test_theta_one_is_empty(self, one_arc_k1):
        f, C = one_arc_k1
        run = RunConfig(delta=0.1, theta_grid=(1.0,))
        start = Point([0.3, 0.1])
        y1, traj = sm.standard_stage(f, C, run, start, 1.0)
        assert np.allclose(y1.v, start.v)
        assert len(traj) == 0

    def test_envelope_with_dampened_prefix(self):
        rng = np.random.default_rng(15)
        f = random_function(rng, 7)
        C = random_constraint(rng, 7)
        run = RunConfig(alpha=0.5, delta=0.02, theta_grid=(0.2,))
        x_theta, _, _ = sm.dampened_stage(f, C, run, 0.2)
        y1, traj = sm.standard_stage(f, C, run, x_theta, 0.2)
        k = run.steps_of(0.2)
        base = (1.0 - run.delta * run.alpha) ** k
        for j, pt in enumerate(traj.points):
            bound = base * (1.0 - run.delta) ** j
            assert pt.norm_inf() <= 1.0 - bound + 1e-12
        final = base * (1.0 - run.delta) ** len(traj)
        assert y1.norm_inf() <= 1.0 - final + 1e-12

    def test_theta_zero_on_monotone_coverage_behaves_classically(self):
        # sanity check of the uncapped stage: close to the 1-1/e regime
        rng = np.random.default_rng(8)
        f = random_coverage(rng, 8)
        C = sm.CardinalityPolytope(8, 3)
        run = RunConfig(alpha=0.5, delta=0.005, theta_grid=(0.0,))
        x0, _, _ = sm.dampened_stage(f, C, run, 0.0)
        y1, _ = sm.standard_stage(f, C, run, x0, 0.0)
        _, opt = sm.brute_force_opt(f, C)
        assert sm.multilinear(f, y1) >= (1.0 - 1.0 / np.e - 0.02) * opt


class TestDgBranch:
    def test_nonpositive_residual_gives_origin(self, one_arc_k1):
        f, C = one_arc_k1
        p, z = sm.dg_branch(f, C, Point.ones(2))
        assert np.all(p.v == 0.0)
        assert np.all(z.v == 0.0)

    def test_z_below_p_and_feasible(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            n = int(rng.integers(2, 8))
            f = random_function(rng, n)
            C = random_constraint(rng, n)
            x = Point(rng.random(n) * 0.5)
            p, z = sm.dg_branch(f, C, x)
            assert np.all(z.v <= p.v + 1e-12)
            assert C.contains_point(z)

    def test_guarantee_against_box_corner_oracle(self):
        rng = np.random.default_rng(34)
        for _ in range(15):
            n = int(rng.integers(2, 8))
            f = random_function(rng, n)
            C = random_constraint(rng, n)
            x = Point(rng.random(n) * 0.4)
            p, z = sm.dg_branch(f, C, x)
            _, box_opt = sm.brute_force_box_opt(f, Point.zeros(n), p)
            floor = sm.guarantee_floor(sm.multilinear(f, Point.zeros(n)),
                                       sm.multilinear(f, p), box_opt)
            assert sm.multilinear(f, z) >= floor - 1e-9


class TestSolve:
    def test_zero_function(self):
        f = sm.ExplicitTable(2, np.zeros(4))
        C = sm.CardinalityPolytope(2, 1)
        run = RunConfig(delta=0.25, theta_grid=(0.0, 0.5, 1.0))
        report = sm.solve(f, C, run)
        assert report.best_value == 0.0

    def test_theta_zero_grid_degenerates_to_unified_greedy(self, one_arc_k1):
        f, C = one_arc_k1
        run = RunConfig(delta=0.1, theta_grid=(0.0,))
        report = sm.solve(f, C, run)
        assert len(report.per_theta) == 1
        r = report.per_theta[0]
        assert r.dampened_steps == 0
        assert r.standard_steps == run.total_steps
        assert np.all(r.x_theta.v == 0.0)

    def test_report_structure_and_reproduction(self):
        rng = np.random.default_rng(90)
        f = random_function(rng, 7)
        C = random_constraint(rng, 7)
        run = RunConfig(delta=0.05, theta_grid=(0.0, 0.2, 0.5, 1.0))
        _, opt = sm.brute_force_opt(f, C)
        report = sm.solve(f, C, run, opt_value=opt)
        per_theta_best = max(max(r.y1_value, r.z_value) for r in report.per_theta)
        assert report.best_value == pytest.approx(per_theta_best, abs=1e-12)
        assert abs(sm.multilinear(f, report.best) - report.best_value) <= 1e-9
        assert C.contains_point(report.best)
        for r in report.per_theta:
            assert C.contains_point(r.x_theta)
            assert C.contains_point(r.y1)
            assert C.contains_point(r.z)
            assert r.dampened_margin >= -1e-12
            assert r.standard_margin >= -1e-12
        assert report.diagnostics
        assert all(d.passed for d in report.diagnostics)

    def test_value_telescoping_along_trajectory(self):
        rng = np.random.default_rng(44)
        f = random_function(rng, 6)
        C = random_constraint(rng, 6)
        run = RunConfig(delta=0.02, theta_grid=(0.4,))
        x_theta, _, traj = sm.dampened_stage(f, C, run, 0.4)
        pts = [p.v for p in traj.points] + [x_theta.v]
        vals = [sm.multilinear(f, p) for p in pts]
        total = vals[-1] - vals[0]
        assert total == pytest.approx(sum(np.diff(vals)), abs=1e-9)
        bound_slip = run.delta**2 * f.n**3 * sm.max_singleton(f)
        for j in range(len(traj)):
            gain = vals[j + 1] - vals[j]
            assert gain >= run.delta * traj.inner_products[j] - bound_slip - 1e-12

    def test_recorded_trajectory_points_stay_feasible(self):
        rng = np.random.default_rng(61)
        f = random_function(rng, 6)
        C = random_constraint(rng, 6)
        run = RunConfig(delta=0.05, theta_grid=(0.4,))
        x_theta, _, dtraj = sm.dampened_stage(f, C, run, 0.4)
        y1, straj = sm.standard_stage(f, C, run, x_theta, 0.4)
        for pt in dtraj.points + straj.points + [x_theta, y1]:
            assert C.contains_point(pt)

    def test_alpha_one_skips_fallback_diagnostic(self):
        f = sm.DirectedCut(5, [(0, 1, 0.8), (1, 2, 0.5), (3, 0, 0.9)])
        C = sm.CardinalityPolytope(5, 2)
        run = RunConfig(alpha=1.0, delta=0.05, theta_grid=(0.0, 0.2))
        _, opt = sm.brute_force_opt(f, C)
        report = sm.solve(f, C, run, opt_value=opt)
        assert {d.name for d in report.diagnostics} == {"greedy-stage-bound"}
        assert all(d.passed for d in report.diagnostics)

    def test_single_element_ground_set(self):
        f = sm.ExplicitTable(1, [0.0, 2.0])
        C = sm.CardinalityPolytope(1, 1)
        report = sm.solve(f, C, RunConfig(delta=0.1, theta_grid=(0.0, 0.5)))
        assert report.best_value == pytest.approx(2.0)
        assert report.best_branch == "double-greedy"

    def test_mc_mode_runs_and_is_reproducible(self, one_arc_k1):
        f, C = one_arc_k1
        cfg = EstimatorConfig(mode="mc", sample_count=400, rng_seed=3)
        run = RunConfig(delta=0.25, theta_grid=(0.25,), cfg=cfg)
        a = sm.solve(f, C, run)
        b = sm.solve(f, C, run)
        assert a.best_value == b.best_value
        assert np.allclose(a.best.v, b.best.v)
