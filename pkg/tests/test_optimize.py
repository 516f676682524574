"""Optimizer behaviour: determinism, ring optima, warm starts and sweeps."""

import math

import numpy as np
import pytest

from cdqaoa.analytics import conjectured_min_ring, cost_p1_ring, upper_bound_ring
from cdqaoa.model import (
    AngleSchedule,
    Variant,
    make_open_random,
    make_open_uniform,
    make_ring_uniform,
)
from cdqaoa.optimize import (
    Method,
    OptimizerConfig,
    Strategy,
    interp_extend,
    landscape_grid,
    minimize,
    random_schedule,
    search_until,
    sweep_depth,
)


class TestConfig:
    def test_defaults(self):
        cfg = OptimizerConfig()
        assert cfg.method is Method.NELDER_MEAD
        assert cfg.max_evals == 20000
        assert cfg.init_box == pytest.approx(math.pi / 2)

    def test_validation(self):
        with pytest.raises(ValueError):
            OptimizerConfig(f_tol=0.0)
        with pytest.raises(ValueError):
            OptimizerConfig(max_evals=0)
        with pytest.raises(ValueError):
            OptimizerConfig(restarts=0)
        with pytest.raises(ValueError):
            OptimizerConfig(seed=-1)

    def test_json_round_trip(self):
        cfg = OptimizerConfig(method=Method.QUASI_NEWTON, restarts=7, seed=99)
        assert OptimizerConfig.from_json(cfg.to_json()) == cfg


class TestRandomSchedule:
    def test_deterministic(self):
        a = random_schedule(Variant.QAOA_CD, 4, seed=5, start_index=2, box=1.0)
        b = random_schedule(Variant.QAOA_CD, 4, seed=5, start_index=2, box=1.0)
        np.testing.assert_array_equal(a.values, b.values)

    def test_variants_share_master_draw(self):
        a = random_schedule(Variant.QAOA, 3, seed=5, start_index=0, box=1.0)
        b = random_schedule(Variant.QAOA_2CD, 3, seed=5, start_index=0, box=1.0)
        np.testing.assert_array_equal(a.values, b.values[:, :2])

    def test_box_bounds(self):
        sched = random_schedule(Variant.QAOA_2CD, 50, seed=1, start_index=0, box=0.3)
        assert np.abs(sched.values).max() <= 0.3

    def test_zero_box(self):
        sched = random_schedule(Variant.QAOA, 2, seed=1, start_index=0, box=0.0)
        np.testing.assert_array_equal(sched.values, np.zeros((2, 2)))


class TestMinimize:
    def test_ring_p1_reaches_conjectured_min(self):
        spec = make_ring_uniform(10)
        init = AngleSchedule(Variant.QAOA, np.array([[math.pi / 8, math.pi / 8]]))
        out = minimize(spec, Variant.QAOA, 1, init, OptimizerConfig())
        assert out.best_energy == pytest.approx(-5.0, abs=1e-8)
        assert out.residual == pytest.approx(0.25, abs=1e-8)
        assert out.converged

    def test_zero_init_single_eval_returns_initial_energy(self):
        spec = make_open_uniform(8)
        cfg = OptimizerConfig(max_evals=1, init_box=0.0)
        init = AngleSchedule.zeros(Variant.QAOA, 2)
        out = minimize(spec, Variant.QAOA, 2, init, cfg)
        assert out.best_energy == pytest.approx(0.0, abs=1e-6)
        assert not out.converged

    def test_shape_mismatch_rejected(self):
        spec = make_open_uniform(6)
        init = AngleSchedule.zeros(Variant.QAOA, 2)
        with pytest.raises(ValueError, match="match"):
            minimize(spec, Variant.QAOA_CD, 2, init, OptimizerConfig())
        with pytest.raises(ValueError, match="match"):
            minimize(spec, Variant.QAOA, 3, init, OptimizerConfig())

    @pytest.mark.parametrize("method", list(Method))
    def test_methods_agree_on_easy_problem(self, method):
        spec = make_ring_uniform(6)
        init = AngleSchedule(Variant.QAOA, np.array([[0.3, 0.3]]))
        out = minimize(spec, Variant.QAOA, 1, init, OptimizerConfig(method=method))
        assert out.best_energy == pytest.approx(conjectured_min_ring(6, 1), abs=1e-7)

    def test_quasi_newton_uses_analytic_gradient_on_open(self):
        spec = make_open_uniform(10)
        init = AngleSchedule(Variant.QAOA_CD, 0.1 * np.ones((2, 3)))
        cfg = OptimizerConfig(method=Method.QUASI_NEWTON)
        out = minimize(spec, Variant.QAOA_CD, 2, init, cfg)
        # Gradient-based search converges in far fewer evaluations than 2-point.
        assert out.converged
        assert out.n_evals < 500

    def test_deterministic_given_seed(self):
        spec = make_open_random(8, seed=3)
        cfg = OptimizerConfig(method=Method.QUASI_NEWTON, seed=11)
        init = random_schedule(Variant.QAOA, 2, cfg.seed, 0, cfg.init_box)
        a = minimize(spec, Variant.QAOA, 2, init, cfg)
        b = minimize(spec, Variant.QAOA, 2, init, cfg)
        np.testing.assert_array_equal(a.best_angles.values, b.best_angles.values)
        assert a.best_energy == b.best_energy


class TestSearchUntil:
    def test_stops_at_target(self):
        spec = make_ring_uniform(6)
        cfg = OptimizerConfig(method=Method.POWELL, seed=2, max_evals=4000)
        out = search_until(spec, Variant.QAOA, 3, cfg, target_residual=1e-6, max_starts=40)
        assert out.residual <= 1e-6

    def test_exhausts_starts_returns_best(self):
        spec = make_ring_uniform(8)
        cfg = OptimizerConfig(method=Method.NELDER_MEAD, seed=4, max_evals=200)
        out = search_until(spec, Variant.QAOA, 1, cfg, target_residual=0.0, max_starts=3)
        assert out.residual > 0.0
        assert out.n_evals <= 600


class TestInterpExtend:
    def test_p1_duplicates(self):
        prev = AngleSchedule(Variant.QAOA, np.array([[0.5, -0.3]]))
        guess = interp_extend(prev)
        np.testing.assert_allclose(guess.values, [[0.5, -0.3], [0.5, -0.3]])

    def test_p2_midpoint(self):
        prev = AngleSchedule(Variant.QAOA, np.array([[1.0, 4.0], [3.0, 8.0]]))
        guess = interp_extend(prev)
        np.testing.assert_allclose(
            guess.values, [[1.0, 4.0], [2.0, 6.0], [3.0, 8.0]]
        )

    def test_zero_in_zero_out(self):
        guess = interp_extend(AngleSchedule.zeros(Variant.QAOA_2CD, 4))
        np.testing.assert_array_equal(guess.values, np.zeros((5, 5)))

    def test_convex_between_parents(self, rng):
        prev = AngleSchedule(Variant.QAOA_CD, rng.normal(size=(6, 3)))
        guess = interp_extend(prev)
        padded = np.vstack([np.zeros((1, 3)), prev.values, np.zeros((1, 3))])
        lo = np.minimum(padded[:-1], padded[1:])
        hi = np.maximum(padded[:-1], padded[1:])
        assert np.all(guess.values >= lo - 1e-12)
        assert np.all(guess.values <= hi + 1e-12)


class TestSweepDepth:
    def test_ring_interp_matches_upper_bound(self):
        spec = make_ring_uniform(10)
        cfg = OptimizerConfig(seed=1)
        results = sweep_depth(spec, Variant.QAOA, 5, Strategy.INTERP, cfg)
        for p, res in enumerate(results, start=1):
            assert res.residual == pytest.approx(upper_bound_ring(10, p), abs=1e-6)

    def test_nested_multistart_nonincreasing(self):
        spec = make_open_random(10, seed=6)
        cfg = OptimizerConfig(
            method=Method.QUASI_NEWTON, restarts=4, seed=3, max_evals=300
        )
        results = sweep_depth(
            spec, Variant.QAOA, 6, Strategy.MULTISTART, cfg, nested=True
        )
        energies = [r.best_energy for r in results]
        assert all(a >= b - 1e-9 for a, b in zip(energies, energies[1:]))

    def test_stop_residual_ends_sweep_early(self):
        spec = make_ring_uniform(6)
        cfg = OptimizerConfig(seed=1)
        results = sweep_depth(
            spec, Variant.QAOA, 6, Strategy.INTERP, cfg, stop_residual=1e-6
        )
        assert len(results) == 3
        assert results[-1].residual <= 1e-6

    def test_extra_starts_join_pool(self):
        spec = make_ring_uniform(6)
        cfg = OptimizerConfig(restarts=1, max_evals=1, f_tol=1e-2, x_tol=1e-2, seed=0)
        good = AngleSchedule(Variant.QAOA, np.array([[math.pi / 8, math.pi / 8]]))
        results = sweep_depth(
            spec,
            Variant.QAOA,
            1,
            Strategy.MULTISTART,
            cfg,
            extra_starts={1: [good]},
        )
        assert results[0].best_energy == pytest.approx(-3.0, abs=1e-3)
        assert results[0].start_index == 1

    def test_invalid_p_max(self):
        with pytest.raises(ValueError, match="p_max"):
            sweep_depth(
                make_ring_uniform(6), Variant.QAOA, 0, Strategy.INTERP, OptimizerConfig()
            )


class TestLandscapeGrid:
    def test_qaoa_ring_matches_closed_form(self):
        n = 10
        spec = make_ring_uniform(n)
        grid = ((-0.5, 0.5), (-0.7, 0.7), 9, 11)
        vals = landscape_grid(spec, Variant.QAOA, grid)
        betas = np.linspace(-0.5, 0.5, 9)
        gammas = np.linspace(-0.7, 0.7, 11)
        for i, beta in enumerate(betas):
            for j, gamma in enumerate(gammas):
                assert vals[i, j] == pytest.approx(
                    cost_p1_ring(n, beta, gamma), abs=1e-10
                )

    def test_beta_zero_column_vanishes(self):
        spec = make_open_uniform(12)
        vals = landscape_grid(spec, Variant.QAOA, ((0.0, 0.0), (-1.0, 1.0), 1, 7))
        np.testing.assert_allclose(vals, 0.0, atol=1e-12)

    def test_constrained_and_fixed_extras(self):
        spec = make_open_uniform(8)
        grid = ((-0.4, 0.4), (-0.4, 0.4), 5, 5)
        constrained = landscape_grid(spec, Variant.QAOA_CD_2P, grid)
        free_zero = landscape_grid(spec, Variant.QAOA_CD, grid, fixed=np.zeros(1))
        qaoa = landscape_grid(spec, Variant.QAOA, grid)
        np.testing.assert_allclose(free_zero, qaoa, atol=1e-12)
        assert np.abs(constrained - qaoa).max() > 1e-4

    def test_fixed_shape_validation(self):
        spec = make_open_uniform(8)
        with pytest.raises(ValueError, match="fixed extra"):
            landscape_grid(
                spec, Variant.QAOA_CD, ((0, 1), (0, 1), 2, 2), fixed=np.zeros(2)
            )
