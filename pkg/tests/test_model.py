"""Instance construction, schedules and exact spectrum bounds."""

import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdqaoa.model import (
    AngleSchedule,
    Boundary,
    ChainSpec,
    SpectrumBounds,
    Variant,
    expand_constrained,
    make_open_random,
    make_open_uniform,
    make_ring_uniform,
    params_per_step,
    spec_from_json,
    spec_to_json,
    spectrum_bounds,
)


def brute_force_bounds(spec: ChainSpec) -> tuple[float, float]:
    bonds = spec.bonds()
    energies = []
    for bits in itertools.product((-1, 1), repeat=spec.n_sites):
        energies.append(sum(j * bits[a] * bits[b] for a, b, j in bonds))
    return min(energies), max(energies)


class TestChainSpec:
    def test_ring_counts_couplings(self):
        spec = make_ring_uniform(6)
        assert spec.n_bonds == 6
        assert spec.bonds()[-1] == (5, 0, 1.0)

    def test_open_counts_couplings(self):
        spec = make_open_uniform(6)
        assert spec.n_bonds == 5
        assert spec.bonds()[-1] == (4, 5, 1.0)

    def test_wrong_coupling_count_rejected(self):
        with pytest.raises(ValueError, match="couplings"):
            ChainSpec(5, Boundary.OPEN, (1.0,) * 5)
        with pytest.raises(ValueError, match="couplings"):
            ChainSpec(5, Boundary.PERIODIC, (1.0,) * 4)

    def test_tiny_chains_rejected(self):
        with pytest.raises(ValueError):
            ChainSpec(2, Boundary.PERIODIC, (1.0, 1.0))
        with pytest.raises(ValueError):
            ChainSpec(1, Boundary.OPEN, ())

    def test_nonfinite_couplings_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            ChainSpec(3, Boundary.OPEN, (1.0, float("nan")))

    def test_uniform_flag(self):
        assert make_ring_uniform(5).is_uniform
        assert not ChainSpec(3, Boundary.OPEN, (1.0, -1.0)).is_uniform

    def test_random_instance_reproducible(self):
        a = make_open_random(10, seed=42)
        b = make_open_random(10, seed=42)
        assert a == b
        assert a.seed == 42
        assert all(-1.0 <= j <= 1.0 for j in a.couplings)
        assert a != make_open_random(10, seed=43)


class TestVariant:
    def test_params_per_step(self):
        assert params_per_step(Variant.QAOA) == 2
        assert params_per_step(Variant.QAOA_CD) == 3
        assert params_per_step(Variant.QAOA_2CD) == 5
        assert params_per_step(Variant.QAOA_CD_2P) == 2
        assert params_per_step(Variant.QAOA_2CD_2P) == 2

    def test_free_form(self):
        assert Variant.QAOA_CD_2P.free_form is Variant.QAOA_CD
        assert Variant.QAOA_2CD_2P.free_form is Variant.QAOA_2CD
        assert Variant.QAOA.free_form is Variant.QAOA

    def test_is_constrained(self):
        constrained = {v for v in Variant if v.is_constrained}
        assert constrained == {Variant.QAOA_CD_2P, Variant.QAOA_2CD_2P}


class TestAngleSchedule:
    def test_shape_validation(self):
        with pytest.raises(ValueError, match="parameters per step"):
            AngleSchedule(Variant.QAOA, np.zeros((2, 3)))
        with pytest.raises(ValueError, match="2D"):
            AngleSchedule(Variant.QAOA, np.zeros(4))
        with pytest.raises(ValueError, match="at least one step"):
            AngleSchedule(Variant.QAOA, np.zeros((0, 2)))

    def test_flat_round_trip(self, rng):
        vals = rng.normal(size=(4, 5))
        sched = AngleSchedule(Variant.QAOA_2CD, vals)
        again = AngleSchedule.from_flat(Variant.QAOA_2CD, 4, sched.to_flat())
        np.testing.assert_array_equal(again.values, vals)
        assert sched.n_params == 20
        assert sched.steps == 4

    def test_from_flat_size_check(self):
        with pytest.raises(ValueError, match="expected"):
            AngleSchedule.from_flat(Variant.QAOA, 3, np.zeros(5))

    def test_column_access(self, rng):
        sched = AngleSchedule(Variant.QAOA_CD, rng.normal(size=(3, 3)))
        np.testing.assert_array_equal(sched.column("alpha"), sched.values[:, 2])
        with pytest.raises(KeyError):
            sched.column("delta")

    @given(
        gamma=st.floats(-4, 4, allow_nan=False),
        beta=st.floats(-4, 4, allow_nan=False),
    )
    def test_constrained_expansion_relations(self, gamma, beta):
        sched = AngleSchedule(Variant.QAOA_2CD_2P, np.array([[gamma, beta]]))
        free = expand_constrained(sched)
        assert free.variant is Variant.QAOA_2CD
        g, b, a, d, z = free.values[0]
        assert a == pytest.approx(-beta * gamma / 2, abs=1e-15)
        assert d == pytest.approx(beta**2 * gamma / 6, abs=1e-15)
        assert z == pytest.approx(beta * gamma**2 / 3, abs=1e-15)
        assert (g, b) == (gamma, beta)

    def test_expand_cd_2p(self):
        sched = AngleSchedule(Variant.QAOA_CD_2P, np.array([[0.3, 0.7]]))
        free = expand_constrained(sched)
        assert free.variant is Variant.QAOA_CD
        assert free.values[0, 2] == pytest.approx(-0.7 * 0.3 / 2)

    def test_expand_rejects_free_variant(self):
        with pytest.raises(ValueError, match="free-form"):
            expand_constrained(AngleSchedule.zeros(Variant.QAOA, 2))


class TestSpectrumBounds:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            SpectrumBounds(1.0, -1.0)
        assert SpectrumBounds(-3.0, 5.0).width == 8.0

    def test_uniform_ring_even(self):
        b = spectrum_bounds(make_ring_uniform(10))
        assert (b.e_min, b.e_max) == (-10.0, 10.0)

    def test_uniform_ring_odd_frustrated(self):
        # An odd antiferromagnetic ring cannot satisfy every bond.
        b = spectrum_bounds(make_ring_uniform(7))
        assert (b.e_min, b.e_max) == (-5.0, 7.0)

    def test_open_uniform(self):
        b = spectrum_bounds(make_open_uniform(20))
        assert (b.e_min, b.e_max) == (-19.0, 19.0)

    @pytest.mark.parametrize("seed", range(8))
    def test_open_random_matches_brute_force(self, seed):
        spec = make_open_random(8, seed)
        b = spectrum_bounds(spec)
        lo, hi = brute_force_bounds(spec)
        assert b.e_min == pytest.approx(lo, abs=1e-12)
        assert b.e_max == pytest.approx(hi, abs=1e-12)

    @pytest.mark.parametrize("seed", range(8))
    def test_ring_random_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        couplings = tuple(rng.uniform(-1, 1, size=9).tolist())
        spec = ChainSpec(9, Boundary.PERIODIC, couplings)
        b = spectrum_bounds(spec)
        lo, hi = brute_force_bounds(spec)
        assert b.e_min == pytest.approx(lo, abs=1e-12)
        assert b.e_max == pytest.approx(hi, abs=1e-12)

    def test_ring_with_zero_coupling(self):
        spec = ChainSpec(4, Boundary.PERIODIC, (1.0, -1.0, 0.0, 2.0))
        b = spectrum_bounds(spec)
        lo, hi = brute_force_bounds(spec)
        assert (b.e_min, b.e_max) == (lo, hi)


class TestJson:
    def test_round_trip(self):
        spec = make_open_random(12, seed=7)
        again = spec_from_json(spec_to_json(spec))
        assert again == spec

    def test_schema_fields(self):
        obj = json.loads(spec_to_json(make_ring_uniform(6)))
        assert set(obj) == {"n", "boundary", "couplings"}
        obj = json.loads(spec_to_json(make_open_random(6, seed=3)))
        assert set(obj) == {"n", "boundary", "couplings", "seed"}
        assert obj["boundary"] == "open"

    def test_malformed_rejected(self):
        with pytest.raises(ValueError, match="malformed"):
            spec_from_json('{"n": 4, "couplings": [1, 1, 1]}')
        with pytest.raises(ValueError, match="malformed"):
            spec_from_json('{"n": 4, "boundary": "twisted", "couplings": [1, 1, 1]}')
        with pytest.raises(ValueError):
            spec_from_json('{"n": 4, "boundary": "open", "couplings": [1, 1, 1, 1]}')
