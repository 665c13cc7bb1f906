import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harminterp.classify import PointSequence
from harminterp.disc import DiscPoint
from harminterp.gallery import _union_of_pair, radial_geometric
from harminterp.measure import BoundaryMeasure, UniformDensity
from harminterp.probe import (
    ProbeError,
    necessity_replay,
    radial_projection_measure,
    ray_flags,
    ray_max_profile,
)


@pytest.fixture(scope="module")
def ten_atoms():
    rng = np.random.default_rng(5)
    return BoundaryMeasure(rng.uniform(0, 2 * math.pi, 10), rng.uniform(0.1, 1.0, 10))


# ------------------------------------------------------------ projections


class TestRadialProjection:
    def test_constant_function_has_empty_shadow(self):
        # the exact arc-length measure extends to the constant 1, which
        # never exceeds any threshold above 1
        for lam in (2.0, 64.0):
            est = radial_projection_measure(UniformDensity(), lam, rays=512, radial=32)
            assert est.measure == 0.0

    def test_atomised_uniform_is_not_constant(self):
        # discretising arc length into atoms changes the story: each atom
        # carries its own spike, so the shadow is genuinely nonempty
        est = radial_projection_measure(BoundaryMeasure.uniform(64), 2.0, rays=512, radial=64)
        assert est.measure > 0.0

    def test_single_atom_scaled_shadow(self):
        atom = BoundaryMeasure.single_atom(0.0, 1.0)
        for lam in (2.0, 4.0, 8.0, 16.0, 32.0, 64.0):
            est = radial_projection_measure(atom, lam)
            # the ray under the atom is flagged at every threshold...
            assert ray_flags(atom, lam)[0]
            # ...and measure * threshold hovers near a fixed constant
            assert 1.9 < est.scaled < 2.1
        assert est.ray_count == 8192 and est.radial_samples == 256

    def test_monotone_in_threshold(self, ten_atoms):
        ms = [
            radial_projection_measure(ten_atoms, lam, rays=4096, radial=128).measure
            for lam in (2, 4, 8, 16, 32, 64)
        ]
        assert all(a >= b for a, b in zip(ms, ms[1:]))
        assert ms[0] == pytest.approx(1.15049, abs=1e-5)
        assert ms[-1] == pytest.approx(0.02915, abs=1e-5)

    def test_radial_refinement_never_loses_exceedances(self, ten_atoms):
        # the depth ladder is nested under doubling, so the measured
        # shadow is monotone in the radial sample count
        ms = [
            radial_projection_measure(ten_atoms, 8.0, rays=2048, radial=r).measure
            for r in (32, 64, 128, 256)
        ]
        assert all(a <= b for a, b in zip(ms, ms[1:]))

    def test_ray_refinement_never_loses_exceedances(self, ten_atoms):
        # doubled rays contain the original directions; every flag
        # survives and new directions can only add flags
        for lam in (2.0, 8.0):
            f1 = ray_flags(ten_atoms, lam, rays=2048, radial=128)
            f2 = ray_flags(ten_atoms, lam, rays=4096, radial=128)
            assert np.array_equal(f1, f2[::2])
            assert f2.sum() >= f1.sum()

    def test_profile_thresholding_matches_flags(self, ten_atoms):
        prof = ray_max_profile(ten_atoms, rays=2048, radial=64)
        for lam in (2.0, 8.0, 32.0):
            assert np.array_equal(
                prof > lam, ray_flags(ten_atoms, lam, rays=2048, radial=64)
            )

    def test_input_validation(self, ten_atoms):
        with pytest.raises(ProbeError):
            radial_projection_measure(ten_atoms, 1.0)
        with pytest.raises(ProbeError):
            radial_projection_measure(ten_atoms, 2.0, rays=0)
        with pytest.raises(ProbeError):
            ray_max_profile(BoundaryMeasure(np.array([0.0]), np.array([0.0])))

    @given(
        masses=st.lists(st.floats(0.05, 1.0), min_size=1, max_size=5),
        seed=st.integers(0, 10_000),
    )
    @settings(max_examples=30)
    def test_shadow_shrinks_with_threshold(self, masses, seed):
        rng = np.random.default_rng(seed)
        mu = BoundaryMeasure(
            rng.uniform(0, 2 * math.pi, len(masses)), np.array(masses)
        )
        lo = radial_projection_measure(mu, 2.0, rays=256, radial=32)
        hi = radial_projection_measure(mu, 16.0, rays=256, radial=32)
        assert hi.measure <= lo.measure


# ------------------------------------------------------------ replay


class TestNecessityReplay:
    def test_single_origin_node(self):
        rep = necessity_replay(PointSequence((DiscPoint(0.0, 1.0),)), 0.1)
        assert rep.feasible
        assert rep.shell_counts == (1,)
        assert rep.growth_ceiling == 1.0
        assert rep.bound_holds(2.0)

    def test_radial_sequence_one_node_per_shell(self):
        rep = necessity_replay(radial_geometric(8), 0.05)
        assert rep.feasible
        assert rep.shell_counts == (1,) * 8
        assert rep.bound_holds(2.0)

    def test_recentering_at_interior_node(self):
        rep = necessity_replay(radial_geometric(8), 0.05, base_index=3)
        assert rep.feasible
        assert rep.shell_counts == (1, 2, 2, 2, 1)
        assert rep.growth_ceiling < 2.0

    def test_union_extremal_problem_infeasible(self):
        # the merged oscillating families pass the sparser counting levels
        # individually but cannot carry the extremal assignment
        rep = necessity_replay(_union_of_pair(3), 0.3)
        assert not rep.feasible
        assert not rep.bound_holds(100.0)  # moot once infeasible
        assert rep.result.certificate is not None
        assert 1.4 < rep.growth_ceiling < 1.6

    def test_bad_base_index(self):
        with pytest.raises(ProbeError):
            necessity_replay(radial_geometric(3), 0.1, base_index=7)
