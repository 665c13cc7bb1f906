import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harminterp.arcs import ArcSet
from harminterp.classify import DensityConstants, PointSequence, fit_m
from harminterp.disc import CarlesonBox, DiscPoint, base_arc, hyperbolic_distance
from harminterp.gallery import radial_geometric
from harminterp.measure import GridSpec, harmonic_measure_arc
from harminterp.solver import generate_compatible_values
from harminterp.stopping import (
    ConstructionError,
    ConstructionParams,
    GnFamily,
    ResolutionError,
    assemble_u,
    build_e_sets,
    build_gn,
    choose_params,
    fit_m0,
    box_comparability_constant,
    shifted_point,
    solve_hinfty_partition,
    verify_estimates,
)

FULL = ArcSet.from_interval(0.0, 2.0 * math.pi)


def same_set(a: ArcSet, b: ArcSet) -> bool:
    return not (a.difference(b).pieces or b.difference(a).pieces)


@pytest.fixture(scope="module")
def radial8_params():
    seq = radial_geometric(8)
    m = fit_m(seq, 0.5, condition="a")
    consts = DensityConstants(alpha=0.5, m_const=m)
    return seq, consts, choose_params(seq, consts, 0.2)


# Shallow owner and a much deeper node on the same ray: the far branch with
# actual arc carving.  beta = 15.415, so cap_n = 15 puts the pair apart.
CARVE_OWNER = DiscPoint(0.0, 0.5)
CARVE_DEEP = DiscPoint(0.0, 2.0 ** -16)
CARVE_PAIR = PointSequence((CARVE_OWNER, CARVE_DEEP))
CARVE_PARAMS = ConstructionParams(delta=0.2, m0=128.0, gamma=0.5, cap_n=15, eta=0.01)


# ------------------------------------------------------------ parameters


class TestParams:
    def test_field_validation(self):
        good = dict(delta=0.2, m0=2.0, gamma=0.1, cap_n=5, eta=0.01)
        ConstructionParams(**good)
        for bad in (
            dict(good, delta=0.0),
            dict(good, delta=1.0),
            dict(good, gamma=1.0),
            dict(good, m0=-1.0),
            dict(good, cap_n=0),
            dict(good, eta=1.0),
        ):
            with pytest.raises(ConstructionError):
                ConstructionParams(**bad)

    def test_admissibility(self):
        c = box_comparability_constant(2.0)
        tight = ConstructionParams(
            delta=0.2, m0=2.0, gamma=0.25 / c, cap_n=5, eta=0.0625 / (c * c)
        )
        assert tight.admissible_for(0.5)
        # same knobs are far too aggressive once alpha approaches 1
        assert not tight.admissible_for(0.99)
        # gamma too large for the box constant
        wild = ConstructionParams(delta=0.2, m0=2.0, gamma=0.9, cap_n=5, eta=0.01)
        assert not wild.admissible_for(0.5)

    def test_comparability_constant_grows_with_dilation(self):
        assert box_comparability_constant(1.0) < box_comparability_constant(2.0) < box_comparability_constant(64.0)
        # value is pinned by its closed form
        scale = 40.0
        assert box_comparability_constant(2.0) == 2.0 + 2.0 * math.log2(1 + scale + math.pi * scale)


# ------------------------------------------------------------ fit_m0


class TestFitM0:
    def test_center_node_needs_no_dilation(self):
        assert fit_m0(PointSequence((DiscPoint(0.0, 1.0),)), 0.3) == 1.0

    def test_single_node_at_09(self):
        z = DiscPoint(0.0, 0.1)
        m0 = fit_m0(PointSequence((z,)), 0.5)
        assert m0 == 16.0
        assert harmonic_measure_arc(z, base_arc(z, m0)) >= 1 - 0.5 / 100

    def test_nonincreasing_in_delta(self):
        seq = radial_geometric(6)
        fits = [fit_m0(seq, d) for d in (0.05, 0.1, 0.2, 0.4, 0.8)]
        assert fits == [64.0, 64.0, 64.0, 64.0, 32.0]
        assert all(a >= b for a, b in zip(fits, fits[1:]))

    def test_rejects_bad_delta(self):
        with pytest.raises(ConstructionError):
            fit_m0(radial_geometric(3), 1.5)


# ------------------------------------------------------------ shifted points


class TestShiftedPoint:
    def test_full_shift_toward_center_owner(self):
        # owner at the origin, node at modulus 1/3: distance is exactly 1,
        # and the unit pull-back along the ray lands on the origin itself
        owner = DiscPoint(0.0, 1.0)
        node = DiscPoint(0.0, 2.0 / 3.0)
        assert float(hyperbolic_distance(owner, node)) == pytest.approx(1.0)
        p = shifted_point(owner, node, 1.0).point
        assert float(p.depth) == pytest.approx(1.0, abs=1e-12)

    def test_vanishing_shift_is_identity(self):
        node = DiscPoint(1.2, 2.0 / 3.0)
        p = shifted_point(DiscPoint(0.0, 1.0), node, 1e-14).point
        assert float(p.theta) == 1.2
        assert float(p.depth) == pytest.approx(2.0 / 3.0, abs=1e-10)

    def test_overshoot_continues_on_opposite_ray(self):
        owner, node = DiscPoint(0.0, 1e-4), DiscPoint(0.0, 0.9)
        b = 0.5 * float(hyperbolic_distance(owner, node))
        p = shifted_point(owner, node, 0.5).point
        assert float(p.theta) == pytest.approx(math.pi)
        assert abs(float(hyperbolic_distance(p, node)) - b) < 1e-10

    def test_identical_nodes_rejected(self):
        z = DiscPoint(0.3, 0.4)
        with pytest.raises(ConstructionError):
            shifted_point(z, z, 0.2)

    @given(
        t1=st.floats(0.0, 2 * math.pi),
        t2=st.floats(0.0, 2 * math.pi),
        e1=st.floats(-6.0, -0.5),
        e2=st.floats(-6.0, -0.5),
        g=st.floats(0.01, 0.3),
    )
    @settings(max_examples=150)
    def test_shift_invariants(self, t1, t2, e1, e2, g):
        zk, zn = DiscPoint(t1, 10.0 ** e1), DiscPoint(t2, 10.0 ** e2)
        if zk == zn:
            return
        want = g * float(hyperbolic_distance(zk, zn))
        if want < 1e-9:
            return  # nearly coincident nodes: the shift is a no-op
        p = shifted_point(zk, zn, g).point
        if float(p.theta) != t2:
            return  # shot past the origin; no same-ray invariant to check
        assert float(p.depth) > float(zn.depth)  # strictly closer to 0
        assert abs(float(hyperbolic_distance(p, zn)) - want) <= 1e-10

    def test_depth_ratio_sandwich(self):
        # For a node deep inside the owner's dilated box, the shifted depth
        # obeys (s_k/s_n)^(g/C) <= s_p/s_n <= (s_k/s_n)^(Cg) once the pair
        # distance dominates the box comparability constant C.
        m0 = 2.0
        c = box_comparability_constant(m0)
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 400:
            sk = 10.0 ** rng.uniform(-3, -0.3)
            sn = sk * 2.0 ** (-rng.uniform(36, 70))
            tk = rng.uniform(0, 2 * math.pi)
            tn = (tk + rng.uniform(-1, 1) * math.pi * min(1.0, 20 * m0 * sk)) % (
                2 * math.pi
            )
            zk, zn = DiscPoint(tk, sk), DiscPoint(tn, sn)
            if not CarlesonBox.over(zk, 20 * m0).contains(zn):
                continue
            if float(hyperbolic_distance(zk, zn)) < 2 * c:
                continue
            g = rng.uniform(0.1, 0.3)
            ratio = float(shifted_point(zk, zn, g).point.depth) / sn
            assert (sk / sn) ** (g / c) <= ratio <= (sk / sn) ** (c * g)
            checked += 1


# ------------------------------------------------------------ choose_params


class TestChooseParams:
    def test_radial8_closed_forms(self, radial8_params):
        _, _, params = radial8_params
        c = box_comparability_constant(params.m0)
        assert params.m0 == 128.0
        assert params.gamma == (1 - 0.5) / (2 * c)
        assert params.eta == min((1 - 0.5) / 2, params.gamma / (2 * c)) / 2
        assert params.cap_n == 77337
        assert params.admissible_for(0.5)

    def test_cutoff_grows_as_delta_shrinks(self, radial8_params):
        seq, consts, _ = radial8_params
        caps = [choose_params(seq, consts, d).cap_n for d in (0.5, 0.3, 0.2, 0.1)]
        assert caps == [61117, 74759, 77337, 94489]

    def test_requires_passing_condition(self):
        # the minimal passing constant for this sequence is about 1.77,
        # so M = 1 fails the counting condition outright
        seq = radial_geometric(8)
        with pytest.raises(ConstructionError):
            choose_params(seq, DensityConstants(alpha=0.5, m_const=1.0), 0.2)

    def test_rejects_bad_delta(self, radial8_params):
        seq, consts, _ = radial8_params
        with pytest.raises(ConstructionError):
            choose_params(seq, consts, 0.0)


# ------------------------------------------------------------ E-sets


class TestBuildESets:
    def test_no_far_nodes_keeps_whole_dilated_arcs(self):
        seq = radial_geometric(4)
        m = fit_m(seq, 0.5, condition="a")
        params = choose_params(seq, DensityConstants(alpha=0.5, m_const=m), 0.2)
        for e, z in zip(build_e_sets(seq, params), seq.points):
            assert same_set(e, base_arc(z, params.m0))

    def test_carving_pair(self):
        es = build_e_sets(CARVE_PAIR, CARVE_PARAMS)
        # the owner's set is the full circle minus the shifted node's arc
        hole = base_arc(
            shifted_point(CARVE_OWNER, CARVE_DEEP, CARVE_PARAMS.gamma).point, 1.0
        )
        assert same_set(es[0], FULL.difference(hole))
        assert es[0].measure == pytest.approx(2 * math.pi - hole.measure, abs=1e-12)
        # the deep node keeps its whole dilated arc, which the hole swallows
        assert same_set(es[1], base_arc(CARVE_DEEP, CARVE_PARAMS.m0))
        assert not es[0].intersection(es[1]).pieces
        floor = 1 - CARVE_PARAMS.delta / 10
        assert harmonic_measure_arc(CARVE_OWNER, es[0]) >= floor
        assert harmonic_measure_arc(CARVE_DEEP, es[1]) >= floor

    def test_overcarved_set_raises(self):
        starved = ConstructionParams(delta=0.01, m0=128.0, gamma=0.5, cap_n=15, eta=0.01)
        with pytest.raises(ConstructionError, match="node 0"):
            build_e_sets(CARVE_PAIR, starved)


# ------------------------------------------------------------ G-sets


class TestBuildGn:
    def test_single_node_keeps_everything(self):
        seq = PointSequence((DiscPoint(0.4, 0.3),))
        m = fit_m(seq, 0.5, condition="a")
        params = choose_params(seq, DensityConstants(alpha=0.5, m_const=m), 0.2)
        fam = build_gn(seq, params)
        assert same_set(fam.g_sets[0], fam.e_sets[0])
        assert same_set(fam.e_sets[0], base_arc(seq.points[0], params.m0))

    def test_antipodal_far_pair(self):
        # equal depths, opposite angles: distance 21.9 > cap_n, so each node
        # is "far" from the other and keeps its entire E-set
        pair = PointSequence((DiscPoint(0.0, 1e-3), DiscPoint(math.pi, 1e-3)))
        params = ConstructionParams(delta=0.2, m0=256.0, gamma=0.45, cap_n=10, eta=0.01)
        fam = build_gn(pair, params)
        for i in range(2):
            assert same_set(fam.g_sets[i], fam.e_sets[i])
            assert fam.g_sets[i].pieces
        assert not fam.g_sets[0].intersection(fam.g_sets[1]).pieces
        assert fam.neighbors == ((0,), (1,))

    def test_carving_pair_far_branch(self):
        fam = build_gn(CARVE_PAIR, CARVE_PARAMS)
        for i in range(2):
            assert same_set(fam.g_sets[i], fam.e_sets[i])
        assert fam.neighbors == ((0,), (1,))

    def test_radial_desk_collapses_to_first_node(self, radial8_params):
        seq, _, params = radial8_params
        fam = build_gn(seq, params)
        assert fam.g_sets[0].measure == pytest.approx(2 * math.pi, abs=1e-12)
        assert all(not g.pieces for g in fam.g_sets[1:])
        # every node is within the cutoff of every other
        assert fam.neighbors == tuple(tuple(range(8)) for _ in range(8))

    def test_deterministic_rebuild(self):
        pair = PointSequence((DiscPoint(0.0, 1e-3), DiscPoint(math.pi, 1e-3)))
        params = ConstructionParams(delta=0.2, m0=256.0, gamma=0.45, cap_n=10, eta=0.01)
        f1, f2 = build_gn(pair, params), build_gn(pair, params)
        assert all(a.pieces == b.pieces for a, b in zip(f1.g_sets, f2.g_sets))
        assert f1.neighbors == f2.neighbors

    def test_validate_catches_broken_families(self):
        params = ConstructionParams(delta=0.2, m0=2.0, gamma=0.1, cap_n=5, eta=0.01)
        z = DiscPoint(0.0, 0.5)
        seq = PointSequence((z, DiscPoint(3.0, 0.5)))
        half = ArcSet.from_interval(-1.0, 1.0)
        overlapping = GnFamily(
            g_sets=(half, half),
            e_sets=(FULL, FULL),
            neighbors=((0,), (1,)),
            params=params,
        )
        with pytest.raises(ConstructionError, match="overlap"):
            overlapping.validate(seq)
        escaping = GnFamily(
            g_sets=(FULL, ArcSet.empty()),
            e_sets=(half, ArcSet.empty()),
            neighbors=((0,), (1,)),
            params=params,
        )
        with pytest.raises(ConstructionError, match="escapes E"):
            escaping.validate(seq)


# ------------------------------------------------------------ estimates


class TestVerifyEstimates:
    def test_single_node(self):
        seq = PointSequence((DiscPoint(0.4, 0.3),))
        m = fit_m(seq, 0.5, condition="a")
        params = choose_params(seq, DensityConstants(alpha=0.5, m_const=m), 0.2)
        fam = build_gn(seq, params)
        margins, tails = verify_estimates(fam, seq)
        assert margins[0] >= params.delta - params.delta / 10 - 1e-12
        assert tails[0] == 0.0

    def test_radial_desk(self, radial8_params):
        seq, _, params = radial8_params
        fam = build_gn(seq, params)
        margins, tails = verify_estimates(fam, seq)
        assert margins.min() >= params.delta - 1e-12
        assert np.all(tails == 0.0)

    def test_carving_pair_tails(self):
        fam = build_gn(CARVE_PAIR, CARVE_PARAMS)
        margins, tails = verify_estimates(fam, CARVE_PAIR)
        assert np.all(margins >= 0.0)
        assert np.all(tails < CARVE_PARAMS.delta)
        assert tails.max() > 0.0  # the far node really does contribute


# ------------------------------------------------------------ separation LP


class TestHinftyPartition:
    def test_alternating_radial_level(self):
        seq = radial_geometric(8)
        mask = [i % 2 == 0 for i in range(8)]
        h, gamma = solve_hinfty_partition(seq, mask)
        assert np.all(np.abs(h) <= 1 + 1e-12)
        np.testing.assert_allclose(gamma, 0.00801321570088209, rtol=1e-4)
        # swapping the sides flips the problem; the level is unchanged
        _, gamma_swapped = solve_hinfty_partition(seq, [not m for m in mask])
        np.testing.assert_allclose(gamma_swapped, gamma, rtol=1e-9)

    def test_one_sided_partition_saturates(self):
        seq = radial_geometric(3)
        h, gamma = solve_hinfty_partition(seq, [True, True, True])
        assert gamma == pytest.approx(1.0, abs=1e-9)

    def test_level_below_tolerance_raises(self):
        seq = radial_geometric(8)
        with pytest.raises(ResolutionError, match="refined grid"):
            solve_hinfty_partition(seq, [i % 2 == 0 for i in range(8)], tolerance=0.05)

    def test_partition_length_checked(self):
        with pytest.raises(ConstructionError):
            solve_hinfty_partition(radial_geometric(3), [True, False])


# ------------------------------------------------------------ assembly


def flat_family(point: DiscPoint) -> GnFamily:
    params = ConstructionParams(delta=0.2, m0=4.0, gamma=0.1, cap_n=5, eta=0.01)
    return GnFamily(
        g_sets=(FULL,), e_sets=(FULL,), neighbors=((0,),), params=params
    )


class TestAssembleU:
    def test_unit_density_is_constant_one(self):
        z = DiscPoint(0.3, 0.5)
        seq = PointSequence((z,))
        grid = GridSpec.for_sequence([z], resolution=2048)
        h = np.zeros(len(grid.angles()))
        u = assemble_u(seq, [1.0], flat_family(z), h, grid)
        assert u.total_mass == pytest.approx(1.0, abs=1e-12)
        assert u.poisson_eval(z) == pytest.approx(1.0, abs=1e-6)
        # at the center the integral reads off the total mass exactly
        assert u.poisson_eval(DiscPoint(0.0, 1.0)) == pytest.approx(
            u.total_mass, abs=1e-12
        )

    def test_scaling_values_scales_the_measure(self):
        z = DiscPoint(1.0, 0.25)
        seq = PointSequence((z,))
        grid = GridSpec.for_sequence([z], resolution=512)
        h = np.linspace(-0.5, 0.5, len(grid.angles()))
        u1 = assemble_u(seq, [2.0], flat_family(z), h, grid)
        u3 = assemble_u(seq, [6.0], flat_family(z), h, grid)
        np.testing.assert_allclose(u3.masses, 3.0 * u1.masses, rtol=1e-14)

    def test_input_validation(self):
        z = DiscPoint(0.0, 0.5)
        seq = PointSequence((z,))
        grid = GridSpec.for_sequence([z], resolution=256)
        h = np.zeros(len(grid.angles()))
        fam = flat_family(z)
        with pytest.raises(ConstructionError):
            assemble_u(seq, [1.0, 2.0], fam, h, grid)
        with pytest.raises(ConstructionError):
            assemble_u(seq, [-1.0], fam, h, grid)
        with pytest.raises(ConstructionError):
            assemble_u(seq, [1.0], fam, h[:-5], grid)

    def test_endgame_one_seed(self, radial8_params):
        # one full pass of the pipeline at a fine grid: values prescribed on
        # alternating sides are met from above on T and from below on S
        seq, _, params = radial8_params
        fam = build_gn(seq, params)
        mask = [i % 2 == 0 for i in range(8)]
        grid = GridSpec.for_sequence(list(seq.points), resolution=8192)
        h, gamma = solve_hinfty_partition(seq, mask, grid)
        eps = min(params.eta, 0.02) / 2
        w = np.asarray(generate_compatible_values(seq, eps, seed=0))
        u = assemble_u(seq, w, fam, h, grid)
        vals = np.array([u.poisson_eval(z) for z in seq.points])
        assert all(vals[i] >= w[i] for i in range(8) if mask[i])
        assert all(vals[i] <= w[i] for i in range(8) if not mask[i])
