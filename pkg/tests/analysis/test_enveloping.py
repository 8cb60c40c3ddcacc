import numpy as np
import pytest

from dynlab.enveloping import (
    EnvelopeError, ClusterMap, envelope_approx, ef_family,
    family_pseudometric, fragmented_family_check, continuity_defect,
    baire_class_proxy, f_semigroup_check, approach_sequence,
    verify_two_arrows)
from dynlab.pseudometrics import Observable
from dynlab.spaces import (
    Circle, Horizon, SequenceSpace, circle_homeo, rotation, shift,
    sample_space)
from dynlab.symbolic import cf_value
from tests.helpers import TestWarnFunc, line_cloud


GOLDEN = cf_value([1])


def quarter_turn():
    sys = rotation(0.25)
    cloud = sample_space(Circle(), 8).with_radius(1 / 8)
    return sys, cloud


def window_shift(window=5):
    sys = shift((0, 1), window)
    return sys, sample_space(SequenceSpace((0, 1), window), window)


class TestEnvelope(object):

    def test_finite_rotation(self):
        sys, cloud = quarter_turn()
        env = envelope_approx(sys, cloud, Horizon(8), 1e-3)
        assert len(env) == 4
        assert sum(m.multiplicity for m in env.maps) == 17
        identity = env.maps[0]
        assert identity.exponents[0] == 0
        assert np.array_equal(identity.table, cloud.points)

    def test_irrational_rotation_count(self):
        sys = rotation(np.sqrt(2) - 1)
        cloud = sample_space(Circle(), 64)
        env = envelope_approx(sys, cloud, Horizon(1000), 1e-2)
        # Representatives are pairwise more than tol apart and cover
        # every iterate within tol.
        assert 50 <= len(env) <= 100

    def test_monotone_in_horizon(self):
        sys = rotation(np.sqrt(2) - 1)
        cloud = sample_space(Circle(), 16)
        small = envelope_approx(sys, cloud, Horizon(20), 5e-2)
        large = envelope_approx(sys, cloud, Horizon(40), 5e-2)
        assert len(small) <= len(large)
        for a, b in zip(small.maps, large.maps):
            assert np.array_equal(a.table, b.table)

    def test_tol_must_be_positive(self):
        sys, cloud = quarter_turn()
        with pytest.raises(EnvelopeError):
            envelope_approx(sys, cloud, Horizon(2), 0)


class TestObservableFamilies(object):

    def test_constant(self):
        sys, cloud = quarter_turn()
        family = ef_family(sys, Observable.constant(0.5), cloud, Horizon(8),
                           1e-3)
        assert len(family) == 1
        assert family[0].is_real

    def test_quotient_of_the_envelope(self):
        sys, cloud = quarter_turn()
        family = ef_family(sys, Observable.coordinate(0), cloud, Horizon(8),
                           1e-3)
        env = envelope_approx(sys, cloud, Horizon(8), 1e-3)
        assert len(family) == len(env)

    def test_coordinate_projections(self):
        sys, cloud = window_shift()
        family = ef_family(sys, Observable.symbol_at_origin(sys.space),
                           cloud, Horizon(2), 1e-3)
        assert len(family) == 5
        rho = family_pseudometric(family)
        assert rho.matrix(cloud.points).max() == 1.0

    def test_projections_are_not_fragmented(self):
        sys, cloud = window_shift()
        family = ef_family(sys, Observable.symbol_at_origin(sys.space),
                           cloud, Horizon(2), 1e-3)
        fragmented, residual = fragmented_family_check(family, cloud, 0.5)
        assert not fragmented
        assert len(residual) == len(cloud)

    def test_rotation_family_is_fragmented(self):
        sys, cloud = quarter_turn()
        env = envelope_approx(sys, cloud, Horizon(8), 1e-3)
        fragmented, residual = fragmented_family_check(env.maps, cloud, 0.25)
        assert fragmented
        assert not len(residual)

    def test_point_tables_need_a_space(self):
        sys, cloud = quarter_turn()
        env = envelope_approx(sys, cloud, Horizon(2), 1e-3)
        with pytest.raises(EnvelopeError):
            family_pseudometric(env.maps)
        with pytest.raises(EnvelopeError):
            family_pseudometric([])


class TestClosureStability(object):

    @pytest.mark.parametrize('epsilon', [0.125, 0.25, 0.5])
    def test_merging_tables_keeps_fragmentation(self, epsilon):
        sys = circle_homeo(np.sqrt(2) - 1, 0.5)
        cloud = sample_space(Circle(), 32).with_radius(0.04)
        tol = 0.05
        raw = list(sys.orbit_tables(cloud.points, Horizon(8)))
        env = envelope_approx(sys, cloud, Horizon(8), tol)
        # Every merged map is one of the raw tables, and every raw table
        # is within tol of one.
        if fragmented_family_check(raw, cloud, epsilon)[0]:
            assert fragmented_family_check(env.maps, cloud, epsilon)[0]
        if fragmented_family_check(env.maps, cloud, epsilon)[0]:
            assert fragmented_family_check(
                raw, cloud, epsilon + 2 * tol + 1e-9)[0]


class TestContinuity(object):

    def test_identity_defect(self):
        sys, cloud = quarter_turn()
        env = envelope_approx(sys, cloud, Horizon(2), 1e-3)
        assert continuity_defect(env.maps[0], cloud) == pytest.approx(0.25)

    def test_oscillating_table(self):
        cloud = line_cloud(12, 0.2)
        parity = ClusterMap(np.arange(12) % 2 * 1.0, [0], 1e-3)
        assert not baire_class_proxy(parity, cloud, cloud.r, 0.5)
        assert continuity_defect(parity, cloud) == 1.0

    def test_continuous_table(self):
        cloud = line_cloud(12, 0.2)
        smooth = ClusterMap(np.linspace(0, 1, 12), [0], 1e-3)
        assert baire_class_proxy(smooth, cloud, cloud.r, 0.5)


class TestSemigroup(object):

    def test_finite_cyclic(self):
        sys, cloud = quarter_turn()
        env = envelope_approx(sys, cloud, Horizon(8), 1e-3)
        report = f_semigroup_check(env, cloud, 0.25)
        assert report
        assert not report.degraded
        assert report.closure_defect == pytest.approx(0.0, abs=1e-12)

    def test_full_shift(self):
        sys, cloud = window_shift(4)
        env = envelope_approx(sys, cloud, Horizon(2), 1e-3)
        assert len(env) == 4
        report = f_semigroup_check(env, cloud, 0.5, r=1.0)
        assert not report
        assert len(report.residual) == 4

    def test_degraded_closure_warns(self):
        sys = rotation(np.sqrt(2) - 1)
        cloud = sample_space(Circle(), 16)
        env = envelope_approx(sys, cloud, Horizon(4), 1e-3)
        warnfunc = TestWarnFunc()
        report = f_semigroup_check(env, cloud, 0.25, warnfunc=warnfunc)
        assert report.degraded
        assert 'more than tol' in warnfunc.logs[0]


class TestTwoArrows(object):

    def test_approach_from_below(self):
        assert approach_sequence(GOLDEN, gamma_index=0, side='-',
                                 depth=60) == [1, 3, 8, 21, 55]

    def test_approach_from_above(self):
        assert approach_sequence(GOLDEN, gamma_index=0, side='+',
                                 depth=40) == [1, 2, 5, 13, 34]

    def test_small_verification(self):
        report = verify_two_arrows(cf=[1], depth=64, gammas=range(3),
                                   generic=32, radius=8, discreteness=20,
                                   grid=256)
        assert report['model'] == 'coding model'
        assert all(s['exact'] for s in report['claim1_split'].values())
        assert report['claim3']['distinct'] == 41
        assert report['claim3']['min_sup_distance_at_least_half']
        assert len(report['claim1']) == 6

    def test_limits_settle_on_both_sides(self):
        report = verify_two_arrows(cf=[1], depth=2000, gammas=range(3),
                                   generic=32, radius=8, discreteness=20,
                                   grid=256)
        # Half the gap |13 alpha| between the nearest cuts.
        assert report['resolution'] == pytest.approx(0.01722, abs=1e-4)
        for entry in report['claim1']:
            assert entry['converged'] and entry['matches']
        assert all(s['exact'] for s in report['claim1_split'].values())

    def test_short_depth_does_not_settle(self):
        report = verify_two_arrows(cf=[1], depth=64, gammas=range(3),
                                   generic=32, radius=8, discreteness=20,
                                   grid=256)
        assert not all(c['converged'] for c in report['claim1'])

    def test_discontinuities_sit_on_orbit_samples(self):
        report = verify_two_arrows(cf=[1], depth=2000, gammas=range(3),
                                   generic=32, radius=8, discreteness=20,
                                   grid=256)
        claim5 = report['claim5']
        assert claim5['coarse_r'] == 1 / 16
        assert claim5['mean_ball'] > 1
        assert claim5['baire_class_1']
        jumps = claim5['discontinuities']['0-']
        assert 0 in jumps['orbit_samples']
        assert jumps['off_orbit_defect'] <= 0.5
        assert jumps['generic_fragmented']
        # The ball of 0+ also holds generic points coded 1 at the centre.
        assert not jumps['fragmented']

    def test_convergents_too_short(self):
        with pytest.raises(EnvelopeError):
            verify_two_arrows(cf=[1], depth=1)
