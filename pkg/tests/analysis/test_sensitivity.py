from dataclasses import replace

import numpy as np
import pytest

from dynlab.enveloping import fragmented_family_check
from dynlab.pseudometrics import BallStructure, dH_pseudometric
from dynlab.sensitivity import (
    SensitivityError, eq_epsilon, ns_check, ae_check, le_check, hns_check,
    sensitivity_constant, local_fragmentation_check, wm_triviality_test)
from dynlab.spaces import (
    GALLERY, Circle, Disk, Horizon, Interval, SequenceSpace, Torus2,
    rotation, toral_auto, shift, disk_twist, interval_homeo, sample_space,
    make_gallery_system, suspension_cloud)


ALPHA = np.sqrt(2) - 1


def isometry_cloud():
    return sample_space(Circle(), 32).with_radius(0.04)


def gallery_cloud(name):
    if name == 'takens-two-points':
        sys = make_gallery_system(name, {'depth': 8})
        return sys, suspension_cloud(sys)
    sys = make_gallery_system(name)
    if sys.space.kind == 'sequence':
        return sys, sample_space(sys.space, sys.space.window)
    return sys, sample_space(sys.space, 12)


class TestIsometry(object):
    """A rotation satisfies every non-sensitivity property."""

    eps_grid = [0.25, 0.125]

    def test_ns(self):
        v = ns_check(rotation(ALPHA), isometry_cloud(), self.eps_grid,
                     Horizon(8))
        assert v.property == 'NS'
        assert v.holds
        assert v.r == 0.04

    def test_ae(self):
        v = ae_check(rotation(ALPHA), isometry_cloud(), self.eps_grid,
                     Horizon(8))
        assert v.property == 'AE'
        assert v.detail['eq_size'] == 32

    def test_le(self):
        v = le_check(rotation(ALPHA), isometry_cloud(), self.eps_grid,
                     Horizon(8), max_points=8)
        assert v.property == 'LE'
        assert v.detail['checked'] == 8

    def test_hns(self):
        v = hns_check(rotation(ALPHA), isometry_cloud(), self.eps_grid,
                      Horizon(8))
        assert v.property == 'HNS'
        assert v.detail['stages'] == {0.25: 1, 0.125: 1}

    def test_constant(self):
        assert sensitivity_constant(rotation(ALPHA), isometry_cloud(),
                                    Horizon(8), self.eps_grid) == 0.0

    def test_eq_set_is_invariant(self):
        report = eq_epsilon(rotation(ALPHA), isometry_cloud(), 0.125,
                            Horizon(8))
        assert report.dense
        assert report.invariance_defect in (0.0, None)

    def test_locally_fragmented(self):
        result = local_fragmentation_check(rotation(ALPHA), isometry_cloud(),
                                           self.eps_grid, Horizon(8))
        assert result
        assert result.detail['uncovered'] == []


class TestSensitive(object):

    def cat_cloud(self):
        return sample_space(Torus2(), 32).with_radius(1 / 32)

    def test_cat_map(self):
        sys = toral_auto()
        cloud = self.cat_cloud()
        v = ns_check(sys, cloud, [0.25, 0.125], Horizon(8))
        assert v.property == 'sensitive'
        assert v.detail['epsilon'] == 0.25
        assert sensitivity_constant(sys, cloud, Horizon(8),
                                    [0.25, 0.125]) == 0.25

    def test_cat_map_is_not_hns(self):
        v = hns_check(toral_auto(), self.cat_cloud(), [0.25], Horizon(8))
        assert v.property == 'not-HNS'
        assert not v.holds
        assert len(v.witness) > 0

    def test_full_shift(self):
        space = SequenceSpace((0, 1), 8)
        cloud = sample_space(space, 8)
        constant = sensitivity_constant(shift((0, 1), 8), cloud, Horizon(4),
                                        [0.5, 0.25, 0.125])
        assert constant >= 0.5

    def test_disk_twist_is_le_but_not_ae(self):
        sys = disk_twist()
        # Grid balls at the covering radius are singletons; widen them to
        # reach the neighbouring rings.
        cloud = sample_space(Disk(), 16).with_radius(0.1)
        eps_grid = [2.0 ** -5]
        ae = ae_check(sys, cloud, eps_grid, Horizon(10))
        assert ae.property == 'not-AE'
        eq = eq_epsilon(sys, cloud, eps_grid[0], Horizon(10))
        radii = np.hypot(*cloud.points[eq.eq_points].T)
        assert np.all(radii <= 0.1)
        le = le_check(sys, cloud, eps_grid, Horizon(10), max_points=16)
        assert le.property == 'LE'

    def test_cat_map_on_a_fine_grid(self):
        cloud = sample_space(Torus2(), 64).with_radius(2.0 ** -6)
        eps_grid = [2.0 ** -k for k in range(1, 7)]
        v = ns_check(toral_auto(), cloud, eps_grid, Horizon(16))
        assert v.property == 'sensitive'
        assert sensitivity_constant(toral_auto(), cloud, Horizon(16),
                                    eps_grid) >= 2.0 ** -4

    def test_disk_twist_at_a_long_horizon(self):
        sys = disk_twist()
        cloud = sample_space(Disk(), 16).with_radius(0.1)
        eps_grid = [2.0 ** -5]
        horizon = Horizon(1000)
        assert ae_check(sys, cloud, eps_grid, horizon).property == 'not-AE'
        eq = eq_epsilon(sys, cloud, eps_grid[0], horizon)
        assert np.all(np.hypot(*cloud.points[eq.eq_points].T) <= 0.1)
        le = le_check(sys, cloud, eps_grid, horizon, max_points=8)
        assert le.property == 'LE'


class TestIntervalHomeo(object):

    def test_squaring_is_hns(self):
        cloud = sample_space(Interval(), 512).with_radius(2.0 ** -9)
        eps_grid = [2.0 ** -k for k in range(1, 7)]
        v = hns_check(interval_homeo(), cloud, eps_grid, Horizon(10 ** 4))
        assert v.property == 'HNS'
        assert set(v.detail['stages']) == set(eps_grid)


class TestEqSets(object):

    def twist(self):
        return disk_twist(), sample_space(Disk(), 12).with_radius(0.1)

    def test_monotone_in_epsilon(self):
        sys, cloud = self.twist()
        sets = [set(eq_epsilon(sys, cloud, eps, Horizon(6)).eq_points)
                for eps in (2.0 ** -5, 2.0 ** -3, 2.0 ** -2, 2.0 ** -1)]
        for small, large in zip(sets, sets[1:]):
            assert small <= large
        assert sets[-1]

    def test_antitone_in_the_horizon(self):
        sys, cloud = self.twist()
        sets = [set(eq_epsilon(sys, cloud, 0.25, Horizon(n)).eq_points)
                for n in (1, 3, 9)]
        for short, long in zip(sets, sets[1:]):
            assert long <= short
        assert sets[0]


class TestGallerySweep(object):
    """Implications between the verdicts hold on every gallery member."""

    eps_grid = [0.25, 0.125]

    @pytest.mark.parametrize('name', sorted(GALLERY))
    def test_verdicts_are_consistent(self, name):
        sys, cloud = gallery_cloud(name)
        horizon = Horizon(4)
        structure = BallStructure(cloud, dH_pseudometric(sys, horizon))
        ns = ns_check(sys, cloud, self.eps_grid, horizon, structure)
        ae = ae_check(sys, cloud, self.eps_grid, horizon, structure)
        hns = hns_check(sys, cloud, self.eps_grid, horizon,
                        structure=structure)
        if hns.holds or ae.holds:
            assert ns.holds
        if sys.space.kind != 'sequence':
            tables = list(sys.orbit_tables(cloud.points, horizon))
            raw = [fragmented_family_check(tables, cloud, eps, cloud.r)[0]
                   for eps in self.eps_grid]
            assert hns.holds == all(raw)


class TestWeakMixing(object):

    def test_sensitive_system_is_vacuous(self):
        sys = toral_auto(hyperbolic=True)
        cloud = sample_space(Torus2(), 16).with_radius(1 / 16)
        result = wm_triviality_test(sys, cloud, [0.25], Horizon(6), 1 / 8)
        assert result
        assert result.detail['vacuous'] == 'system is sensitive'

    def test_rotation_is_not_weakly_mixing(self):
        # Chains connect the rotation's product at this delta; balls far
        # apart still have no common return time.
        result = wm_triviality_test(rotation(ALPHA), isometry_cloud(),
                                    [0.25, 0.125], Horizon(8), 1 / 16)
        assert result.status == 'pass'
        assert result.detail['vacuous'] == 'not weakly mixing'
        assert not result.detail.get('contradiction')

    def test_rotation_at_a_fine_delta(self):
        result = wm_triviality_test(rotation(ALPHA), isometry_cloud(),
                                    [0.25, 0.125], Horizon(8), 1 / 64)
        assert result.status == 'pass'
        assert result.detail['source'] == 'product chain digraph'

    def test_asserted_weak_mixing_contradicts(self):
        sys = replace(rotation(ALPHA), weak_mixing=True)
        result = wm_triviality_test(sys, isometry_cloud(), [0.25, 0.125],
                                    Horizon(8), 1 / 16)
        assert result.status == 'fail'
        assert result.detail['contradiction']


def test_grid_must_be_positive():
    with pytest.raises(SensitivityError):
        ns_check(rotation(ALPHA), isometry_cloud(), [], Horizon(2))
    with pytest.raises(SensitivityError):
        ae_check(rotation(ALPHA), isometry_cloud(), [0.1, 0], Horizon(2))
