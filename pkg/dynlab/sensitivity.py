"""Eq_epsilon sets, sensitivity constants and the NS / AE / LE / HNS
verdicts.

Every verdict is indexed by the scales it was checked at: the epsilon
grid, the ball radius ``r`` and the horizon ``N``. A positive verdict
only says that nothing contradicted the property at those scales.
"""

from dataclasses import dataclass, field

import numpy as np

from .pseudometrics import (BallStructure, dH_pseudometric,
                            fragmentation_kernel, TIE_TOL)
from .recurrence import product_chain_transitivity, common_return_check
from .spaces import Horizon, orbit_closure_sample
from .utils import DynlabError, PropertyResult


__all__ = ('SensitivityError', 'EqReport', 'Verdict', 'eq_epsilon',
           'ns_check', 'sensitivity_constant', 'ae_check', 'le_check',
           'hns_check', 'local_fragmentation_check', 'wm_triviality_test',)


CAVEAT = 'finite proxy: holds on this cloud at the listed (epsilon, r, N) ' \
         'only'


class SensitivityError(DynlabError):
    pass


def _check_grid(eps_grid):
    eps_grid = [float(e) for e in eps_grid]
    if not eps_grid or min(eps_grid) <= 0:
        raise SensitivityError('epsilon grid must be nonempty and positive')
    return eps_grid


@dataclass
class EqReport:
    epsilon: float
    N: int
    r: float
    eq_points: np.ndarray
    dense: bool
    # Fraction of eq points whose T or T^-1 image lands next to a cloud
    # point failing the test; None when no image lands within r.
    invariance_defect: float = None

    def as_dict(self):
        return {'epsilon': self.epsilon, 'N': self.N, 'r': self.r,
                'eq_points': self.eq_points.tolist(), 'dense': self.dense,
                'invariance_defect': self.invariance_defect}


@dataclass
class Verdict:
    property: str
    eps_grid: list
    r: float
    N: int
    witness: list = field(default_factory=list)
    caveat: str = CAVEAT
    detail: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.property in ('NS', 'AE', 'LE', 'HNS')

    def as_dict(self):
        return {'property': self.property,
                'scale': {'eps_grid': self.eps_grid, 'r': self.r,
                          'N': self.N},
                'witness': [int(w) for w in self.witness],
                'caveat': self.caveat, 'detail': self.detail}


def _structure(sys, cloud, horizon, r=None):
    return BallStructure(cloud, dH_pseudometric(sys, horizon), r)


def _invariance_defect(sys, cloud, eq, r):
    if not eq.any():
        return None
    points = cloud.points[eq]
    checked = failed = 0
    for fn in (sys.forward, sys.inverse):
        dist, idx = cloud.nearest(fn(points))
        landed = dist <= r + TIE_TOL
        checked += int(landed.sum())
        failed += int((~eq[idx[landed]]).sum())
    return failed / checked if checked else None


def eq_epsilon(sys, cloud, epsilon, horizon, structure=None):
    """The points whose ``r``-ball has ``d_H``-diameter at most epsilon."""
    if not epsilon > 0:
        raise SensitivityError('epsilon must be positive')
    structure = structure or _structure(sys, cloud, horizon)
    eq = structure.diameters() <= epsilon + TIE_TOL
    dense = all(eq[ball].any() for ball in structure.balls)
    return EqReport(float(epsilon), horizon.N, structure.r, np.flatnonzero(eq),
                    bool(dense) and bool(len(cloud)),
                    _invariance_defect(sys, cloud, eq, structure.r))


def ns_check(sys, cloud, eps_grid, horizon, structure=None):
    eps_grid = _check_grid(eps_grid)
    structure = structure or _structure(sys, cloud, horizon)
    for eps in eps_grid:
        if not len(eq_epsilon(sys, cloud, eps, horizon, structure).eq_points):
            return Verdict('sensitive', eps_grid, structure.r, horizon.N,
                           witness=list(range(len(cloud))),
                           detail={'epsilon': eps})
    return Verdict('NS', eps_grid, structure.r, horizon.N)


def sensitivity_constant(sys, cloud, horizon, eps_grid, structure=None):
    """Largest grid epsilon with an empty Eq_epsilon; 0 when none."""
    eps_grid = _check_grid(eps_grid)
    structure = structure or _structure(sys, cloud, horizon)
    diam = structure.diameters()
    for eps in sorted(eps_grid, reverse=True):
        if not np.any(diam <= eps + TIE_TOL):
            return eps
    return 0.0


def ae_check(sys, cloud, eps_grid, horizon, structure=None):
    """AE when the Eq set at the finest grid epsilon is r-dense."""
    eps_grid = _check_grid(eps_grid)
    structure = structure or _structure(sys, cloud, horizon)
    report = eq_epsilon(sys, cloud, min(eps_grid), horizon, structure)
    eq = np.zeros(len(cloud), bool)
    eq[report.eq_points] = True
    uncovered = [i for i, ball in enumerate(structure.balls)
                 if not eq[ball].any()]
    detail = {'eq_size': len(report.eq_points),
              'invariance_defect': report.invariance_defect}
    if uncovered:
        return Verdict('not-AE', eps_grid, structure.r, horizon.N,
                       witness=uncovered, detail=detail)
    return Verdict('AE', eps_grid, structure.r, horizon.N, detail=detail)


def le_check(sys, cloud, eps_grid, horizon, depth=None, merge_tol=None,
             max_points=None):
    """Each sampled ``x0`` must be an equicontinuity point of its own
    orbit closure, sampled to ``depth`` (default ``4 N``) with points
    closer than ``merge_tol`` (default a quarter of the finest epsilon)
    merged; the ball radius is ``merge_tol``.
    """
    eps_grid = _check_grid(eps_grid)
    eps = min(eps_grid)
    depth = Horizon(4 * horizon.N if depth is None else depth)
    merge_tol = eps / 4 if merge_tol is None else merge_tol
    indices = np.arange(len(cloud))
    if max_points and len(cloud) > max_points:
        indices = indices[::int(np.ceil(len(cloud) / max_points))]
    rho = dH_pseudometric(sys, horizon)
    failing = []
    for i in indices:
        sub = orbit_closure_sample(sys, cloud.points[i], depth, merge_tol)
        ball = sub.within(sub.points[:1], sub.r)[0]
        if len(ball) < 2:
            continue
        diam = rho.matrix(sub.points[ball]).max()
        if diam > eps + TIE_TOL:
            failing.append(int(i))
    detail = {'checked': len(indices), 'depth': depth.N,
              'merge_tol': merge_tol}
    if failing:
        return Verdict('not-LE', eps_grid, merge_tol, horizon.N,
                       witness=failing, detail=detail)
    return Verdict('LE', eps_grid, merge_tol, horizon.N, detail=detail)


def hns_check(sys, cloud, eps_grid, horizon, r=None, structure=None,
              verify=False):
    """HNS when the cloud is (epsilon, r)-fragmented by ``d_H`` for every
    grid epsilon; the residual of the first failure is the witness.
    """
    eps_grid = _check_grid(eps_grid)
    structure = structure or _structure(sys, cloud, horizon, r)
    rho = dH_pseudometric(sys, horizon)
    stages = {}
    for eps in sorted(eps_grid, reverse=True):
        report = fragmentation_kernel(cloud, rho, eps, structure=structure,
                                      verify=verify)
        stages[eps] = report.stages
        if not report.fragmented:
            return Verdict('not-HNS', eps_grid, structure.r, horizon.N,
                           witness=report.residual.tolist(),
                           detail={'epsilon': eps, 'stages': stages})
    return Verdict('HNS', eps_grid, structure.r, horizon.N,
                   detail={'stages': stages})


def local_fragmentation_check(sys, cloud, eps_grid, horizon, r=None):
    """Every point must lie in some ball ``B(y, r)`` whose sub-cloud is
    (epsilon, r)-fragmented by ``d_H`` at the finest grid epsilon.
    """
    eps = min(_check_grid(eps_grid))
    r = cloud.r if r is None else r
    rho = dH_pseudometric(sys, horizon)
    evaluate = rho.prepare(cloud.points)
    covered = np.zeros(len(cloud), bool)
    for ball in cloud.balls(r):
        if covered[ball].all():
            continue
        sub = cloud.subset(ball)
        structure = BallStructure(
            sub, rho, r,
            prepared=lambda I, J, ball=ball: evaluate(ball[I], ball[J]))
        if fragmentation_kernel(sub, rho, eps, structure=structure).fragmented:
            covered[ball] = True
    uncovered = np.flatnonzero(~covered).tolist()
    return PropertyResult('locally-fragmented',
                          'fail' if uncovered else 'pass', epsilon=eps, r=r,
                          N=horizon.N, uncovered=uncovered)


def wm_triviality_test(sys, cloud, eps_grid, horizon, delta):
    """A weakly mixing NS system is trivial: if both hold on the cloud
    its diameter must not exceed the largest grid epsilon.

    Weak mixing is taken from the system's assertion. Without one the
    product chain digraph is consulted: when it is not transitive the
    system is not weakly mixing at that scale and the implication holds
    vacuously. Chains also connect the product of an isometry with
    itself, so a transitive chain digraph falls back on common return
    times of cloud balls, and only when those are found too is the
    result ``unknown``.
    """
    eps_grid = _check_grid(eps_grid)
    ns = ns_check(sys, cloud, eps_grid, horizon)
    if not ns.holds:
        return PropertyResult('weakly-mixing-NS-is-trivial', 'pass',
                              vacuous='system is sensitive',
                              ns=ns.property)
    if not sys.weak_mixing:
        product = product_chain_transitivity(sys, cloud, delta)
        source = 'product chain digraph'
        if product.status == 'transitive':
            product = common_return_check(sys, cloud, horizon)
            source = 'common return times'
        if product.status == 'not':
            return PropertyResult('weakly-mixing-NS-is-trivial', 'pass',
                                  vacuous='not weakly mixing',
                                  source=source, product=product.status,
                                  **product.detail)
        return PropertyResult('weakly-mixing-NS-is-trivial', 'unknown',
                              reason='transitivity of the sampled product '
                                     'does not certify weak mixing')
    diameter = float(cloud.distance_matrix().max()) if len(cloud) else 0.0
    status = 'pass' if diameter <= max(eps_grid) + TIE_TOL else 'fail'
    return PropertyResult('weakly-mixing-NS-is-trivial', status,
                          diameter=diameter, source='asserted',
                          contradiction=status == 'fail')
