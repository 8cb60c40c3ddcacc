"""Finite horizon approximation of the enveloping semigroup.

Every iterate ``T^n`` is recorded as a table over the cloud; tables
within ``tol`` of each other (sup over the cloud) are merged into one
``ClusterMap``. Iterates are visited in the order ``0, 1, -1, 2, -2, ...``
and each joins the closest earlier representative within ``tol``, so
representatives stay pairwise more than ``tol`` apart and the identity
is always the first one.
"""

from dataclasses import dataclass, field

import numpy as np

from .pseudometrics import (Pseudometric, BallStructure, TIE_TOL,
                            fragmentation_kernel, family_sup_pseudometric)
from .spaces import AmbientSpace, SampleCloud, SequenceSpace, orbit_order
from .symbolic import (_arc_breakpoints, continued_fraction, convergents,
                       sturmian_code, sturmian_two_arrows)
from .utils import DynlabError, dummy_warn


__all__ = ('EnvelopeError', 'ClusterMap', 'EnvelopeApprox', 'TableSpace',
           'envelope_approx', 'ef_family', 'family_pseudometric',
           'fragmented_family_check', 'continuity_defect',
           'baire_class_proxy', 'f_semigroup_check', 'approach_sequence',
           'verify_two_arrows',)


# Exponent lists longer than this are truncated in reports.
REPORT_EXPONENTS = 32


class EnvelopeError(DynlabError):
    pass


@dataclass
class ClusterMap:
    """``table[i]`` is the image of cloud point ``i``: a point row, or a
    real number for E^f tables.
    """

    table: np.ndarray
    exponents: list
    tol: float
    multiplicity: int = 1
    # Largest sup distance of a merged iterate to the table.
    spread: float = 0.0

    @property
    def is_real(self):
        return self.table.ndim == 1

    def as_dict(self):
        return {'exponents': self.exponents[:REPORT_EXPONENTS],
                'multiplicity': self.multiplicity, 'tol': self.tol,
                'spread': self.spread}


@dataclass
class EnvelopeApprox:
    maps: list
    N: int
    tol: float
    space: AmbientSpace = None

    def __len__(self):
        return len(self.maps)

    def as_dict(self):
        return {'N': self.N, 'tol': self.tol, 'count': len(self.maps),
                'maps': [m.as_dict() for m in self.maps],
                'dedup_metric': 'sup over cloud'}


class TableSpace(AmbientSpace):
    """Tables over an ``n``-point cloud of ``base`` as points of a space
    with the sup metric.
    """

    kind = 'tables'

    def __init__(self, base, n):
        self.base = base
        self.n = n
        self.dim = n * base.dim
        self.diameter = base.diameter
        self.dtype = base.dtype

    @property
    def descriptor(self):
        return 'tables: sup over %d points of %s' % (self.n,
                                                     self.base.descriptor)

    def paired(self, A, B):
        shape = np.broadcast_shapes(A.shape, B.shape)[:-1]
        A = np.broadcast_to(A, shape + (A.shape[-1],))
        B = np.broadcast_to(B, shape + (B.shape[-1],))
        A = A.reshape(shape + (self.n, self.base.dim))
        B = B.reshape(shape + (self.n, self.base.dim))
        return self.base.paired(A, B).max(axis=-1)


def _sup_distance(space, reps, table):
    """Sup distances of ``table`` to each table in ``reps``."""
    if space is None:
        return np.abs(reps - table[None]).max(axis=1)
    return space.paired(reps, table[None]).max(axis=1)


def _cluster(tables, exponents, tol, space):
    reps, members, spreads = [], [], []
    for table, n in zip(tables, exponents):
        if reps:
            dist = _sup_distance(space, np.asarray(reps), table)
            k = int(np.argmin(dist))
            if dist[k] <= tol + TIE_TOL:
                members[k].append(int(n))
                spreads[k] = max(spreads[k], float(dist[k]))
                continue
        reps.append(table)
        members.append([int(n)])
        spreads.append(0.0)
    return [ClusterMap(np.array(t), m, tol, len(m), s)
            for t, m, s in zip(reps, members, spreads)]


def envelope_approx(sys, cloud, horizon, tol):
    if not tol > 0:
        raise EnvelopeError('tol must be positive')
    order = orbit_order(horizon.N)
    tables = sys.orbit_tables(cloud.points, horizon)[order]
    exponents = horizon.elements[order]
    return EnvelopeApprox(_cluster(tables, exponents, tol, cloud.space),
                          horizon.N, float(tol), cloud.space)


def ef_family(sys, f, cloud, horizon, tol):
    """The E^f tables ``x -> f(T^n x)`` merged at sup distance ``tol``."""
    if not tol > 0:
        raise EnvelopeError('tol must be positive')
    order = orbit_order(horizon.N)
    values = f(sys.orbit_tables(cloud.points, horizon))[order]
    return _cluster(values, horizon.elements[order], tol, None)


def _tables(family):
    return [m.table if isinstance(m, ClusterMap) else np.asarray(m)
            for m in family]


def family_pseudometric(family, space=None):
    """``sup`` over the family of the image distance; real tables use
    ``|f(x) - f(y)|``, point tables the distance of ``space``.
    """
    tables = _tables(family)
    if not tables:
        raise EnvelopeError('empty family')
    if tables[0].ndim == 1:
        return family_sup_pseudometric(tables)
    if space is None:
        raise EnvelopeError('point valued tables need their space')
    stacked = np.stack(tables)

    def prepare(points):
        if len(points) != stacked.shape[1]:
            raise EnvelopeError('tables have %d entries, cloud has %d points'
                                % (stacked.shape[1], len(points)))
        return lambda I, J: space.paired(stacked[:, I], stacked[:, J]).max(
            axis=0) if len(I) else np.zeros(0)
    return Pseudometric('family-sup(%d)' % len(tables), prepare)


def fragmented_family_check(family, cloud, epsilon, r=None):
    """``(fragmented, residual)`` of the kernel run with the family's sup
    pseudometric.
    """
    rho = family_pseudometric(family, cloud.space)
    report = fragmentation_kernel(cloud, rho, epsilon, r)
    return report.fragmented, report.residual


def continuity_defect(cmap, cloud, r=None):
    """Largest diameter of an image ``table(B(x, r))``."""
    rho = family_pseudometric([cmap], cloud.space)
    diam = BallStructure(cloud, rho, r).diameters()
    return float(diam.max()) if len(diam) else 0.0


def baire_class_proxy(cmap, cloud, r, epsilon):
    """Whether the single table fragments the cloud at (epsilon, r)."""
    rho = family_pseudometric([cmap], cloud.space)
    return fragmentation_kernel(cloud, rho, epsilon, r).fragmented


@dataclass
class SemigroupReport:
    fragmented: bool
    closure_defect: float
    projection_error: float
    degraded: bool
    residual: list = field(default_factory=list)

    def __bool__(self):
        return self.fragmented

    def as_dict(self):
        return {'fragmented': self.fragmented,
                'closure_defect': self.closure_defect,
                'projection_error': self.projection_error,
                'degraded': self.degraded, 'residual': self.residual}


def f_semigroup_check(env, cloud, epsilon, r=None, warnfunc=dummy_warn):
    """Fragmentation of the left translations ``lambda_p: q -> p o q`` on
    the finite set of representatives, with sup-metric balls of radius
    ``r`` (default ``2 tol``) among the maps.

    Compositions project ``q(x)`` onto the nearest cloud point; the
    largest projection distance and how far compositions fall from the
    representatives are reported, the latter flagging a degraded result
    when it exceeds ``tol``.
    """
    space = cloud.space
    maps = [m.table for m in env.maps]
    k, n = len(maps), len(cloud)
    if not k:
        raise EnvelopeError('empty envelope')
    tables = TableSpace(space, n)
    reps = np.stack(maps).reshape(k, -1)
    projection = []
    projection_error = 0.0
    for table in maps:
        dist, idx = cloud.nearest(table)
        projection.append(idx)
        projection_error = max(projection_error, float(dist.max()))

    R = np.zeros((k, k))
    closure_defect = 0.0
    for p in maps:
        composed = np.stack([p[idx] for idx in projection])
        flat = composed.reshape(k, -1)
        R = np.maximum(R, tables.cdist(flat, flat))
        closure_defect = max(closure_defect,
                             float(tables.cdist(flat, reps).min(axis=1).max()))

    r = 2 * env.tol if r is None else r
    maps_cloud = SampleCloud(tables, reps, max(r, TIE_TOL),
                             {'kind': 'envelope', 'N': env.N})
    rho = Pseudometric('lambda-family', lambda points: (lambda I, J: R[I, J]))
    report = fragmentation_kernel(maps_cloud, rho, epsilon, r)
    degraded = closure_defect > env.tol
    if degraded:
        warnfunc('compositions land %g from the nearest representative, '
                 'more than tol = %g' % (closure_defect, env.tol), 'warning')
    return SemigroupReport(report.fragmented, closure_defect,
                           projection_error, degraded,
                           report.residual.tolist())


def approach_sequence(alpha, gamma_index=None, gamma=None, side='-',
                      depth=10000):
    """Exponents ``n`` in ``1..depth`` at which ``n alpha`` gets closer
    to ``gamma`` than ever before, from below (``-``) or above (``+``).
    ``gamma = gamma_index * alpha`` when the index is given.
    """
    n = np.arange(1, depth + 1)
    if gamma_index is not None:
        offset = np.mod((gamma_index - n) * alpha, 1.0)
        hit = n == gamma_index
    else:
        offset = np.mod(gamma - n * alpha, 1.0)
        hit = np.zeros(len(n), bool)
    gap = offset if side == '-' else np.mod(-offset, 1.0)
    gap[hit | (gap == 0)] = np.inf
    best = np.minimum.accumulate(gap)
    records = np.r_[True, best[1:] < best[:-1]] & np.isfinite(gap) & \
        (gap == best)
    return n[records].tolist()


class _CodingCloud(object):
    """Coding windows of the two-arrows model with their tags: orbit
    samples ``('orbit', m, side)`` and generic points ``('generic', b)``.

    Generic points are midpoints of the arcs cut out by every position
    a shift in ``shifts`` can move into the window, so each stays
    ``resolution`` away from all of those cuts.
    """

    def __init__(self, model, orbit, generic, radius, shifts=(0,)):
        self.model = model
        self.radius = radius
        tags = []
        for m in range(-orbit, orbit + 1):
            tags.extend([('orbit', m, '+'), ('orbit', m, '-')])
        lo, hi = min(shifts) - radius, max(shifts) + radius
        cuts = _arc_breakpoints(model.alpha, np.arange(lo, hi + 1))
        highs = np.r_[cuts[1:], cuts[0] + 1.0]
        pick = np.unique(np.linspace(0, len(cuts) - 1,
                                     min(generic, len(cuts))).round()
                         .astype(np.intp))
        mids = (cuts[pick] + highs[pick]) / 2 % 1.0
        self.resolution = float((highs[pick] - cuts[pick]).min() / 2)
        tags.extend(('generic', float(b)) for b in mids)
        self.space = SequenceSpace((0, 1), 2 * radius + 1)
        cloud = SampleCloud.build(self.space, self.images(tags, 0),
                                  r=2.0 ** -radius, tags=tags,
                                  provenance={'kind': 'two-arrows',
                                              'radius': radius})
        self.cloud = cloud.with_radius(float(cloud.nn_distances.min()) / 2)

    def images(self, tags, n, gamma=None, side=None):
        """Windows of ``T^n`` (or ``p_gamma^side`` when ``gamma`` is
        ``('index', k)`` or ``('value', g)``) applied to tagged points.
        """
        model, R = self.model, self.radius
        positions = np.arange(-R, R + 1)
        rows = []
        for tag in tags:
            if tag[0] == 'orbit':
                m, s = tag[1], tag[2]
                if gamma is None:
                    rows.append(model.point(m + n, 0.0, s, R))
                elif gamma[0] == 'index':
                    rows.append(model.point(m + gamma[1], 0.0, side, R))
                else:
                    rows.append(model.point(m, gamma[1], side, R))
            else:
                shift = n * model.alpha if gamma is None else \
                    (gamma[1] * model.alpha if gamma[0] == 'index'
                     else gamma[1])
                rows.append(sturmian_code(model.alpha, (tag[1] + shift) % 1.0,
                                          positions))
        return np.array(rows, np.int64)


def _settled_tail(space, tables, tol):
    """Length of the final run of ``tables`` within ``tol`` of the last."""
    dist = _sup_distance(space, np.asarray(tables), tables[-1])
    far = np.flatnonzero(dist > tol + TIE_TOL)
    return len(tables) - (int(far[-1]) + 1 if len(far) else 0)


def verify_two_arrows(alpha=None, depth=10000, tol=1e-3, cf=None,
                      gammas=range(10), orbit=8, generic=256, radius=24,
                      discreteness=200, grid=2048):
    """Check the two-arrows description of the enveloping semigroup of
    the Sturmian coding of ``alpha`` on a window cloud.

    Every result is a coding model result: points are coding windows of
    radius ``radius``. The ``p_gamma`` tables are the settled tails of
    the iterates along each approach sequence; the closed form only
    serves as a cross-check.
    """
    model = sturmian_two_arrows(alpha, depth, cf)
    alpha = model.alpha
    quotients = continued_fraction(alpha, 64)
    denominators = [c.denominator for c in convergents(quotients)]
    if sum(q <= depth for q in denominators) < 3:
        raise EnvelopeError('continued fraction convergents of alpha are too '
                            'short for depth %d' % depth)
    gammas = list(gammas)
    coding = _CodingCloud(model, orbit, generic, radius, shifts=gammas)
    cloud, tags = coding.cloud, coding.cloud.tags
    report = {'model': 'coding model', 'alpha': alpha, 'depth': depth,
              'radius': radius, 'cloud': len(cloud), 'tol': tol,
              'resolution': coding.resolution}

    limits, claim1 = {}, []
    for k in gammas:
        for side in '-+':
            ns = approach_sequence(alpha, gamma_index=k, side=side,
                                   depth=depth)
            tables = [coding.images(tags, n) for n in ns]
            tail = _settled_tail(cloud.space, tables, tol) if tables else 0
            expected = coding.images(tags, 0, ('index', k), side)
            limits[k, side] = tables[-1] if tables else expected
            claim1.append({'gamma_index': k, 'side': side,
                           'exponents': ns[-REPORT_EXPONENTS:],
                           'settled_from': ns[-tail] if tail else None,
                           'converged': tail >= 2,
                           'matches': bool(tables) and bool(
                               np.array_equal(tables[-1], expected))})
    report['claim1'] = claim1

    split = {}
    for k in gammas:
        differ = np.flatnonzero(np.any(limits[k, '-'] != limits[k, '+'],
                                       axis=1)).tolist()
        expected = [i for i, tag in enumerate(tags) if tag[0] == 'orbit'
                    and -radius <= tag[1] + k <= radius + 1]
        split[k] = {'differ_on': differ, 'exact': differ == expected}
    report['claim1_split'] = split

    off = {}
    for side in '-+':
        ns = approach_sequence(alpha, gamma=0.5, side=side, depth=depth)
        off[side] = coding.images(tags, ns[-1])
    report['off_orbit'] = {'gamma': 0.5, 'coincide': bool(
        np.array_equal(off['-'], off['+']))}

    betas = (np.arange(grid) + 1 / 3) / grid
    shifts = np.arange(-discreteness, discreteness + 1)
    signatures = np.stack([
        np.stack([sturmian_code(alpha, (b + n * alpha) % 1.0, [-1, 0, 1])
                  for b in betas]).ravel() for n in shifts])
    distinct = len(np.unique(signatures, axis=0))
    report['claim3'] = {'tables': len(shifts), 'distinct': distinct,
                        'min_sup_distance_at_least_half':
                            distinct == len(shifts)}

    # Balls agree on every position a shift by gamma moves onto the
    # centre, so away from orbit samples the limits are 1/2-continuous
    # and the peeling can only stall on balls holding an orbit sample.
    coarse = 2.0 ** -(max(abs(k) for k in gammas) + 2)
    generic_only = np.array([tag[0] == 'generic' for tag in tags])
    generic = cloud.subset(np.flatnonzero(generic_only), part='generic')
    defects, jumps = {}, {}
    for (k, side), table in limits.items():
        key = '%d%s' % (k, side)
        cmap = ClusterMap(table, [], tol)
        rho = family_pseudometric([cmap], cloud.space)
        structure = BallStructure(cloud, rho, coarse)
        diam = structure.diameters()
        off_orbit = float(np.max(structure.diameters(generic_only),
                                 initial=0.0))
        owners = np.flatnonzero(diam > 0.5 + TIE_TOL)
        kernel = fragmentation_kernel(cloud, rho, 0.5, structure=structure)
        stalled = [int(i) for i in kernel.residual
                   if generic_only[structure.balls[i]].all()]
        smooth = baire_class_proxy(ClusterMap(table[generic_only], [], tol),
                                   generic, coarse, 0.5)
        defects[key] = float(np.max(diam, initial=0.0))
        jumps[key] = {'points': len(owners),
                      'orbit_samples': sorted({tags[i][1] for i in owners
                                               if tags[i][0] == 'orbit'}),
                      'off_orbit_defect': off_orbit,
                      'fragmented': kernel.fragmented,
                      'residual': len(kernel.residual),
                      'generic_fragmented': smooth,
                      'on_orbit': smooth and not stalled}
    sizes = [len(ball) for ball in cloud.balls(coarse)]
    report['claim5'] = {
        'baire_class_1': all(j['on_orbit'] for j in jumps.values()),
        'fine_r': cloud.r, 'coarse_r': coarse,
        'mean_ball': float(np.mean(sizes)) if sizes else 0.0,
        'continuity_defect': defects, 'discontinuities': jumps}
    return report
