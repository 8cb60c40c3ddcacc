"""Dynamical pseudometrics over sample clouds, epsilon nets and the
fragmentation kernel.

A ``Pseudometric`` is evaluated on index pairs of a point array. It is
first *prepared* for the array (orbit tables are computed once per cloud)
and the prepared function then takes index arrays ``I, J``.

The kernel peels a cloud in synchronous stages: every point whose ball
piece ``B(x, r) ∩ S`` has rho-diameter at most epsilon leaves ``S``
together. A diameter exactly equal to epsilon counts as small.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .spaces import SequenceSpace
from .utils import DynlabError, InvariantViolation


__all__ = ('PseudometricError', 'Observable', 'Pseudometric',
           'FragmentationReport', 'SeparabilityProfile', 'BallStructure',
           'ambient_pseudometric', 'dH_pseudometric', 'rhoHf_pseudometric',
           'family_sup_pseudometric', 'd_H', 'rho_Hf', 'eps_net',
           'separability_profile', 'fragmentation_kernel',
           'fragmentation_defect', 'exhaustive_fragmentation',
           'certify_ranks', 'expansivity_estimate', 'default_eps_grid',)


TIE_TOL = 1e-12
# Pairs evaluated per vectorised block of orbit rows.
BLOCK = 1 << 22
# Largest cloud the brute-force oracle will enumerate.
ORACLE_LIMIT = 12


class PseudometricError(DynlabError):
    pass


def default_eps_grid(space, depth=10):
    """``diam * 2^-k`` for ``k = 1..depth``, descending."""
    return tuple(space.diameter * 2.0 ** -k for k in range(1, depth + 1))


@dataclass(frozen=True, eq=False)
class Observable:
    """A bounded real function on point arrays."""

    fn: object
    bound: float
    label: str = 'f'
    lipschitz: float = None

    def __post_init__(self):
        if not (self.bound is not None and np.isfinite(self.bound)
                and self.bound >= 0):
            raise PseudometricError('observable %s needs a finite sup-norm '
                                    'bound' % self.label)

    def __call__(self, X):
        values = np.asarray(self.fn(X), dtype=float)
        if np.any(~np.isfinite(values)) or \
                np.any(np.abs(values) > self.bound + TIE_TOL):
            raise PseudometricError('observable %s exceeds its declared '
                                    'bound %g' % (self.label, self.bound))
        return values

    @classmethod
    def coordinate(cls, k=0):
        return cls(lambda X: X[..., k], 1.0, 'x%d' % k, lipschitz=1.0)

    @classmethod
    def constant(cls, c=0.0):
        return cls(lambda X: np.full(X.shape[:-1], float(c)), abs(c),
                   'const', lipschitz=0.0)

    @classmethod
    def symbol_at_origin(cls, space):
        origin = space.origin
        return cls(lambda X: X[..., origin], max(space.alphabet), 'w(0)')


@dataclass(frozen=True, eq=False)
class Pseudometric:
    """``prepare(points)`` returns ``evaluate(I, J)`` over row indices."""

    label: str
    prepare: object
    params: dict = field(default_factory=dict)

    def __call__(self, x, y):
        points = np.concatenate([np.atleast_2d(x), np.atleast_2d(y)])
        return float(self.prepare(points)(np.array([0]), np.array([1]))[0])

    def matrix(self, points):
        n = len(points)
        I, J = np.triu_indices(n, 1)
        M = np.zeros((n, n))
        if len(I):
            values = self.prepare(points)(I, J)
            M[I, J] = values
            M[J, I] = values
        return M


def ambient_pseudometric(space):
    def prepare(points):
        points = space.as_points(points)
        return lambda I, J: space.pair_distances(points, points, I, J)
    return Pseudometric('ambient-d', prepare, {'space': space.descriptor})


def _table_sup(tables, I, J, distance):
    """``max_n distance(tables[n, I], tables[n, J])`` in row blocks."""
    result = np.zeros(len(I))
    if not len(I):
        return result
    step = max(1, BLOCK // max(len(I), 1))
    for start in range(0, len(tables), step):
        block = tables[start:start + step]
        np.maximum(result, distance(block[:, I], block[:, J]).max(axis=0),
                   out=result)
    return result


def dH_pseudometric(sys, horizon):
    """``d_H(x, y) = max_{|n| <= N} d(T^n x, T^n y)``."""
    space = sys.space
    if isinstance(space, SequenceSpace) and sys.name == 'shift':
        def prepare(points):
            points = space.as_points(points)
            return lambda I, J: space.orbit_sup(points, points, I, J,
                                                horizon.N)
    else:
        def prepare(points):
            tables = sys.orbit_tables(points, horizon)
            return lambda I, J: _table_sup(tables, I, J, space.paired)
    return Pseudometric('d_H(N=%d)' % horizon.N, prepare,
                        {'system': sys.name, 'N': horizon.N})


def rhoHf_pseudometric(sys, f, horizon):
    """``rho(x, y) = max_{|n| <= N} |f(T^n x) - f(T^n y)|``."""
    if not isinstance(f, Observable):
        raise PseudometricError('rho_Hf needs a registered Observable with a '
                                'sup-norm bound')

    def prepare(points):
        tables = sys.orbit_tables(points, horizon)
        values = f(tables)
        return lambda I, J: np.abs(values[:, I] - values[:, J]).max(axis=0) \
            if len(I) else np.zeros(0)
    return Pseudometric('rho_Hf(%s, N=%d)' % (f.label, horizon.N), prepare,
                        {'system': sys.name, 'N': horizon.N, 'f': f.label})


def family_sup_pseudometric(family, size=None):
    """``rho(x, y) = sup_f |f(x) - f(y)|`` over tables indexed by cloud
    position. Tables may be sequences or mappings ``index -> value``.
    """
    rows = []
    for k, table in enumerate(family):
        if isinstance(table, dict):
            n = size if size is not None else len(table)
            missing = [i for i in range(n) if i not in table]
            if missing:
                raise PseudometricError('table %d misses cloud point %d'
                                        % (k, missing[0]))
            table = [table[i] for i in range(n)]
        rows.append(np.asarray(table, dtype=float))
    if not rows:
        raise PseudometricError('empty family')
    lengths = set(len(row) for row in rows)
    if size is not None:
        lengths.add(size)
    if len(lengths) != 1:
        raise PseudometricError('family tables cover different point sets '
                                '(sizes %s)' % sorted(lengths))
    F = np.vstack(rows)

    def prepare(points):
        if len(points) != F.shape[1]:
            raise PseudometricError('family tables have %d entries, cloud '
                                    'has %d points' % (F.shape[1], len(points)))
        return lambda I, J: np.abs(F[:, I] - F[:, J]).max(axis=0) \
            if len(I) else np.zeros(0)
    return Pseudometric('family-sup(%d)' % len(rows), prepare,
                        {'size': len(rows)})


def _check_points(sys, *points):
    for x in points:
        if not sys.space.contains(x)[0]:
            raise PseudometricError('point %s is not in %s' % (
                np.ravel(x).tolist(), sys.space.descriptor))


def d_H(sys, x, y, horizon):
    _check_points(sys, x, y)
    return dH_pseudometric(sys, horizon)(sys.space.as_points(x),
                                         sys.space.as_points(y))


def rho_Hf(sys, f, x, y, horizon):
    _check_points(sys, x, y)
    return rhoHf_pseudometric(sys, f, horizon)(sys.space.as_points(x),
                                               sys.space.as_points(y))


def eps_net(cloud, rho, epsilon, prepared=None):
    """Greedy farthest point net, seeded at the first cloud point.
    Returns the center indices in selection order.
    """
    if not epsilon > 0:
        raise PseudometricError('epsilon must be positive')
    n = len(cloud)
    if not n:
        return np.empty(0, np.intp)
    evaluate = prepared or rho.prepare(cloud.points)
    everything = np.arange(n)
    gap = np.full(n, np.inf)
    centers = []
    center = 0
    while True:
        centers.append(center)
        np.minimum(gap, evaluate(np.full(n, center), everything), out=gap)
        gap[center] = 0.0
        center = int(np.argmax(gap))
        if gap[center] <= epsilon + TIE_TOL:
            break
    return np.array(centers, np.intp)


@dataclass
class SeparabilityProfile:
    label: str
    rows: list = field(default_factory=list)

    def as_dict(self):
        return {'pseudometric': self.label,
                'rows': [{'N': N, 'epsilon': eps, 'net_size': size}
                         for N, eps, size in self.rows]}


def separability_profile(sys, schedule, epsilon, family='d_H', f=None):
    """Net sizes of ``d_H`` (or ``rho_Hf`` with observable ``f``) over a
    schedule of ``(cloud, horizon)`` pairs. Descriptive only.
    """
    if not schedule:
        raise PseudometricError('empty cloud schedule')
    label = None
    profile = SeparabilityProfile(label)
    for cloud, horizon in schedule:
        if family == 'd_H':
            rho = dH_pseudometric(sys, horizon)
        elif family == 'rho_Hf':
            rho = rhoHf_pseudometric(sys, f, horizon)
        else:
            raise PseudometricError('unknown pseudometric family %s' % family)
        label = label or rho.label.split('(')[0]
        profile.rows.append((horizon.N, float(epsilon),
                             len(eps_net(cloud, rho, epsilon))))
    profile.label = label
    return profile


class BallStructure(object):
    """Every pair of points sharing a ball ``B(x, r)``, grouped by the
    ball owner, with rho evaluated once per distinct pair.
    """

    def __init__(self, cloud, rho, r=None, prepared=None):
        self.cloud = cloud
        self.r = cloud.r if r is None else float(r)
        self.balls = cloud.balls(self.r)
        n = len(cloud)
        owners, I, J = [], [], []
        for x, ball in enumerate(self.balls):
            if len(ball) < 2:
                continue
            a, b = np.triu_indices(len(ball), 1)
            owners.append(np.full(len(a), x, np.intp))
            I.append(ball[a])
            J.append(ball[b])
        empty = np.empty(0, np.intp)
        self.owners = np.concatenate(owners) if owners else empty
        self.I = np.concatenate(I).astype(np.intp) if I else empty
        self.J = np.concatenate(J).astype(np.intp) if J else empty
        keys = self.I.astype(np.int64) * n + self.J
        unique, inverse = np.unique(keys, return_inverse=True)
        evaluate = prepared or rho.prepare(cloud.points)
        values = evaluate(unique // n, unique % n) if len(unique) \
            else np.zeros(0)
        self.values = np.asarray(values, float)[inverse.ravel()]

    def diameters(self, active=None):
        """rho-diameter of ``B(x, r) ∩ active`` for every owner ``x``."""
        diam = np.zeros(len(self.cloud))
        if active is None:
            owners, values = self.owners, self.values
        else:
            mask = active[self.I] & active[self.J]
            owners, values = self.owners[mask], self.values[mask]
        np.maximum.at(diam, owners, values)
        return diam


@dataclass
class FragmentationReport:
    epsilon: float
    r: float
    fragmented: bool
    # Stage index of each peeled point, -1 for residual points.
    ranks: np.ndarray
    residual: np.ndarray
    stages: int
    label: str = None

    def as_dict(self):
        return {'epsilon': self.epsilon, 'r': self.r,
                'fragmented': self.fragmented, 'stages': self.stages,
                'pseudometric': self.label,
                'residual': self.residual.tolist(),
                'ranks': {int(i): int(k) for i, k in enumerate(self.ranks)
                          if k >= 0}}


def fragmentation_kernel(cloud, rho, epsilon, r=None, structure=None,
                         verify=False):
    """Peel ``S_{k+1} = S_k minus {x : diam(B(x,r) ∩ S_k) <= epsilon}``
    to its fixpoint. ``verify`` cross-checks small clouds against the
    exhaustive subset oracle.
    """
    if not epsilon > 0:
        raise PseudometricError('epsilon must be positive')
    structure = structure or BallStructure(cloud, rho, r)
    n = len(cloud)
    alive = np.ones(n, bool)
    ranks = np.full(n, -1, np.int64)
    stages = 0
    while alive.any():
        small = alive & (structure.diameters(alive) <= epsilon + TIE_TOL)
        if not small.any():
            break
        ranks[small] = stages
        alive &= ~small
        stages += 1
    residual = np.flatnonzero(alive)
    report = FragmentationReport(float(epsilon), structure.r,
                                 not len(residual), ranks, residual, stages,
                                 rho.label)
    if verify and n <= ORACLE_LIMIT:
        expected = exhaustive_fragmentation(cloud, rho, epsilon, structure.r)
        if expected != report.fragmented:
            raise InvariantViolation(
                'fragmentation kernel says %s, subset oracle says %s '
                '(epsilon %g, r %g)' % (report.fragmented, expected,
                                        epsilon, structure.r))
    return report


def certify_ranks(report, structure):
    """Replay the peeling: every point of rank ``k`` must have a small
    ball piece within the points of rank ``>= k``.
    """
    if not report.fragmented:
        return False
    for k in range(report.stages):
        remaining = report.ranks >= k
        diam = structure.diameters(remaining)
        peeled = report.ranks == k
        if np.any(diam[peeled] > report.epsilon + TIE_TOL):
            return False
    return True


def exhaustive_fragmentation(cloud, rho, epsilon, r=None):
    """Whether every nonempty subset ``A`` has a point ``a`` with
    ``diam(B(a, r) ∩ A) <= epsilon``, by enumerating all subsets.
    """
    n = len(cloud)
    if n > ORACLE_LIMIT:
        raise PseudometricError('subset oracle is limited to %d points'
                                % ORACLE_LIMIT)
    r = cloud.r if r is None else r
    D = rho.matrix(cloud.points).tolist()
    balls = [set(int(i) for i in ball) for ball in cloud.balls(r)]
    for size in range(1, n + 1):
        for A in combinations(range(n), size):
            A = set(A)
            if not any(_diameter(D, balls[a] & A) <= epsilon + TIE_TOL
                       for a in A):
                return False
    return True


def _diameter(D, members):
    members = list(members)
    return max([D[i][j] for i in members for j in members] or [0.0])


def fragmentation_defect(cloud, rho, r, eps_grid):
    """Smallest grid epsilon at which the cloud is (epsilon, r)-fragmented,
    ``inf`` if there is none.
    """
    eps_grid = list(eps_grid)
    if not eps_grid:
        raise PseudometricError('empty epsilon grid')
    if any(b >= a for a, b in zip(eps_grid, eps_grid[1:])) or \
            min(eps_grid) <= 0:
        raise PseudometricError('epsilon grid must be positive and '
                                'descending')
    structure = BallStructure(cloud, rho, r)
    defect = np.inf
    for eps in eps_grid:
        if not fragmentation_kernel(cloud, rho, eps,
                                    structure=structure).fragmented:
            break
        defect = eps
    return defect


def expansivity_estimate(sys, cloud, horizon):
    """Smallest ``d_H`` over distinct pairs of the cloud, ``inf`` for
    fewer than two points. A positive value bounded away from zero as
    the cloud is refined is the finite trace of an expansivity constant.
    """
    n = len(cloud)
    if n < 2:
        return np.inf
    evaluate = dH_pseudometric(sys, horizon).prepare(cloud.points)
    best = np.inf
    for i in range(n - 1):
        J = np.arange(i + 1, n)
        best = min(best, float(evaluate(np.full(len(J), i), J).min()))
    return best


