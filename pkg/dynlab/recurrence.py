"""delta-chain digraphs and what is read off them: chain recurrence, a
finite Birkhoff center iteration, prolongations, capturing sets and the
minimal center.

Node ``x`` has an edge to ``y`` when ``d(T x, y) <= delta``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .pseudometrics import BallStructure, dH_pseudometric, TIE_TOL
from .spaces import orbit_segment
from .utils import DynlabError, PropertyResult, dummy_warn


__all__ = ('RecurrenceError', 'ChainDigraph', 'ProlongationReport',
           'MincenterReport', 'TransitivityResult', 'chain_digraph',
           'chain_recurrent_set', 'birkhoff_center_iteration', 'prolongation',
           'lem1_check', 'capturing_check', 'mincenter_approx',
           'product_chain_transitivity', 'common_return_check',)


MAX_STAGES = 32
PRODUCT_BUDGET = 4096


class RecurrenceError(DynlabError):
    pass


def _adjacency(cloud, sources, delta):
    hits = cloud.within(sources, delta)
    rows = np.repeat(np.arange(len(hits)), [len(h) for h in hits])
    cols = np.concatenate(hits) if hits else np.empty(0, np.intp)
    return sparse.csr_matrix((np.ones(len(rows), bool), (rows, cols)),
                             shape=(len(sources), len(cloud)))


@dataclass
class ChainDigraph:
    cloud: object
    delta: float
    adjacency: sparse.csr_matrix
    N: int = None

    def __len__(self):
        return self.adjacency.shape[0]

    @property
    def out_degree(self):
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    def restrict(self, nodes):
        nodes = np.asarray(nodes, np.intp)
        return ChainDigraph(self.cloud, self.delta,
                            self.adjacency[nodes][:, nodes].tocsr(), self.N)

    def components(self):
        """Labels of the strongly connected components and a mask of
        nodes lying on a directed cycle.
        """
        n = len(self)
        if not n:
            return np.empty(0, np.intp), np.empty(0, bool)
        count, labels = connected_components(self.adjacency, directed=True,
                                             connection='strong')
        sizes = np.bincount(labels, minlength=count)
        loops = self.adjacency.diagonal().astype(bool)
        return labels, (sizes[labels] > 1) | loops

    def as_dict(self):
        I, J = self.adjacency.nonzero()
        return {'delta': self.delta, 'N': self.N, 'nodes': len(self),
                'edges': np.column_stack([I, J]).tolist()}


def chain_digraph(sys, cloud, delta, horizon=None):
    if not delta > 0:
        raise RecurrenceError('delta must be positive')
    adjacency = _adjacency(cloud, sys.forward(cloud.points), delta)
    return ChainDigraph(cloud, float(delta), adjacency,
                        None if horizon is None else horizon.N)


def chain_recurrent_set(dg):
    """Nodes on a directed cycle of the digraph, self-loops included."""
    return np.flatnonzero(dg.components()[1])


def birkhoff_center_iteration(sys, cloud, delta, horizon, max_stages=MAX_STAGES,
                              r=None, warnfunc=dummy_warn):
    """Repeatedly drop nodes whose ball is wandering: no image
    ``T^j B(x, r)``, ``1 <= |j| <= N``, comes within delta of the ball,
    and the ball meets no cycle of the digraph restricted to the
    surviving nodes.

    Returns ``(stages, converged)``; stage 0 is the whole cloud.
    """
    if max_stages < 1:
        raise RecurrenceError('max_stages must be at least 1')
    r = cloud.r if r is None else r
    N = horizon.N
    tables = sys.orbit_tables(cloud.points, horizon)
    moved = tables[np.r_[np.arange(0, N), np.arange(N + 1, 2 * N + 1)]]
    balls = cloud.balls(r)
    dg = chain_digraph(sys, cloud, delta, horizon)

    def returns(members):
        if not N:
            return False
        images = moved[:, members].reshape(-1, cloud.points.shape[1])
        return cloud.space.cdist(images, cloud.points[members]).min() \
            <= delta + TIE_TOL

    current = np.arange(len(cloud))
    stages = [current]
    converged = False
    for _ in range(max_stages):
        alive = np.zeros(len(cloud), bool)
        alive[current] = True
        on_cycle = np.zeros(len(cloud), bool)
        on_cycle[current[dg.restrict(current).components()[1]]] = True
        keep = []
        for x in current:
            members = balls[x][alive[balls[x]]]
            if on_cycle[members].any() or returns(members):
                keep.append(x)
        keep = np.array(keep, np.intp)
        if len(keep) == len(current):
            converged = True
            break
        current = keep
        stages.append(current)
    if not converged:
        warnfunc('still removing points after %d stages' % max_stages,
                 'warning')
    return stages, converged


@dataclass
class ProlongationReport:
    base: int
    prol_set: np.ndarray
    delta: float
    N: int
    # Whether the delta-truncated orbit segment of the base is contained.
    contains_orbit: bool = True

    def as_dict(self):
        return {'base': self.base, 'prol_set': self.prol_set.tolist(),
                'delta': self.delta, 'N': self.N,
                'contains_orbit': self.contains_orbit}


def prolongation(sys, cloud, x, delta, horizon):
    """Cloud points within delta of ``T^n x'`` for some ``x'`` in
    ``B(x, delta)`` and ``|n| <= N``; ``x`` is a cloud index.
    """
    if not 0 <= x < len(cloud):
        raise RecurrenceError('base point %r is not a cloud index' % (x,))
    near = cloud.within(cloud.points[x:x + 1], delta)[0]
    tables = sys.orbit_tables(cloud.points[near], horizon)
    images = tables.reshape(-1, cloud.points.shape[1])
    hits = cloud.within(images, delta)
    prol = np.unique(np.concatenate(hits)) if hits else np.empty(0, np.intp)
    orbit = np.array([p for _, p in orbit_segment(sys, cloud.points[x],
                                                  horizon)])
    truncated = np.unique(np.concatenate(cloud.within(orbit, delta)))
    return ProlongationReport(int(x), prol, float(delta), horizon.N,
                              bool(np.isin(truncated, prol).all()))


def _eq_proxy(sys, cloud, horizon, epsilon):
    structure = BallStructure(cloud, dH_pseudometric(sys, horizon))
    return structure.diameters() <= epsilon + TIE_TOL


def lem1_check(sys, cloud, delta, horizon, eps_grid):
    """At equicontinuity points the prolongation is the orbit closure:
    ``Prol[x0]`` must lie within 2 delta of the orbit segment of ``x0``.
    Points outside the Eq proxy are skipped.
    """
    eq = _eq_proxy(sys, cloud, horizon, min(eps_grid))
    violations, checked = [], 0
    for x in np.flatnonzero(eq):
        checked += 1
        report = prolongation(sys, cloud, x, delta, horizon)
        orbit = np.array([p for _, p in orbit_segment(sys, cloud.points[x],
                                                      horizon)])
        dist, _ = cloud.space.nearest(orbit, cloud.points[report.prol_set])
        if np.any(dist > 2 * delta + TIE_TOL):
            violations.append(int(x))
    return PropertyResult('prolongation-is-orbit-closure',
                          'fail' if violations else 'pass', checked=checked,
                          skipped=int((~eq).sum()), violations=violations)


def capturing_check(sys, cloud, A, B, horizon, delta):
    """Whether no ``x`` in ``B \\ A`` has an orbit segment entering the
    delta-fattening of ``A``. Returns ``(ok, violators)``.
    """
    A, B = set(int(a) for a in A), set(int(b) for b in B)
    if not A <= B:
        raise RecurrenceError('A must be a subset of B')
    rest = np.array(sorted(B - A), np.intp)
    if not len(rest) or not A:
        return True, []
    targets = cloud.points[sorted(A)]
    tables = sys.orbit_tables(cloud.points[rest], horizon)
    violators = []
    for k, x in enumerate(rest):
        dist, _ = cloud.space.nearest(targets, tables[:, k])
        if np.any(dist <= delta + TIE_TOL):
            violators.append(int(x))
    return not violators, violators


@dataclass
class MincenterReport:
    components: list
    nodes: np.ndarray
    gap_bound: int
    delta: float

    def as_dict(self):
        return {'components': [{'members': m.tolist(), 'minimal': minimal}
                               for m, minimal in self.components],
                'nodes': self.nodes.tolist(), 'gap_bound': self.gap_bound,
                'delta': self.delta}


def _syndetic(returns, N, gap_bound):
    if not len(returns):
        return False
    marks = np.r_[0, returns, N + 1]
    return bool(np.diff(marks).max() <= gap_bound)


def mincenter_approx(sys, cloud, delta, horizon, gap_bound=None):
    """Strongly connected components of the chain recurrent nodes, each
    tagged minimal when all members return delta-close to themselves
    with gaps of at most ``gap_bound`` (default ``ceil(N/4)``).
    """
    N = horizon.N
    gap_bound = max(1, math.ceil(N / 4)) if gap_bound is None else gap_bound
    dg = chain_digraph(sys, cloud, delta, horizon)
    recurrent = chain_recurrent_set(dg)
    labels, _ = dg.restrict(recurrent).components()
    tables = sys.orbit_tables(cloud.points[recurrent], horizon)
    returning = np.zeros(len(recurrent), bool)
    for k in range(len(recurrent)):
        d = cloud.space.paired(tables[N + 1:, k], tables[N, k][None, :])
        returning[k] = _syndetic(np.flatnonzero(d <= delta + TIE_TOL) + 1,
                                 N, gap_bound)
    components = []
    nodes = []
    for label in np.unique(labels):
        members = recurrent[labels == label]
        minimal = bool(returning[labels == label].all())
        components.append((members, minimal))
        if minimal:
            nodes.extend(members.tolist())
    return MincenterReport(components, np.array(sorted(nodes), np.intp),
                           gap_bound, float(delta))


@dataclass
class TransitivityResult:
    status: str
    nodes: int
    components: int = None
    subsampled: bool = False
    detail: dict = field(default_factory=dict)

    def as_dict(self):
        return {'status': self.status, 'nodes': self.nodes,
                'components': self.components, 'subsampled': self.subsampled,
                'detail': self.detail}


def product_chain_transitivity(sys, cloud, delta, horizon=None,
                               budget=PRODUCT_BUDGET):
    """Strong connectivity of the delta-chain digraph of ``T x T`` on
    cloud pairs. Clouds with more than ``budget`` pairs are subsampled by
    a uniform stride; the verdict then holds at the subsample scale.
    """
    n = len(cloud)
    if not n:
        return TransitivityResult('unknown', 0,
                                  detail={'reason': 'empty cloud'})
    subsampled = n * n > budget
    sub = cloud
    if subsampled:
        m = max(1, int(math.isqrt(budget)))
        sub = cloud.subset(np.arange(0, n, int(math.ceil(n / m)))[:m],
                           subsampled=True)
    A = chain_digraph(sys, sub, delta, horizon).adjacency.astype(np.int8)
    product = sparse.kron(A, A, format='csr')
    nodes = product.shape[0]
    if nodes > 1 and np.any(np.asarray(product.sum(axis=1)).ravel() == 0):
        # A dead end cannot lie on a cycle through every node.
        return TransitivityResult('not', nodes, subsampled=subsampled,
                                  detail={'reason': 'a product node has no '
                                                    'delta-successor'})
    count, _ = connected_components(product, directed=True,
                                    connection='strong')
    return TransitivityResult('transitive' if count == 1 else 'not', nodes,
                              count, subsampled)


def common_return_check(sys, cloud, horizon, r=None, budget=PRODUCT_BUDGET):
    """Transitivity of ``T x T`` needs, for every pair of balls ``U``,
    ``V``, a time ``1 <= j <= N`` at which ``T^j U`` meets both ``U`` and
    ``V``. Sampled balls of radius ``r`` (default ``cloud.r``) stand in
    for open sets; ``not`` comes with the first pair lacking one.

    Only ``not`` is conclusive, and only at the sampled scale.
    """
    r = cloud.r if r is None else r
    n = len(cloud)
    if not n or not horizon.N:
        return TransitivityResult('unknown', n * n,
                                  detail={'reason': 'nothing to iterate'})
    subsampled = n * n > budget
    sub = cloud
    if subsampled:
        m = max(1, int(math.isqrt(budget)))
        sub = cloud.subset(np.arange(0, n, int(math.ceil(n / m)))[:m],
                           subsampled=True)
    m = len(sub)
    members = np.zeros((m, m), bool)
    for x, ball in enumerate(sub.balls(r)):
        members[x, ball] = True
    N = horizon.N
    tables = sys.orbit_tables(sub.points, horizon)
    common = np.zeros((m, m), bool)
    for j in range(1, N + 1):
        lands = sub.space.cdist(tables[N + j], sub.points) <= r + TIE_TOL
        # meets[x, y]: some point of U_x lands in U_y after j steps.
        meets = (members.astype(np.int32) @ lands.astype(np.int32)) > 0
        common |= meets & np.diag(meets)[:, None]
        if common.all():
            return TransitivityResult('transitive', m * m,
                                      subsampled=subsampled,
                                      detail={'r': float(r), 'N': N})
    x, y = (int(i) for i in np.argwhere(~common)[0])
    return TransitivityResult('not', m * m, subsampled=subsampled,
                              detail={'r': float(r), 'N': N,
                                      'witness': [x, y]})
