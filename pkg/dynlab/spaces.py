"""Ambient phase spaces, the gallery of example cascades, point sampling
and finite orbit machinery.

Points are numpy rows. Geometric spaces use float coordinates; sequence
spaces store a finite window of symbols, position ``k`` of the window
sitting at column ``k + window // 2``. The shift acts on a window by
cyclic rotation, the declared extension rule for finite windows.

Everything here is immutable once built; all operations are pure.
"""

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import product

import numpy as np
from scipy import optimize
from scipy.spatial import cKDTree

from .utils import DynlabError


__all__ = ('SpaceError', 'GalleryError', 'OrbitOverflowError',
           'SuspensionError', 'AmbientSpace', 'Circle', 'Torus2', 'Interval',
           'Disk', 'SequenceSpace', 'SuspensionSpace', 'make_space',
           'Horizon', 'SampleCloud', 'SystemSpec', 'GALLERY',
           'make_gallery_system', 'sample_space', 'orbit_segment',
           'orbit_closure_sample', 'takens_suspension', 'ArctanProfile',
           'suspension_cloud',)


# Additive error allowed for a single map application round trip.
EVAL_TOL = 1e-9
# Slack when comparing a distance against a radius.
RADIUS_SLACK = 1e-12


class SpaceError(DynlabError):
    pass


class GalleryError(SpaceError):
    pass


class OrbitOverflowError(SpaceError):
    pass


class SuspensionError(SpaceError):
    pass


def _arc(d):
    d = np.abs(d) % 1.0
    return np.minimum(d, 1.0 - d)


def _wrap(X):
    X = np.mod(X, 1.0)
    # -1e-17 % 1.0 gives 1.0
    X[X >= 1.0] = 0.0
    return X


class AmbientSpace(object):
    """A compact metric phase space.

    Subclasses implement ``paired`` (elementwise distances of two
    broadcastable point arrays); everything else is derived from it.
    """

    kind = None
    dim = 1
    diameter = 1.0
    dtype = float
    # (Minkowski p, boxsize) when cKDTree can answer ball queries.
    kdtree = None

    @property
    def descriptor(self):
        raise NotImplementedError()

    def paired(self, A, B):
        raise NotImplementedError()

    def normalize(self, X):
        return X

    def contains(self, X):
        X = self.as_points(X)
        return np.all(np.isfinite(X), axis=1)

    def as_points(self, X):
        X = np.asarray(X, dtype=self.dtype)
        if X.ndim <= 1:
            X = X.reshape(-1, self.dim)
        if X.shape[-1] != self.dim:
            raise SpaceError('%s points have %d coordinates, got %d' % (
                self.kind, self.dim, X.shape[-1]))
        return X

    def cdist(self, A, B):
        """Full distance matrix between two point arrays."""
        A, B = self.as_points(A), self.as_points(B)
        return self.paired(A[:, None, :], B[None, :, :])

    def pair_distances(self, A, B, I, J):
        """Distances between ``A[I]`` and ``B[J]``."""
        return self.paired(A[I], B[J])

    def within(self, data, queries, radius):
        """For each query point, the sorted indices of ``data`` rows
        within ``radius``.
        """
        data, queries = self.as_points(data), self.as_points(queries)
        radius = radius + RADIUS_SLACK
        if self.kdtree is not None and len(data):
            p, boxsize = self.kdtree
            tree = cKDTree(data, boxsize=boxsize)
            hits = tree.query_ball_point(queries, radius, p=p,
                                         return_sorted=True)
            return [np.asarray(h, dtype=np.intp) for h in hits]
        result = []
        for start in range(0, len(queries), 256):
            D = self.cdist(queries[start:start + 256], data)
            result.extend(np.flatnonzero(row <= radius) for row in D)
        return result

    def pairs_within(self, data, radius):
        """Index arrays ``(I, J)``, ``I < J``, of all pairs of rows of
        ``data`` at distance at most ``radius``.
        """
        data = self.as_points(data)
        radius = radius + RADIUS_SLACK
        if self.kdtree is not None and len(data):
            p, boxsize = self.kdtree
            tree = cKDTree(data, boxsize=boxsize)
            pairs = tree.query_pairs(radius, p=p, output_type='ndarray')
            if not len(pairs):
                return np.empty(0, np.intp), np.empty(0, np.intp)
            pairs = np.sort(pairs, axis=1)
            pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
            return pairs[:, 0].astype(np.intp), pairs[:, 1].astype(np.intp)
        hits = self.within(data, data, radius - RADIUS_SLACK)
        I = np.concatenate([np.full(len(h), i, np.intp)
                            for i, h in enumerate(hits)] or [np.empty(0, np.intp)])
        J = np.concatenate(hits or [np.empty(0, np.intp)]).astype(np.intp)
        keep = I < J
        return I[keep], J[keep]

    def nearest(self, data, queries):
        """Return ``(distances, indices)`` of the nearest data row for
        each query.
        """
        data, queries = self.as_points(data), self.as_points(queries)
        if self.kdtree is not None:
            p, boxsize = self.kdtree
            tree = cKDTree(data, boxsize=boxsize)
            dist, idx = tree.query(queries, k=1, p=p)
            return np.asarray(dist, float), np.asarray(idx, np.intp)
        dist = np.empty(len(queries))
        idx = np.empty(len(queries), np.intp)
        for start in range(0, len(queries), 256):
            D = self.cdist(queries[start:start + 256], data)
            idx[start:start + 256] = D.argmin(axis=1)
            dist[start:start + 256] = D.min(axis=1)
        return dist, idx

    def __eq__(self, other):
        return isinstance(other, AmbientSpace) and \
            self.descriptor == other.descriptor

    def __hash__(self):
        return hash(self.descriptor)

    def __repr__(self):
        return '<%s>' % self.descriptor


class Circle(AmbientSpace):
    kind = 'circle'
    dim = 1
    diameter = 0.5
    kdtree = (np.inf, 1.0)
    descriptor = 'circle: arc distance, total length 1'

    def paired(self, A, B):
        return _arc(A[..., 0] - B[..., 0])

    def normalize(self, X):
        return _wrap(np.array(X, dtype=float))

    def contains(self, X):
        X = self.as_points(X)
        return np.all((X >= 0) & (X < 1), axis=1)


class Torus2(AmbientSpace):
    kind = 'torus2'
    dim = 2
    diameter = 0.5
    kdtree = (np.inf, np.array([1.0, 1.0]))
    descriptor = 'torus2: max of arc distances, circles of length 1'

    def paired(self, A, B):
        return _arc(A - B).max(axis=-1)

    def normalize(self, X):
        return _wrap(np.array(X, dtype=float))

    def contains(self, X):
        X = self.as_points(X)
        return np.all((X >= 0) & (X < 1), axis=1)


class Interval(AmbientSpace):
    kind = 'interval'
    dim = 1
    diameter = 1.0
    kdtree = (np.inf, None)
    descriptor = 'interval: absolute difference on [0,1]'

    def paired(self, A, B):
        return np.abs(A[..., 0] - B[..., 0])

    def normalize(self, X):
        return np.clip(np.array(X, dtype=float), 0.0, 1.0)

    def contains(self, X):
        X = self.as_points(X)
        return np.all((X >= -RADIUS_SLACK) & (X <= 1 + RADIUS_SLACK), axis=1)


class Disk(AmbientSpace):
    kind = 'disk'
    dim = 2
    diameter = 2.0
    kdtree = (2, None)
    descriptor = 'disk: euclidean distance on the closed unit disk'

    def paired(self, A, B):
        return np.hypot(A[..., 0] - B[..., 0], A[..., 1] - B[..., 1])

    def contains(self, X):
        X = self.as_points(X)
        return np.hypot(X[:, 0], X[:, 1]) <= 1 + RADIUS_SLACK


class SequenceSpace(AmbientSpace):
    """Windows of symbol sequences with d(x,y) = 2^-min{|k| : x_k != y_k}.

    Rows are windows of length ``window``; column ``c`` holds position
    ``c - window // 2``.
    """

    kind = 'sequence'
    diameter = 1.0
    dtype = np.int64

    def __init__(self, alphabet=(0, 1), window=9):
        alphabet = tuple(sorted(set(int(a) for a in alphabet)))
        if not alphabet:
            raise SpaceError('empty alphabet')
        if window < 1:
            raise SpaceError('window length must be positive')
        self.alphabet = alphabet
        self.window = int(window)
        self.dim = self.window
        self.origin = self.window // 2
        self.reach = max(self.origin, self.window - 1 - self.origin)

    @property
    def descriptor(self):
        return 'sequence: 2^-min|k| over alphabet %s, window %d' % (
            ''.join(map(str, self.alphabet)), self.window)

    @property
    def offsets(self):
        return np.arange(self.window) - self.origin

    def contains(self, X):
        X = self.as_points(X)
        return np.all(np.isin(X, self.alphabet), axis=1)

    def first_difference(self, A, B, I=None, J=None):
        """``min |k|`` at which ``A[I]`` and ``B[J]`` differ, or
        ``reach + 1`` for identical windows.

        Only pairs still tied at radius ``rho`` are compared at
        ``rho + 1``, so the cost follows the actual agreement lengths.
        """
        A, B = self.as_points(A), self.as_points(B)
        if I is None:
            I = J = np.arange(len(A))
        I, J = np.asarray(I, np.intp), np.asarray(J, np.intp)
        m = np.full(len(I), self.reach + 1, dtype=np.int64)
        tied = np.arange(len(I))
        for rho in range(self.reach + 1):
            if not len(tied):
                break
            ia, jb = I[tied], J[tied]
            diff = np.zeros(len(tied), bool)
            for c in {self.origin + rho, self.origin - rho}:
                if 0 <= c < self.window:
                    diff |= A[ia, c] != B[jb, c]
            m[tied[diff]] = rho
            tied = tied[~diff]
        return m

    def _from_difference(self, m, shift=0):
        exponent = np.maximum(m - shift, 0).astype(float)
        d = np.power(2.0, -exponent)
        d[m > self.reach] = 0.0
        return d

    def pair_distances(self, A, B, I, J):
        return self._from_difference(self.first_difference(A, B, I, J))

    def orbit_sup(self, A, B, I, J, N):
        """``sup_{|n| <= N} d(T^n a, T^n b)`` in closed form: a
        difference at position ``m`` is carried to ``max(m - N, 0)``.
        """
        return self._from_difference(self.first_difference(A, B, I, J), N)

    def paired(self, A, B):
        A, B = np.broadcast_arrays(np.asarray(A), np.asarray(B))
        shape = A.shape[:-1]
        A, B = A.reshape(-1, self.window), B.reshape(-1, self.window)
        return self.pair_distances(A, B, np.arange(len(A)),
                                   np.arange(len(A))).reshape(shape)

    def cdist(self, A, B):
        A, B = self.as_points(A), self.as_points(B)
        I, J = np.meshgrid(np.arange(len(A)), np.arange(len(B)),
                           indexing='ij')
        return self.pair_distances(A, B, I.ravel(),
                                   J.ravel()).reshape(len(A), len(B))


class SuspensionSpace(AmbientSpace):
    """``X x S`` with the max metric; the last coordinate is the circle
    coordinate ``t`` of a suspension, base points living at ``t = 0``.
    """

    kind = 'suspension'

    def __init__(self, base):
        self.base = base
        self.dim = base.dim + 1
        self.diameter = max(base.diameter, 0.5)

    @property
    def descriptor(self):
        return 'suspension: max(%s, arc distance on t)' % self.base.descriptor

    def paired(self, A, B):
        return np.maximum(self.base.paired(A[..., :-1], B[..., :-1]),
                          _arc(A[..., -1] - B[..., -1]))

    def normalize(self, X):
        X = np.array(X, dtype=float)
        X[..., :-1] = self.base.normalize(X[..., :-1])
        X[..., -1] = _wrap(X[..., -1])
        return X

    def contains(self, X):
        X = self.as_points(X)
        return self.base.contains(X[:, :-1]) & (X[:, -1] >= 0) & (X[:, -1] < 1)


def make_space(kind, **params):
    """Build an ambient space from its kind name."""
    if kind == 'circle':
        return Circle()
    if kind == 'torus2':
        return Torus2()
    if kind == 'interval':
        return Interval()
    if kind == 'disk':
        return Disk()
    if kind in ('sequence', 'sequence-space'):
        return SequenceSpace(params.get('alphabet', (0, 1)),
                             params.get('window', 9))
    raise SpaceError('unknown space kind: %s' % kind)


@dataclass(frozen=True)
class Horizon:
    """The ℤ-interval ``{-N, ..., N}``."""

    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 0:
            raise SpaceError('horizon must be a nonnegative integer, not %r'
                             % (self.N,))
        object.__setattr__(self, 'N', int(self.N))

    @property
    def elements(self):
        return np.arange(-self.N, self.N + 1)

    def __iter__(self):
        return iter(range(-self.N, self.N + 1))

    def __len__(self):
        return 2 * self.N + 1


@dataclass(frozen=True, eq=False)
class SampleCloud:
    """A finite sample of an ambient space plus the resolution radius
    ``r`` that stands in for "open set" in every ball-based test.
    """

    space: AmbientSpace
    points: np.ndarray
    r: float
    provenance: dict = field(default_factory=dict)
    tags: tuple = None

    def __post_init__(self):
        points = self.space.as_points(self.points).copy()
        points.setflags(write=False)
        object.__setattr__(self, 'points', points)
        if not self.r > 0:
            raise SpaceError('resolution radius must be positive, not %r'
                             % (self.r,))
        object.__setattr__(self, 'r', float(self.r))
        if self.tags is not None and len(self.tags) != len(points):
            raise SpaceError('one tag per point required')

    @classmethod
    def build(cls, space, points, r=None, provenance=None, merge_tol=0.0,
              tags=None):
        """Normalize, merge points closer than ``merge_tol`` (first one
        wins) and default ``r`` to the covering radius.
        """
        points = space.normalize(space.as_points(points))
        if len(points) and not np.all(space.contains(points)):
            raise SpaceError('points outside of %s' % space.descriptor)
        keep = greedy_merge(space, points, merge_tol)
        points = points[keep]
        if tags is not None:
            tags = tuple(tags[i] for i in keep)
        cloud = cls(space, points, r or space.diameter, dict(provenance or {}),
                    tags)
        if r is None and len(points) > 1:
            cloud = cloud.with_radius(cloud.covering_radius)
        return cloud

    def __len__(self):
        return len(self.points)

    @cached_property
    def nn_distances(self):
        """Distance of each point to its nearest other point."""
        if len(self) < 2:
            return np.full(len(self), np.inf)
        # k=2 because the nearest hit is the point itself.
        if self.space.kdtree is not None:
            p, boxsize = self.space.kdtree
            tree = cKDTree(self.points, boxsize=boxsize)
            dist, _ = tree.query(self.points, k=2, p=p)
            return np.asarray(dist[:, 1], float)
        D = np.empty(len(self))
        for start in range(0, len(self), 256):
            block = self.space.cdist(self.points[start:start + 256],
                                     self.points)
            for i, row in enumerate(block):
                row[start + i] = np.inf
            D[start:start + 256] = block.min(axis=1)
        return D

    @property
    def covering_radius(self):
        """Half of the largest nearest-neighbour gap."""
        if len(self) < 2:
            return self.space.diameter
        return float(self.nn_distances.max()) / 2

    def with_radius(self, r):
        return replace(self, r=float(r))

    def balls(self, r=None):
        """For each point, the indices of cloud points within ``r``."""
        return self.space.within(self.points, self.points,
                                 self.r if r is None else r)

    def within(self, queries, radius):
        return self.space.within(self.points, queries, radius)

    def nearest(self, queries):
        return self.space.nearest(self.points, queries)

    def distance_matrix(self):
        return self.space.cdist(self.points, self.points)

    def subset(self, indices, **provenance):
        indices = np.asarray(indices, np.intp)
        tags = None if self.tags is None else tuple(self.tags[i] for i in indices)
        prov = dict(self.provenance)
        prov.update(provenance)
        return SampleCloud(self.space, self.points[indices], self.r, prov, tags)

    def index_of(self, point):
        dist, idx = self.nearest(self.space.as_points(point))
        if dist[0] > RADIUS_SLACK:
            return None
        return int(idx[0])

    def dense_within(self, queries, radius):
        """Boolean mask of queries within ``radius`` of some cloud point."""
        dist, _ = self.nearest(queries)
        return dist <= radius + RADIUS_SLACK

    def as_dict(self):
        return {'space': self.space.descriptor, 'size': len(self),
                'r': self.r, 'provenance': self.provenance}


def greedy_merge(space, points, tol):
    """Indices of points kept when walking in order and dropping every
    point within ``tol`` of an already kept one.
    """
    n = len(points)
    if n == 0:
        return np.empty(0, np.intp)
    if isinstance(space, SequenceSpace) and tol < 2.0 ** -(space.reach + 1):
        # Only identical windows are that close.
        _, first = np.unique(points, axis=0, return_index=True)
        return np.sort(first)
    I, J = space.pairs_within(points, tol)
    removed = np.zeros(n, bool)
    if len(I):
        order = np.argsort(I, kind='stable')
        I, J = I[order], J[order]
        starts = np.searchsorted(I, np.arange(n + 1))
        for i in range(n):
            if removed[i]:
                continue
            removed[J[starts[i]:starts[i + 1]]] = True
    return np.flatnonzero(~removed)


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """An invertible cascade: a homeomorphism and its inverse acting on
    point arrays of ``space``.
    """

    space: AmbientSpace
    forward: object
    inverse: object
    name: str
    params: dict = field(default_factory=dict)
    is_isometry: bool = False
    weak_mixing: bool = False
    tol: float = EVAL_TOL

    def _step(self, fn, X, n):
        Y = fn(X)
        if Y.dtype.kind == 'f' and not np.all(np.isfinite(Y)):
            raise OrbitOverflowError('%s: non-finite coordinates after %d '
                                     'steps' % (self.name, n))
        return Y

    def apply(self, X, n):
        """``T^n`` applied to the point array ``X``."""
        X = self.space.as_points(X)
        fn = self.forward if n >= 0 else self.inverse
        for k in range(abs(n)):
            X = self._step(fn, X, k + 1)
        return X

    def orbit_tables(self, X, horizon):
        """Array of shape ``(2N+1, len(X), dim)``; row ``N + n`` holds
        ``T^n X``.
        """
        X = self.space.as_points(X)
        N = horizon.N
        tables = np.empty((2 * N + 1,) + X.shape, dtype=X.dtype)
        tables[N] = X
        cur = X
        for k in range(1, N + 1):
            cur = self._step(self.forward, cur, k)
            tables[N + k] = cur
        cur = X
        for k in range(1, N + 1):
            cur = self._step(self.inverse, cur, -k)
            tables[N - k] = cur
        return tables

    def roundtrip_error(self, X):
        """Largest ``d(T^-1 T x, x)`` / ``d(T T^-1 x, x)`` over ``X``."""
        X = self.space.as_points(X)
        if not len(X):
            return 0.0
        a = self.space.paired(self.inverse(self.forward(X)), X)
        b = self.space.paired(self.forward(self.inverse(X)), X)
        return float(max(a.max(), b.max()))

    def check_homeomorphism(self, X):
        err = self.roundtrip_error(X)
        if err > self.tol:
            raise SpaceError('%s: round trip error %g exceeds %g' % (
                self.name, err, self.tol))
        return err

    def as_dict(self):
        return {'name': self.name, 'space': self.space.descriptor,
                'params': self.params, 'is_isometry': self.is_isometry,
                'weak_mixing': self.weak_mixing}


def _check_alpha(alpha):
    alpha = float(alpha)
    if not 0 < alpha < 1:
        raise GalleryError('rotation number must lie in (0,1), not %r' % alpha)
    return alpha


def rotation(alpha):
    alpha = _check_alpha(alpha)
    space = Circle()
    return SystemSpec(space, lambda X: _wrap(X + alpha),
                      lambda X: _wrap(X - alpha), 'rotation',
                      {'alpha': alpha}, is_isometry=True)


def circle_homeo(alpha, beta=0.0):
    """``x -> x + alpha + beta sin(2 pi x) / (2 pi)``, invertible for
    ``|beta| < 1``.
    """
    alpha = _check_alpha(alpha)
    beta = float(beta)
    if not abs(beta) < 1:
        raise GalleryError('circle-homeo needs |beta| < 1, not %r' % beta)
    two_pi = 2 * math.pi

    def lift(y):
        return y + beta * np.sin(two_pi * y) / two_pi

    def forward(X):
        return _wrap(lift(X) + alpha)

    def inverse(X):
        target = X - alpha
        if beta == 0:
            return _wrap(target)
        y = optimize.newton(lambda y: lift(y) - target, target.copy(),
                            fprime=lambda y: 1 + beta * np.cos(two_pi * y),
                            tol=1e-15, maxiter=100)
        return _wrap(np.asarray(y, float).reshape(X.shape))

    return SystemSpec(Circle(), forward, inverse, 'circle-homeo',
                      {'alpha': alpha, 'beta': beta}, is_isometry=beta == 0)


def toral_auto(matrix=((2, 1), (1, 1)), hyperbolic=False):
    M = np.asarray(matrix, dtype=float)
    if M.shape != (2, 2) or not np.all(M == np.round(M)):
        raise GalleryError('toral-auto needs a 2x2 integer matrix')
    M = M.astype(np.int64)
    det = int(round(np.linalg.det(M)))
    if det not in (1, -1):
        raise GalleryError('toral-auto matrix is not invertible over the '
                           'integers (det %d)' % det)
    moduli = np.abs(np.linalg.eigvals(M))
    is_hyperbolic = bool(np.all(np.abs(moduli - 1) > 1e-12))
    if hyperbolic and not is_hyperbolic:
        raise GalleryError('matrix %s is not hyperbolic' % M.tolist())
    Minv = det * np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]])
    Mt, Minvt = M.T.astype(float), Minv.T.astype(float)
    return SystemSpec(Torus2(), lambda X: _wrap(X @ Mt),
                      lambda X: _wrap(X @ Minvt), 'toral-auto',
                      {'matrix': M.tolist(), 'hyperbolic': is_hyperbolic},
                      weak_mixing=is_hyperbolic)


def interval_homeo(power=None, coefficients=None, knots=None):
    """An orientation preserving homeomorphism of [0,1] fixing both
    endpoints: ``x**power`` (the default ``x**2``), a polynomial given by
    ``coefficients`` (lowest degree first) or a piecewise linear map
    through ``knots``.
    """
    grid = np.linspace(0.0, 1.0, 4097)
    if knots is not None:
        knots = np.asarray(knots, float)
        xs, ys = knots[:, 0], knots[:, 1]
        if not (np.all(np.diff(xs) > 0) and np.all(np.diff(ys) > 0)):
            raise GalleryError('interval-homeo knots are not strictly '
                               'monotone')
        if xs[0] != 0 or ys[0] != 0 or xs[-1] != 1 or ys[-1] != 1:
            raise GalleryError('interval-homeo must fix both endpoints')
        forward = lambda X: np.interp(X, xs, ys)
        inverse = lambda X: np.interp(X, ys, xs)
        params = {'knots': knots.tolist()}
    elif coefficients is not None:
        poly = np.polynomial.Polynomial(np.asarray(coefficients, float))
        dpoly = poly.deriv()
        values = poly(grid)
        if abs(values[0]) > 1e-12 or abs(values[-1] - 1) > 1e-12:
            raise GalleryError('interval-homeo must fix both endpoints')
        if not np.all(np.diff(values) > 0):
            raise GalleryError('interval-homeo polynomial is not strictly '
                               'monotone on [0,1]')
        forward = lambda X: np.clip(poly(X), 0.0, 1.0)

        def inverse(X):
            guess = np.interp(X, values, grid)
            slope = dpoly(guess)
            # Newton only where the derivative is safely away from zero.
            ok = slope > 1e-6
            if np.any(ok):
                refined = optimize.newton(lambda y: poly(y) - X[ok], guess[ok],
                                          fprime=dpoly, tol=1e-15, maxiter=50)
                guess[ok] = refined
            return np.clip(guess, 0.0, 1.0)
        params = {'coefficients': list(map(float, coefficients))}
    else:
        power = 2.0 if power is None else float(power)
        if not power > 0:
            raise GalleryError('interval-homeo power must be positive')
        forward = lambda X: np.power(X, power)
        inverse = lambda X: np.power(X, 1.0 / power)
        params = {'power': power}
    return SystemSpec(Interval(), forward, inverse, 'interval-homeo', params)


def disk_twist():
    """``Tz = z exp(2 pi i |z|)`` on the closed unit disk."""
    def twist(X, sign):
        z = X[:, 0] + 1j * X[:, 1]
        w = z * np.exp(sign * 2j * math.pi * np.abs(z))
        return np.column_stack([w.real, w.imag])
    return SystemSpec(Disk(), lambda X: twist(X, 1), lambda X: twist(X, -1),
                      'disk-twist', {})


def shift(alphabet=(0, 1), window=9, weak_mixing=False, subshift=None):
    """The left shift ``(T w)(k) = w(k+1)`` on windows, extended
    cyclically at the window edge.
    """
    space = SequenceSpace(alphabet, window)
    params = {'alphabet': list(space.alphabet), 'window': space.window}
    if subshift is not None:
        params['subshift'] = subshift
    return SystemSpec(space, lambda X: np.roll(X, -1, axis=-1),
                      lambda X: np.roll(X, 1, axis=-1), 'shift', params,
                      weak_mixing=bool(weak_mixing))


class ArctanProfile(object):
    """``t_n = arctan(n) / pi + 1/2``: strictly increasing with limits 0
    and 1.
    """

    def t(self, n):
        return np.arctan(np.asarray(n, float)) / math.pi + 0.5

    def index(self, t):
        return np.rint(np.tan(math.pi * (np.asarray(t, float) - 0.5))).astype(np.int64)


def takens_suspension(states, base_sys, start=None, base_points=None,
                      profile=None, tolerance=EVAL_TOL, tail=None):
    """Suspend an asymptotic pseudo-orbit ``{x_n}`` over ``base_sys``.

    The result lives on ``X x S`` with ``X`` embedded at ``t = 0`` and
    ``T(x_n, t_n) = (x_{n+1}, t_{n+1})``. Outside of the supplied index
    range the pseudo-orbit continues as the true orbit of its end
    points, which keeps the map a bijection on the whole state set.

    ``states`` are the points ``x_start, ..., x_{start+len-1}``; the jumps
    ``d(T x_n, x_{n+1})`` over the outer ``tail`` indices on both sides
    (a quarter of the range by default) must not exceed ``tolerance``.
    """
    base_space = base_sys.space
    states = base_space.as_points(states) if len(states) else \
        np.empty((0, base_space.dim))
    if not len(states):
        return base_sys
    profile = profile or ArctanProfile()
    n = len(states)
    start = -(n // 2) if start is None else int(start)
    stop = start + n - 1

    jumps = base_space.paired(base_sys.forward(states[:-1]), states[1:])
    tail = max(1, n // 4) if tail is None else tail
    outer = np.r_[jumps[:tail], jumps[-tail:]] if len(jumps) else jumps
    if len(outer) and outer.max() > tolerance:
        raise SuspensionError('pseudo-orbit jumps %g > %g near the ends of '
                              'the index range' % (outer.max(), tolerance))
    ts = profile.t(np.arange(start - 1, stop + 2))
    if not (np.all(np.diff(ts) > 0) and ts[0] > 0 and ts[-1] < 1):
        raise SuspensionError('t-sequence must be strictly increasing in (0,1)')
    if not np.array_equal(profile.index(ts), np.arange(start - 1, stop + 2)):
        raise SuspensionError('t-sequence profile does not invert on the range')

    space = SuspensionSpace(base_space)

    def move(Y, step):
        Y = np.array(Y, dtype=float)
        x, t = Y[:, :-1], Y[:, -1]
        out = np.empty_like(Y)
        on_base = np.abs(t) < 1e-15
        fn = base_sys.forward if step > 0 else base_sys.inverse
        idx = profile.index(t)
        inside = ~on_base & (idx + step >= start) & (idx + step <= stop) & \
            (idx >= start) & (idx <= stop)
        outside = ~on_base & ~inside
        if np.any(on_base):
            out[on_base, :-1] = fn(x[on_base])
            out[on_base, -1] = 0.0
        if np.any(inside):
            out[inside, :-1] = states[idx[inside] + step - start]
            out[inside, -1] = profile.t(idx[inside] + step)
        if np.any(outside):
            out[outside, :-1] = fn(x[outside])
            out[outside, -1] = profile.t(idx[outside] + step)
        return out

    params = dict(base_sys.params)
    params.update({'base': base_sys.name, 'start': start, 'stop': stop,
                   'states': states.tolist()})
    if base_points is not None:
        params['base_points'] = base_space.as_points(base_points).tolist()
    return SystemSpec(space, lambda Y: move(Y, 1), lambda Y: move(Y, -1),
                      'takens', params)


def suspension_cloud(sys, r=None):
    """Base points at ``t = 0`` plus every state ``(x_n, t_n)`` of the
    supplied range.

    ``r`` defaults to twice the larger of the two outermost state gaps:
    balls near both ends of the arc hold their neighbouring states while
    the widely spaced middle states stay alone in theirs.
    """
    profile = ArctanProfile()
    base = np.asarray(sys.params.get('base_points', []), float)
    states = np.asarray(sys.params['states'], float)
    ns = np.arange(sys.params['start'], sys.params['stop'] + 1)
    rows = [np.column_stack([base, np.zeros(len(base))])] if len(base) else []
    rows.append(np.column_stack([states, profile.t(ns)]))
    cloud = SampleCloud.build(sys.space, np.vstack(rows),
                              provenance={'kind': 'suspension',
                                          'start': int(ns[0]),
                                          'stop': int(ns[-1])})
    if r is None:
        ts = profile.t(ns)
        if len(ts) > 1:
            r = 2 * float(max(ts[1] - ts[0], ts[-1] - ts[-2]))
        else:
            r = float(cloud.nn_distances.min()) / 2
    return cloud.with_radius(r)


def takens_two_points(depth=20, base_grid=0):
    """Two fixed points ``a = 0``, ``b = 1`` of ``x -> x^2`` joined by a
    pseudo-orbit that limps from ``a`` (for ``n < 0``) to ``b``.

    With ``base_grid >= 2`` the interior of ``[0, 1]`` is sampled too, on
    the grid of that many points; the base map then carries chains from
    ``b`` back down to ``a``.
    """
    depth, base_grid = int(depth), int(base_grid)
    if depth < 1:
        raise GalleryError('takens depth must be positive')
    if base_grid == 1 or base_grid < 0:
        raise GalleryError('takens base grid needs at least two points')
    base = [[0.0], [1.0]]
    if base_grid:
        base.extend([x] for x in np.linspace(0.0, 1.0, base_grid)[1:-1])
    ns = np.arange(-depth, depth + 1)
    states = np.where(ns < 0, 0.0, 1.0).reshape(-1, 1)
    sys = takens_suspension(states, interval_homeo(2), start=-depth,
                            base_points=base)
    return replace(sys, name='takens-two-points',
                   params=dict(sys.params, depth=depth, base_grid=base_grid))


# Gallery: id -> (builder, parameter schema, fact it reproduces).
GALLERY = {
    'rotation': (lambda p: rotation(p.get('alpha', math.sqrt(2) - 1)),
                 'alpha in (0,1)',
                 'equicontinuous isometry: NS, AE, LE, HNS'),
    'circle-homeo': (lambda p: circle_homeo(p.get('alpha', math.sqrt(2) - 1),
                                            p.get('beta', 0.5)),
                     'alpha in (0,1), |beta| < 1',
                     'Prop interval: circle homeomorphisms are HNS'),
    'toral-auto': (lambda p: toral_auto(p.get('matrix', ((2, 1), (1, 1))),
                                        p.get('hyperbolic', False)),
                   '2x2 integer matrix with det +-1',
                   'Example ex-simple.1: hyperbolic automorphisms are '
                   'weakly mixing, sensitive, not RN'),
    'interval-homeo': (lambda p: interval_homeo(p.get('power'),
                                                p.get('coefficients'),
                                                p.get('knots')),
                       'power > 0 | coefficients | knots (monotone)',
                       'Prop interval: (f,I) is HNS'),
    'disk-twist': (lambda p: disk_twist(), 'none',
                   'Example exp: an LE system which is not AE'),
    'shift': (lambda p: shift(p.get('alphabet', (0, 1)), p.get('window', 9),
                              p.get('weak_mixing', False), p.get('subshift')),
              'alphabet, window length',
              'Cor shift: a subshift is RN iff countable'),
    'morse': (lambda p: shift((0, 1), p.get('window', 9), False, 'morse'),
              'window length',
              'Example ex-simple.4: the Morse subshift is not RN'),
    'takens-two-points': (lambda p: takens_two_points(p.get('depth', 20),
                                                      p.get('base_grid', 0)),
                          'depth >= 1, base_grid 0 or >= 2',
                          'Lemma trans: a transitive AE cascade'),
}


def make_gallery_system(name, params=None):
    """Build a gallery system by id."""
    try:
        builder = GALLERY[name][0]
    except KeyError:
        raise GalleryError('unknown gallery id: %s' % name)
    return builder(dict(params or {}))


def sample_space(space, density):
    """Deterministic quasi-uniform grid of ``space`` whose covering
    radius is the cloud's ``r``.
    """
    density = int(density)
    if space.kind == 'sequence':
        if density != space.window:
            raise SpaceError('sequence grids enumerate whole windows; '
                             'density must equal the window length %d'
                             % space.window)
        if len(space.alphabet) ** density > 2 ** 16:
            raise SpaceError('too many windows to enumerate')
        points = np.array(list(product(space.alphabet, repeat=density)))
        # Each window stands for its cylinder; r is the nearest
        # neighbour distance so that every ball holds a neighbour.
        return SampleCloud.build(space, points, r=2.0 ** -space.reach,
                                 provenance={'kind': 'grid',
                                             'density': density})
    if density < 2:
        raise SpaceError('density %d too small to cover the %s' % (
            density, space.kind))
    if space.kind == 'circle':
        points = np.arange(density) / density
        r = 1.0 / (2 * density)
    elif space.kind == 'interval':
        points = np.linspace(0.0, 1.0, density)
        r = 1.0 / (2 * (density - 1))
    elif space.kind == 'torus2':
        axis = np.arange(density) / density
        points = np.array(list(product(axis, axis)))
        r = 1.0 / (2 * density)
    elif space.kind == 'disk':
        h = 1.0 / (density - 1)
        rows = []
        for i in range(density):
            rho = i * h
            m = max(1, int(math.ceil(2 * math.pi * rho / h)))
            angles = 2 * math.pi * np.arange(m) / m
            rows.append(np.column_stack([rho * np.cos(angles),
                                         rho * np.sin(angles)]))
        points = np.vstack(rows)
        # Radial offset <= h/2 and angular chord <= h/2 give this bound.
        r = h * math.sqrt(2.5) / 2
    else:
        raise SpaceError('no grid for %s' % space.kind)
    return SampleCloud.build(space, points, r=r,
                             provenance={'kind': 'grid', 'density': density})


def orbit_segment(sys, x, horizon):
    """``[(n, T^n x)]`` for ``n`` in ``-N..N``."""
    x = sys.space.as_points(x)
    if len(x) != 1:
        raise SpaceError('orbit_segment takes a single point')
    if not sys.space.contains(x)[0]:
        raise SpaceError('point %s is not in %s' % (
            x[0].tolist(), sys.space.descriptor))
    tables = sys.orbit_tables(x, horizon)
    return [(int(n), tables[i, 0]) for i, n in enumerate(horizon.elements)]


def orbit_order(N):
    """``0, 1, -1, 2, -2, ...`` as row indices of an orbit table."""
    order = [N]
    for k in range(1, N + 1):
        order.extend((N + k, N - k))
    return np.array(order, np.intp)


def orbit_closure_sample(sys, x, horizon, merge_tol=0.0):
    """The orbit segment of ``x`` with points closer than ``merge_tol``
    merged, visiting ``T^0 x, T^1 x, T^-1 x, ...`` so ``x`` survives and
    the result is monotone in the horizon.
    """
    if merge_tol < 0:
        raise SpaceError('merge tolerance must be nonnegative')
    segment = orbit_segment(sys, x, horizon)
    points = np.array([p for _, p in segment])[orbit_order(horizon.N)]
    cloud = SampleCloud.build(
        sys.space, points, r=sys.space.diameter,
        provenance={'kind': 'orbit-closure',
                    'x': sys.space.as_points(x)[0].tolist(),
                    'N': horizon.N, 'merge_tol': merge_tol},
        merge_tol=merge_tol)
    if merge_tol > 0:
        r = merge_tol
    elif len(cloud) > 1:
        r = float(cloud.nn_distances.min()) / 2
    else:
        r = sys.space.diameter
    return cloud.with_radius(r)
