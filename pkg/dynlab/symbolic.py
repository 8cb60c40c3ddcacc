"""Subshifts: languages, complexity, expansivity and the exact
countability (hence RN) classification of subshifts.

Symbols are the digits ``0``-``9`` and words are plain strings, so
``'0110'`` is a word over the alphabet ``'01'``. Points of a subshift are
finite windows stored as integer rows of a ``SequenceSpace``, position
``k`` at column ``k + window // 2``. The shift acts by
``(T w)(k) = w(k + 1)``.
"""

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .spaces import SampleCloud, SequenceSpace
from .utils import DynlabError, PropertyResult


__all__ = ('SubshiftError', 'ClassificationRefused', 'Subshift',
           'ClassificationResult', 'FollowerGraph', 'TwoArrows',
           'full_shift', 'sft', 'substitution', 'sturmian', 'explicit',
           'eventually_periodic', 'morse_generator', 'morse_substitution',
           'subshift_from_document', 'follower_graph', 'language',
           'complexity_profile', 'expansivity_constant',
           'classify_countability', 'recurrent_periodicity_check',
           'sturmian_code', 'sturmian_two_arrows', 'subshift_cloud',
           'orbit_closure_cloud', 'continued_fraction', 'convergents',
           'cf_value',)


KINDS = ('full', 'sft', 'substitution', 'sturmian', 'explicit')
BEHAVIORS = (None, 'eventually-periodic', 'uniformly-recurrent')
# Vertices the follower graph may have before we refuse to build it.
MAX_VERTICES = 1 << 16


class SubshiftError(DynlabError):
    pass


class ClassificationRefused(SubshiftError):
    """An operation that presupposes an RN subshift got another one."""


def continued_fraction(x, terms=16):
    """Partial quotients ``[a0; a1, a2, ...]`` of ``x``."""
    quotients = []
    for _ in range(terms):
        a = math.floor(x)
        quotients.append(int(a))
        frac = x - a
        if frac < 1e-12:
            break
        x = 1.0 / frac
    return quotients


def convergents(quotients):
    """The convergents ``p/q`` of a list of partial quotients."""
    result = []
    p0, q0, p1, q1 = 1, 0, quotients[0], 1
    result.append(Fraction(p1, q1))
    for a in quotients[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        result.append(Fraction(p1, q1))
    return result


def cf_value(period, prefix=(0,), repeats=40):
    """Value of the infinite continued fraction ``[prefix; period,
    period, ...]``, a quadratic irrational.
    """
    period = [int(a) for a in period]
    if not period or min(period) < 1:
        raise SubshiftError('periodic partial quotients must be positive')
    return float(convergents(list(prefix) + period * repeats)[-1])


def _is_rational(alpha):
    approx = Fraction(alpha).limit_denominator(10 ** 4)
    return abs(float(approx) - alpha) < 1e-12


@dataclass(frozen=True, eq=False)
class Subshift:
    """A subshift given by one of its generating descriptions.

    ``explicit`` subshifts are the orbit closure of ``generator`` (a
    vectorised function from integer positions to symbols). Their
    ``behavior`` declares what happens beyond ``horizon``: either both
    tails are periodic with period ``period``, or the sequence is
    uniformly recurrent and a long window shows the whole language.
    """

    kind: str
    alphabet: str = '01'
    forbidden: tuple = ()
    rules: dict = None
    alpha: float = None
    intercept: float = 0.0
    generator: object = None
    behavior: str = None
    period: int = None
    horizon: int = 64
    name: str = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SubshiftError('unknown subshift kind: %s' % self.kind)
        alphabet = ''.join(sorted(set(str(self.alphabet))))
        if not alphabet or not alphabet.isdigit():
            raise SubshiftError('alphabet must consist of digits, not %r'
                                % (self.alphabet,))
        object.__setattr__(self, 'alphabet', alphabet)
        if self.kind == 'sft':
            for word in self.forbidden:
                if not word or set(word) - set(alphabet):
                    raise SubshiftError('forbidden word %r is not over the '
                                        'alphabet' % (word,))
        elif self.kind == 'substitution':
            rules = self.rules or {}
            if set(rules) != set(alphabet):
                raise SubshiftError('substitution rules must cover the '
                                    'alphabet exactly')
            for a, image in rules.items():
                if not image or set(image) - set(alphabet):
                    raise SubshiftError('bad image %r for %r' % (image, a))
        elif self.kind == 'sturmian':
            if self.alpha is None or not 0 < self.alpha < 1:
                raise SubshiftError('sturmian needs alpha in (0,1)')
            if _is_rational(self.alpha):
                raise SubshiftError('alpha = %r is rational' % self.alpha)
        elif self.kind == 'explicit':
            if not callable(self.generator):
                raise SubshiftError('explicit subshift needs a generator')
            if self.behavior not in BEHAVIORS:
                raise SubshiftError('unknown eventual behavior %r'
                                    % (self.behavior,))
            if self.behavior == 'eventually-periodic' and \
                    not (self.period and self.period >= 1):
                raise SubshiftError('eventually periodic generator needs a '
                                    'period')

    @property
    def label(self):
        return self.name or self.kind

    def sequence(self, positions):
        """Symbols of the generating point at ``positions``."""
        positions = np.asarray(positions, np.int64)
        if self.kind == 'explicit':
            return np.asarray(self.generator(positions), np.int64)
        if self.kind == 'sturmian':
            return sturmian_code(self.alpha, self.intercept, positions)
        raise SubshiftError('%s subshifts have no generating point'
                            % self.kind)

    def word(self, start, stop):
        """The generating point between ``start`` and ``stop`` inclusive."""
        return ''.join(map(str, self.sequence(np.arange(start, stop + 1))))

    def as_dict(self):
        doc = {'kind': self.kind, 'alphabet': self.alphabet,
               'name': self.label}
        if self.kind == 'sft':
            doc['forbidden'] = list(self.forbidden)
        elif self.kind == 'substitution':
            doc['rules'] = dict(self.rules)
        elif self.kind == 'sturmian':
            doc.update(alpha=self.alpha, intercept=self.intercept)
        elif self.kind == 'explicit':
            doc.update(behavior=self.behavior, period=self.period,
                       horizon=self.horizon)
        return doc


def full_shift(alphabet='01'):
    return Subshift('full', alphabet, name='full-shift')


def sft(forbidden, alphabet='01', name=None):
    return Subshift('sft', alphabet, forbidden=tuple(forbidden),
                    name=name or 'sft')


def substitution(rules, name=None):
    return Subshift('substitution', ''.join(rules), rules=dict(rules),
                    name=name or 'substitution')


def sturmian(alpha=None, cf=None, intercept=0.0):
    """Sturmian coding of the rotation by ``alpha``; ``cf`` gives alpha
    as the periodic part of its continued fraction ``[0; cf, cf, ...]``.
    """
    if cf is not None:
        alpha = cf_value(cf)
    if alpha is None:
        raise SubshiftError('sturmian needs alpha or its continued fraction')
    return Subshift('sturmian', '01', alpha=float(alpha),
                    intercept=float(intercept) % 1.0, name='sturmian')


def explicit(generator, alphabet='01', behavior=None, period=None,
             horizon=64, name=None):
    return Subshift('explicit', alphabet, generator=generator,
                    behavior=behavior, period=period, horizon=horizon,
                    name=name or 'explicit')


def eventually_periodic(left, center, right):
    """``...left left | center right right ...`` with ``center``
    starting at position 0.
    """
    if not left or not right:
        raise SubshiftError('periodic tails must be nonempty words')
    lsym, csym, rsym = (np.array([int(c) for c in w], np.int64)
                        for w in (left, center, right))

    def generator(positions):
        out = np.empty(len(positions), np.int64)
        neg = positions < 0
        out[neg] = lsym[positions[neg] % len(lsym)]
        mid = (positions >= 0) & (positions < len(csym))
        out[mid] = csym[positions[mid]]
        pos = positions >= len(csym)
        out[pos] = rsym[(positions[pos] - len(csym)) % len(rsym)]
        return out

    period = len(left) * len(right) // math.gcd(len(left), len(right))
    return explicit(generator, left + center + right,
                    behavior='eventually-periodic', period=period,
                    horizon=len(center),
                    name='%s|%s|%s' % (left, center, right))


def _popcount_parity(values):
    values = values.astype(np.uint64)
    parity = np.zeros(len(values), np.int64)
    while np.any(values):
        parity ^= (values & np.uint64(1)).astype(np.int64)
        values = values >> np.uint64(1)
    return parity


def morse_generator():
    """The two-sided Morse sequence: ``w(n)`` is the parity of the
    binary digit sum of ``n`` and ``w(-n-1) = w(n)``.
    """
    def generator(positions):
        positions = np.asarray(positions, np.int64)
        return _popcount_parity(np.where(positions < 0, -positions - 1,
                                         positions))
    return explicit(generator, '01', behavior='uniformly-recurrent',
                    horizon=256, name='morse')


def morse_substitution():
    return substitution({'0': '01', '1': '10'}, name='morse-substitution')


def subshift_from_document(doc):
    """Build a subshift from ``{kind, alphabet, forbidden, rules, alpha,
    cf, intercept, left, center, right}``.
    """
    kind = doc.get('kind')
    alphabet = str(doc.get('alphabet', '01'))
    if kind in ('full', 'full-shift'):
        return full_shift(alphabet)
    if kind == 'sft':
        return sft(doc.get('forbidden', ()), alphabet, doc.get('name'))
    if kind == 'substitution':
        return substitution(doc.get('rules') or {}, doc.get('name'))
    if kind == 'sturmian':
        return sturmian(doc.get('alpha'), doc.get('cf'),
                        doc.get('intercept', 0.0))
    if kind == 'morse':
        return morse_generator()
    if kind == 'explicit':
        try:
            return eventually_periodic(doc['left'], doc.get('center', ''),
                                       doc['right'])
        except KeyError as e:
            raise SubshiftError('explicit subshift document misses %s' % e)
    raise SubshiftError('unknown subshift kind: %s' % kind)


def _factors(word, n):
    return {word[i:i + n] for i in range(len(word) - n + 1)}


@dataclass
class FollowerGraph:
    """Vertices are the words of length ``order`` which continue to
    bi-infinite admissible sequences; edges are admissible one-symbol
    extensions.
    """

    vertices: list
    edges: np.ndarray
    order: int
    successors: dict = field(default_factory=dict)

    def matrix(self):
        n = len(self.vertices)
        return csr_matrix((np.ones(len(self.edges)),
                           (self.edges[:, 0], self.edges[:, 1])), shape=(n, n))

    def components(self):
        """Strongly connected components as lists of vertex indices,
        paired with the number of internal edges.
        """
        if not self.vertices:
            return []
        count, labels = connected_components(self.matrix(), directed=True,
                                             connection='strong')
        result = []
        for c in range(count):
            members = np.flatnonzero(labels == c)
            internal = int(np.sum((labels[self.edges[:, 0]] == c) &
                                  (labels[self.edges[:, 1]] == c)))
            result.append((members.tolist(), internal))
        return result

    def cycle_through(self, start, first):
        """Shortest cycle ``start -> first -> ... -> start``."""
        queue = deque([first])
        parent = {first: None}
        while queue:
            u = queue.popleft()
            if u == start:
                break
            for v in self.successors.get(u, ()):
                if v not in parent:
                    parent[v] = u
                    queue.append(v)
        if start not in parent:
            return None
        path = [start]
        while path[-1] != first:
            path.append(parent[path[-1]])
        return [start] + path[::-1][:-1]


def follower_graph(sub):
    if sub.kind != 'sft':
        raise SubshiftError('follower graphs are built for SFTs')
    m = max([len(w) for w in sub.forbidden] or [1])
    order = max(m - 1, 1)
    if len(sub.alphabet) ** order > MAX_VERTICES:
        raise SubshiftError('follower graph too large')

    def admissible(word):
        return not any(f in word for f in sub.forbidden)

    words = [''.join(p) for p in product(sub.alphabet, repeat=order)]
    words = [w for w in words if admissible(w)]
    index = {w: i for i, w in enumerate(words)}
    edges = [(index[u], index[(u + a)[1:]])
             for u in words for a in sub.alphabet
             if admissible(u + a) and (u + a)[1:] in index]
    edges = np.array(edges, np.intp).reshape(-1, 2)

    # Drop vertices without both a predecessor and a successor until
    # every vertex lies on a bi-infinite walk.
    alive = np.ones(len(words), bool)
    while True:
        live = alive[edges[:, 0]] & alive[edges[:, 1]]
        has_out = np.zeros(len(words), bool)
        has_in = np.zeros(len(words), bool)
        has_out[edges[live, 0]] = True
        has_in[edges[live, 1]] = True
        keep = alive & has_out & has_in
        if np.array_equal(keep, alive):
            break
        alive = keep
    renumber = np.cumsum(alive) - 1
    live = alive[edges[:, 0]] & alive[edges[:, 1]]
    edges = renumber[edges[live]].reshape(-1, 2)
    vertices = [w for w, a in zip(words, alive) if a]
    successors = {}
    for u, v in edges.tolist():
        successors.setdefault(u, []).append(v)
    return FollowerGraph(vertices, edges, order, successors)


def language(sub, n):
    """The set of admissible words of length ``n``."""
    if n < 1:
        raise SubshiftError('word length must be positive')
    if sub.kind == 'full':
        return {''.join(p) for p in product(sub.alphabet, repeat=n)}
    if sub.kind == 'sft':
        graph = follower_graph(sub)
        k = graph.order
        if n <= k:
            return set().union(*[_factors(v, n) for v in graph.vertices]) \
                if graph.vertices else set()
        words = {v: [graph.vertices[v]] for v in range(len(graph.vertices))}
        for _ in range(n - k):
            grown = {}
            for u, prefixes in words.items():
                for v in graph.successors.get(u, ()):
                    tail = graph.vertices[v][-1]
                    grown.setdefault(v, []).extend(p + tail for p in prefixes)
            words = grown
        return {w for ws in words.values() for w in ws}
    if sub.kind == 'substitution':
        return _factors(_expand(sub, 256 * n + 1024), n)
    if sub.kind == 'sturmian':
        return _sturmian_language(sub.alpha, n)
    if sub.behavior == 'eventually-periodic':
        reach = sub.horizon + sub.period + n
        return _factors(sub.word(-reach, reach), n)
    if sub.behavior == 'uniformly-recurrent':
        reach = max(sub.horizon, 64 * n)
        return _factors(sub.word(-reach, reach), n)
    raise SubshiftError('%s: eventual behavior beyond depth %d is undeclared; '
                        'refusing to guess its language' % (sub.label,
                                                            sub.horizon))


def complexity_profile(sub, n_max):
    """``[p(1), ..., p(n_max)]`` with ``p(n) = |language(n)|``."""
    if n_max < 1:
        raise SubshiftError('n_max must be positive')
    return [len(language(sub, n)) for n in range(1, n_max + 1)]


def _expand(sub, length):
    word = sub.alphabet[0]
    for _ in range(64):
        if len(word) >= length:
            break
        word = ''.join(sub.rules[a] for a in word)
    return word


def _is_primitive(sub):
    letters = sub.alphabet
    M = np.array([[sub.rules[a].count(b) for b in letters] for a in letters],
                 dtype=np.int64)
    P = np.eye(len(letters), dtype=np.int64)
    for _ in range((len(letters) - 1) ** 2 + 1):
        P = np.minimum(P @ M, 1)
        if np.all(P > 0):
            return True
    return False


def _arc_breakpoints(alpha, positions):
    points = np.concatenate([np.mod(-positions * alpha, 1.0),
                             np.mod((1 - positions) * alpha, 1.0)])
    return np.unique(np.where(points >= 1.0, 0.0, points))


def _sturmian_language(alpha, n):
    # Codes of length n change only when beta crosses -j*alpha for
    # j = -1..n-1, so one midpoint per arc gives every word once.
    cuts = _arc_breakpoints(alpha, np.arange(n))
    mids = (cuts + np.r_[cuts[1:], cuts[0] + 1.0]) / 2 % 1.0
    positions = np.arange(n)
    return {''.join(map(str, sturmian_code(alpha, b, positions)))
            for b in mids}


def sturmian_code(alpha, beta, positions, side='+', orbit_index=None):
    """``w(k) = 1`` iff ``beta + k alpha`` lies in ``[0, alpha)`` (side
    ``+``) or ``(0, alpha]`` (side ``-``). For ``beta = m alpha`` pass
    ``orbit_index=m`` so the two boundary hits are decided exactly.
    """
    positions = np.asarray(positions, np.int64)
    v = np.mod(beta + positions * alpha, 1.0)
    v[v >= 1.0] = 0.0
    if side == '+':
        symbols = v < alpha
    elif side == '-':
        symbols = (v > 0) & (v <= alpha)
    else:
        raise SubshiftError('side must be + or -')
    if orbit_index is not None:
        j = orbit_index + positions
        symbols[j == 0] = side == '+'
        symbols[j == 1] = side == '-'
    return symbols.astype(np.int64)


@dataclass
class ClassificationResult:
    countability: str
    evidence: dict = field(default_factory=dict)
    witness: object = None

    @property
    def rn_verdict(self):
        return {'Countable': 'RN', 'Uncountable': 'not-RN'}.get(
            self.countability, 'Unknown')

    def as_dict(self):
        return {'countability': self.countability,
                'rn_verdict': self.rn_verdict, 'evidence': self.evidence,
                'witness': self.witness}


def expansivity_constant(sub):
    """1/2 under ``d(x,y) = 2^-min|k|``, or None for a one-point subshift
    which has no distinct pairs.
    """
    symbols = language(sub, 1)
    if not symbols:
        raise SubshiftError('empty subshift')
    if len(symbols) == 1:
        return None
    return 0.5


def classify_countability(sub, depth=64):
    """Decide whether ``sub`` is countable; Unknown when ``depth`` does
    not settle it.
    """
    if depth < 1:
        raise SubshiftError('depth must be positive')
    if sub.kind == 'full':
        if len(sub.alphabet) == 1:
            return ClassificationResult('Countable', {'rule': 'one point'})
        return ClassificationResult('Uncountable', {'rule': 'full shift'},
                                    witness=sub.alphabet)
    if sub.kind == 'sft':
        return _classify_sft(sub)
    if sub.kind == 'sturmian':
        return ClassificationResult(
            'Uncountable', {'rule': 'sturmian family', 'alpha': sub.alpha})
    if sub.kind == 'substitution':
        return _classify_substitution(sub, depth)
    return _classify_explicit(sub, depth)


def _classify_sft(sub):
    graph = follower_graph(sub)
    words = graph.vertices
    cycles = []
    for members, internal in graph.components():
        if internal > len(members):
            # Some vertex has two internal successors; each closes a
            # different cycle through it.
            for u in members:
                out = [v for v in graph.successors.get(u, ())
                       if v in members]
                if len(out) >= 2:
                    a = graph.cycle_through(u, out[0])
                    b = graph.cycle_through(u, out[1])
                    return ClassificationResult(
                        'Uncountable',
                        {'rule': 'two cycles share a vertex',
                         'order': graph.order},
                        witness={'vertex': words[u],
                                 'cycles': [[words[i] for i in a],
                                            [words[i] for i in b]]})
        if internal:
            start = members[0]
            cycle = graph.cycle_through(start, next(
                v for v in graph.successors[start] if v in members))
            cycles.append([words[i] for i in cycle])
    return ClassificationResult(
        'Countable', {'rule': 'every component is a single cycle',
                      'order': graph.order, 'cycles': cycles,
                      'cycle_structure': sorted(len(c) for c in cycles)})


def _classify_substitution(sub, depth):
    primitive = _is_primitive(sub)
    word = _expand(sub, 256 * depth + 1024)
    span = min(depth, 32)
    profile = [len(_factors(word, n)) for n in range(1, span + 1)]
    aperiodic = all(p > n for n, p in enumerate(profile, 1))
    evidence = {'primitive': primitive, 'complexity': profile}
    if not primitive:
        evidence['rule'] = 'non-primitive substitution'
        return ClassificationResult('Unknown', evidence)
    if aperiodic:
        evidence['rule'] = 'primitive aperiodic substitution is minimal ' \
                           'and infinite'
        return ClassificationResult('Uncountable', evidence,
                                    witness=word[:min(depth, 64)])
    evidence['rule'] = 'primitive periodic substitution is a finite orbit'
    return ClassificationResult('Countable', evidence)


def _tail_period(tail, limit):
    for p in range(1, limit + 1):
        if len(tail) > p and tail[p:] == tail[:-p]:
            return p
    return None


def _classify_explicit(sub, depth):
    word = sub.word(-depth, depth)
    span = max(depth // 8, 1)
    profile = [len(_factors(word, n)) for n in range(1, span + 2)]
    evidence = {'depth': depth, 'complexity': profile}
    for n in range(1, span + 1):
        if profile[n] == profile[n - 1]:
            evidence.update(rule='complexity stalls (Morse-Hedlund)', n=n,
                            p=profile[n])
            return ClassificationResult('Countable', evidence)
    half = depth // 2
    right = _tail_period(word[depth + half:], depth // 4)
    left = _tail_period(word[:depth - half + 1], depth // 4)
    if right and left:
        evidence.update(rule='eventually periodic on both sides',
                        left_period=left, right_period=right,
                        checked_from=half)
        return ClassificationResult('Countable', evidence)
    center = word[depth - span:depth + span + 1]
    returns = [i - (depth - span) for i in range(len(word) - len(center) + 1)
               if i != depth - span and word.startswith(center, i)]
    if any(s > 0 for s in returns) and any(s < 0 for s in returns):
        evidence.update(rule='recurrent aperiodic point',
                        returns=returns[:8])
        return ClassificationResult('Uncountable', evidence, witness=center)
    evidence['rule'] = 'depth exhausted'
    return ClassificationResult('Unknown', evidence)


def recurrent_periodicity_check(sub, points, depth=64, classification=None):
    """Every recurrent sampled window of an RN subshift must be periodic.

    A window of radius ``R`` counts as recurrent when its central word
    of radius ``R // 4`` occurs again somewhere inside the window. The
    nearest return time ``s`` must then be shorter than the central
    word (so the word overlaps its own copy and has period ``s``) and
    at most ``depth``. Overlap-free points such as Morse only return
    after the whole word has passed and are flagged.
    """
    classification = classification or classify_countability(sub, depth)
    if classification.rn_verdict != 'RN':
        raise ClassificationRefused(
            '%s is %s, not RN' % (sub.label, classification.rn_verdict))
    points = np.atleast_2d(np.asarray(points, np.int64))
    R = points.shape[1] // 2
    L = max(R // 4, 1)
    checked, violations, periods = 0, [], {}
    for i, row in enumerate(points):
        word = ''.join(map(str, row))
        center = word[R - L:R + L + 1]
        returns = [abs(start - (R - L))
                   for start in range(len(word) - len(center) + 1)
                   if start != R - L and word.startswith(center, start)]
        if not returns:
            continue
        checked += 1
        period = min(returns)
        if period < len(center) and period <= depth:
            periods[period] = periods.get(period, 0) + 1
        else:
            violations.append(i)
    return PropertyResult(
        'recurrent-implies-periodic', 'fail' if violations else 'pass',
        recurrent=checked, periods=periods, violations=violations,
        contradiction=bool(violations))


def _windows(words):
    return np.array([[int(c) for c in w] for w in sorted(words)], np.int64)


def subshift_cloud(sub, window):
    """Every admissible word of length ``window`` as a point."""
    words = language(sub, window)
    if not words:
        raise SubshiftError('%s has no words of length %d' % (sub.label,
                                                               window))
    space = SequenceSpace([int(a) for a in sub.alphabet], window)
    return SampleCloud.build(space, _windows(words),
                             r=2.0 ** -space.reach,
                             provenance={'kind': 'subshift-words',
                                         'subshift': sub.label,
                                         'window': window})


def orbit_closure_cloud(sub, depth, radius=None):
    """Windows of radius ``radius`` (default ``2 depth``) around
    ``T^n`` of the generating point, ``|n| <= depth``.
    """
    radius = 2 * depth if radius is None else radius
    offsets = np.arange(-radius, radius + 1)
    shifts = np.arange(-depth, depth + 1)
    rows = sub.sequence((shifts[:, None] + offsets[None, :]).ravel())
    rows = rows.reshape(len(shifts), len(offsets))
    space = SequenceSpace([int(a) for a in sub.alphabet], len(offsets))
    return SampleCloud.build(space, rows, r=2.0 ** -space.reach,
                             provenance={'kind': 'orbit-closure',
                                         'subshift': sub.label,
                                         'N': depth, 'radius': radius})


@dataclass(frozen=True, eq=False)
class TwoArrows:
    """The Sturmian extension of the rotation by ``alpha``: orbit points
    ``beta = m alpha`` split into ``beta+`` (coded with ``[0, alpha)``)
    and ``beta-`` (coded with ``(0, alpha]``); everything else has one
    coding.
    """

    alpha: float
    depth: int
    subshift: Subshift

    def circle_point(self, m=0, c=0.0):
        beta = (m * self.alpha + c) % 1.0
        return 0.0 if beta >= 1.0 else beta

    def point(self, m=0, c=0.0, side='+', radius=None):
        """Window of radius ``radius`` coding ``beta = m alpha + c``;
        ``c = 0`` marks an exact orbit point.
        """
        radius = self.depth if radius is None else radius
        positions = np.arange(-radius, radius + 1)
        return sturmian_code(self.alpha, self.circle_point(m, c), positions,
                             side, orbit_index=m if c == 0 else None)

    def pair(self, m, radius=None):
        return self.point(m, 0.0, '+', radius), self.point(m, 0.0, '-', radius)

    def tagged_pairs(self, radius=None):
        return [(m,) + self.pair(m, radius)
                for m in range(-self.depth, self.depth + 1)]

    def factor(self, window):
        """The arc ``(lo, hi)`` of circle points whose coding agrees with
        ``window``; ``hi`` is taken mod 1.
        """
        window = np.asarray(window, np.int64)
        R = len(window) // 2
        positions = np.arange(-R, R + 1)
        cuts = _arc_breakpoints(self.alpha, positions)
        highs = np.r_[cuts[1:], cuts[0] + 1.0]
        for lo, hi in zip(cuts, highs):
            mid = (lo + hi) / 2 % 1.0
            if np.array_equal(sturmian_code(self.alpha, mid, positions),
                              window):
                return float(lo), float(hi % 1.0)
        raise SubshiftError('window is not a Sturmian coding of alpha')


def sturmian_two_arrows(alpha=None, depth=32, cf=None):
    sub = sturmian(alpha, cf)
    if depth < 1:
        raise SubshiftError('depth must be positive')
    return TwoArrows(sub.alpha, int(depth), sub)
