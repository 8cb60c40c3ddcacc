import io
import os
import csv
import json
import math
import time

import numpy as np
from joblib import Parallel, delayed

from .enveloping import (EnvelopeError, envelope_approx, ef_family,
                         fragmented_family_check, continuity_defect,
                         f_semigroup_check, verify_two_arrows)
from .pseudometrics import (BallStructure, ORACLE_LIMIT, dH_pseudometric,
                            expansivity_estimate, fragmentation_defect,
                            separability_profile)
from .recurrence import (chain_digraph, chain_recurrent_set,
                         birkhoff_center_iteration, prolongation,
                         lem1_check, mincenter_approx)
from .sensitivity import (eq_epsilon, ns_check, ae_check, le_check,
                          hns_check, sensitivity_constant,
                          local_fragmentation_check, wm_triviality_test)
from .spaces import GALLERY, Horizon, SpaceError
from .symbolic import (SubshiftError, classify_countability,
                       complexity_profile, expansivity_constant,
                       orbit_closure_cloud, recurrent_periodicity_check,
                       subshift_cloud)
from .utils import (DynlabError, InvariantViolation, atomic_write,
                    stable_hash, to_jsonable)


__all__ = ('CommandError', 'AnalyzeCommand', 'ClassifyCommand',
           'EnvelopeCommand', 'ChainCommand', 'GalleryCommand',)


# Points whose orbit closure is sampled by the LE check.
LE_SAMPLE = 64
# Longest word length of the complexity profile.
PROFILE_LENGTH = 12
HISTOGRAM_BINS = 10
GOLDEN = (math.sqrt(5) - 1) / 2


class CommandError(DynlabError):
    pass


def ensure_directories(cmd, path):
    """Ensure that the given directory exists.
    """
    # Collect the individual directories so each one can be reported.
    needs_creating = []
    while not path.exists():
        if path in needs_creating:
            break
        needs_creating.append(path)
        path = path.dir

    for path in reversed(needs_creating):
        cmd.w.action('mkdir', path)
        os.mkdir(path)


def dumps(document):
    return json.dumps(to_jsonable(document), indent=2, sort_keys=True) + '\n'


def verdict(name, value, scale, **detail):
    """A manifest verdict; the scale tuple travels with every value."""
    entry = {'name': name, 'value': value, 'scale': dict(scale)}
    entry.update(detail)
    return entry


class RunBundle(object):
    """One run under the registry root: ``<run-id>/manifest.json`` plus
    ``<run-id>/reports/*``. Existing runs are never touched; a run id
    that is already taken gets a numeric suffix.
    """

    def __init__(self, cmd, command, scales):
        self.cmd = cmd
        self.command = command
        self.scales = scales
        self.started = time.time()
        self.reports = []
        spec = cmd.env.spec
        key = {'command': command, 'spec': dict(spec) if spec else None,
               'scales': scales}
        base = '%s-%s' % (time.strftime('%Y%m%dT%H%M%S',
                                        time.gmtime(self.started)),
                          stable_hash(key))
        run_id, suffix = base, 1
        while cmd.env.path(run_id).exists():
            suffix += 1
            run_id = '%s-%d' % (base, suffix)
        self.run_id = run_id
        self.dir = cmd.env.path(run_id)
        ensure_directories(cmd, self.dir.join('reports'))

    def _write(self, name, content):
        filename = self.dir.join('reports', name)
        atomic_write(filename, content)
        self.reports.append('reports/%s' % name)
        self.cmd.w.action('written', filename)
        return filename

    def document(self, name, document):
        return self._write('%s.json' % name, dumps(document))

    def table(self, name, columns, rows):
        """Write an RFC-4180 CSV table and its schema sidecar.

        ``columns`` is a list of ``(name, description)``.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator='\r\n')
        writer.writerow([c for c, _ in columns])
        for row in rows:
            writer.writerow([to_jsonable(v) for v in row])
        self._write('%s.csv' % name, buf.getvalue())
        schema = {'table': '%s.csv' % name,
                  'columns': [{'name': c, 'description': d}
                              for c, d in columns]}
        self._write('%s.schema.json' % name, dumps(schema))

    def finish(self, verdicts, **extra):
        for entry in verdicts:
            if not isinstance(entry.get('scale'), dict) or \
                    not entry['scale']:
                raise InvariantViolation('verdict %s has no scale tuple'
                                         % entry.get('name'))
        from . import get_version
        env = self.cmd.env
        manifest = {
            'run_id': self.run_id,
            'command': self.command,
            'tool_version': get_version(),
            'system_spec': dict(env.spec) if env.spec is not None else None,
            'scales': self.scales,
            'config': dict((k, v) for k, v in vars(env.config).items()),
            'verdicts': verdicts,
            'reports': self.reports,
            'wall_time': round(time.time() - self.started, 3),
        }
        manifest.update(extra)
        filename = self.dir.join('manifest.json')
        atomic_write(filename, dumps(manifest))
        self.cmd.w.action('written', filename)
        return manifest


class Command(object):
    """Abstract base command class.
    """

    # Whether the command reads a system spec document.
    needs_spec = True

    def __init__(self, env, writer):
        self.env = env
        self.w = writer

    @classmethod
    def setup_arg_parser(cls, argparser):
        """A command should register it's sub-arguments here with the
        given argparser instance.
        """
        if cls.needs_spec:
            argparser.add_argument('--spec', metavar='PATH', required=True,
                                   help='system spec document (JSON)')

    def execute(self):
        raise NotImplementedError()

    def report(self, name, value):
        """Print one verdict line."""
        event = 'unknown' if value in ('unknown', 'Unknown') else 'verdict'
        return self.w.action(event, '%s: %s' % (name, value))

    def run_tasks(self, tasks):
        """Evaluate ``[(name, callable)]`` with ``--threads`` workers and
        return the results in task order.
        """
        threads = self.env.config.threads
        if threads <= 1:
            return [(name, fn()) for name, fn in tasks]
        results = Parallel(n_jobs=threads, backend='threading')(
            delayed(fn)() for _, fn in tasks)
        return [(name, result) for (name, _), result in zip(tasks, results)]

    def system_and_cloud(self):
        sys = self.env.system()
        cloud = self.env.cloud(sys)
        try:
            sys.check_homeomorphism(cloud.points)
        except SpaceError as e:
            raise InvariantViolation(str(e))
        return sys, cloud


class AnalyzeCommand(Command):
    """Sensitivity verdicts, separability profile and fragmentation
    defect of a system.
    """

    def execute(self):
        sys, cloud = self.system_and_cloud()
        scales = self.env.scales(cloud)
        eps_grid = scales['eps_grid']
        horizon = Horizon(scales['N'])
        rho = dH_pseudometric(sys, horizon)
        structure = BallStructure(cloud, rho)
        bundle = RunBundle(self, 'analyze', scales)
        scale = dict((k, scales[k]) for k in ('eps_grid', 'r', 'N'))

        schedule = [(cloud, Horizon(n)) for n in
                    sorted({scales['N'] // 4, scales['N'] // 2, scales['N']})]
        verify = len(cloud) <= ORACLE_LIMIT
        tasks = [
            ('NS', lambda: ns_check(sys, cloud, eps_grid, horizon, structure)),
            ('AE', lambda: ae_check(sys, cloud, eps_grid, horizon, structure)),
            ('LE', lambda: le_check(sys, cloud, eps_grid, horizon,
                                    max_points=LE_SAMPLE)),
            ('HNS', lambda: hns_check(sys, cloud, eps_grid, horizon,
                                      structure=structure, verify=verify)),
            ('sensitivity_constant', lambda: sensitivity_constant(
                sys, cloud, horizon, eps_grid, structure)),
            ('fragmentation_defect', lambda: fragmentation_defect(
                cloud, rho, cloud.r, eps_grid)),
            ('expansivity', lambda: expansivity_estimate(sys, cloud, horizon)),
            ('local_fragmentation', lambda: local_fragmentation_check(
                sys, cloud, eps_grid, horizon)),
            ('wm_triviality', lambda: wm_triviality_test(
                sys, cloud, eps_grid, horizon, scales['delta'])),
            ('raw_family', lambda: self.raw_family(sys, cloud, eps_grid,
                                                   horizon)),
        ]
        tasks.extend(('eq:%g' % eps, lambda eps=eps: eq_epsilon(
            sys, cloud, eps, horizon, structure)) for eps in eps_grid)
        tasks.extend(('profile:%g' % eps, lambda eps=eps: separability_profile(
            sys, schedule, eps)) for eps in eps_grid)
        results = dict(self.run_tasks(tasks))

        verdicts = []
        for name in ('NS', 'AE', 'LE', 'HNS'):
            result = results[name]
            self.report(name, result.property)
            verdicts.append(verdict(name, result.property, scale,
                                    witness=result.witness[:32]))
        for name in ('sensitivity_constant', 'fragmentation_defect',
                     'expansivity'):
            self.report(name, results[name])
            verdicts.append(verdict(name, results[name], scale))
        for name in ('local_fragmentation', 'wm_triviality'):
            result = results[name]
            self.report(name, result.status)
            verdicts.append(verdict(result.name, result.status,
                                    dict(scale, delta=scales['delta'])))

        eq_reports = [results['eq:%g' % eps] for eps in eps_grid]
        bundle.document('verdicts', dict(
            (name, results[name]) for name in ('NS', 'AE', 'LE', 'HNS',
                                               'local_fragmentation',
                                               'wm_triviality')))
        bundle.document('eq_reports', eq_reports)
        bundle.document('fragmentation', {
            'stages': results['HNS'].detail.get('stages'),
            'defect': results['fragmentation_defect'],
            'raw_family': results['raw_family'] and
                dict(zip(eps_grid, results['raw_family']))})
        profiles = [results['profile:%g' % eps] for eps in eps_grid]
        bundle.document('separability', profiles)
        bundle.table('separability',
                     [('N', 'orbit horizon of d_H'),
                      ('epsilon', 'net scale'),
                      ('net_size', 'size of the greedy epsilon-net')],
                     [row for p in profiles for row in p.rows])
        bundle.table('defect',
                     [('epsilon', 'scale of the Eq set'),
                      ('eq_size', 'number of cloud points in Eq_epsilon'),
                      ('dense', 'whether Eq_epsilon meets every r-ball'),
                      ('invariance_defect', 'fraction of Eq points mapped '
                                            'next to non-Eq points')],
                     [(e.epsilon, len(e.eq_points), e.dense,
                       e.invariance_defect) for e in eq_reports])
        bundle.finish(verdicts)
        self.check_consistency(results, eps_grid)
        return results

    def raw_family(self, sys, cloud, eps_grid, horizon):
        """Fragmentation by the family of raw iterates ``T^n``, one
        verdict per grid epsilon. None for shifts, whose d_H is computed
        in closed form rather than from the (cyclically extended) tables.
        """
        if sys.space.kind == 'sequence':
            return None
        tables = list(sys.orbit_tables(cloud.points, horizon))
        return [fragmented_family_check(tables, cloud, eps, cloud.r)[0]
                for eps in eps_grid]

    def check_consistency(self, results, eps_grid):
        """Implications that hold on every cloud; a violation is a bug."""
        problems = []
        if results['HNS'].holds and not results['NS'].holds:
            problems.append('HNS without NS')
        if results['AE'].holds and not results['NS'].holds:
            problems.append('AE without NS')
        if results['raw_family'] is not None and \
                results['HNS'].holds != all(results['raw_family']):
            problems.append('HNS disagrees with the raw iterate family')
        if results['wm_triviality'].detail.get('contradiction'):
            problems.append('weakly mixing NS system is not trivial')
        if problems:
            raise InvariantViolation('; '.join(problems))


class ClassifyCommand(Command):
    """RN classification of a subshift by countability."""

    def execute(self):
        spec = self.env.spec
        sub = spec.subshift()
        if sub is None:
            raise CommandError('the system spec does not describe a subshift')
        depth = self.env.config.depth
        scales = {'depth': depth}
        bundle = RunBundle(self, 'classify', scales)
        try:
            result = classify_countability(sub, depth)
            profile = complexity_profile(sub, min(depth, PROFILE_LENGTH))
        except SubshiftError as e:
            raise CommandError(e)
        constant = expansivity_constant(sub)

        self.report('classification', result.countability)
        self.report('RN', result.rn_verdict)
        verdicts = [
            verdict('classification', result.countability, scales,
                    depth_exhausted=result.countability == 'Unknown'),
            verdict('RN', result.rn_verdict, scales),
            verdict('expansivity_constant', constant, scales),
        ]
        check = None
        if result.rn_verdict == 'RN':
            if sub.kind == 'explicit':
                points = orbit_closure_cloud(sub, min(depth, 32)).points
            else:
                points = subshift_cloud(sub, 17).points
            check = recurrent_periodicity_check(sub, points, depth, result)
            self.report(check.name, check.status)
            verdicts.append(verdict(check.name, check.status, scales))

        bundle.document('classification', {
            'subshift': sub, 'result': result, 'expansivity_constant':
                constant, 'recurrent_periodicity': check,
            'depth_exhausted': result.countability == 'Unknown'})
        bundle.table('complexity',
                     [('n', 'word length'),
                      ('p', 'number of admissible words of length n')],
                     enumerate(profile, 1))
        bundle.finish(verdicts)
        if check is not None and not check:
            raise InvariantViolation('an RN subshift has a recurrent '
                                     'aperiodic point')
        return result


class EnvelopeCommand(Command):
    """Finite approximation of the enveloping semigroup, or the
    two-arrows verification table.
    """

    needs_spec = False

    @classmethod
    def setup_arg_parser(cls, parser):
        parser.add_argument('--spec', metavar='PATH',
                            help='system spec document (JSON); not needed '
                                 'with --two-arrows')
        parser.add_argument('--two-arrows', action='store_true',
                            dest='two_arrows',
                            help='verify the two-arrows description of '
                                 'the Sturmian envelope')
        parser.add_argument('--alpha', type=float, metavar='REAL',
                            help='rotation number for --two-arrows '
                                 '(golden mean by default)')

    def execute(self):
        if self.env.options.two_arrows:
            return self.two_arrows()
        if self.env.spec is None:
            raise CommandError('--spec is required unless --two-arrows '
                               'is given')
        sys, cloud = self.system_and_cloud()
        scales = self.env.scales(cloud)
        horizon = Horizon(scales['N'])
        tol = scales['tol']
        scale = dict((k, scales[k]) for k in ('eps_grid', 'r', 'N', 'tol'))
        bundle = RunBundle(self, 'envelope', scales)
        try:
            env = envelope_approx(sys, cloud, horizon, tol)
        except EnvelopeError as e:
            raise CommandError(e)
        self.w.action('info', 'Envelope: %d maps' % len(env))

        families = {}
        for f in self.env.spec.observables(sys):
            family = ef_family(sys, f, cloud, horizon, tol)
            families[f.label] = {
                'size': len(family),
                'fragmented': dict(
                    (eps, fragmented_family_check(family, cloud, eps,
                                                  cloud.r)[0])
                    for eps in scales['eps_grid'])}
        raw = dict((eps, fragmented_family_check(env.maps, cloud, eps,
                                                 cloud.r)[0])
                   for eps in scales['eps_grid'])
        closure = self.w.begin('Composition closure of the envelope')
        semigroup = dict((eps, f_semigroup_check(env, cloud, eps,
                                                 warnfunc=closure.message))
                         for eps in scales['eps_grid'])
        degraded = any(s.degraded for s in semigroup.values())
        # Degradation is reported, the verdicts are still written.
        closure.done('unknown' if degraded else 'info',
                     status='degraded' if degraded else 'closed')
        defects = [continuity_defect(m, cloud) for m in env.maps]
        counts, edges = np.histogram(defects, bins=HISTOGRAM_BINS,
                                     range=(0.0, cloud.space.diameter))

        f_semigroup = all(bool(s) for s in semigroup.values())
        self.report('maps', len(env))
        self.report('fragmented_family', all(raw.values()))
        self.report('F_semigroup', f_semigroup)
        verdicts = [
            verdict('maps', len(env), scale),
            verdict('fragmented_family', all(raw.values()), scale,
                    per_epsilon=raw),
            verdict('F_semigroup', f_semigroup, scale, degraded=degraded),
        ]
        for label, doc in families.items():
            verdicts.append(verdict('Ef_fragmented:%s' % label,
                                    all(doc['fragmented'].values()), scale))
        bundle.document('envelope', env)
        bundle.document('families', {'observables': families, 'raw': raw,
                                     'f_semigroup': semigroup})
        bundle.table('continuity_defect',
                     [('lo', 'lower bin edge of the continuity defect'),
                      ('hi', 'upper bin edge of the continuity defect'),
                      ('count', 'number of envelope maps in the bin')],
                     zip(edges[:-1], edges[1:], counts))
        bundle.finish(verdicts)
        return env

    def two_arrows(self):
        config = self.env.config
        alpha = self.env.options.alpha
        if alpha is None and self.env.spec is not None:
            alpha = self.env.spec.get('params', {}).get('alpha')
        alpha = GOLDEN if alpha is None else alpha
        scales = {'depth': config.depth, 'tol': config.tol}
        bundle = RunBundle(self, 'envelope --two-arrows', scales)
        try:
            report = verify_two_arrows(alpha, config.depth, config.tol)
        except (EnvelopeError, SubshiftError) as e:
            raise CommandError(e)
        scales = dict(scales, radius=report['radius'])
        claim1 = all(c['converged'] and c['matches'] for c in report['claim1'])
        split = all(s['exact'] for s in report['claim1_split'].values())
        claim3 = report['claim3']['min_sup_distance_at_least_half']
        claim5 = report['claim5']['baire_class_1']
        for name, value in (('limits', claim1), ('pm_split', split),
                            ('discreteness', claim3), ('baire', claim5),
                            ('off_orbit_coincide',
                             report['off_orbit']['coincide'])):
            self.report(name, value)
        rows = [('limit', c['gamma_index'], c['side'],
                 c['converged'] and c['matches']) for c in report['claim1']]
        rows += [('pm_split', k, '', s['exact'])
                 for k, s in report['claim1_split'].items()]
        rows.append(('discreteness', '', '', claim3))
        rows.append(('baire', '', '', claim5))
        bundle.document('two_arrows', report)
        bundle.table('claims',
                     [('claim', 'which statement is checked'),
                      ('gamma_index', 'k with gamma = k alpha'),
                      ('side', 'approach side of the limit'),
                      ('ok', 'whether the check passed')], rows)
        bundle.finish([
            verdict('limits', claim1, scales),
            verdict('pm_split', split, scales),
            verdict('discreteness', claim3, scales),
            verdict('baire', claim5, scales),
        ], model=report['model'])
        return report


class ChainCommand(Command):
    """Chain recurrence, Birkhoff center stages, the minimal center and
    prolongations.
    """

    @classmethod
    def setup_arg_parser(cls, parser):
        super(ChainCommand, cls).setup_arg_parser(parser)
        parser.add_argument('--base-point', type=int, action='append',
                            dest='base_points', metavar='INDEX',
                            help='cloud index to report the prolongation '
                                 'of; can be given multiple times')

    def execute(self):
        sys, cloud = self.system_and_cloud()
        scales = self.env.scales(cloud)
        delta = scales['delta']
        horizon = Horizon(scales['N'])
        scale = dict((k, scales[k]) for k in ('delta', 'r', 'N'))
        bundle = RunBundle(self, 'chain', scales)

        bases = self.env.options.base_points or \
            self.env.spec.get('base_points') or [0]
        for x in bases:
            if not 0 <= x < len(cloud):
                raise CommandError('base point %d is not a cloud index' % x)

        dg = chain_digraph(sys, cloud, delta, horizon)
        recurrent = chain_recurrent_set(dg)
        birkhoff = self.w.begin('Birkhoff center iteration')
        stages, converged = birkhoff_center_iteration(
            sys, cloud, delta, horizon, warnfunc=birkhoff.message)
        birkhoff.done('info' if converged else 'unknown',
                      status='%d stages' % (len(stages) - 1))
        mincenter = mincenter_approx(sys, cloud, delta, horizon)
        prols = [prolongation(sys, cloud, x, delta, horizon) for x in bases]
        lem1 = lem1_check(sys, cloud, delta, horizon, scales['eps_grid'])

        self.report('chain_recurrent', '%d/%d' % (len(recurrent), len(cloud)))
        self.report('birkhoff_center', '%d points' % len(stages[-1]))
        self.report('mincenter', '%d points' % len(mincenter.nodes))
        self.report(lem1.name, lem1.status)

        verdicts = [
            verdict('chain_recurrent', len(recurrent), scale),
            verdict('birkhoff_center', len(stages[-1]), scale,
                    converged=converged),
            verdict('mincenter', len(mincenter.nodes), scale),
            verdict(lem1.name, lem1.status,
                    dict(scale, eps_grid=scales['eps_grid'])),
        ]
        bundle.document('chain', {
            'digraph': dg, 'chain_recurrent': recurrent,
            'birkhoff': {'stages': stages, 'converged': converged},
            'mincenter': mincenter, 'prolongations': prols,
            'prolongation_check': lem1, 'points': cloud.points})
        bundle.table('birkhoff',
                     [('stage', 'iteration of the wandering removal'),
                      ('size', 'surviving cloud points')],
                     [(i, len(s)) for i, s in enumerate(stages)])
        bundle.finish(verdicts)
        return stages, mincenter


class GalleryCommand(Command):
    """List the gallery systems."""

    needs_spec = False

    def execute(self):
        for name in sorted(GALLERY):
            _, schema, fact = GALLERY[name]
            action = self.w.action('listed', '%s — %s' % (name, fact))
            action.message('parameters: %s' % schema, 'default')
        return sorted(GALLERY)
