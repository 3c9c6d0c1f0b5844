import logging

from django.core.management.base import CommandError
from django.db import transaction

from quasilat.management.base import EXIT_VERDICT_FAILED, ReportCommand
from quasilat.models import ScenarioRun
from quasilat.scenarios import run_scenarios, shipped_scenarios

logger = logging.getLogger(__name__)


class Command(ReportCommand):
    help = 'Run scenario files through the consistency harness; exits 1 when a verdict fails.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('scenarios', nargs='*', help='Scenario .cfg files (default: every shipped scenario).')
        parser.add_argument('--parallel', action='store_true', help='Run independent scenarios concurrently.')
        parser.add_argument('--record', action='store_true', help='Store each report as a ScenarioRun.')

    def report(self, **options):
        paths = options['scenarios'] or shipped_scenarios()
        if not paths:
            raise ValueError('no scenario files given and none shipped')
        reports = run_scenarios(paths, parallel=options['parallel'])
        if options['record']:
            self.record(reports)
        return reports[0] if len(reports) == 1 else {'reports': reports,
                                                     'passed': all(r['passed'] for r in reports)}

    @transaction.atomic
    def record(self, reports):
        for report in reports:
            ScenarioRun.objects.create(
                name=report['scenario'],
                settings_hash=report['provenance']['settings_hash'],
                passed=report['passed'],
                report=report,
            )
        logger.info('recorded %d scenario runs', len(reports))

    def handle(self, *args, **options):
        super().handle(*args, **options)
        if not self.passed:
            raise CommandError('one or more verdicts failed', returncode=EXIT_VERDICT_FAILED)

    def emit(self, data, out=None):
        self.passed = data['passed']
        for report in data.get('reports', [data]):
            for failed in (v for v in report['verdicts'] if not v['passed']):
                self.stderr.write('%s: %s failed (lhs=%s, rhs=%s)' % (
                    report['scenario'], failed['check'], failed['lhs'], failed['rhs']))
        super().emit(data, out)
