from quasilat.management.base import ReportCommand
from quasilat.models import ScenarioRun
from quasilat.serializers import ScenarioRunSerializer


class Command(ReportCommand):
    help = 'List recorded scenario runs, newest first.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--name', help='Only runs of this scenario.')
        parser.add_argument('--failed', action='store_true', help='Only runs with a failed verdict.')
        parser.add_argument('--limit', type=int, default=20)

    def report(self, **options):
        queryset = ScenarioRun.objects.all()
        if options.get('name'):
            queryset = queryset.filter(name=options['name'])
        if options.get('failed'):
            queryset = queryset.filter(passed=False)
        return ScenarioRunSerializer(queryset[:options['limit']], many=True).data
