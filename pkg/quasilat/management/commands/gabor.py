from quasilat.conf import quasilat_settings
from quasilat.management.base import ReportCommand
from quasilat.pointset_io import read_csv
from quasilat.reporting import provenance
from quasilat.scenarios import density_pointset, gabor_checks, scan_density
from quasilat.serializers import (DensityReportSerializer, GaborSettingsSerializer,
                                  PointSetSummarySerializer)

ACTIONS = {
    'frame-bounds': 'frame',
    'riesz': 'riesz',
    'hap': 'hap',
    'dual': 'dual',
    'complete': 'complete',
}


class Command(ReportCommand):
    help = 'Analyse the coherent system pi(L) g over a point set in the time-frequency plane.'

    def add_arguments(self, parser):
        actions = self.add_subcommands(parser)
        for name in ACTIONS:
            sub = self.add_subparser(actions, parser, name)
            sub.add_argument('--points', required=True, help='Point-set CSV with rows (x, xi).')
            sub.add_argument('--grid-T', dest='T', default='24', help='Sampling grid covers [-T, T].')
            sub.add_argument('--grid-dt', dest='dt', default='0.02', help='Sampling step.')
            sub.add_argument('--window', default='gaussian', help='gaussian, hermite:n or a CSV of samples.')
            sub.add_argument('--margin', help='Interior margin for Riesz and dual bounds.')
            sub.add_argument('--family-radius', help='Use only points within this radius.')
            sub.add_argument('--k', type=int, help='Cover size k for the completeness verdict.')
            sub.add_argument('--slack', type=float, help='Relative slack of the density verdicts.')
            if name == 'frame-bounds':
                sub.add_argument('--hermite-N', dest='hermite_N', default='40', help='Test basis size.')
            if name == 'hap':
                sub.add_argument('--K', default='6', help='Neighbourhood half width.')
                sub.add_argument('--x-grid', dest='x_grid', default='5', help='Centres per axis.')
                sub.add_argument('--x-extent', dest='x_extent', default='0.5', help='Centres lie in [-e, e]^2.')
            if name == 'complete':
                sub.add_argument('--probes', default='10', help='Number of Hermite probes.')

    def report(self, **options):
        check = ACTIONS[options['action']]
        fields = ['T', 'dt', 'window', 'hermite_N', 'K', 'x_grid', 'x_extent', 'probes',
                  'family_radius', 'margin']
        data = {name: options[name] for name in fields if options.get(name) is not None}
        data['checks'] = [check]
        serializer = GaborSettingsSerializer(data=data)
        serializer.is_valid(raise_exception=True)
        settings = serializer.validated_data

        ps = read_csv(options['points'])
        slack = options.get('slack')
        slack = quasilat_settings.CONSISTENCY_SLACK if slack is None else slack
        _, _, dens = scan_density(density_pointset(ps))
        verdicts = []
        section, detected = gabor_checks(ps, settings, options.get('k'), dens, slack, verdicts)
        return {
            'pointset': PointSetSummarySerializer(ps).data,
            'density': DensityReportSerializer(dens).data,
            'gabor': section,
            'detected': detected,
            'verdicts': verdicts,
            'provenance': provenance(extra={'command': 'gabor', 'settings': dict(settings)}),
        }
