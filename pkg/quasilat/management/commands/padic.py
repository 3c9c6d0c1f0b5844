from quasilat import padic
from quasilat.management.base import ReportCommand
from quasilat.reporting import provenance
from quasilat.serializers import (PAdicCoverResultSerializer, PAdicDensityReportSerializer,
                                  PAdicSettingsSerializer)


class Command(ReportCommand):
    help = 'Densities and cover sets of the p-adic model set { q in Z[1/p] : |q| <= w }.'

    def add_arguments(self, parser):
        actions = self.add_subcommands(parser)
        for name in ('density', 'cover'):
            sub = self.add_subparser(actions, parser, name)
            sub.add_argument('-p', dest='p', required=True, help='A prime.')
            sub.add_argument('-w', dest='w', default='1', help='Real window half width, e.g. 1 or 1/3.')
            sub.add_argument('-n', dest='n_max', required=True, help='Deepest ball p^-n Z_p.')
            if name == 'density':
                sub.add_argument('--depth', default='2', help='Coset depth for the lower and upper ratios.')
            else:
                sub.add_argument('--candidate-radius', dest='candidate_radius',
                                 help='Largest |f| allowed in the defect set.')

    def report(self, **options):
        fields = ['p', 'w', 'n_max', 'depth', 'candidate_radius']
        serializer = PAdicSettingsSerializer(data={name: options[name] for name in fields
                                                   if options.get(name) is not None})
        serializer.is_valid(raise_exception=True)
        settings = serializer.validated_data
        ms = padic.PAdicModelSet(settings['p'], settings['w'], settings['n_max'])
        if options['action'] == 'density':
            data = {'density': PAdicDensityReportSerializer(
                padic.padic_density(ms, translate_depth=settings['depth'])).data}
        else:
            cover = padic.padic_cover_set(ms, candidate_radius=settings.get('candidate_radius'))
            data = {'cover': PAdicCoverResultSerializer(cover).data}
        data['provenance'] = provenance(extra={'command': 'padic %s' % options['action'],
                                               'settings': dict(settings)})
        return data
