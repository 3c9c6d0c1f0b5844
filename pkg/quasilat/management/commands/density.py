from quasilat import density
from quasilat.management.base import ReportCommand, float_list
from quasilat.pointset_io import read_csv
from quasilat.reporting import provenance
from quasilat.serializers import DensityReportSerializer, PointSetSummarySerializer


class Command(ReportCommand):
    help = 'Estimate lower and upper Beurling densities over growing boxes.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--points', required=True, help='Point-set CSV.')
        parser.add_argument('--radii', required=True, type=float_list, help='Box radii, e.g. "5,10,20".')
        parser.add_argument('--translate-step', type=float, help='Spacing of the translate grid.')
        parser.add_argument('--scan-region', type=float, help='Half width of the region of translates.')
        parser.add_argument('--convention', choices=['half-open', 'closed'], help='Box convention.')

    def report(self, **options):
        ps = read_csv(options['points'])
        boxes = density.FolnerBoxes(ps.dim, options['radii'])
        result = density.density_scan(ps, boxes, translate_step=options.get('translate_step'),
                                      scan_region_radius=options.get('scan_region'),
                                      convention=options.get('convention'))
        data = DensityReportSerializer(result).data
        data['closed_form'] = density.closed_form_density(ps.source)
        return {
            'pointset': PointSetSummarySerializer(ps).data,
            'density': data,
            'provenance': provenance(extra={'command': 'density', 'radii': options['radii']}),
        }
