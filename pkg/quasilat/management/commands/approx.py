from quasilat import approxcheck
from quasilat.management.base import ReportCommand
from quasilat.pointset_io import read_csv
from quasilat.reporting import provenance
from quasilat.serializers import ApproximateLatticeReportSerializer, PointSetSummarySerializer


class Command(ReportCommand):
    help = 'Check the approximate lattice axioms and Delone constants of a point set.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--points', required=True, help='Point-set CSV.')
        parser.add_argument('--margin', type=float, default=2.0, help='Interior margin for the Delone constants.')
        parser.add_argument('--sumset-radius', type=float, help='Radius of L + L to cover (default R/2).')
        parser.add_argument('--candidate-radius', type=float, help='Largest |f| allowed in the defect set.')
        parser.add_argument('--tol', type=float, help='Coverage tolerance.')

    def report(self, **options):
        ps = read_csv(options['points'])
        result = approxcheck.approximate_lattice_report(
            ps, options['margin'],
            sumset_radius=options.get('sumset_radius'),
            coverage_tol=options.get('tol'),
            candidate_radius=options.get('candidate_radius'),
        )
        return {
            'pointset': PointSetSummarySerializer(ps).data,
            'approx': ApproximateLatticeReportSerializer(result).data,
            'provenance': provenance(extra={'command': 'approx', 'margin': options['margin']}),
        }
