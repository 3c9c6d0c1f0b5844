from quasilat import pointset
from quasilat.management.base import ReportCommand
from quasilat.pointset_io import read_csv, write_csv
from quasilat.scenarios import emit_pointset
from quasilat.serializers import PointSetRecipeSerializer, PointSetSummarySerializer


class Command(ReportCommand):
    help = 'Generate a point set and write it as CSV with a JSON sidecar.'

    def add_arguments(self, parser):
        kinds = self.add_subcommands(parser, dest='kind')

        sub = self.add_subparser(kinds, parser, 'lattice', help='Lattice points in [-R, R]^d.')
        sub.add_argument('--basis', required=True, help='Basis rows, e.g. "0.5,0;0,1".')
        sub.add_argument('--radius', required=True)

        sub = self.add_subparser(kinds, parser, 'fibonacci', help='The Fibonacci chain.')
        sub.add_argument('--window', default='1.0', help='Internal window half width.')
        sub.add_argument('--radius', required=True)

        sub = self.add_subparser(kinds, parser, 'fibonacci-gabor', help='Fibonacci chain times beta Z.')
        sub.add_argument('--window', default='1.0')
        sub.add_argument('--beta', default='0.5')
        sub.add_argument('--radius', required=True)

        sub = self.add_subparser(kinds, parser, 'model-set', help='A general cut-and-project set.')
        sub.add_argument('--total-basis', required=True)
        sub.add_argument('--d', required=True)
        sub.add_argument('--m', required=True)
        sub.add_argument('--half-widths', required=True)
        sub.add_argument('--radius', required=True)

        sub = self.add_subparser(kinds, parser, 'symmetrize', help="(P ∪ -P) + Gamma'.")
        sub.add_argument('--points', default='', help='Base points, e.g. "0.3;1.7".')
        sub.add_argument('--sublattice', required=True)
        sub.add_argument('--radius', required=True)

        sub = self.add_subparser(kinds, parser, 'sumset', help='A + B from two point-set files.')
        sub.add_argument('--a', required=True, help='First point-set CSV.')
        sub.add_argument('--b', required=True, help='Second point-set CSV.')
        sub.add_argument('--radius', required=True)

    def report(self, **options):
        kind = options['kind'].replace('-', '_')
        out = options.get('out')
        if not out:
            raise ValueError('gen needs --out for the CSV file')
        if kind == 'sumset':
            ps = pointset.sumset_truncated(read_csv(options['a']), read_csv(options['b']), float(options['radius']))
            write_csv(ps, out)
        else:
            fields = ['radius', 'basis', 'window', 'beta', 'total_basis', 'd', 'm', 'half_widths',
                      'points', 'sublattice']
            data = {name: options[name] for name in fields if options.get(name) is not None}
            data['kind'] = kind
            serializer = PointSetRecipeSerializer(data=data)
            serializer.is_valid(raise_exception=True)
            ps = emit_pointset(serializer.validated_data, out)
        return dict(PointSetSummarySerializer(ps).data, path=out)

    def emit(self, data, out=None):
        # --out names the CSV; the summary always goes to stdout
        super().emit(data)
