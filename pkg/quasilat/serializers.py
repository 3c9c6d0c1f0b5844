import math
import os

from rest_framework import serializers

from . import models
from .conf import quasilat_settings

POINTSET_KINDS = ['lattice', 'fibonacci', 'fibonacci_gabor', 'model_set', 'symmetrize', 'file']
GABOR_CHECKS = ['frame', 'riesz', 'complete', 'hap', 'dual', 'squared_minimality']


class FloatListField(serializers.Field):
    """
    Comma separated floats, e.g. `radii = 2, 4, 8`.
    """
    default_error_messages = {
        'invalid': 'Expected comma separated numbers.',
        'empty': 'At least one number is required.',
    }

    def to_internal_value(self, data):
        if isinstance(data, (list, tuple)):
            items = data
        else:
            items = [item for item in str(data).split(',') if item.strip()]
        try:
            values = [float(item) for item in items]
        except (TypeError, ValueError):
            self.fail('invalid')
        if not values:
            self.fail('empty')
        return values

    def to_representation(self, value):
        return [float(v) for v in value]


class MatrixField(serializers.Field):
    """
    Rows separated by `;`, entries by `,`, e.g. `basis = 2, 0; 0, 1`.
    An empty value is the empty matrix when allow_empty is set.
    """
    default_error_messages = {
        'invalid': 'Expected rows of comma separated numbers separated by ";".',
        'ragged': 'All rows must have the same length.',
        'empty': 'The matrix is empty.',
    }

    def __init__(self, allow_empty=False, **kwargs):
        self.allow_empty = allow_empty
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        if isinstance(data, (list, tuple)):
            rows = [list(row) for row in data]
        else:
            rows = [row.split(',') for row in str(data).split(';') if row.strip()]
        try:
            rows = [[float(item) for item in row if str(item).strip()] for row in rows]
        except (TypeError, ValueError):
            self.fail('invalid')
        if not rows:
            if self.allow_empty:
                return []
            self.fail('empty')
        if len({len(row) for row in rows}) != 1:
            self.fail('ragged')
        return rows

    def to_representation(self, value):
        return [[float(v) for v in row] for row in value]


class ChoiceListField(serializers.Field):
    """
    Comma separated names from a fixed list.
    """
    default_error_messages = {'invalid_choice': '"{input}" is not a valid choice.'}

    def __init__(self, choices, **kwargs):
        self.choices = list(choices)
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        items = data if isinstance(data, (list, tuple)) else str(data).split(',')
        values = []
        for item in items:
            item = str(item).strip()
            if not item:
                continue
            if item not in self.choices:
                self.fail('invalid_choice', input=item)
            if item not in values:
                values.append(item)
        return values

    def to_representation(self, value):
        return list(value)


# point sets and their files


class PointSetSidecarSerializer(serializers.Serializer):
    """
    The JSON sidecar written next to every point-set CSV.
    """
    dim = serializers.ChoiceField(choices=[1, 2])
    n_points = serializers.IntegerField(source='__len__', read_only=True)
    truncation_radius = serializers.FloatField(min_value=0.0)
    partial = serializers.BooleanField(default=False)
    source = serializers.DictField()

    def validate_truncation_radius(self, value):
        if not value > 0:
            raise serializers.ValidationError('truncation radius must be positive')
        return value


class PointSetSummarySerializer(serializers.Serializer):
    kind = serializers.CharField()
    dim = serializers.IntegerField()
    n_points = serializers.IntegerField(source='__len__')
    truncation_radius = serializers.FloatField()
    partial = serializers.BooleanField()


# library results


class DeloneReportSerializer(serializers.Serializer):
    n_points = serializers.IntegerField()
    min_separation = serializers.FloatField(allow_null=True)
    covering_radius = serializers.FloatField()
    interior_radius = serializers.FloatField()
    is_symmetric = serializers.BooleanField()
    contains_identity = serializers.BooleanField()


class CoverResultSerializer(serializers.Serializer):
    k = serializers.IntegerField()
    defect_set = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
    verified_region_radius = serializers.FloatField()
    coverage_tol = serializers.FloatField()
    candidate_radius = serializers.FloatField()
    n_covered = serializers.IntegerField()
    minimal = serializers.BooleanField(allow_null=True)


class ApproximateLatticeReportSerializer(serializers.Serializer):
    delone = DeloneReportSerializer()
    cover = CoverResultSerializer()
    sumset_radius = serializers.FloatField()
    sumset_partial = serializers.BooleanField()
    minimal_cover = CoverResultSerializer(allow_null=True)
    is_approximate_lattice = serializers.BooleanField()


class DensityReportSerializer(serializers.Serializer):
    radii = serializers.ListField(child=serializers.FloatField())
    measures = serializers.ListField(child=serializers.FloatField())
    lower_counts = serializers.ListField(child=serializers.IntegerField())
    upper_counts = serializers.ListField(child=serializers.IntegerField())
    lower_estimates = serializers.ListField(child=serializers.FloatField())
    upper_estimates = serializers.ListField(child=serializers.FloatField())
    D_minus = serializers.FloatField()
    D_plus = serializers.FloatField()
    slope_minus = serializers.FloatField()
    slope_plus = serializers.FloatField()
    richardson_minus = serializers.FloatField(allow_null=True)
    richardson_plus = serializers.FloatField(allow_null=True)
    translate_step = serializers.FloatField()
    scan_region_radius = serializers.FloatField()
    n_translates = serializers.IntegerField()
    box_convention = serializers.CharField()


class SubadditivityReportSerializer(serializers.Serializer):
    holds = serializers.BooleanField()
    n_checked = serializers.IntegerField()
    worst_slack = serializers.IntegerField(allow_null=True)
    sup_union = serializers.ListField(child=serializers.IntegerField())
    sup_parts = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))


class SpectralBoundsSerializer(serializers.Serializer):
    A_est = serializers.FloatField()
    B_est = serializers.FloatField()
    subspace_dim = serializers.IntegerField()
    converged = serializers.BooleanField()
    n_points = serializers.IntegerField()


class DualSystemSerializer(serializers.Serializer):
    n_points = serializers.SerializerMethodField()
    residual = serializers.FloatField()
    norm_sup = serializers.FloatField()
    B_sup = serializers.FloatField()
    interior_norm_sup = serializers.SerializerMethodField()
    min_eigenvalue = serializers.FloatField()

    def get_n_points(self, obj):
        return len(obj.points)

    def get_interior_norm_sup(self, obj):
        """
        None when the family has no interior point.
        """
        value = obj.interior_norm_sup
        return None if math.isnan(value) else value


class PAdicDensityReportSerializer(serializers.Serializer):
    p = serializers.IntegerField()
    w = serializers.CharField()
    n_values = serializers.ListField(child=serializers.IntegerField())
    counts = serializers.ListField(child=serializers.IntegerField())
    measures = serializers.ListField(child=serializers.IntegerField())
    ratios = serializers.ListField(child=serializers.FloatField())
    exact_ratios = serializers.ListField(child=serializers.CharField())
    lower_estimates = serializers.ListField(child=serializers.FloatField())
    upper_estimates = serializers.ListField(child=serializers.FloatField())
    density = serializers.FloatField()
    density_exact = serializers.CharField()
    D_minus = serializers.FloatField()
    D_plus = serializers.FloatField()
    translate_depth = serializers.IntegerField()


class PAdicCoverResultSerializer(serializers.Serializer):
    k = serializers.IntegerField()
    defect_set = serializers.SerializerMethodField()
    defect_values = serializers.SerializerMethodField()
    depth = serializers.IntegerField()
    candidate_radius = serializers.CharField()
    verified = serializers.BooleanField()

    def get_defect_set(self, obj):
        return [str(q) for q in obj.defect_set]

    def get_defect_values(self, obj):
        return [float(q) for q in obj.defect_set]


class VerdictSerializer(serializers.Serializer):
    check = serializers.CharField()
    inequality = serializers.CharField()
    applicable = serializers.BooleanField()
    lhs = serializers.FloatField(allow_null=True)
    rhs = serializers.FloatField(allow_null=True)
    passed = serializers.BooleanField()
    note = serializers.CharField(allow_blank=True, default='')


# scenario files


class ScenarioMetaSerializer(serializers.Serializer):
    name = serializers.RegexField(r'^[-\w.]+$', max_length=100,
                                  error_messages={'invalid': 'Use letters, digits, "-", "_" and "." only.'})
    description = serializers.CharField(required=False, allow_blank=True, default='')


class PointSetRecipeSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=POINTSET_KINDS)
    radius = serializers.FloatField(required=False)
    basis = MatrixField(required=False)
    window = serializers.FloatField(required=False, default=1.0)
    beta = serializers.FloatField(required=False, default=0.5)
    total_basis = MatrixField(required=False)
    d = serializers.IntegerField(required=False, min_value=1, max_value=2)
    m = serializers.IntegerField(required=False, min_value=1)
    half_widths = FloatListField(required=False)
    points = MatrixField(required=False, allow_empty=True)
    sublattice = MatrixField(required=False)
    path = serializers.CharField(required=False)

    required_by_kind = {
        'lattice': ['basis', 'radius'],
        'fibonacci': ['radius'],
        'fibonacci_gabor': ['radius'],
        'model_set': ['total_basis', 'd', 'm', 'half_widths', 'radius'],
        'symmetrize': ['sublattice', 'radius'],
        'file': ['path'],
    }

    def validate_radius(self, value):
        if not value > 0:
            raise serializers.ValidationError('radius must be positive')
        return value

    def validate(self, attrs):
        kind = attrs['kind']
        missing = [name for name in self.required_by_kind[kind] if name not in attrs]
        if missing:
            raise serializers.ValidationError({name: 'required for kind "%s"' % kind for name in missing})
        if kind == 'lattice':
            basis = attrs['basis']
            if len(basis) != len(basis[0]) or len(basis) not in (1, 2):
                raise serializers.ValidationError({'basis': 'must be a 1x1 or 2x2 matrix'})
            attrs['dim'] = len(basis)
        elif kind == 'model_set':
            size = attrs['d'] + attrs['m']
            if len(attrs['total_basis']) != size or len(attrs['total_basis'][0]) != size:
                raise serializers.ValidationError({'total_basis': 'must be %dx%d' % (size, size)})
            if len(attrs['half_widths']) != attrs['m']:
                raise serializers.ValidationError({'half_widths': 'need one half width per internal dimension'})
            attrs['dim'] = attrs['d']
        elif kind == 'fibonacci':
            attrs['dim'] = 1
        elif kind == 'fibonacci_gabor':
            attrs['dim'] = 2
        elif kind == 'symmetrize':
            sub = attrs['sublattice']
            if len(sub) != len(sub[0]) or len(sub) not in (1, 2):
                raise serializers.ValidationError({'sublattice': 'must be a 1x1 or 2x2 matrix'})
            attrs['dim'] = len(sub)
            if any(len(row) != attrs['dim'] for row in attrs.get('points', [])):
                raise serializers.ValidationError({'points': 'points must match the sublattice dimension'})
        else:
            base_dir = self.context.get('base_dir', '')
            path = attrs['path'] if os.path.isabs(attrs['path']) else os.path.join(base_dir, attrs['path'])
            if not os.path.exists(path):
                raise serializers.ValidationError({'path': 'no such file: %s' % path})
            attrs['path'] = path
            attrs['dim'] = None
        for name in ('window', 'beta'):
            if kind.startswith('fibonacci') and not attrs[name] > 0:
                raise serializers.ValidationError({name: 'must be positive'})
        return attrs


class ApproxSettingsSerializer(serializers.Serializer):
    enabled = serializers.BooleanField(default=True)
    interior_margin = serializers.FloatField(required=False)
    sumset_radius = serializers.FloatField(required=False)
    candidate_radius = serializers.FloatField(required=False)
    coverage_tol = serializers.FloatField(required=False)


class DensitySettingsSerializer(serializers.Serializer):
    radii = FloatListField(required=False)
    radius = serializers.FloatField(required=False, min_value=0.0)
    translate_step = serializers.FloatField(required=False)
    convention = serializers.ChoiceField(choices=['half-open', 'closed'], required=False)

    def validate_radii(self, value):
        if value[0] <= 0 or any(b <= a for a, b in zip(value, value[1:])):
            raise serializers.ValidationError('radii must be positive and strictly increasing')
        return value


class GaborSettingsSerializer(serializers.Serializer):
    T = serializers.FloatField(default=24.0)
    dt = serializers.FloatField(default=0.02)
    window = serializers.CharField(default='gaussian')
    checks = ChoiceListField(GABOR_CHECKS, default=['frame'])
    hermite_N = serializers.IntegerField(default=40, min_value=1)
    K = serializers.FloatField(default=6.0)
    x_grid = serializers.IntegerField(default=5, min_value=1)
    x_extent = serializers.FloatField(default=0.5, min_value=0.0)
    probes = serializers.IntegerField(default=10, min_value=1)
    family_radius = serializers.FloatField(required=False)
    margin = serializers.FloatField(required=False)

    def validate(self, attrs):
        if not (attrs['T'] > 0 and attrs['dt'] > 0):
            raise serializers.ValidationError('grid needs T > 0 and dt > 0')
        if math.floor(2 * attrs['T'] / attrs['dt'] + 1e-9) + 1 < 8:
            raise serializers.ValidationError('grid needs at least 8 samples')
        return attrs


class PAdicSettingsSerializer(serializers.Serializer):
    p = serializers.IntegerField(min_value=2)
    w = serializers.CharField()
    n_max = serializers.IntegerField(min_value=0)
    depth = serializers.IntegerField(default=2, min_value=0)
    cover = serializers.BooleanField(default=False)
    candidate_radius = serializers.CharField(required=False)

    def validate_w(self, value):
        from fractions import Fraction
        try:
            w = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise serializers.ValidationError('w must be a rational number such as 1, 0.5 or 1/3')
        if not w > 0:
            raise serializers.ValidationError('window must have a positive half width')
        return value.strip()

    def validate_p(self, value):
        from .padic import is_prime
        if not is_prime(value):
            raise serializers.ValidationError('%d is not prime' % value)
        return value


class ExpectSerializer(serializers.Serializer):
    frame = serializers.BooleanField(required=False, allow_null=True, default=None)
    riesz = serializers.BooleanField(required=False, allow_null=True, default=None)
    complete = serializers.BooleanField(required=False, allow_null=True, default=None)
    hap = serializers.BooleanField(required=False, allow_null=True, default=None)
    k = serializers.IntegerField(required=False, min_value=1)
    density = serializers.FloatField(required=False)
    density_tolerance = serializers.FloatField(default=0.02, min_value=0.0)
    slack = serializers.FloatField(required=False, min_value=0.0)


class ScenarioSerializer(serializers.Serializer):
    """
    A scenario file after INI parsing. Cross-section checks here mirror the
    preconditions of the library calls, so a scenario that validates does
    not fail on a guard margin half way through.
    """
    scenario = ScenarioMetaSerializer()
    pointset = PointSetRecipeSerializer(required=False)
    approx = ApproxSettingsSerializer(required=False)
    density = DensitySettingsSerializer(required=False)
    gabor = GaborSettingsSerializer(required=False)
    padic = PAdicSettingsSerializer(required=False)
    expect = ExpectSerializer(required=False)

    def validate(self, attrs):
        pointset = attrs.get('pointset')
        if pointset is None and 'padic' not in attrs:
            raise serializers.ValidationError('a scenario needs a [pointset] or a [padic] section')
        for section in ('approx', 'density', 'gabor'):
            if section in attrs and pointset is None:
                raise serializers.ValidationError({section: 'needs a [pointset] section'})
        if pointset is None or pointset['kind'] == 'file':
            return attrs

        radius = pointset['radius']
        errors = {}
        density = attrs.get('density')
        if density and density.get('radii'):
            density_radius = density.get('radius') or max(quasilat_settings.DENSITY_RADIUS, radius)
            if density['radii'][-1] >= density_radius:
                errors['density'] = ['largest radius %g must be below the density truncation radius %g'
                                     % (density['radii'][-1], density_radius)]
        approx = attrs.get('approx')
        if approx and approx.get('interior_margin') is not None and not 0 < approx['interior_margin'] < radius:
            errors['approx'] = ['interior_margin must lie in (0, %g)' % radius]

        gabor = attrs.get('gabor')
        if gabor:
            errors.update(self._validate_gabor(gabor, pointset, radius))
        if errors:
            raise serializers.ValidationError(errors)
        return attrs

    def _validate_gabor(self, gabor, pointset, radius):
        problems = []
        if pointset['dim'] != 2:
            problems.append('coherent systems need a 2-dimensional point set')
        shift_range = gabor['T'] / 2.0
        xi_max = 1.0 / (4.0 * gabor['dt'])
        checks = gabor['checks']
        if 'frame' in checks:
            rho = math.sqrt(gabor['hermite_N'] / math.pi) + quasilat_settings.K_GUARD
            if rho > radius or rho > shift_range or rho > xi_max:
                problems.append('truncation too small for test basis: need radius and T/2 >= %.3f' % rho)
        whole_family = {'riesz', 'complete', 'dual', 'squared_minimality'} & set(checks)
        family_radius = gabor.get('family_radius') or radius
        if whole_family and (family_radius > shift_range or family_radius > xi_max):
            problems.append('family radius %g exceeds the grid range (T/2 = %g, xi_max = %g)'
                            % (family_radius, shift_range, xi_max))
        if 'hap' in checks:
            reach = gabor['x_extent'] + gabor['K']
            if reach > radius or reach > shift_range or reach > xi_max:
                problems.append('x_extent + K = %g exceeds the truncation or the grid range' % reach)
        return {'gabor': problems} if problems else {}


class ScenarioRunSerializer(serializers.ModelSerializer):
    """
    Recorded runs as listed by the history command.
    """
    verdicts = serializers.SerializerMethodField()

    class Meta:
        model = models.ScenarioRun
        fields = ['id', 'name', 'passed', 'settings_hash', 'created', 'verdicts']

    def get_verdicts(self, obj):
        """
        Count of applicable verdicts and how many of them failed.
        """
        verdicts = [v for v in obj.report.get('verdicts', []) if v.get('applicable')]
        return {'applicable': len(verdicts), 'failed': sum(1 for v in verdicts if not v.get('passed'))}
