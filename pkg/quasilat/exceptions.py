"""
Failure modes of the quasilat library.

Every error is a REST framework APIException: it carries a human readable
`detail` and a machine readable code, so that the management commands can
turn it into a structured diagnostic.
"""
from rest_framework.exceptions import APIException


class QuasilatError(APIException):
    """
    Base class for all library errors.
    Subclasses should provide `default_detail` and `default_code`.
    Keyword arguments are kept as diagnostic context.
    """
    default_detail = 'quasilat error.'
    default_code = 'error'

    def __init__(self, detail=None, code=None, **context):
        super().__init__(detail, code)
        self.context = context

    @property
    def code(self):
        return self.detail.code

    def as_dict(self):
        """
        The diagnostic printed by the command line tools.
        """
        return {'code': self.code, 'detail': str(self.detail), 'context': self.context}


class DegenerateLattice(QuasilatError):
    default_detail = 'degenerate lattice'
    default_code = 'degenerate_lattice'


class EnumerationBoundExceeded(QuasilatError):
    default_detail = 'enumeration bound exceeded'
    default_code = 'enumeration_bound_exceeded'


class NonInjectiveProjection(QuasilatError):
    default_detail = 'physical projection is not injective on the generated truncation'
    default_code = 'non_injective_projection'


class InvalidWindow(QuasilatError):
    default_detail = 'window must have strictly positive half-widths'
    default_code = 'invalid_window'


class EmptyPointSet(QuasilatError):
    default_detail = 'point set is empty'
    default_code = 'empty_point_set'


class InsufficientTruncation(QuasilatError):
    default_detail = 'insufficient truncation'
    default_code = 'insufficient_truncation'


class NotApproximatelyClosed(QuasilatError):
    default_detail = 'not approximately closed at this truncation'
    default_code = 'not_approximately_closed'


class ShiftOutOfRange(QuasilatError):
    default_detail = 'time-frequency shift out of range for the sampling grid'
    default_code = 'shift_out_of_range'


class TruncationTooSmall(QuasilatError):
    default_detail = 'truncation too small for test basis'
    default_code = 'truncation_too_small'


class NotMinimal(QuasilatError):
    default_detail = 'not minimal at tolerance'
    default_code = 'not_minimal'


class MalformedPointSet(QuasilatError):
    default_detail = 'malformed point set file'
    default_code = 'malformed_point_set'


class InvalidScenario(QuasilatError):
    default_detail = 'invalid scenario'
    default_code = 'invalid_scenario'


class FamilyTooLarge(QuasilatError):
    default_detail = 'coherent family exceeds MAX_POINTS'
    default_code = 'family_too_large'


class MalformedWaveform(QuasilatError):
    default_detail = 'malformed window file'
    default_code = 'malformed_waveform'
