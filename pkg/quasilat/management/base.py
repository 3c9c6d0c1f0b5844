import logging
import os

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from quasilat.exceptions import QuasilatError
from quasilat.reporting import render_json

logger = logging.getLogger(__name__)

EXIT_VERDICT_FAILED = 1
EXIT_INVALID = 2


def diagnostic(exc):
    """
    Structured stderr payload for a failed command.
    """
    if isinstance(exc, QuasilatError):
        return exc.as_dict()
    if isinstance(exc, ValidationError):
        return {'code': 'invalid', 'detail': exc.detail, 'context': {}}
    return {'code': 'invalid', 'detail': str(exc), 'context': {}}


def float_list(value):
    return [float(item) for item in value.split(',') if item.strip()]


class ReportCommand(BaseCommand):
    """
    A command that computes one JSON report.

    Subclasses implement `report(**options)`; library and validation errors
    become exit code 2 with a JSON diagnostic, and the report goes to stdout
    or to --out.
    """

    def add_arguments(self, parser):
        parser.add_argument('--out', help='Write the JSON report to this file instead of stdout.')

    def add_subcommands(self, parser, dest='action'):
        """
        Subparsers that keep Django's usage-error handling on the command line.
        """
        return parser.add_subparsers(dest=dest, required=True)

    def add_subparser(self, subparsers, parser, name, **kwargs):
        sub = subparsers.add_parser(name, called_from_command_line=parser.called_from_command_line, **kwargs)
        sub.add_argument('--out', help='Write the JSON report to this file instead of stdout.')
        return sub

    def handle(self, *args, **options):
        try:
            data = self.report(**options)
        except (QuasilatError, ValidationError, ValueError) as exc:
            raise self.failure(exc)
        self.emit(data, options.get('out'))
        return None

    def failure(self, exc):
        payload = diagnostic(exc)
        logger.debug('command failed: %s', payload)
        return CommandError(render_json(payload, indent=None).decode('utf-8'), returncode=EXIT_INVALID)

    def emit(self, data, out=None):
        rendered = render_json(data)
        if out:
            directory = os.path.dirname(os.path.abspath(out))
            os.makedirs(directory, exist_ok=True)
            with open(out, 'wb') as fh:
                fh.write(rendered + b'\n')
            logger.info('report written to %s', out)
        else:
            self.stdout.write(rendered.decode('utf-8'))

    def report(self, **options):
        raise NotImplementedError('subclasses of ReportCommand must provide a report() method')
