"""
Command-line interface for gausscert
Certifies multipartite entanglement of Gaussian states from covariance data

Usage:
    gausscert check --input state.json
    gausscert scan --input state.json --out report.json
    gausscert extremes --input report.json
    gausscert synth --input comb.json --out state.json
    gausscert supermodes --input state.json
    gausscert oracle --input state.json --partition "1:2"
"""
import contextlib

import click

from config import config
from gausscert import __version__, create_app
from gausscert.commands import check, extremes, oracle, scan, supermodes, synth
from gausscert.exceptions import InputError


class GaussCertGroup(click.Group):
    """Command group whose usage errors exit with the input-error code"""

    def make_context(self, info_name, args, parent=None, **extra):
        with _input_error_exit():
            return super().make_context(info_name, args, parent=parent, **extra)

    def invoke(self, ctx):
        with _input_error_exit():
            return super().invoke(ctx)


@contextlib.contextmanager
def _input_error_exit():
    try:
        yield
    except click.UsageError as e:
        e.exit_code = InputError.exit_code
        raise


@click.group(cls=GaussCertGroup)
@click.version_option(version=__version__, prog_name='gausscert')
@click.option('--env', 'config_name', envvar='GAUSSCERT_ENV', default='development', show_default=True,
              type=click.Choice(sorted(config)), help='Configuration environment')
@click.pass_context
def cli(ctx, config_name):
    """
    Gaussian multipartite entanglement certification.

    Exit codes: 0 success, 1 input error, 2 capacity error, 3 I/O error.
    """
    ctx.obj = create_app(config_name)


# Register commands
cli.add_command(check)
cli.add_command(scan)
cli.add_command(extremes)
cli.add_command(synth)
cli.add_command(supermodes)
cli.add_command(oracle)
