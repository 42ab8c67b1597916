"""
Shared command helpers
Error-to-exit-code mapping, seed resolution and common options
"""
import functools
import json
import logging
import os
import sys

import click

from gausscert.exceptions import GaussCertError, InputError
from gausscert.models.gaussian_state import load_state
from gausscert.utils.emitters import write_output

logger = logging.getLogger(__name__)

SEED_ENVVAR = 'GAUSS_CERTIFY_SEED'


def handles_errors(command):
    """
    Map gausscert errors to their exit codes with the message on stderr
    Unexpected exceptions are logged and reported as input errors
    """
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except GaussCertError as e:
            logger.debug(f'{type(e).__name__}: {e}')
            click.echo(f'Error: {e}', err=True)
            sys.exit(e.exit_code)
        except (click.exceptions.Exit, click.ClickException, SystemExit):
            raise
        except Exception as e:
            logger.exception(f'Unexpected error: {e}')
            click.echo(f'Error: unexpected failure ({type(e).__name__}: {e})', err=True)
            sys.exit(1)
    return wrapper


def input_option(help_text='Covariance state file (JSON or CSV)'):
    return click.option('--input', 'input_path', required=True,
                        type=click.Path(dir_okay=False), help=help_text)


def out_option(command):
    return click.option('--out', 'out_path', type=click.Path(dir_okay=False), default=None,
                        help='Write the report to this file instead of stdout')(command)


def error_model_options(command):
    command = click.option('--abs-err', type=float, default=None,
                           help='Absolute error for files without error bars')(command)
    command = click.option('--rel-err', type=float, default=None,
                           help='Relative error for files without error bars')(command)
    return command


def resolve_format(output_format, out_path, default='text'):
    """Explicit --format wins; otherwise the --out suffix decides"""
    if output_format:
        return output_format
    if out_path:
        suffix = os.path.splitext(out_path)[1].lower().lstrip('.')
        if suffix in ('json', 'csv'):
            return suffix
        if suffix == 'txt':
            return 'text'
    return default


def resolve_seed(cli_seed, config_seed, app_config):
    """
    Seed precedence: --seed, then the GA config file, then GAUSS_CERTIFY_SEED, then 0

    Args:
        cli_seed (int): Value of --seed or None
        config_seed (int): Seed set in the GA config file or None
        app_config (Config): Active configuration

    Returns:
        int: Seed for the run
    """
    if cli_seed is not None:
        return cli_seed
    if config_seed is not None:
        return config_seed
    value = os.environ.get(SEED_ENVVAR, '').strip()
    if value:
        try:
            return int(value)
        except ValueError:
            raise InputError(f'{SEED_ENVVAR} must be an integer, got {value!r}')
    return int(getattr(app_config, 'DEFAULT_SEED', 0))


def load_input_state(app_config, input_path, rel_err, abs_err):
    rel_err = app_config.DEFAULT_REL_ERR if rel_err is None else rel_err
    abs_err = app_config.DEFAULT_ABS_ERR if abs_err is None else abs_err
    if rel_err < 0 or abs_err < 0:
        raise InputError('--rel-err and --abs-err must be nonnegative')
    return load_state(input_path, rel_err=rel_err, abs_err=abs_err)


def deliver(text, out_path):
    """Write to --out or echo to stdout"""
    if out_path:
        write_output(text, out_path)
    else:
        click.echo(text, nl=False)


def dump_json(payload):
    return json.dumps(payload, indent=2, sort_keys=True) + '\n'
