"""
State commands
Physicality check, synthetic comb generation and supermode extraction
"""
import logging

import click
import pandas as pd

from gausscert.analysis.synthesis import extract_supermodes, generate_comb_state, load_comb_spec
from gausscert.commands.common import (
    deliver, dump_json, error_model_options, handles_errors, input_option, load_input_state,
    out_option, resolve_format
)
from gausscert.models.gaussian_state import CONVENTION, regularize, save_state

# Configure logging
logger = logging.getLogger(__name__)


@click.command()
@input_option()
@click.option('--format', 'output_format', type=click.Choice(['json', 'text']), default=None,
              help='Report format (default: text)')
@out_option
@error_model_options
@click.pass_obj
@handles_errors
def check(app_config, input_path, output_format, out_path, rel_err, abs_err):
    """
    Report the symplectic spectrum and the white noise lambda needed for physicality.
    """
    state = load_input_state(app_config, input_path, rel_err, abs_err)
    _, report = regularize(state)
    payload = {
        'label': state.label,
        'n_modes': state.n_modes,
        'convention': CONVENTION.describe(),
        **report.to_dict(),
        'lambda': report.added_noise,
    }
    if resolve_format(output_format, out_path) == 'json':
        deliver(dump_json(payload), out_path)
        return

    eigenvalues = ', '.join(f'{value:.6f}' for value in report.symplectic_eigenvalues)
    lines = [
        f'State: {state.label or "(unlabelled)"} ({state.n_modes} modes)',
        f'Convention: {CONVENTION.describe()}',
        f'Symplectic eigenvalues: {eigenvalues}',
        f'Physical: {"yes" if report.is_physical else "no"}',
        f'Added noise lambda: {report.added_noise:.6e}',
    ]
    deliver('\n'.join(lines) + '\n', out_path)


@click.command()
@input_option('Comb recipe (JSON or TOML)')
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False),
              help='State file to write (.json or .csv)')
@click.option('--format', 'output_format', type=click.Choice(['json', 'csv']), default=None,
              help='State file format (default: from the --out suffix)')
@click.pass_obj
@handles_errors
def synth(app_config, input_path, out_path, output_format):
    """
    Generate a synthetic frequency-comb state from supermode squeezing levels.
    """
    spec = load_comb_spec(input_path)
    state = generate_comb_state(spec)
    save_state(state, out_path, output_format)
    click.echo(f'Wrote {spec.n_modes}-mode state to {out_path}', err=True)


@click.command()
@input_option()
@click.option('--format', 'output_format', type=click.Choice(['json', 'csv', 'text']), default=None,
              help='Report format (default: text)')
@out_option
@error_model_options
@click.pass_obj
@handles_errors
def supermodes(app_config, input_path, output_format, out_path, rel_err, abs_err):
    """
    Extract supermode squeezing and antisqueezing levels (dB relative to vacuum).
    """
    state = load_input_state(app_config, input_path, rel_err, abs_err)
    regularized, physicality = regularize(state)
    report = extract_supermodes(regularized)
    output_format = resolve_format(output_format, out_path)

    if output_format == 'json':
        payload = {**report.to_dict(), 'lambda': physicality.added_noise}
        deliver(dump_json(payload), out_path)
        return

    frame = pd.DataFrame({
        'supermode': range(1, state.n_modes + 1),
        'squeezing_db': report.squeezing_db,
        'antisqueezing_db': report.antisqueezing_db,
    })
    if output_format == 'csv':
        deliver(frame.to_csv(index=False, lineterminator='\n'), out_path)
        return
    text = frame.to_string(index=False, float_format=lambda value: f'{value:.4f}')
    lines = [
        f'State: {state.label or "(unlabelled)"} ({state.n_modes} modes)',
        f'Added noise lambda: {physicality.added_noise:.6e}',
        f'c_pp residue in the supermode basis: {report.pp_residue:.3e}',
        '',
        text,
    ]
    deliver('\n'.join(lines) + '\n', out_path)
