"""
Oracle command
Spot checks of an optimized witness against brute force and the partial-transpose test
"""
import logging

import click

from gausscert.analysis.optimizer import GaConfig, load_ga_config, optimize_witness
from gausscert.analysis.oracle import MAX_ORACLE_MODES, brute_force_bound, pt_check
from gausscert.commands.common import (
    deliver, dump_json, error_model_options, handles_errors, input_option, load_input_state,
    out_option, resolve_format, resolve_seed
)
from gausscert.models.gaussian_state import regularize
from gausscert.models.partition import parse_partition

# Configure logging
logger = logging.getLogger(__name__)


@click.command()
@input_option()
@click.option('--partition', 'partition_text', required=True, help='Partition to check, e.g. "1:2"')
@click.option('--restarts', type=int, default=8, show_default=True, help='Brute-force random starts')
@click.option('--seed', type=int, default=None, help='Optimizer and brute-force seed')
@click.option('--ga-config', 'ga_config_path', type=click.Path(dir_okay=False), default=None,
              help='Genetic algorithm settings (TOML or JSON)')
@click.option('--format', 'output_format', type=click.Choice(['json', 'text']), default=None,
              help='Report format (default: text)')
@out_option
@error_model_options
@click.pass_obj
@handles_errors
def oracle(app_config, input_path, partition_text, restarts, seed, ga_config_path, output_format, out_path,
           rel_err, abs_err):
    """
    Cross-check one partition: closed-form versus brute-force bound (N <= 3)
    and the partial-transpose test (bipartitions).
    """
    state = load_input_state(app_config, input_path, rel_err, abs_err)
    partition = parse_partition(partition_text, state.n_modes)
    if ga_config_path:
        ga_config, has_seed = load_ga_config(ga_config_path)
    else:
        ga_config, has_seed = GaConfig(), False
    ga_config = ga_config.with_seed(resolve_seed(seed, ga_config.seed if has_seed else None, app_config))

    regularized, physicality = regularize(state)
    outcome = optimize_witness(regularized, partition, ga_config, added_noise=physicality.added_noise)
    payload = {
        'partition': partition.format(),
        'lambda': physicality.added_noise,
        'sigma': outcome.best.significance,
        'g_min': outcome.best.bound,
        'brute_force_bound': None,
        'relative_gap': None,
        'npt': None,
    }
    if state.n_modes <= MAX_ORACLE_MODES:
        brute = brute_force_bound(outcome.best_operator, partition, restarts=restarts, seed=ga_config.seed)
        payload['brute_force_bound'] = brute
        payload['relative_gap'] = (brute - outcome.best.bound) / abs(outcome.best.bound)
    if partition.k == 2:
        payload['npt'] = pt_check(regularized, partition)

    if resolve_format(output_format, out_path) == 'json':
        deliver(dump_json(payload), out_path)
        return
    lines = [
        f'Partition: {partition.braces()}',
        f"Added noise lambda: {payload['lambda']:.6e}",
        f"Optimized sigma: {payload['sigma']:.6f}",
        f"Closed-form bound g_min: {payload['g_min']:.10g}",
    ]
    if payload['brute_force_bound'] is None:
        lines.append(f'Brute-force bound: skipped (more than {MAX_ORACLE_MODES} modes)')
    else:
        lines.append(f"Brute-force bound: {payload['brute_force_bound']:.10g} "
                     f"(relative gap {payload['relative_gap']:.2e})")
    if payload['npt'] is None:
        lines.append('Partial transpose: skipped (not a bipartition)')
    else:
        lines.append(f"Partial transpose: {'NPT (entangled)' if payload['npt'] else 'PPT'}")
    deliver('\n'.join(lines) + '\n', out_path)
