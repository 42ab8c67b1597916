"""
Scan commands
Partition scans and per-K extremes tables
"""
import logging

import click

from gausscert.analysis.optimizer import GaConfig, load_ga_config
from gausscert.analysis.scanner import run_scan
from gausscert.commands.common import (
    deliver, dump_json, error_model_options, handles_errors, input_option, load_input_state,
    out_option, resolve_format, resolve_seed
)
from gausscert.models.partition import parse_partition
from gausscert.models.report import load_report, report_extremes
from gausscert.utils.emitters import FORMATS, render

# Configure logging
logger = logging.getLogger(__name__)


@click.command()
@input_option()
@click.option('--format', 'output_format', type=click.Choice(FORMATS), default=None,
              help='Report format (default: from the --out suffix, else text)')
@out_option
@click.option('--k', 'k_filter', type=int, default=None, help='Only partitions with K blocks')
@click.option('--partition', 'partition_texts', multiple=True,
              help='Evaluate only this partition, e.g. "1,2:3" (repeatable)')
@click.option('--top', type=int, default=None, help='Keep only the TOP most significant rows')
@click.option('--jobs', type=int, default=None, help='Worker processes (default: processor count)')
@click.option('--seed', type=int, default=None, help='Optimizer seed')
@click.option('--ga-config', 'ga_config_path', type=click.Path(dir_okay=False), default=None,
              help='Genetic algorithm settings (TOML or JSON)')
@click.option('--resume', is_flag=True, help='Skip partitions already stored in the checkpoint')
@error_model_options
@click.pass_obj
@handles_errors
def scan(app_config, input_path, output_format, out_path, k_filter, partition_texts, top, jobs, seed,
         ga_config_path, resume, rel_err, abs_err):
    """
    Optimize an entanglement witness for every partition and sort by significance.

    With --out, finished partitions are checkpointed next to the report so an
    interrupted scan can continue with --resume.
    """
    state = load_input_state(app_config, input_path, rel_err, abs_err)
    partitions = [parse_partition(text, state.n_modes) for text in partition_texts]

    if ga_config_path:
        ga_config, has_seed = load_ga_config(ga_config_path)
    else:
        ga_config, has_seed = GaConfig(), False
    ga_config = ga_config.with_seed(resolve_seed(seed, ga_config.seed if has_seed else None, app_config))

    checkpoint_path = f'{out_path}{app_config.CHECKPOINT_SUFFIX}' if out_path else None
    report = run_scan(
        state,
        ga_config,
        k_filter=k_filter,
        partitions=partitions,
        top=top,
        jobs=app_config.DEFAULT_JOBS if jobs is None else jobs,
        checkpoint_path=checkpoint_path,
        resume=resume,
    )
    deliver(render(report, resolve_format(output_format, out_path)), out_path)


@click.command()
@input_option('JSON report written by scan')
@click.option('--format', 'output_format', type=click.Choice(FORMATS), default=None,
              help='Table format (default: from the --out suffix, else text)')
@out_option
@click.pass_obj
@handles_errors
def extremes(app_config, input_path, output_format, out_path):
    """
    Lowest and highest significance for every block count K.
    """
    report = load_report(input_path)
    table = report_extremes(report)
    output_format = resolve_format(output_format, out_path)
    if output_format == 'json':
        deliver(dump_json(table.to_dict(orient='records')), out_path)
    elif output_format == 'csv':
        deliver(table.to_csv(index=False, lineterminator='\n'), out_path)
    else:
        text = table.to_string(index=False, float_format=lambda value: f'{value:.4f}')
        deliver(f'Added noise lambda: {report.added_noise:.6e}\n{text}\n', out_path)
