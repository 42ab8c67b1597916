"""
Report emission
Renders scan reports as JSON, CSV (pandas) or a plain-text summary
"""
import json
import logging
from pathlib import Path

from gausscert.exceptions import InputError, StorageError

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv', 'text')


def render_json(report):
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + '\n'


def render_csv(report):
    return report.to_frame().to_csv(index=False, lineterminator='\n')


def render_text(report):
    """Human summary followed by every row, most significant first"""
    summary = report.summary
    lines = [
        f'State: {report.state_label or "(unlabelled)"} ({report.n_modes} modes)',
        f'Convention: {report.convention}',
        f'Added noise lambda: {report.added_noise:.6e}',
        f'Seed: {report.seed}',
        f"Partitions evaluated: {summary.get('evaluated', len(report.results))}",
        f"Entangled (sigma < 0): {summary.get('entangled_count', 0)}",
        f"More significant than every bipartition: {summary.get('beyond_bipartition_count', 0)}",
        '',
    ]
    frame = report.to_frame()[['sigma', 'k', 'partition']]
    if frame.empty:
        lines.append('(no rows)')
    else:
        lines.append(frame.to_string(index=False, float_format=lambda value: f'{value:.4f}'))
    return '\n'.join(lines) + '\n'


def render(report, output_format):
    renderers = {'json': render_json, 'csv': render_csv, 'text': render_text}
    if output_format not in renderers:
        raise InputError(f'unknown output format {output_format!r}; choose from {", ".join(FORMATS)}')
    return renderers[output_format](report)


def write_output(text, path):
    """Write rendered output, raising StorageError on I/O failure"""
    path = Path(path)
    try:
        path.write_text(text, encoding='utf-8')
    except OSError as e:
        raise StorageError(f'Cannot write {path}: {e.strerror or e}')
    logger.info(f'Wrote {path}')


def emit(report, output_format='json', out=None):
    """
    Render a report and write it to a file when one is given

    Args:
        report (ScanReport): Scan report
        output_format (str): json, csv or text
        out (str): Destination file; None returns the text only

    Returns:
        str: Rendered report
    """
    text = render(report, output_format)
    if out is not None:
        write_output(text, out)
    return text
