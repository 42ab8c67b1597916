"""
Scan report model
Per-partition results, summary statistics and per-K extremes
"""
from dataclasses import dataclass, field
import json
import logging
from pathlib import Path

import pandas as pd

from gausscert.exceptions import StateFormatError, StorageError
from gausscert.models.gaussian_state import CONVENTION
from gausscert.models.partition import Partition, parse_partition, partition_index

logger = logging.getLogger(__name__)

REPORT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class PartitionResult:
    """Optimized witness of one partition, with the run metadata needed to reproduce it"""
    partition: Partition
    sigma: float
    g_min: float
    expectation: float
    sigma_l: float
    generations: int = 0
    evaluations: int = 0
    seed: int = 0

    @classmethod
    def from_outcome(cls, outcome):
        best = outcome.best
        return cls(
            partition=best.partition,
            sigma=float(best.significance),
            g_min=float(best.bound),
            expectation=float(best.expectation),
            sigma_l=float(best.sigma_l),
            generations=int(outcome.generations_run),
            evaluations=int(outcome.evaluations),
            seed=int(outcome.seed_used),
        )

    @property
    def k(self):
        return self.partition.k

    @property
    def entangled(self):
        return self.sigma < 0 and not self.partition.is_trivial

    @property
    def sort_key(self):
        return (self.sigma, partition_index(self.partition))

    def to_dict(self):
        return {
            'partition': self.partition.format(),
            'rgs': list(self.partition.rgs),
            'k': self.k,
            'sigma': self.sigma,
            'g_min': self.g_min,
            'expectation': self.expectation,
            'sigma_l': self.sigma_l,
            'entangled': self.entangled,
            'generations': self.generations,
            'evaluations': self.evaluations,
            'seed': self.seed,
        }

    @classmethod
    def from_dict(cls, payload):
        try:
            rgs = tuple(int(value) for value in payload['rgs'])
            return cls(
                partition=Partition(len(rgs), rgs),
                sigma=float(payload['sigma']),
                g_min=float(payload['g_min']),
                expectation=float(payload['expectation']),
                sigma_l=float(payload['sigma_l']),
                generations=int(payload.get('generations', 0)),
                evaluations=int(payload.get('evaluations', 0)),
                seed=int(payload.get('seed', 0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise StateFormatError(f'malformed result row ({e})')


def summarize(results):
    """
    Counts and per-K extremes over a set of partition results

    Args:
        results (list): PartitionResult objects

    Returns:
        dict: evaluated, entangled_count, beyond_bipartition_count, trivial_sigma and per_k
    """
    ordered = sorted(results, key=lambda result: result.sort_key)
    per_k = {}
    for result in ordered:
        group = per_k.setdefault(result.k, [])
        group.append(result)

    bipartition_sigmas = [result.sigma for result in per_k.get(2, [])]
    floor = min(bipartition_sigmas) if bipartition_sigmas else None
    beyond = 0
    if floor is not None:
        beyond = sum(1 for result in ordered if result.k > 2 and result.sigma < floor)
    trivial = [result.sigma for result in per_k.get(1, [])]

    extremes = {}
    for k in sorted(per_k):
        group = per_k[k]
        lowest = group[0]
        highest = min(group, key=lambda result: (-result.sigma, partition_index(result.partition)))
        extremes[str(k)] = {
            'count': len(group),
            'min_sigma': lowest.sigma,
            'min_partition': lowest.partition.format(),
            'max_sigma': highest.sigma,
            'max_partition': highest.partition.format(),
        }

    return {
        'evaluated': len(ordered),
        'entangled_count': sum(1 for result in ordered if result.entangled),
        'beyond_bipartition_count': beyond,
        'trivial_sigma': trivial[0] if trivial else None,
        'per_k': extremes,
    }


@dataclass(frozen=True)
class ScanReport:
    """Results of a partition scan, sorted by significance"""
    state_label: str
    n_modes: int
    added_noise: float
    config_digest: str
    state_digest: str
    results: tuple
    summary: dict = field(default_factory=dict)
    seed: int = 0
    convention: str = CONVENTION.describe()

    @classmethod
    def build(cls, state_label, n_modes, added_noise, config_digest, state_digest, results, seed=0, top=None):
        """Sort results, summarize all of them, then keep the top rows"""
        ordered = sorted(results, key=lambda result: result.sort_key)
        summary = summarize(ordered)
        if top is not None:
            ordered = ordered[:top]
        return cls(state_label, n_modes, float(added_noise), config_digest, state_digest,
                   tuple(ordered), summary, int(seed))

    def to_dict(self):
        return {
            'version': REPORT_FORMAT_VERSION,
            'state_label': self.state_label,
            'n_modes': self.n_modes,
            'convention': self.convention,
            'added_noise': self.added_noise,
            'seed': self.seed,
            'config_digest': self.config_digest,
            'state_digest': self.state_digest,
            'summary': self.summary,
            'results': [result.to_dict() for result in self.results],
        }

    @classmethod
    def from_dict(cls, payload):
        try:
            return cls(
                state_label=str(payload['state_label']),
                n_modes=int(payload['n_modes']),
                added_noise=float(payload['added_noise']),
                config_digest=str(payload['config_digest']),
                state_digest=str(payload['state_digest']),
                results=tuple(PartitionResult.from_dict(row) for row in payload['results']),
                summary=dict(payload['summary']),
                seed=int(payload.get('seed', 0)),
                convention=str(payload.get('convention', CONVENTION.describe())),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise StateFormatError(f'malformed scan report ({e})')

    def to_frame(self):
        """One row per result with the CSV column set"""
        columns = ['partition', 'k', 'sigma', 'g_min', 'expectation', 'sigma_l', 'lambda', 'seed']
        rows = [
            {
                'partition': result.partition.format(),
                'k': result.k,
                'sigma': result.sigma,
                'g_min': result.g_min,
                'expectation': result.expectation,
                'sigma_l': result.sigma_l,
                'lambda': self.added_noise,
                'seed': result.seed,
            }
            for result in self.results
        ]
        return pd.DataFrame(rows, columns=columns)


def report_extremes(report):
    """
    Lowest and highest significance for every block count

    K groups holding a single partition give one row; others give the minimum then the maximum.

    Args:
        report (ScanReport): Scan report

    Returns:
        pandas.DataFrame: Columns k, extreme, partition, sigma
    """
    rows = []
    for key in sorted(report.summary.get('per_k', {}), key=int):
        group = report.summary['per_k'][key]
        k = int(key)
        lowest = parse_partition(group['min_partition'], report.n_modes).braces()
        rows.append({'k': k, 'extreme': 'min', 'partition': lowest, 'sigma': group['min_sigma']})
        if group['count'] > 1:
            highest = parse_partition(group['max_partition'], report.n_modes).braces()
            rows.append({'k': k, 'extreme': 'max', 'partition': highest, 'sigma': group['max_sigma']})
    return pd.DataFrame(rows, columns=['k', 'extreme', 'partition', 'sigma'])


def load_report(path):
    """Read a JSON scan report written by the scan command"""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise StorageError(f'Cannot read report {path}: {e.strerror or e}')
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise StateFormatError(f'report {path} is not valid JSON: {e.msg}', row=e.lineno)
    logger.debug(f'Loaded report {path}')
    return ScanReport.from_dict(payload)
