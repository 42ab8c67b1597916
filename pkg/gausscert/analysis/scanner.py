"""
Partition scan driver
Regularizes a state once, optimizes a witness per partition in parallel and checkpoints results
"""
from concurrent.futures import ProcessPoolExecutor, as_completed
import json
import logging
import os
from pathlib import Path

from gausscert.exceptions import InputError, StorageError
from gausscert.models.gaussian_state import regularize, state_digest
from gausscert.models.partition import Partition, enumerate_partitions
from gausscert.models.report import PartitionResult, ScanReport
from gausscert.analysis.optimizer import GaConfig, optimize_witness
from gausscert.utils.events import log_scan_event

# Configure logging
logger = logging.getLogger(__name__)

CHUNK_SIZE = 16
CHECKPOINT_VERSION = 1


def _evaluate_chunk(state, config, added_noise, rgs_chunk):
    """Worker entry point: optimize every partition of a chunk"""
    rows = []
    for rgs in rgs_chunk:
        partition = Partition(len(rgs), rgs)
        outcome = optimize_witness(state, partition, config, added_noise=added_noise)
        rows.append(PartitionResult.from_outcome(outcome))
    return rows


def select_partitions(n_modes, k_filter=None, partitions=None):
    """
    Partitions a scan will evaluate, in canonical order without duplicates

    Args:
        n_modes (int): Number of modes
        k_filter (int): Only this block count
        partitions (list): Explicit Partition objects

    Returns:
        list: Partition objects
    """
    if partitions:
        chosen, seen = [], set()
        for partition in partitions:
            if partition.n != n_modes:
                raise InputError(f'partition {partition.format()} has {partition.n} modes, state has {n_modes}')
            if k_filter is not None and partition.k != k_filter:
                continue
            if partition.rgs not in seen:
                seen.add(partition.rgs)
                chosen.append(partition)
        if not chosen:
            raise InputError(f'no requested partition has K={k_filter}')
        return chosen
    return list(enumerate_partitions(n_modes, k_filter=k_filter))


class Checkpoint:
    """
    Append-only JSON-lines record of finished partitions

    The first line binds the file to a state digest and a configuration digest.
    Only the scanning process writes to it.
    """

    def __init__(self, path, state_hash, config_hash):
        self.path = Path(path)
        self.header = {
            'type': 'header',
            'version': CHECKPOINT_VERSION,
            'state_digest': state_hash,
            'config_digest': config_hash,
        }
        self._handle = None

    def load(self):
        """Completed results keyed by rgs; empty when no checkpoint exists"""
        if not self.path.exists():
            return {}
        try:
            lines = self.path.read_text(encoding='utf-8').splitlines()
        except OSError as e:
            raise StorageError(f'Cannot read checkpoint {self.path}: {e.strerror or e}')
        if not lines:
            return {}
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError:
            raise InputError(f'checkpoint {self.path} has no valid header')
        for key in ('state_digest', 'config_digest'):
            if header.get(key) != self.header[key]:
                raise InputError(
                    f'checkpoint {self.path} was written for a different state or configuration ({key} differs)'
                )

        completed = {}
        for number, line in enumerate(lines[1:], start=2):
            try:
                row = PartitionResult.from_dict(json.loads(line))
            except (json.JSONDecodeError, InputError):
                # An interrupted write leaves at most one partial line
                logger.warning(f'Ignoring unreadable checkpoint line {number} in {self.path}')
                continue
            completed[row.partition.rgs] = row
        return completed

    def open(self, append):
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            if append and self.path.exists() and self.path.stat().st_size > 0:
                torn = not self._ends_with_newline()
                self._handle = self.path.open('a', encoding='utf-8')
                if torn:
                    # Terminate the partial line so the next row starts on its own line
                    self._handle.write('\n')
            else:
                self._handle = self.path.open('w', encoding='utf-8')
                self._write(self.header)
        except OSError as e:
            raise StorageError(f'Cannot write checkpoint {self.path}: {e.strerror or e}')

    def _ends_with_newline(self):
        with self.path.open('rb') as handle:
            handle.seek(-1, os.SEEK_END)
            return handle.read(1) == b'\n'

    def record(self, result):
        self._write(result.to_dict())

    def _write(self, payload):
        try:
            self._handle.write(json.dumps(payload, sort_keys=True) + '\n')
            self._handle.flush()
        except OSError as e:
            raise StorageError(f'Cannot write checkpoint {self.path}: {e.strerror or e}')

    def close(self):
        if self._handle is not None:
            self._handle.close()
            self._handle = None


def _chunks(items, size):
    return [items[start:start + size] for start in range(0, len(items), size)]


def run_scan(state, config=None, k_filter=None, partitions=None, top=None, jobs=1,
             checkpoint_path=None, resume=False):
    """
    Optimize a witness for every selected partition of a state

    Args:
        state (CovarianceState): Measured state, regularized here
        config (GaConfig): Optimizer settings, seed included
        k_filter (int): Only partitions with this many blocks
        partitions (list): Explicit partitions to evaluate
        top (int): Keep only the most significant rows (summary covers all)
        jobs (int): Worker processes; 1 runs inline
        checkpoint_path (str): JSON-lines checkpoint file
        resume (bool): Reuse finished partitions from the checkpoint

    Returns:
        ScanReport: Results sorted by significance, then canonical order
    """
    config = config or GaConfig()
    if top is not None and top < 1:
        raise InputError(f'--top must be at least 1, got {top}')
    if jobs < 1:
        raise InputError(f'--jobs must be at least 1, got {jobs}')
    if resume and checkpoint_path is None:
        raise InputError('--resume needs a checkpoint, i.e. an --out file')

    selected = select_partitions(state.n_modes, k_filter, partitions)
    regularized, physicality = regularize(state)
    added_noise = physicality.added_noise
    state_hash = state_digest(state)
    config_hash = config.digest()

    completed = {}
    checkpoint = None
    if checkpoint_path is not None:
        checkpoint = Checkpoint(checkpoint_path, state_hash, config_hash)
        if resume:
            completed = checkpoint.load()
            log_scan_event('CHECKPOINT_RESUMED', path=str(checkpoint.path), completed=len(completed))
    wanted = {partition.rgs for partition in selected}
    results = [row for rgs, row in completed.items() if rgs in wanted]
    pending = [partition.rgs for partition in selected if partition.rgs not in completed]

    log_scan_event('SCAN_STARTED', label=state.label or None, n_modes=state.n_modes,
                   partitions=len(selected), pending=len(pending), jobs=jobs, added_noise=f'{added_noise:.3e}')

    if checkpoint is not None:
        checkpoint.open(append=resume)
    try:
        if jobs == 1 or len(pending) <= 1:
            for chunk in _chunks(pending, CHUNK_SIZE):
                _collect(_evaluate_chunk(regularized, config, added_noise, chunk), results, checkpoint)
        else:
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                futures = [
                    executor.submit(_evaluate_chunk, regularized, config, added_noise, chunk)
                    for chunk in _chunks(pending, CHUNK_SIZE)
                ]
                _drain(futures, results, checkpoint)
    finally:
        if checkpoint is not None:
            checkpoint.close()

    report = ScanReport.build(
        state_label=state.label,
        n_modes=state.n_modes,
        added_noise=added_noise,
        config_digest=config_hash,
        state_digest=state_hash,
        results=results,
        seed=config.seed,
        top=top,
    )
    log_scan_event('SCAN_FINISHED', evaluated=report.summary['evaluated'],
                   entangled=report.summary['entangled_count'])
    return report


def _collect(rows, results, checkpoint):
    for row in rows:
        results.append(row)
        if checkpoint is not None:
            checkpoint.record(row)
        log_scan_event('PARTITION_DONE', level=logging.DEBUG, partition=row.partition.format(),
                       sigma=f'{row.sigma:.4f}')


def _drain(futures, results, checkpoint):
    """
    Collect chunk results as they finish

    On the first failure the queued chunks are cancelled and the error propagates.
    Chunks that had already finished are still recorded.
    """
    collected = set()
    try:
        for future in as_completed(futures):
            rows = future.result()
            collected.add(future)
            _collect(rows, results, checkpoint)
    except BaseException:
        cancelled = sum(future.cancel() for future in futures)
        log_scan_event('SCAN_ABORTED', level=logging.WARNING, cancelled_chunks=cancelled)
        for future in futures:
            if future in collected or not future.done() or future.cancelled():
                continue
            if future.exception() is None:
                _collect(future.result(), results, checkpoint)
        raise
