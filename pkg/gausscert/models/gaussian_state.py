"""
Gaussian covariance state model
Implements loading, validation, physicality checks and white-noise regularization
"""
from dataclasses import dataclass, field
import hashlib
import json
import logging
import math
from pathlib import Path

import numpy as np
from scipy.linalg import block_diag

from gausscert.exceptions import AsymmetryError, InputError, StateFormatError, StorageError
from gausscert.utils.events import log_scan_event, sanitize_label
from gausscert.utils.linalg import symmetrize

# Configure logging
logger = logging.getLogger(__name__)

VACUUM_VARIANCE = 0.5
PHYSICALITY_TOLERANCE = 1e-9
REGULARIZATION_MARGIN = 1e-8
BISECTION_TOLERANCE = 1e-10
ASYMMETRY_TOLERANCE = 1e-12

DEFAULT_REL_ERR = 1e-3
DEFAULT_ABS_ERR = 1e-4

STATE_FILE_VERSION = 1


@dataclass(frozen=True)
class QuadratureConvention:
    """Units and ordering shared by every state: vacuum variance 1/2, all x before all p"""
    vacuum_variance: float = VACUUM_VARIANCE
    ordering: str = 'x1..xN,p1..pN'

    def describe(self):
        return f'vacuum variance {self.vacuum_variance:g} per quadrature, ordering ({self.ordering})'


CONVENTION = QuadratureConvention()


def default_error_bars(block, rel_err=DEFAULT_REL_ERR, abs_err=DEFAULT_ABS_ERR):
    """
    Error bars used when a state file carries none

    Args:
        block (ndarray): Covariance block
        rel_err (float): Relative error
        abs_err (float): Absolute error in variance units

    Returns:
        ndarray: rel_err * |C| + abs_err, elementwise
    """
    return rel_err * np.abs(np.asarray(block, dtype=float)) + abs_err


def _check_symmetric(matrix, name):
    diff = np.abs(matrix - matrix.T)
    scale = np.maximum(np.abs(matrix), np.abs(matrix.T))
    bad = np.triu(diff > ASYMMETRY_TOLERANCE * scale, 1)
    if np.any(bad):
        row, column = (int(i) for i in np.argwhere(bad)[0])
        raise AsymmetryError(
            f'{name} is not symmetric: {matrix[row, column]!r} vs {matrix[column, row]!r}',
            row=row, column=column
        )


def _as_block(values, n_modes, name):
    try:
        matrix = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise StateFormatError(f'{name} must be an array of {n_modes} rows of {n_modes} numbers ({e})')
    if matrix.shape != (n_modes, n_modes):
        raise StateFormatError(f'{name} has shape {matrix.shape}, expected ({n_modes}, {n_modes})')
    if not np.all(np.isfinite(matrix)):
        row, column = (int(i) for i in np.argwhere(~np.isfinite(matrix))[0])
        raise StateFormatError(f'{name} contains a non-finite value', row=row, column=column)
    return matrix


def _frozen(matrix):
    matrix = np.array(matrix, dtype=float)
    matrix.flags.writeable = False
    return matrix


@dataclass(frozen=True, eq=False)
class CovarianceState:
    """
    N-mode Gaussian state given by its x-x and p-p covariance blocks and their error bars

    Construction validates symmetry (relative tolerance 1e-12), strictly positive
    diagonals and nonnegative error bars, then stores read-only symmetrized arrays.
    """
    n_modes: int
    c_xx: np.ndarray
    c_pp: np.ndarray
    sigma_xx: np.ndarray
    sigma_pp: np.ndarray
    label: str = ''
    convention: QuadratureConvention = field(default=CONVENTION)

    def __post_init__(self):
        if not isinstance(self.n_modes, (int, np.integer)) or self.n_modes < 1:
            raise InputError(f'n_modes must be a positive integer, got {self.n_modes!r}')
        n = int(self.n_modes)
        blocks = {}
        for name in ('c_xx', 'c_pp', 'sigma_xx', 'sigma_pp'):
            matrix = _as_block(getattr(self, name), n, name)
            _check_symmetric(matrix, name)
            blocks[name] = symmetrize(matrix)

        for name in ('c_xx', 'c_pp'):
            diagonal = np.diag(blocks[name])
            if np.any(diagonal <= 0):
                index = int(np.argmax(diagonal <= 0))
                raise StateFormatError(f'{name} has a nonpositive diagonal entry', row=index, column=index)
        for name in ('sigma_xx', 'sigma_pp'):
            if np.any(blocks[name] < 0):
                row, column = (int(i) for i in np.argwhere(blocks[name] < 0)[0])
                raise StateFormatError(f'{name} contains a negative error bar', row=row, column=column)

        object.__setattr__(self, 'n_modes', n)
        object.__setattr__(self, 'label', sanitize_label(self.label))
        for name, matrix in blocks.items():
            object.__setattr__(self, name, _frozen(matrix))

    @classmethod
    def from_blocks(cls, c_xx, c_pp, sigma_xx=None, sigma_pp=None, label='',
                    rel_err=DEFAULT_REL_ERR, abs_err=DEFAULT_ABS_ERR):
        """
        Build a state, filling missing error bars from the default error model

        Args:
            c_xx (array_like): x-quadrature covariances
            c_pp (array_like): p-quadrature covariances
            sigma_xx (array_like): Optional error bars of c_xx
            sigma_pp (array_like): Optional error bars of c_pp
            label (str): Free text label
            rel_err (float): Relative error for missing error bars
            abs_err (float): Absolute error for missing error bars

        Returns:
            CovarianceState: Validated state
        """
        c_xx = np.asarray(c_xx, dtype=float)
        c_pp = np.asarray(c_pp, dtype=float)
        if c_xx.ndim != 2:
            raise StateFormatError(f'c_xx must be a square matrix, got shape {c_xx.shape}')
        if sigma_xx is None:
            sigma_xx = default_error_bars(c_xx, rel_err, abs_err)
        if sigma_pp is None:
            sigma_pp = default_error_bars(c_pp, rel_err, abs_err)
        return cls(c_xx.shape[0], c_xx, c_pp, sigma_xx, sigma_pp, label)

    def with_added_noise(self, noise):
        """Copy with noise * I added to both blocks; error bars unchanged"""
        identity = np.eye(self.n_modes)
        return CovarianceState(
            self.n_modes, self.c_xx + noise * identity, self.c_pp + noise * identity,
            self.sigma_xx, self.sigma_pp, self.label
        )

    def scaled(self, factor):
        """Copy with covariances and error bars multiplied by factor"""
        return CovarianceState(
            self.n_modes, factor * self.c_xx, factor * self.c_pp,
            abs(factor) * self.sigma_xx, abs(factor) * self.sigma_pp, self.label
        )

    def to_dict(self):
        return {
            'version': STATE_FILE_VERSION,
            'n_modes': self.n_modes,
            'convention': {'vacuum_variance': self.convention.vacuum_variance},
            'label': self.label,
            'c_xx': self.c_xx.tolist(),
            'c_pp': self.c_pp.tolist(),
            'sigma_xx': self.sigma_xx.tolist(),
            'sigma_pp': self.sigma_pp.tolist(),
        }


@dataclass(frozen=True)
class PhysicalityReport:
    """Symplectic spectrum of the input state and the white noise needed to make it physical"""
    symplectic_eigenvalues: tuple
    is_physical: bool
    added_noise: float

    @property
    def min_symplectic_eigenvalue(self):
        return self.symplectic_eigenvalues[0]

    def to_dict(self):
        return {
            'symplectic_eigenvalues': list(self.symplectic_eigenvalues),
            'is_physical': self.is_physical,
            'added_noise': self.added_noise,
        }


def _symplectic_spectrum(c_xx, c_pp):
    n = c_xx.shape[0]
    omega = np.block([
        [np.zeros((n, n)), np.identity(n)],
        [-np.identity(n), np.zeros((n, n))],
    ])
    # Eigenvalues of Omega C come in pairs +-i nu
    moduli = np.sort(np.abs(np.linalg.eigvals(omega @ block_diag(c_xx, c_pp))))
    return moduli[::2]


def symplectic_eigenvalues(state):
    """
    Symplectic eigenvalues of a block-diagonal covariance state

    Args:
        state (CovarianceState): State

    Returns:
        list: N nonnegative reals, ascending
    """
    return [float(value) for value in _symplectic_spectrum(state.c_xx, state.c_pp)]


def _blocks_positive(c_xx, c_pp):
    return np.linalg.eigvalsh(c_xx)[0] > 0 and np.linalg.eigvalsh(c_pp)[0] > 0


def _is_physical_blocks(c_xx, c_pp, threshold):
    if not _blocks_positive(c_xx, c_pp):
        return False
    return _symplectic_spectrum(c_xx, c_pp)[0] >= threshold


def is_physical(state):
    """True if every symplectic eigenvalue is at least the vacuum variance (tolerance 1e-9)"""
    return bool(_is_physical_blocks(state.c_xx, state.c_pp, VACUUM_VARIANCE - PHYSICALITY_TOLERANCE))


def physicality_report(state, added_noise=0.0):
    return PhysicalityReport(
        symplectic_eigenvalues=tuple(symplectic_eigenvalues(state)),
        is_physical=is_physical(state),
        added_noise=float(added_noise)
    )


def regularize(state):
    """
    Add the least uniform white noise that makes the state physical

    Args:
        state (CovarianceState): Possibly unphysical measured state

    Returns:
        tuple: (CovarianceState, PhysicalityReport) where the report describes the input
    """
    if is_physical(state):
        return state, physicality_report(state)

    target = VACUUM_VARIANCE + REGULARIZATION_MARGIN
    identity = np.eye(state.n_modes)

    def meets_target(noise):
        return _is_physical_blocks(state.c_xx + noise * identity, state.c_pp + noise * identity, target)

    lowest = float(min(np.linalg.eigvalsh(state.c_xx)[0], np.linalg.eigvalsh(state.c_pp)[0]))
    high = max(target - min(lowest, min(symplectic_eigenvalues(state))), BISECTION_TOLERANCE)
    while not meets_target(high):
        high *= 2.0
    low = 0.0
    while high - low > BISECTION_TOLERANCE:
        middle = 0.5 * (low + high)
        if meets_target(middle):
            high = middle
        else:
            low = middle

    regularized = state.with_added_noise(high)
    log_scan_event('STATE_REGULARIZED', label=state.label or None, added_noise=f'{high:.3e}')
    return regularized, physicality_report(state, added_noise=high)


def _apply_convention(matrices, declared, source):
    if declared is None:
        return matrices
    try:
        vacuum_variance = float(declared.get('vacuum_variance', VACUUM_VARIANCE))
    except (AttributeError, TypeError, ValueError):
        raise StateFormatError(f'{source}: convention must be an object with a numeric vacuum_variance')
    if not vacuum_variance > 0 or not math.isfinite(vacuum_variance):
        raise StateFormatError(f'{source}: vacuum_variance must be positive, got {vacuum_variance}')
    if vacuum_variance == VACUUM_VARIANCE:
        return matrices
    factor = VACUUM_VARIANCE / vacuum_variance
    logger.warning(f'{source} declares vacuum variance {vacuum_variance}; rescaling by {factor:g}')
    return {name: None if matrix is None else factor * np.asarray(matrix, dtype=float)
            for name, matrix in matrices.items()}


def state_from_mapping(payload, rel_err=DEFAULT_REL_ERR, abs_err=DEFAULT_ABS_ERR, source='state'):
    """
    Build a state from the JSON state-file object

    Args:
        payload (dict): Parsed JSON object
        rel_err (float): Relative error for missing error bars
        abs_err (float): Absolute error for missing error bars
        source (str): Name used in error messages

    Returns:
        CovarianceState: Validated state
    """
    if not isinstance(payload, dict):
        raise StateFormatError(f'{source}: top level must be a JSON object')
    version = payload.get('version', STATE_FILE_VERSION)
    if version != STATE_FILE_VERSION:
        raise StateFormatError(f'{source}: unsupported version {version!r}, expected {STATE_FILE_VERSION}')
    for key in ('n_modes', 'c_xx', 'c_pp'):
        if key not in payload:
            raise StateFormatError(f'{source}: missing required key {key!r}')
    n_modes = payload['n_modes']
    if isinstance(n_modes, bool) or not isinstance(n_modes, int) or n_modes < 1:
        raise StateFormatError(f'{source}: n_modes must be a positive integer, got {n_modes!r}')

    matrices = {
        name: None if payload.get(name) is None else _as_block(payload[name], n_modes, name)
        for name in ('c_xx', 'c_pp', 'sigma_xx', 'sigma_pp')
    }
    matrices = _apply_convention(matrices, payload.get('convention'), source)
    return CovarianceState.from_blocks(
        matrices['c_xx'], matrices['c_pp'], matrices['sigma_xx'], matrices['sigma_pp'],
        label=payload.get('label', ''), rel_err=rel_err, abs_err=abs_err
    )


def _parse_csv(text, source):
    blocks, current, header = [], [], {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith('#'):
            key, _, value = line.lstrip('#').partition(':')
            if value:
                header[key.strip().lower()] = value.strip()
            continue
        if not line:
            if current:
                blocks.append(current)
                current = []
            continue
        try:
            current.append([float(item) for item in line.split(',')])
        except ValueError:
            raise StateFormatError(f'{source}: non-numeric value', row=line_number)
    if current:
        blocks.append(current)

    if len(blocks) not in (2, 4):
        raise StateFormatError(f'{source}: expected 2 or 4 blocks separated by blank lines, found {len(blocks)}')
    payload = {
        'n_modes': len(blocks[0]),
        'c_xx': blocks[0],
        'c_pp': blocks[1],
        'label': header.get('label', ''),
    }
    if len(blocks) == 4:
        payload['sigma_xx'] = blocks[2]
        payload['sigma_pp'] = blocks[3]
    if 'vacuum_variance' in header:
        try:
            payload['convention'] = {'vacuum_variance': float(header['vacuum_variance'])}
        except ValueError:
            raise StateFormatError(f'{source}: vacuum_variance header is not a number')
    return payload


def _infer_format(path, file_format):
    if file_format:
        file_format = file_format.lower()
        if file_format not in ('json', 'csv'):
            raise InputError(f'Unsupported state format {file_format!r}')
        return file_format
    return 'csv' if Path(path).suffix.lower() == '.csv' else 'json'


def load_state(path, file_format=None, rel_err=DEFAULT_REL_ERR, abs_err=DEFAULT_ABS_ERR):
    """
    Load a covariance state from a JSON or CSV state file

    Args:
        path (str): File path
        file_format (str): 'json' or 'csv'; inferred from the suffix when omitted
        rel_err (float): Relative error for missing error bars
        abs_err (float): Absolute error for missing error bars

    Returns:
        CovarianceState: Validated state
    """
    file_format = _infer_format(path, file_format)
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise StorageError(f'Cannot read state file {path}: {e.strerror or e}')

    if file_format == 'json':
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise StateFormatError(f'{path}: invalid JSON ({e.msg})', row=e.lineno)
    else:
        payload = _parse_csv(text, path)

    state = state_from_mapping(payload, rel_err=rel_err, abs_err=abs_err, source=str(path))
    logger.info(f'Loaded {state.n_modes}-mode state from {path}')
    return state


def save_state(state, path, file_format=None):
    """
    Write a state file that load_state reads back exactly

    Args:
        state (CovarianceState): State to write
        path (str): Destination
        file_format (str): 'json' or 'csv'; inferred from the suffix when omitted
    """
    file_format = _infer_format(path, file_format)
    if file_format == 'json':
        text = json.dumps(state.to_dict(), indent=2) + '\n'
    else:
        lines = [
            f'# label: {state.label}',
            f'# vacuum_variance: {state.convention.vacuum_variance!r}',
            '# blocks: c_xx, c_pp, sigma_xx, sigma_pp',
        ]
        for matrix in (state.c_xx, state.c_pp, state.sigma_xx, state.sigma_pp):
            lines.extend(','.join(repr(float(value)) for value in row) for row in matrix)
            lines.append('')
        text = '\n'.join(lines)
    try:
        Path(path).write_text(text, encoding='utf-8')
    except OSError as e:
        raise StorageError(f'Cannot write state file {path}: {e.strerror or e}')
    logger.info(f'Wrote {state.n_modes}-mode state to {path}')


def vacuum_state(n_modes, rel_err=DEFAULT_REL_ERR, abs_err=DEFAULT_ABS_ERR, label='vacuum'):
    half_identity = VACUUM_VARIANCE * np.eye(n_modes)
    return CovarianceState.from_blocks(half_identity, half_identity, label=label,
                                       rel_err=rel_err, abs_err=abs_err)


def direct_sum(states, blocks=None, label='direct sum'):
    """
    Product state assembled from per-block states

    Args:
        states (list): CovarianceState per block
        blocks (list): Mode indices (0-based) each state occupies; consecutive when omitted

    Returns:
        CovarianceState: Block-structured state, separable along the given blocks
    """
    if blocks is None:
        blocks, start = [], 0
        for state in states:
            blocks.append(list(range(start, start + state.n_modes)))
            start += state.n_modes
    if len(blocks) != len(states):
        raise InputError('direct_sum needs one block of mode indices per state')
    n = sum(len(block) for block in blocks)
    if sorted(index for block in blocks for index in block) != list(range(n)):
        raise InputError('direct_sum blocks must cover modes 0..N-1 exactly once')

    assembled = {name: np.zeros((n, n)) for name in ('c_xx', 'c_pp', 'sigma_xx', 'sigma_pp')}
    for state, block in zip(states, blocks):
        if state.n_modes != len(block):
            raise InputError(f'state with {state.n_modes} modes cannot fill a block of {len(block)}')
        index = np.ix_(block, block)
        for name, matrix in assembled.items():
            matrix[index] = getattr(state, name)
    return CovarianceState(n, assembled['c_xx'], assembled['c_pp'],
                           assembled['sigma_xx'], assembled['sigma_pp'], label)


def state_digest(state):
    """SHA-256 over the matrices of a state"""
    digest = hashlib.sha256()
    for matrix in (state.c_xx, state.c_pp, state.sigma_xx, state.sigma_pp):
        digest.update(np.ascontiguousarray(matrix).tobytes())
    return digest.hexdigest()
