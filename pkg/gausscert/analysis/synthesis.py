"""
Synthetic frequency-comb states and supermode extraction
Builds physical states from supermode squeezing spectra and reads the spectra back
"""
from dataclasses import dataclass, field
import json
import logging
from pathlib import Path
try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from gausscert.exceptions import ConfigValidationError, InputError, StorageError
from gausscert.models.gaussian_state import (
    DEFAULT_ABS_ERR, DEFAULT_REL_ERR, PHYSICALITY_TOLERANCE, VACUUM_VARIANCE,
    CovarianceState, is_physical
)
from gausscert.utils.linalg import random_orthogonal, symmetrize
from gausscert.utils.validators import CombSpecForm, validate_mapping

# Configure logging
logger = logging.getLogger(__name__)


def db_to_variance(level_db):
    """Quadrature variance for a level in dB relative to vacuum"""
    return VACUUM_VARIANCE * 10.0 ** (np.asarray(level_db, dtype=float) / 10.0)


def variance_to_db(variance):
    return 10.0 * np.log10(np.asarray(variance, dtype=float) / VACUUM_VARIANCE)


@dataclass(frozen=True)
class CombSpec:
    """
    Recipe for a synthetic comb state

    squeezing_db and antisqueezing_db hold one level per supermode (negative = squeezed).
    Omitted antisqueezing means pure supermodes (antisqueezing = -squeezing).
    """
    n_modes: int
    squeezing_db: tuple
    antisqueezing_db: tuple = None
    mixing_seed: int = 0
    excess_noise: float = 0.0
    rel_err: float = DEFAULT_REL_ERR
    abs_err: float = DEFAULT_ABS_ERR
    label: str = ''

    def __post_init__(self):
        squeezing = tuple(float(value) for value in self.squeezing_db)
        if self.antisqueezing_db is None or len(self.antisqueezing_db) == 0:
            antisqueezing = tuple(-value for value in squeezing)
        else:
            antisqueezing = tuple(float(value) for value in self.antisqueezing_db)
        if len(squeezing) != self.n_modes or len(antisqueezing) != self.n_modes:
            raise InputError(f'comb recipe needs {self.n_modes} squeezing and antisqueezing levels')
        if self.excess_noise < 0:
            raise InputError(f'excess_noise must be nonnegative, got {self.excess_noise}')
        object.__setattr__(self, 'squeezing_db', squeezing)
        object.__setattr__(self, 'antisqueezing_db', antisqueezing)

        for mode, (v_x, v_p) in enumerate(zip(self.x_variances, self.p_variances), start=1):
            if v_x * v_p < VACUUM_VARIANCE ** 2 * (1.0 - PHYSICALITY_TOLERANCE):
                raise InputError(
                    f'supermode {mode} violates the uncertainty relation: '
                    f'{squeezing[mode - 1]:g} dB squeezing with {antisqueezing[mode - 1]:g} dB antisqueezing'
                )

    @property
    def x_variances(self):
        return db_to_variance(self.squeezing_db)

    @property
    def p_variances(self):
        return db_to_variance(self.antisqueezing_db)

    @classmethod
    def from_mapping(cls, payload, source='comb recipe'):
        data = validate_mapping(CombSpecForm, payload, source)
        error_model = data.get('error_model') or {}
        return cls(
            n_modes=int(data['n_modes']),
            squeezing_db=tuple(float(value) for value in data['squeezing_db']),
            antisqueezing_db=tuple(float(value) for value in data['antisqueezing_db']) or None,
            mixing_seed=int(data['mixing_seed'] if data['mixing_seed'] is not None else 0),
            excess_noise=float(data['excess_noise'] or 0.0),
            rel_err=float(DEFAULT_REL_ERR if error_model.get('rel_err') is None else error_model['rel_err']),
            abs_err=float(DEFAULT_ABS_ERR if error_model.get('abs_err') is None else error_model['abs_err']),
            label=data.get('label') or '',
        )

    def to_dict(self):
        return {
            'n_modes': self.n_modes,
            'squeezing_db': list(self.squeezing_db),
            'antisqueezing_db': list(self.antisqueezing_db),
            'mixing_seed': self.mixing_seed,
            'excess_noise': self.excess_noise,
            'error_model': {'rel_err': self.rel_err, 'abs_err': self.abs_err},
            'label': self.label,
        }


def load_comb_spec(path):
    """
    Read a comb recipe from JSON (or TOML when the suffix is .toml)

    Args:
        path (str): Recipe file

    Returns:
        CombSpec: Validated recipe
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise StorageError(f'Cannot read comb recipe {path}: {e.strerror or e}')
    try:
        if path.suffix.lower() == '.toml':
            payload = tomllib.loads(raw.decode('utf-8'))
        else:
            payload = json.loads(raw.decode('utf-8'))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ConfigValidationError({'file': [str(e)]}, str(path))
    return CombSpec.from_mapping(payload, str(path))


def generate_comb_state(spec):
    """
    Physical comb state: independent squeezed supermodes mixed by a seeded orthogonal basis

    Args:
        spec (CombSpec): Recipe

    Returns:
        CovarianceState: c_b = O diag(v_b) O^T + excess_noise I with default error bars
    """
    rng = np.random.default_rng(spec.mixing_seed)
    basis = random_orthogonal(spec.n_modes, rng)
    identity = np.eye(spec.n_modes)
    c_xx = symmetrize((basis * spec.x_variances) @ basis.T) + spec.excess_noise * identity
    c_pp = symmetrize((basis * spec.p_variances) @ basis.T) + spec.excess_noise * identity

    label = spec.label or f'synthetic comb ({spec.n_modes} modes, seed {spec.mixing_seed})'
    state = CovarianceState.from_blocks(c_xx, c_pp, label=label, rel_err=spec.rel_err, abs_err=spec.abs_err)
    if not is_physical(state):
        logger.warning(f'Generated state {label!r} failed the physicality check')
    return state


@dataclass(frozen=True)
class SupermodeReport:
    """Supermode squeezing spectrum, most squeezed first"""
    squeezing_db: tuple
    antisqueezing_db: tuple
    basis: np.ndarray = field(repr=False)
    pp_residue: float = 0.0

    def to_dict(self):
        return {
            'squeezing_db': list(self.squeezing_db),
            'antisqueezing_db': list(self.antisqueezing_db),
            'basis': self.basis.tolist(),
            'pp_residue': self.pp_residue,
        }


def extract_supermodes(state):
    """
    Supermodes from the eigenbasis of c_xx, with c_pp read in that basis

    Args:
        state (CovarianceState): Physical state

    Returns:
        SupermodeReport: Levels in dB relative to vacuum and the supermode basis
    """
    if not is_physical(state):
        raise InputError('supermode extraction needs a physical state; regularize it first')
    v_x, basis = np.linalg.eigh(state.c_xx)
    rotated = basis.T @ state.c_pp @ basis
    v_p = np.diag(rotated).copy()

    squeezing = variance_to_db(np.minimum(v_x, v_p))
    antisqueezing = variance_to_db(np.maximum(v_x, v_p))
    order = np.argsort(squeezing, kind='stable')

    off_diagonal = rotated - np.diag(np.diag(rotated))
    residue = float(np.max(np.abs(off_diagonal))) if state.n_modes > 1 else 0.0
    if residue > 1e-6 * float(np.max(np.abs(v_p))):
        logger.info(f'c_pp is not diagonal in the c_xx eigenbasis (residue {residue:.3e})')

    return SupermodeReport(
        squeezing_db=tuple(float(value) for value in squeezing[order]),
        antisqueezing_db=tuple(float(value) for value in antisqueezing[order]),
        basis=basis[:, order],
        pp_residue=residue,
    )
