"""
Pytest configuration and fixtures
"""
import json
import os
import sys

import numpy as np
import pytest
from click.testing import CliRunner

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from gausscert import create_app
from gausscert.analysis.optimizer import GaConfig
from gausscert.analysis.synthesis import CombSpec, generate_comb_state
from gausscert.models.gaussian_state import (
    BISECTION_TOLERANCE, REGULARIZATION_MARGIN, CovarianceState, vacuum_state
)

# Slack for floating-point rounding of lambda
NOISE_ROUNDING = 1e-12


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: large randomized checks (deselect with -m "not slow")')


def two_mode_squeezed_state(r=1.0, label='two-mode squeezed vacuum'):
    """x quadratures correlated, p quadratures anticorrelated"""
    cosh, sinh = np.cosh(2 * r), np.sinh(2 * r)
    c_xx = 0.5 * np.array([[cosh, sinh], [sinh, cosh]])
    c_pp = 0.5 * np.array([[cosh, -sinh], [-sinh, cosh]])
    return CovarianceState.from_blocks(c_xx, c_pp, label=label)


def epr_operator_blocks(eps=1e-6):
    m_xx = 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]]) + eps * np.eye(2)
    m_pp = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]]) + eps * np.eye(2)
    return m_xx, m_pp


def assert_added_noise(added_noise, scalar_solution):
    """Bisection stops inside [margin, margin + tolerance] above the exact noise"""
    excess = added_noise - scalar_solution
    assert REGULARIZATION_MARGIN - NOISE_ROUNDING <= excess <= REGULARIZATION_MARGIN + BISECTION_TOLERANCE + NOISE_ROUNDING


def random_covariance_blocks(n, rng, floor=0.05):
    """Random positive definite blocks, not necessarily physical"""
    blocks = []
    for _ in range(2):
        gaussian = rng.standard_normal((n, n))
        block = gaussian @ gaussian.T / n + floor * np.eye(n)
        blocks.append((block + block.T) / 2.0)
    return blocks


def random_physical_state(n, rng):
    """Random pure state squeezed and mixed by an orthogonal matrix, plus a little noise"""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    squeeze = np.exp(rng.uniform(-1.0, 1.0, n))
    c_xx = 0.5 * (q * squeeze) @ q.T + 0.01 * np.eye(n)
    c_pp = 0.5 * (q / squeeze) @ q.T + 0.01 * np.eye(n)
    return CovarianceState.from_blocks(c_xx, c_pp)


def write_state_file(path, c_xx, c_pp, **extra):
    payload = {'version': 1, 'n_modes': len(c_xx), 'c_xx': c_xx, 'c_pp': c_pp, **extra}
    path.write_text(json.dumps(payload), encoding='utf-8')
    return str(path)


@pytest.fixture(scope='session')
def app_config():
    """
    Testing configuration with logging set up
    """
    os.environ['GAUSSCERT_ENV'] = 'testing'
    return create_app('testing')


@pytest.fixture
def vacuum():
    """Two-mode vacuum"""
    return vacuum_state(2)


@pytest.fixture
def tmsv():
    """Two-mode squeezed vacuum with r = 1 and default error bars"""
    return two_mode_squeezed_state(1.0)


@pytest.fixture(scope='session')
def comb_spec():
    """
    Four supermodes: strongest -5.1 dB / +7.1 dB plus two weaker squeezed supermodes
    """
    return CombSpec(
        n_modes=4,
        squeezing_db=(-5.1, -3.0, -1.5, 0.0),
        antisqueezing_db=(7.1, 4.0, 2.0, 0.0),
        mixing_seed=11,
        excess_noise=0.01,
        label='comb fixture',
    )


@pytest.fixture(scope='session')
def comb_state(comb_spec):
    return generate_comb_state(comb_spec)


@pytest.fixture
def fast_ga():
    """
    Small GA budget for unit tests
    """
    return GaConfig(population=16, max_generations=30, stall_generations=10, seed=7)


@pytest.fixture
def runner():
    """
    Click runner with stderr kept apart from stdout
    """
    return CliRunner(mix_stderr=False)


@pytest.fixture
def tmsv_file(tmp_path):
    state = two_mode_squeezed_state(1.0)
    return write_state_file(tmp_path / 'tmsv.json', state.c_xx.tolist(), state.c_pp.tolist(),
                            label='tmsv')


@pytest.fixture
def fast_ga_file(tmp_path):
    path = tmp_path / 'ga.toml'
    path.write_text('population = 12\nmax_generations = 15\nstall_generations = 5\n', encoding='utf-8')
    return str(path)
