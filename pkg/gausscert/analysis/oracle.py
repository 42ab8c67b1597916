"""
Independent verification of witness results
Brute-force separable bounds for small mode counts and the Gaussian partial-transpose test
"""
import logging

import numpy as np
from scipy.linalg import cho_solve
from scipy.optimize import minimize

from gausscert.exceptions import InputError
from gausscert.models.gaussian_state import (
    PHYSICALITY_TOLERANCE, VACUUM_VARIANCE, CovarianceState, symplectic_eigenvalues
)

# Configure logging
logger = logging.getLogger(__name__)

MAX_ORACLE_MODES = 3
LOG_DIAGONAL_LIMIT = 20.0
MAX_POLISH_ROUNDS = 8
NELDER_MEAD_OPTIONS = {'xatol': 1e-12, 'fatol': 1e-14, 'maxiter': 20000, 'maxfev': 40000, 'adaptive': True}


class _BlockObjective:
    """
    <L> over product states whose blocks are pure and block-diagonal

    Each block is parameterized by the lower-triangular factor of c_xx (log diagonal);
    its p block sits on the uncertainty boundary c_pp = c_xx^{-1} / 4.
    """

    def __init__(self, op, partition):
        self.blocks = []
        for block in partition.blocks:
            index = np.ix_(block, block)
            self.blocks.append((len(block), op.m_xx[index], op.m_pp[index]))
        self.size = sum(d * (d + 1) // 2 for d, _, _ in self.blocks)

    def __call__(self, theta):
        total, offset = 0.0, 0
        for d, m_xx, m_pp in self.blocks:
            count = d * (d + 1) // 2
            factor = np.zeros((d, d))
            factor[np.tril_indices(d)] = theta[offset:offset + count]
            diagonal = np.clip(np.diag(factor), -LOG_DIAGONAL_LIMIT, LOG_DIAGONAL_LIMIT)
            factor[np.diag_indices(d)] = np.exp(diagonal)
            offset += count

            c_xx = factor @ factor.T
            c_pp = 0.25 * cho_solve((factor, True), np.eye(d))
            total += float(np.sum(m_xx * c_xx) + np.sum(m_pp * c_pp))
        return total


def brute_force_bound(op, partition, restarts=8, seed=0):
    """
    Direct-search minimum of <L> over separable states

    Args:
        op (TestOperator): Test operator
        partition (Partition): Partition with at most 3 modes
        restarts (int): Random Nelder-Mead starts
        seed (int): Seed of the random starts

    Returns:
        float: Smallest <L> found; agrees with the closed-form separable bound
    """
    if restarts < 1:
        raise InputError(f'restarts must be at least 1, got {restarts}')
    if partition.n > MAX_ORACLE_MODES:
        raise InputError(f'brute-force bound supports at most {MAX_ORACLE_MODES} modes, got {partition.n}')
    if op.n != partition.n:
        raise InputError(f'operator acts on {op.n} modes but the partition has {partition.n}')

    objective = _BlockObjective(op, partition)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        start = rng.normal(0.0, 0.5, objective.size)
        result = minimize(objective, start, method='Nelder-Mead', options=NELDER_MEAD_OPTIONS)
        if best is None or result.fun < best.fun:
            best = result

    # Restarting from the incumbent rebuilds a collapsed simplex
    for _ in range(MAX_POLISH_ROUNDS):
        polished = minimize(objective, best.x, method='Nelder-Mead', options=NELDER_MEAD_OPTIONS)
        improved = polished.fun < best.fun - 1e-15 * abs(best.fun)
        if polished.fun < best.fun:
            best = polished
        if not improved:
            break

    logger.debug(f'Brute-force bound on {partition.format()}: {best.fun:.12g}')
    return float(best.fun)


def partial_transpose(state, bipartition):
    """
    State with the p-quadratures of the second subsystem sign-flipped

    Args:
        state (CovarianceState): State
        bipartition (Partition): Two-block partition

    Returns:
        CovarianceState: Partially transposed covariances, error bars unchanged
    """
    if bipartition.k != 2:
        raise InputError(f'partial transpose needs a bipartition, got K={bipartition.k}')
    if bipartition.n != state.n_modes:
        raise InputError(f'partition has {bipartition.n} modes but the state has {state.n_modes}')
    signs = np.where(np.array(bipartition.rgs) == 1, -1.0, 1.0)
    flipped = signs[:, None] * state.c_pp * signs[None, :]
    return CovarianceState(state.n_modes, state.c_xx, flipped, state.sigma_xx, state.sigma_pp, state.label)


def pt_check(state, bipartition):
    """True iff the partially transposed state violates the uncertainty relation (NPT)"""
    transposed = partial_transpose(state, bipartition)
    smallest = symplectic_eigenvalues(transposed)[0]
    return bool(smallest < VACUUM_VARIANCE - PHYSICALITY_TOLERANCE)
