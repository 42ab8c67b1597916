"""
Entanglement test evaluation
Expectation value, separable bound, propagated error and significance of a test operator
"""
from dataclasses import dataclass
import math

import numpy as np

from gausscert.exceptions import InputError, InvalidOperatorError, ZeroErrorBarsError
from gausscert.models.partition import Partition
from gausscert.utils.linalg import nuclear_norm, psd_sqrt, symmetrize

PD_RELATIVE_TOLERANCE = 1e-12
# Gaps this small relative to <L> are rounding noise of the bound
GAP_RELATIVE_TOLERANCE = 1e-10


def _validated_block(matrix, n, name):
    matrix = np.array(matrix, dtype=float)
    if matrix.shape != (n, n):
        raise InvalidOperatorError(f'{name} has shape {matrix.shape}, expected ({n}, {n})')
    if not np.all(np.isfinite(matrix)):
        raise InvalidOperatorError(f'{name} contains non-finite entries')
    scale = max(float(np.max(np.abs(matrix))), 1.0)
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-10 * scale):
        raise InvalidOperatorError(f'{name} is not symmetric')
    matrix = symmetrize(matrix)
    eigvals = np.linalg.eigvalsh(matrix)
    if eigvals[-1] <= 0 or eigvals[0] < PD_RELATIVE_TOLERANCE * eigvals[-1]:
        raise InvalidOperatorError(
            f'{name} is not positive definite (eigenvalues {eigvals[0]:.3e} .. {eigvals[-1]:.3e})'
        )
    matrix.flags.writeable = False
    return matrix


@dataclass(frozen=True, eq=False)
class TestOperator:
    """
    Quadratic test operator L = Tr(M xi xi^T) with M = diag(m_xx, m_pp) positive definite
    """
    __test__ = False

    n: int
    m_xx: np.ndarray
    m_pp: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise InvalidOperatorError(f'operator dimension must be positive, got {self.n}')
        object.__setattr__(self, 'm_xx', _validated_block(self.m_xx, self.n, 'm_xx'))
        object.__setattr__(self, 'm_pp', _validated_block(self.m_pp, self.n, 'm_pp'))

    @classmethod
    def identity(cls, n):
        return cls(n, np.eye(n), np.eye(n))

    @property
    def trace(self):
        return float(np.trace(self.m_xx) + np.trace(self.m_pp))

    def scaled(self, factor):
        if factor <= 0:
            raise InvalidOperatorError(f'scale factor must be positive, got {factor}')
        return TestOperator(self.n, factor * self.m_xx, factor * self.m_pp)

    def normalized(self, total=None):
        """Copy rescaled so that Tr(m_xx + m_pp) = total (default 2N)"""
        total = 2.0 * self.n if total is None else total
        return self.scaled(total / self.trace)

    def to_dict(self):
        return {'n': self.n, 'm_xx': self.m_xx.tolist(), 'm_pp': self.m_pp.tolist()}


@dataclass(frozen=True)
class WitnessResult:
    """Outcome of one entanglement test on one partition"""
    expectation: float
    bound: float
    sigma_l: float
    significance: float
    partition: Partition
    added_noise: float = 0.0
    # <L> - g_min, zero when the two agree to rounding; significance == gap / sigma_l
    gap: float = None

    def __post_init__(self):
        if self.gap is None:
            object.__setattr__(self, 'gap', self.expectation - self.bound)

    @property
    def entangled(self):
        # The one-block partition is never reported as entangled
        return self.significance < 0 and not self.partition.is_trivial

    def to_dict(self):
        return {
            'partition': self.partition.format(),
            'rgs': list(self.partition.rgs),
            'k': self.partition.k,
            'expectation': self.expectation,
            'g_min': self.bound,
            'sigma_l': self.sigma_l,
            'sigma': self.significance,
            'lambda': self.added_noise,
            'entangled': self.entangled,
        }


def _check_dimensions(op, n, what):
    if op.n != n:
        raise InputError(f'operator acts on {op.n} modes but the {what} has {n}')


def expectation(op, state):
    """<L> = Tr(m_xx c_xx) + Tr(m_pp c_pp)"""
    _check_dimensions(op, state.n_modes, 'state')
    return float(np.einsum('ij,ji->', op.m_xx, state.c_xx) + np.einsum('ij,ji->', op.m_pp, state.c_pp))


def separable_bound(op, partition):
    """
    Minimum of <L> over states separable with respect to the partition

    For every block I_k the contribution is Tr[(m_pp^{1/2} m_xx m_pp^{1/2})^{1/2}]
    evaluated on the principal submatrices of the block.

    Args:
        op (TestOperator): Test operator
        partition (Partition): Mode partition

    Returns:
        float: Separable bound g_min > 0
    """
    _check_dimensions(op, partition.n, 'partition')
    bound = 0.0
    for block in partition.blocks:
        index = np.ix_(block, block)
        name = 'block {' + ','.join(str(mode + 1) for mode in block) + '}'
        root_xx = psd_sqrt(op.m_xx[index], name)
        root_pp = psd_sqrt(op.m_pp[index], name)
        # Tr[(m_pp^{1/2} m_xx m_pp^{1/2})^{1/2}] is the nuclear norm of m_xx^{1/2} m_pp^{1/2}
        bound += nuclear_norm(root_xx @ root_pp)
    return bound


def sigma_l(op, state):
    """Propagated standard deviation of <L>, treating every covariance entry as independent"""
    _check_dimensions(op, state.n_modes, 'state')
    variance = (np.sum(op.m_xx ** 2 * state.sigma_xx.T ** 2)
                + np.sum(op.m_pp ** 2 * state.sigma_pp.T ** 2))
    return float(math.sqrt(variance))


def significance(op, state, partition, added_noise=0.0):
    """
    Significance (<L> - g_min) / sigma(L) of a test operator on a partition

    Args:
        op (TestOperator): Test operator
        state (CovarianceState): Regularized state
        partition (Partition): Mode partition
        added_noise (float): White noise added during regularization

    Returns:
        WitnessResult: Assembled result; negative significance certifies entanglement
    """
    _check_dimensions(op, partition.n, 'partition')
    spread = sigma_l(op, state)
    if spread <= 0:
        raise ZeroErrorBarsError(
            'sigma(L) is zero: supply error bars in the state file or use --rel-err/--abs-err defaults'
        )
    value = expectation(op, state)
    bound = separable_bound(op, partition)
    gap = value - bound
    if abs(gap) <= GAP_RELATIVE_TOLERANCE * max(abs(value), abs(bound)):
        gap = 0.0
    return WitnessResult(
        expectation=value,
        bound=bound,
        sigma_l=spread,
        significance=gap / spread,
        partition=partition,
        added_noise=float(added_noise),
        gap=gap,
    )
