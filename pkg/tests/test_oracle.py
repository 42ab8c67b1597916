"""
Unit tests for the verification oracles
Tests the brute-force separable bound and the partial-transpose check
"""
import numpy as np
import pytest

from gausscert.analysis.oracle import brute_force_bound, partial_transpose, pt_check
from gausscert.analysis.optimizer import optimize_witness
from gausscert.exceptions import InputError
from gausscert.models.gaussian_state import CovarianceState, direct_sum, vacuum_state
from gausscert.models.partition import enumerate_partitions, parse_partition
from gausscert.models.witness import TestOperator, separable_bound
from tests.conftest import two_mode_squeezed_state


def random_operator(n, rng):
    def block():
        factor = rng.standard_normal((n, n))
        return factor @ factor.T + 0.2 * np.eye(n)
    return TestOperator(n, block(), block())


def random_two_mode_state(rng):
    """Pure two-mode state: two squeezed supermodes mixed by a rotation, plus noise"""
    angle = rng.uniform(0, np.pi)
    rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    squeeze = np.exp(rng.uniform(-1.2, 1.2, 2))
    noise = rng.uniform(0.0, 0.05)
    c_xx = 0.5 * (rotation * squeeze) @ rotation.T + noise * np.eye(2)
    c_pp = 0.5 * (rotation / squeeze) @ rotation.T + noise * np.eye(2)
    return CovarianceState.from_blocks(c_xx, c_pp)


class TestBruteForceBound:
    """Test the direct-search separable bound"""

    def test_scalar_case(self):
        """Test m_xx = 4, m_pp = 9 on one mode gives 6"""
        op = TestOperator(1, [[4.0]], [[9.0]])
        assert brute_force_bound(op, parse_partition('1', 1), restarts=2) == pytest.approx(6.0, rel=1e-6)

    @pytest.mark.parametrize('n', [1, 2, 3])
    def test_identity(self, n):
        """Test the identity gives N for every partition"""
        op = TestOperator.identity(n)
        for partition in enumerate_partitions(n):
            assert brute_force_bound(op, partition, restarts=2) == pytest.approx(float(n), rel=1e-6)

    @pytest.mark.parametrize('n', [2, 3])
    def test_matches_closed_form(self, n):
        """Test random operators agree with the closed form on every partition"""
        rng = np.random.default_rng(100 + n)
        for _ in range(5):
            op = random_operator(n, rng)
            for partition in enumerate_partitions(n):
                closed = separable_bound(op, partition)
                brute = brute_force_bound(op, partition, restarts=3, seed=int(rng.integers(1000)))
                assert brute >= closed * (1 - 1e-6)
                assert brute == pytest.approx(closed, rel=1e-6)

    @pytest.mark.slow
    @pytest.mark.parametrize('n', [1, 2, 3])
    def test_matches_closed_form_many_operators(self, n):
        """Test a hundred random operators per mode count agree with the closed form on every partition"""
        rng = np.random.default_rng(700 + n)
        partitions = list(enumerate_partitions(n))
        for _ in range(100):
            op = random_operator(n, rng)
            for partition in partitions:
                closed = separable_bound(op, partition)
                brute = brute_force_bound(op, partition, restarts=3, seed=int(rng.integers(10_000)))
                assert brute == pytest.approx(closed, rel=1e-6), partition.format()

    def test_restarts_validated(self):
        """Test fewer than one restart is rejected"""
        with pytest.raises(InputError):
            brute_force_bound(TestOperator.identity(1), parse_partition('1', 1), restarts=0)

    def test_mode_limit(self):
        """Test more than three modes are rejected"""
        with pytest.raises(InputError):
            brute_force_bound(TestOperator.identity(4), parse_partition('1:2:3:4', 4))


class TestPartialTranspose:
    """Test the Gaussian PT criterion"""

    def test_tmsv_is_npt(self, tmsv):
        """Test the two-mode squeezed vacuum fails PT"""
        assert pt_check(tmsv, parse_partition('1:2', 2))

    def test_vacuum_is_ppt(self, vacuum):
        """Test the vacuum passes PT"""
        assert not pt_check(vacuum, parse_partition('1:2', 2))

    def test_product_of_squeezed_modes(self):
        """Test a product of squeezed modes passes PT"""
        squeezed = CovarianceState.from_blocks([[np.exp(-1) / 2]], [[np.exp(1) / 2]])
        assert not pt_check(direct_sum([squeezed, squeezed]), parse_partition('1:2', 2))

    def test_transposed_spectrum(self, tmsv):
        """Test the transposed TMSV has symplectic eigenvalue e^-2 / 2"""
        from gausscert.models.gaussian_state import symplectic_eigenvalues
        transposed = partial_transpose(tmsv, parse_partition('1:2', 2))
        assert symplectic_eigenvalues(transposed)[0] == pytest.approx(np.exp(-2.0) / 2)

    def test_requires_bipartition(self, tmsv):
        """Test K != 2 is rejected"""
        with pytest.raises(InputError):
            pt_check(tmsv, parse_partition('1,2', 2))
        with pytest.raises(InputError):
            pt_check(vacuum_state(3), parse_partition('1:2:3', 3))

    def test_npt_states_are_detected(self, fast_ga):
        """Test every NPT two-mode state gets Sigma < 0 from the optimizer"""
        rng = np.random.default_rng(21)
        partition = parse_partition('1:2', 2)
        checked = 0
        while checked < 20:
            state = random_two_mode_state(rng)
            if not pt_check(state, partition):
                continue
            checked += 1
            outcome = optimize_witness(state, partition, fast_ga)
            assert outcome.best.significance < 0
