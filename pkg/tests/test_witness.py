"""
Unit tests for witness evaluation
Tests expectation values, separable bounds, error propagation and significance
"""
import numpy as np
import pytest

from gausscert.exceptions import InvalidOperatorError, ZeroErrorBarsError
from gausscert.models.gaussian_state import CovarianceState, direct_sum, vacuum_state
from gausscert.models.partition import Partition, enumerate_partitions, is_refinement, parse_partition
from gausscert.models.witness import TestOperator, expectation, separable_bound, sigma_l, significance
from tests.conftest import epr_operator_blocks, random_physical_state


def random_operator(n, rng):
    def block():
        factor = rng.standard_normal((n, n))
        return factor @ factor.T + 0.1 * np.eye(n)
    return TestOperator(n, block(), block())


def random_refinement_chain(n, rng):
    """Partitions from the single block down to single modes, each refining the previous"""
    blocks = [[index] for index in range(n)]
    chain = [Partition.from_blocks(blocks, n)]
    while len(blocks) > 1:
        first, second = sorted(rng.choice(len(blocks), size=2, replace=False))
        merged = blocks[first] + blocks.pop(second)
        blocks[first] = merged
        chain.append(Partition.from_blocks(blocks, n))
    return chain[::-1]


class TestTestOperator:
    """Test operator validation"""

    def test_identity(self):
        """Test the identity operator has trace 2N"""
        assert TestOperator.identity(3).trace == pytest.approx(6.0)

    def test_rejects_indefinite(self):
        """Test a block with a negative eigenvalue is rejected"""
        with pytest.raises(InvalidOperatorError):
            TestOperator(2, np.diag([1.0, -1.0]), np.eye(2))

    def test_rejects_asymmetric(self):
        """Test an asymmetric block is rejected"""
        with pytest.raises(InvalidOperatorError):
            TestOperator(2, [[1.0, 0.5], [0.0, 1.0]], np.eye(2))

    def test_rejects_near_singular(self):
        """Test eigenvalue ratios below 1e-12 are rejected"""
        with pytest.raises(InvalidOperatorError):
            TestOperator(2, np.diag([1.0, 1e-14]), np.eye(2))

    def test_normalized(self):
        """Test trace normalization"""
        op = TestOperator(2, 3 * np.eye(2), np.eye(2)).normalized()
        assert op.trace == pytest.approx(4.0)


class TestExpectation:
    """Test <L> = Tr(M C)"""

    def test_identity_on_vacuum(self):
        """Test identity on N-mode vacuum gives N"""
        assert expectation(TestOperator.identity(3), vacuum_state(3)) == pytest.approx(3.0)

    def test_squeezed_mode(self):
        """Test identity on a squeezed mode gives cosh(2r)"""
        state = CovarianceState.from_blocks([[np.exp(-2) / 2]], [[np.exp(2) / 2]])
        assert expectation(TestOperator.identity(1), state) == pytest.approx(3.7622, abs=1e-4)

    def test_linear_in_state(self, tmsv):
        """Test scaling the state scales the expectation"""
        op = random_operator(2, np.random.default_rng(1))
        assert expectation(op, tmsv.scaled(2.5)) == pytest.approx(2.5 * expectation(op, tmsv))


class TestSeparableBound:
    """Test the closed-form separable bound"""

    def test_scalar(self):
        """Test a single mode gives sqrt(a b)"""
        op = TestOperator(1, [[4.0]], [[9.0]])
        assert separable_bound(op, parse_partition('1', 1)) == pytest.approx(6.0)

    def test_identity_any_partition(self):
        """Test the identity gives N for every partition"""
        op = TestOperator.identity(4)
        for partition in enumerate_partitions(4):
            assert separable_bound(op, partition) == pytest.approx(4.0)

    def test_permutation_invariance(self):
        """Test relabelling modes consistently leaves the bound unchanged"""
        rng = np.random.default_rng(3)
        op = random_operator(3, rng)
        order = [2, 0, 1]
        permuted = TestOperator(3, op.m_xx[np.ix_(order, order)], op.m_pp[np.ix_(order, order)])
        original = parse_partition('1,2:3', 3)
        # Mode i of the permuted operator is mode order[i] of the original
        relabelled = parse_partition('1:2,3', 3)
        assert separable_bound(permuted, relabelled) == pytest.approx(separable_bound(op, original))

    def test_refinement_monotone(self):
        """Test finer partitions never lower the bound"""
        rng = np.random.default_rng(5)
        partitions = list(enumerate_partitions(4))
        for _ in range(60):
            op = random_operator(4, rng)
            coarse, fine = rng.choice(len(partitions), size=2)
            coarse, fine = partitions[coarse], partitions[fine]
            if is_refinement(fine, coarse):
                assert separable_bound(op, fine) >= separable_bound(op, coarse) * (1 - 1e-12)
        chain = [parse_partition(text, 4) for text in ('1,2,3,4', '1,2:3,4', '1,2:3:4', '1:2:3:4')]
        for _ in range(50):
            op = random_operator(4, rng)
            bounds = [separable_bound(op, partition) for partition in chain]
            assert all(b >= a * (1 - 1e-12) for a, b in zip(bounds, bounds[1:]))

    @pytest.mark.slow
    def test_random_refinement_chains(self):
        """Test a thousand random operator and refinement-chain samples have nondecreasing bounds"""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            n = int(rng.integers(2, 6))
            op = random_operator(n, rng)
            chain = random_refinement_chain(n, rng)
            assert all(is_refinement(fine, coarse) for coarse, fine in zip(chain, chain[1:]))
            bounds = [separable_bound(op, partition) for partition in chain]
            assert all(b >= a * (1 - 1e-12) for a, b in zip(bounds, bounds[1:])), [p.format() for p in chain]


class TestSigmaL:
    """Test error propagation"""

    def test_zero_errors(self):
        """Test vanishing error bars give zero"""
        state = CovarianceState.from_blocks([[0.5]], [[0.5]], rel_err=0.0, abs_err=0.0)
        assert sigma_l(TestOperator.identity(1), state) == 0.0

    def test_hand_value(self):
        """Test single mode with sigma 0.003 gives sqrt(2) * 0.003"""
        state = CovarianceState(1, [[0.5]], [[0.5]], [[0.003]], [[0.003]])
        assert sigma_l(TestOperator.identity(1), state) == pytest.approx(0.004243, abs=1e-6)

    def test_homogeneous(self, tmsv):
        """Test scaling the operator scales sigma(L)"""
        op = random_operator(2, np.random.default_rng(2))
        assert sigma_l(op.scaled(7.0), tmsv) == pytest.approx(7.0 * sigma_l(op, tmsv))


class TestSignificance:
    """Test the significance Sigma"""

    def test_epr_witness_detects_tmsv(self, tmsv):
        """Test the hand-built EPR witness gives <L> close to e^-2 and Sigma < 0"""
        op = TestOperator(2, *epr_operator_blocks())
        result = significance(op, tmsv, parse_partition('1:2', 2))
        assert result.expectation == pytest.approx(np.exp(-2.0), abs=1e-4)
        assert result.bound == pytest.approx(1.0, abs=1e-4)
        assert result.gap <= np.exp(-2.0) - 1 + 1e-3
        assert result.significance < 0
        assert result.entangled

    def test_vacuum_never_entangled(self):
        """Test vacuum gives Sigma >= 0 for random operators and all partitions"""
        rng = np.random.default_rng(8)
        state = vacuum_state(3)
        for partition in enumerate_partitions(3):
            for _ in range(10):
                result = significance(random_operator(3, rng), state, partition)
                assert result.significance >= 0
                assert not result.entangled

    def test_trivial_partition_never_entangled(self, tmsv):
        """Test K = 1 gives Sigma >= 0 on a physical state"""
        rng = np.random.default_rng(4)
        for _ in range(20):
            result = significance(random_operator(2, rng), tmsv, parse_partition('1,2', 2))
            assert result.significance >= 0

    def test_no_false_positives_on_direct_sums(self):
        """Test product states along Q are never detected on partitions coarser than Q"""
        rng = np.random.default_rng(9)
        partitions = list(enumerate_partitions(4))
        for _ in range(20):
            q = partitions[rng.integers(len(partitions))]
            state = direct_sum([random_physical_state(len(block), rng) for block in q.blocks],
                               blocks=[list(block) for block in q.blocks])
            for partition in partitions:
                if is_refinement(q, partition):
                    result = significance(random_operator(4, rng), state, partition)
                    assert result.gap >= -1e-9

    def test_significance_is_gap_over_sigma(self, comb_state):
        """Test the reported significance is exactly the stored gap divided by sigma(L)"""
        rng = np.random.default_rng(12)
        for partition in enumerate_partitions(4):
            result = significance(random_operator(4, rng), comb_state, partition)
            assert result.significance == result.gap / result.sigma_l

    def test_rounding_gap_snapped(self):
        """Test a gap at rounding level is stored as zero in both gap and significance"""
        result = significance(TestOperator.identity(3), vacuum_state(3), parse_partition('1,2,3', 3))
        assert abs(result.expectation - result.bound) <= 1e-12
        assert result.gap == 0.0
        assert result.significance == 0.0
        assert not result.entangled

    def test_scale_invariance(self, tmsv):
        """Test Sigma(t M) = Sigma(M)"""
        rng = np.random.default_rng(6)
        partition = parse_partition('1:2', 2)
        for _ in range(10):
            op = random_operator(2, rng)
            reference = significance(op, tmsv, partition).significance
            for factor in (1e-3, 1.0, 1e3):
                scaled = significance(op.scaled(factor), tmsv, partition).significance
                assert scaled == pytest.approx(reference, rel=1e-10, abs=1e-12)

    def test_zero_error_bars(self):
        """Test sigma(L) = 0 is reported as an input error"""
        state = CovarianceState.from_blocks([[0.5]], [[0.5]], rel_err=0.0, abs_err=0.0)
        with pytest.raises(ZeroErrorBarsError):
            significance(TestOperator.identity(1), state, parse_partition('1', 1))

    def test_result_dict(self, tmsv):
        """Test the serialized result uses report field names"""
        op = TestOperator(2, *epr_operator_blocks())
        payload = significance(op, tmsv, parse_partition('1:2', 2), added_noise=0.0).to_dict()
        assert payload['partition'] == '1:2'
        assert payload['k'] == 2
        assert set(payload) >= {'expectation', 'g_min', 'sigma_l', 'sigma', 'lambda'}
