"""
Unit tests for mode partitions
Tests counting, enumeration order, parsing and refinement
"""
import time

import pytest

from gausscert.exceptions import CapacityError, InputError, PartitionFormatError
from gausscert.models.partition import (
    Partition, bell_number, count_partitions, enumerate_partitions, is_refinement,
    parse_partition, partition_index, stirling2
)


class TestCounting:
    """Test Bell and Stirling numbers"""

    @pytest.mark.parametrize('n, expected', [(1, 1), (4, 15), (6, 203), (10, 115975), (20, 51724158235372)])
    def test_bell_numbers(self, n, expected):
        """Test exact Bell numbers"""
        assert bell_number(n) == expected

    @pytest.mark.parametrize('n', [0, 21, -3])
    def test_bell_out_of_range(self, n):
        """Test n outside 1..20 is rejected"""
        with pytest.raises(InputError):
            bell_number(n)

    @pytest.mark.parametrize('n, expected', [(4, 7), (6, 31), (10, 511)])
    def test_bipartition_count(self, n, expected):
        """Test S(n, 2) = 2^(n-1) - 1"""
        assert stirling2(n, 2) == expected
        assert count_partitions(n, 2) == expected

    def test_stirling_rows_sum_to_bell(self):
        """Test Stirling numbers of one row add up to the Bell number"""
        assert sum(stirling2(8, k) for k in range(1, 9)) == bell_number(8)


class TestEnumeration:
    """Test canonical enumeration"""

    def test_three_modes(self):
        """Test the five partitions of three modes in restricted-growth order"""
        partitions = list(enumerate_partitions(3))
        assert [p.rgs for p in partitions] == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, 2)]
        assert {p.format() for p in partitions} == {'1,2,3', '1,2:3', '1,3:2', '1:2,3', '1:2:3'}

    @pytest.mark.parametrize('n, expected', [(4, 15), (6, 203)])
    def test_counts(self, n, expected):
        """Test enumeration yields each partition exactly once"""
        partitions = list(enumerate_partitions(n))
        assert len(partitions) == expected
        assert len({p.rgs for p in partitions}) == expected

    def test_ten_modes_fast(self):
        """Test all 115 975 partitions of ten modes enumerate in under five seconds"""
        start = time.perf_counter()
        count = sum(1 for _ in enumerate_partitions(10))
        assert count == 115975
        assert time.perf_counter() - start < 5.0

    def test_k_filter(self):
        """Test a block-count filter keeps exactly the bipartitions"""
        partitions = list(enumerate_partitions(4, k_filter=2))
        assert len(partitions) == 7
        assert all(p.k == 2 for p in partitions)

    def test_ten_mode_bipartitions(self):
        """Test ten modes have 511 bipartitions"""
        assert sum(1 for _ in enumerate_partitions(10, k_filter=2)) == 511

    def test_capacity_guard(self):
        """Test a full enumeration above fourteen modes needs a filter or streaming"""
        with pytest.raises(CapacityError):
            enumerate_partitions(15)

    def test_streaming_lifts_guard(self):
        """Test streaming enumeration starts above the guard"""
        first = next(iter(enumerate_partitions(15, streaming=True)))
        assert first.is_trivial

    def test_k_filter_out_of_range(self):
        """Test a block count above n is rejected"""
        with pytest.raises(InputError):
            enumerate_partitions(4, k_filter=5)

    def test_index_matches_order(self):
        """Test partition_index is the position in canonical order"""
        for position, partition in enumerate(enumerate_partitions(5)):
            assert partition_index(partition) == position


class TestParsing:
    """Test block notation"""

    def test_table_partition(self):
        """Test a ten-mode bipartition parses to K = 2"""
        partition = parse_partition('1,2,3,4,5:6,7,8,9,10', 10)
        assert partition.k == 2
        assert partition.rgs == (0,) * 5 + (1,) * 5

    def test_full_split(self):
        """Test singletons give K = n"""
        partition = parse_partition('1:2:3:4', 4)
        assert partition.k == 4
        assert partition.is_full_split

    def test_brace_notation(self):
        """Test brace notation gives the same partition"""
        assert parse_partition('{1,10}:{2,3,4,5,6,7,8,9}', 10) == parse_partition('1,10:2,3,4,5,6,7,8,9', 10)

    def test_block_order_irrelevant(self):
        """Test blocks are canonicalized by smallest member"""
        assert parse_partition('3:1,2', 3).rgs == (0, 0, 1)

    def test_format_round_trip(self):
        """Test format then parse is the identity"""
        for partition in enumerate_partitions(5):
            assert parse_partition(partition.format(), 5) == partition
            assert parse_partition(partition.braces(), 5) == partition

    def test_duplicate_index(self):
        """Test a duplicated mode names the index"""
        with pytest.raises(PartitionFormatError) as excinfo:
            parse_partition('1,1:2', 3)
        assert excinfo.value.index == 1

    def test_missing_index(self):
        """Test an uncovered mode names the index"""
        with pytest.raises(PartitionFormatError) as excinfo:
            parse_partition('1:2', 3)
        assert excinfo.value.index == 3

    def test_out_of_range(self):
        """Test a mode above n is rejected"""
        with pytest.raises(PartitionFormatError) as excinfo:
            parse_partition('1:2,4', 3)
        assert excinfo.value.index == 4

    @pytest.mark.parametrize('text', ['', '1::2', '1,a:2'])
    def test_malformed(self, text):
        """Test empty text, empty blocks and non-numeric modes are rejected"""
        with pytest.raises(PartitionFormatError):
            parse_partition(text, 2)


class TestRefinement:
    """Test the refinement order"""

    def test_full_split_refines(self):
        """Test {1}{2}{3} refines {12}{3}"""
        assert is_refinement(parse_partition('1:2:3', 3), parse_partition('1,2:3', 3))

    def test_incomparable(self):
        """Test {12}{3} does not refine {13}{2}"""
        assert not is_refinement(parse_partition('1,2:3', 3), parse_partition('1,3:2', 3))

    def test_reflexive(self):
        """Test every partition refines itself"""
        for partition in enumerate_partitions(4):
            assert is_refinement(partition, partition)

    def test_size_mismatch(self):
        """Test partitions of different sizes cannot be compared"""
        with pytest.raises(InputError):
            is_refinement(Partition(2, (0, 1)), Partition(3, (0, 1, 2)))

    def test_from_labels_canonical(self):
        """Test arbitrary labels map to a canonical string"""
        assert Partition.from_labels(['b', 'a', 'b']).rgs == (0, 1, 0)
