"""
Set partitions of the mode set
Canonical restricted-growth encoding, enumeration, parsing and refinement
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache

from gausscert.exceptions import CapacityError, InputError, PartitionFormatError

MAX_BELL_MODES = 20
MAX_FULL_ENUMERATION_MODES = 14


@dataclass(frozen=True)
class Partition:
    """
    Division of modes {1..n} into K disjoint blocks

    Stored as a restricted growth string: rgs[j] is the block of mode j (0-based),
    rgs[0] = 0 and rgs[j] <= 1 + max(rgs[:j]). Blocks are ordered by smallest member.
    """
    n: int
    rgs: tuple

    def __post_init__(self):
        rgs = tuple(int(value) for value in self.rgs)
        if self.n < 1 or len(rgs) != self.n:
            raise InputError(f'restricted growth string of length {len(rgs)} does not match n={self.n}')
        highest = -1
        for position, value in enumerate(rgs):
            if value < 0 or value > highest + 1:
                raise InputError(f'not a canonical restricted growth string: {rgs} (position {position})')
            highest = max(highest, value)
        object.__setattr__(self, 'rgs', rgs)

    @classmethod
    def from_labels(cls, labels):
        """Canonical partition from arbitrary per-mode block labels"""
        relabel, rgs = {}, []
        for label in labels:
            if label not in relabel:
                relabel[label] = len(relabel)
            rgs.append(relabel[label])
        return cls(len(rgs), tuple(rgs))

    @classmethod
    def from_blocks(cls, blocks, n=None):
        """Canonical partition from 0-based blocks"""
        members = sorted(index for block in blocks for index in block)
        n = len(members) if n is None else n
        if members != list(range(n)):
            raise InputError(f'blocks {blocks} do not cover modes 0..{n - 1} exactly once')
        labels = [0] * n
        for label, block in enumerate(blocks):
            for index in block:
                labels[index] = label
        return cls.from_labels(labels)

    @cached_property
    def blocks(self):
        """0-based blocks, each ascending, ordered by smallest member"""
        grouped = [[] for _ in range(self.k)]
        for index, label in enumerate(self.rgs):
            grouped[label].append(index)
        return tuple(tuple(block) for block in grouped)

    @property
    def k(self):
        return max(self.rgs) + 1

    @property
    def is_trivial(self):
        return self.k == 1

    @property
    def is_full_split(self):
        return self.k == self.n

    def format(self):
        """1-based block notation, e.g. '1,10:2,3,4,5,6,7,8,9'"""
        return ':'.join(','.join(str(index + 1) for index in block) for block in self.blocks)

    def braces(self):
        """1-based brace notation, e.g. '{1,10}:{2,...}'"""
        return ':'.join('{' + ','.join(str(index + 1) for index in block) + '}' for block in self.blocks)

    def __str__(self):
        return self.format()


@lru_cache(maxsize=None)
def _bell_row(n):
    row = [1]
    for _ in range(n - 1):
        next_row = [row[-1]]
        for value in row:
            next_row.append(next_row[-1] + value)
        row = next_row
    return tuple(row)


def bell_number(n):
    """
    Exact Bell number from the Bell triangle

    Args:
        n (int): Set size, 1 <= n <= 20

    Returns:
        int: Number of partitions of an n-element set
    """
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= MAX_BELL_MODES:
        raise InputError(f'bell_number needs 1 <= n <= {MAX_BELL_MODES}, got {n!r}')
    return _bell_row(n)[-1]


@lru_cache(maxsize=None)
def stirling2(n, k):
    """Stirling number of the second kind S(n, k)"""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def count_partitions(n, k_filter=None):
    return bell_number(n) if k_filter is None else stirling2(n, k_filter)


def _restricted_growth_strings(n, k_filter):
    rgs = [0] * n

    def extend(position, highest):
        if position == n:
            if k_filter is None or highest + 1 == k_filter:
                yield tuple(rgs)
            return
        remaining = n - position
        for value in range(highest + 2):
            blocks = max(highest, value) + 1
            if k_filter is not None and (blocks > k_filter or blocks + remaining - 1 < k_filter):
                continue
            rgs[position] = value
            yield from extend(position + 1, max(highest, value))

    if k_filter is not None and k_filter < 1:
        return
    yield from extend(1, 0)


def enumerate_partitions(n, k_filter=None, streaming=False):
    """
    All partitions of n modes in lexicographic restricted-growth order

    Args:
        n (int): Number of modes
        k_filter (int): Only partitions with exactly this many blocks
        streaming (bool): Caller consumes lazily; lifts the full-enumeration guard

    Returns:
        iterator: Partition objects, each exactly once

    Raises:
        CapacityError: Full enumeration requested above the memory guard
    """
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= MAX_BELL_MODES:
        raise InputError(f'enumerate_partitions needs 1 <= n <= {MAX_BELL_MODES}, got {n!r}')
    if k_filter is not None and not 1 <= k_filter <= n:
        raise InputError(f'k filter must lie in [1, {n}], got {k_filter}')
    if k_filter is None and not streaming and n > MAX_FULL_ENUMERATION_MODES:
        raise CapacityError(
            f'{n} modes have {bell_number(n):,} partitions; above {MAX_FULL_ENUMERATION_MODES} modes '
            f'select a block count with --k or use streaming enumeration'
        )
    return (Partition(n, rgs) for rgs in _restricted_growth_strings(n, k_filter))


def partition_index(partition):
    """Position of a partition in the canonical enumeration order"""
    n, index = partition.n, 0
    # Number of completions of a prefix with given highest label and remaining length
    completions = _completion_table(n)
    highest = 0
    for position in range(1, n):
        value = partition.rgs[position]
        remaining = n - position - 1
        for smaller in range(value):
            index += completions[remaining][max(highest, smaller) + 1]
        highest = max(highest, value)
    return index


@lru_cache(maxsize=None)
def _completion_table(n):
    # table[r][b]: ways to fill r more positions when b blocks are already open
    table = [[1] * (n + 2)]
    for remaining in range(1, n + 1):
        row = [0] * (n + 2)
        for opened in range(n + 1):
            row[opened] = opened * table[remaining - 1][opened] + table[remaining - 1][opened + 1]
        table.append(row)
    return table


def parse_partition(text, n):
    """
    Parse colon-separated block notation

    Args:
        text (str): e.g. '1,10:2,3,4,5,6,7,8,9' or '{1,10}:{2,...}'; 1-based modes
        n (int): Number of modes

    Returns:
        Partition: Canonical partition
    """
    if not isinstance(text, str) or not text.strip():
        raise PartitionFormatError('empty partition text')
    labels = [None] * n
    for block_number, chunk in enumerate(text.split(':')):
        chunk = chunk.strip().strip('{}').strip()
        if not chunk:
            raise PartitionFormatError(f'empty block in {text!r}')
        for item in chunk.split(','):
            item = item.strip()
            try:
                mode = int(item)
            except ValueError:
                raise PartitionFormatError(f'invalid mode index {item!r} in {text!r}')
            if not 1 <= mode <= n:
                raise PartitionFormatError(f'mode index {mode} out of range 1..{n}', index=mode)
            if labels[mode - 1] is not None:
                raise PartitionFormatError(f'duplicate mode index {mode} in {text!r}', index=mode)
            labels[mode - 1] = block_number
    missing = [position + 1 for position, label in enumerate(labels) if label is None]
    if missing:
        raise PartitionFormatError(f'missing mode index {missing[0]} in {text!r}', index=missing[0])
    return Partition.from_labels(labels)


def is_refinement(fine, coarse):
    """True iff every block of fine lies inside a block of coarse"""
    if fine.n != coarse.n:
        raise InputError(f'cannot compare partitions of {fine.n} and {coarse.n} modes')
    owner = {}
    for fine_label, coarse_label in zip(fine.rgs, coarse.rgs):
        if owner.setdefault(fine_label, coarse_label) != coarse_label:
            return False
    return True
