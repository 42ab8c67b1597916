"""
Models package initialization
"""
from .gaussian_state import CovarianceState, PhysicalityReport, load_state, regularize, save_state
from .partition import Partition, bell_number, enumerate_partitions, parse_partition
from .report import PartitionResult, ScanReport, load_report, report_extremes
from .witness import TestOperator, WitnessResult, separable_bound, significance

__all__ = [
    'CovarianceState', 'PhysicalityReport', 'load_state', 'regularize', 'save_state',
    'Partition', 'bell_number', 'enumerate_partitions', 'parse_partition',
    'PartitionResult', 'ScanReport', 'load_report', 'report_extremes',
    'TestOperator', 'WitnessResult', 'separable_bound', 'significance',
]
