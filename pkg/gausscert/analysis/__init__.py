"""
Analysis package initialization
"""
from .optimizer import GaConfig, OptimizationOutcome, default_seeds, optimize_witness
from .oracle import brute_force_bound, pt_check
from .scanner import run_scan
from .synthesis import CombSpec, SupermodeReport, extract_supermodes, generate_comb_state

__all__ = [
    'GaConfig', 'OptimizationOutcome', 'default_seeds', 'optimize_witness',
    'brute_force_bound', 'pt_check', 'run_scan',
    'CombSpec', 'SupermodeReport', 'extract_supermodes', 'generate_comb_state',
]
