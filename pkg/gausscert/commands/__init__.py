"""
Commands package initialization
"""
from .verification import oracle
from .scanning import extremes, scan
from .state import check, supermodes, synth

__all__ = ['check', 'scan', 'extremes', 'synth', 'supermodes', 'oracle']
