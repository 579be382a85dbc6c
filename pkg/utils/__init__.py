"""
Utility package for IkedaSigns.

This package contains helper classes and functions for:
- Exact arithmetic in Q(sqrt(p))
- Arbitrary-precision evaluation and interval sign certification
- Reading expressions from data files
- Deterministic table output and parallel prime scans
"""

from .surd import Surd
from .numeric import PrecisionExhausted, enclose_real_part, evaluate_terms, interval_sign
from .emit import TableReport, emit

__all__ = ['Surd', 'PrecisionExhausted', 'enclose_real_part', 'evaluate_terms', 'interval_sign', 'TableReport', 'emit']
