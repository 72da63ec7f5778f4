"""
Vector Maclaurin

Numerical verification of Maclaurin and Newton type inequalities for wedge
volumes of vector families, intrinsic volumes of zonotopes, and a seeded
search for counterexamples.
"""

__version__ = "0.1.0"

from .analyzer import FamilyAnalyzer
from .inequalities import (
    InequalityResult, MaclaurinReport, RatioPair, check_classical_maclaurin, check_vector_maclaurin,
)
from .linalg import GramMatrix, SubsetIndex, VectorFamily, wedge_volume
from .search import SearchConfig, SearchTarget, ViolationSearcher, violation_search
from .symmetric_sums import PowerExponent, s_k_p
from .zonotope import Zonotope

__all__ = [
    'FamilyAnalyzer',
    'GramMatrix',
    'InequalityResult',
    'MaclaurinReport',
    'PowerExponent',
    'RatioPair',
    'SearchConfig',
    'SearchTarget',
    'SubsetIndex',
    'VectorFamily',
    'ViolationSearcher',
    'Zonotope',
    'check_classical_maclaurin',
    'check_vector_maclaurin',
    's_k_p',
    'violation_search',
    'wedge_volume',
]
