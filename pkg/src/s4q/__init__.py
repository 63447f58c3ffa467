"""Numerical verification lab for the orthogonal quantum 4-sphere.

Truncated weighted-shift representations of the sphere algebra and of
U_q(so(5)), the Dirac operator, the index pairing, spectral zeta residues,
the real structure and the approximate representation on the extended
label space. Every check produces a :class:`CheckRecord`.
"""

from .basis import BasisLabel, TruncatedSpace, enumerate_space, hat_space, parse_half_integer, simple_space
from .operators import AntilinearOperator, SparseOperator, commutator
from .qnum import QContext, q_number
from .report import SCHEMA_VERSION, CheckRecord

__all__ = [
    "BasisLabel",
    "TruncatedSpace",
    "enumerate_space",
    "hat_space",
    "simple_space",
    "parse_half_integer",
    "SparseOperator",
    "AntilinearOperator",
    "commutator",
    "QContext",
    "q_number",
    "CheckRecord",
    "SCHEMA_VERSION",
]

__version__ = "0.1.0"
