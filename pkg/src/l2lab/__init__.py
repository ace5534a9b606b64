"""Numerical lab for L2-invariants of matrices over group rings."""

__version__ = "0.1.0"

from .groups import (DirectProduct, FiniteGroup, FreeAbelianGroup, FreeGroup, FreeProduct,
                     GroupContext, GroupError, LamplighterGroup, compose, invert)
from .group_ring import GroupRingElement, element, involute, multiply, one_norm, trace_cg
from .matrix import GRMatrix, KBound, ShapeError, adjoint, direct_sum, k_bound, mat_multiply
from .estimators import (NO_TRUNCATION, CharSeqReport, DimEstimate, LogDetEstimate, NSValue,
                         ResourceLimitError, TruncationError, TruncationPolicy,
                         characteristic_sequence, fk_log_det, kernel_dimension, ns_beta)
from .complexes import (CellDatum, ChainComplex, l2_betti_numbers, l2_euler_characteristic,
                        l2_torsion, laplacians, validate_complex)
from .approximation import QuotientSpec, quotient_betti, restrict_index, tower
from . import oracles
