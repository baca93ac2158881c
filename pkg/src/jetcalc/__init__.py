"""jetcalc: exact rational tensor calculus on jets of linear connections.

The package computes, with no floating point anywhere, the standard formal
apparatus attached to a (possibly non-symmetric) linear connection given by
a finite jet: curvature and its iterated covariant differentials, torsion
splitting, Levi-Civita connections of metric jets, the structural identity
systems those differentials satisfy, reduction data built from them, and an
exhaustive classification of the natural (0,2)-tensor fields on the
cotangent bundle that the reduced data generates.
"""

from jetcalc.symcore import (  # noqa: F401
    ComponentArray,
    Rational,
    alternate,
    rat,
    sym_index_count,
    symmetrize,
)

__version__ = "0.1.0"
