"""Exact intersection numbers of CM cycles on Lubin-Tate towers.

The public entry points are re-exported here; see the submodules for the
lower-level pieces.
"""
from .errors import (LTCyclesError, MathError, ResourceLimit, ConfigError, DomainError,
                     NotIrreducible, IrreducibilityUndecided, InfiniteIntersection,
                     SingularOrbit, HeightMismatch, DeltaNormMismatch, BudgetExceeded,
                     PrecisionExhausted, EnumerationTooLarge)
from .localfield import FieldDesc, Scalar, QuadExt, ExtScalar, disc_norm
from .linalg import Poly, mat_det, mat_inv, snf, resultant, invariant_poly_split
from .cda import CyclicAlgebra, CDAElement, embed_quadratic, invariant_poly_D
from .cycles import (EquiPair, make_equi_pair, standard_tau, height_tau, res_rel,
                     res_rel_norm_oracle, infinite_level_intersection, stable_level)
from .integrate import (TestFunction, adaptive_integrate, exhaustive_integrate, c_closed,
                        c_pair, decompose_double_coset)
from .formula import intersection_number, intersection_two_fields, hecke_intersection
from .orbital import orbital_h1, verify_afl_h1
from .kernels import COMPILED

__version__ = "0.1.0"
