"""Scalar (2N+1)-term recurrences as N x N matrix orthogonal polynomials."""

from .errors import *  # noqa: F401,F403
from .hbasis import HBasis, decompose, derivatives_at_root, reconstruct
from .jacobi import (BandedHermitian, BlockJacobi, RecurrenceSystem, block_partition,
                     build_banded, decay_profile, h_of_tridiagonal)
from .krein import SpectralReport, krein_report, truncated_spectrum
from .matpoly import (MatrixPolynomial, generate, lower_triangularize, matrix_to_scalars,
                      scalars_to_matrix, verify_three_term)
from .measures import (MatrixMeasure, Measure, build_L_pointmass, build_L_sobolev,
                       gauss_nodes, matrix_inner, moment, stieltjes)
from .polycore import Polynomial, add, derivative, evaluate, mul, poly_divmod
from .sobolev import (SobolevSpec, extract_recurrence, inner, minimal_h,
                      orthonormal_family, orthonormalize)

__version__ = "0.1.0"
