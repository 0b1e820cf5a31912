"""Eigenvalues of real unsymmetric tridiagonal matrices in real arithmetic.

Real shifts go through dqds, complex conjugate shift pairs through the
triple-shift tridqds sweep. Both act on the factors L, U of a tridiagonal
with unit superdiagonal and never form the matrix itself.

    >>> from trieig import clement, solve
    >>> [float(x) for x in sorted(solve(clement(4)).eigenvalues.real.round(12))]
    [-3.0, -1.0, 1.0, 3.0]
"""

from .driver import MaxIterations, SolverOptions, SolverStats, Spectrum, solve
from .oracle import NoConvergence, ehrlich_aberth, match_spectra, newton_residuals
from .representation import Factored, JForm, Tridiagonal, ZeroPivot, lu_factor, to_jform
from .testmat import bessel, clement, generate, graded, test4, test5
from .transforms import dqds_step, rejection_test
from .tridqds import tridqds_sweep

__version__ = "0.1.0"

__all__ = [
    "Tridiagonal",
    "JForm",
    "Factored",
    "ZeroPivot",
    "to_jform",
    "lu_factor",
    "dqds_step",
    "rejection_test",
    "tridqds_sweep",
    "SolverOptions",
    "SolverStats",
    "Spectrum",
    "MaxIterations",
    "solve",
    "NoConvergence",
    "ehrlich_aberth",
    "match_spectra",
    "newton_residuals",
    "bessel",
    "clement",
    "graded",
    "test4",
    "test5",
    "generate",
]
