"""Characteristic-polynomial oracle: Newton ratios from the three-term
recurrence, and an Ehrlich-Aberth iteration on all roots at once.

Deliberately independent of the factored-form machinery; it only reads
the tridiagonal entries. Suited to desk-scale n (a few hundred).
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._kernels import aberth_sweep, newton_ratio_kernel
from .representation import Tridiagonal

__all__ = [
    "DerivativeZero",
    "NoConvergence",
    "AberthState",
    "charpoly_newton_ratio",
    "ehrlich_aberth",
    "newton_residuals",
    "match_spectra",
    "gersgorin_disks",
]

DEFAULT_MAX_N = 400


class DerivativeZero(ArithmeticError):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class AberthState:
    """Approximations, per-root convergence flags and sweep count."""

    def __init__(self, approximations: np.ndarray):
        self.approximations = np.asarray(approximations, dtype=complex)
        self.converged = np.zeros(self.approximations.size, dtype=bool)
        self.iterations = 0

    def __repr__(self):
        return f"AberthState(n={self.approximations.size}, converged={int(self.converged.sum())}, iterations={self.iterations})"


def _couplings(C: Tridiagonal) -> np.ndarray:
    return C.b * C.c


def charpoly_newton_ratio(C: Tridiagonal, z: complex) -> complex:
    """Newton correction ``p(z)/p'(z)`` of the characteristic polynomial of C."""
    p, dp = newton_ratio_kernel(C.a, _couplings(C), complex(z))
    if dp == 0:
        raise DerivativeZero(f"p'(z) = 0 at z = {z}")
    return complex(p / dp)


def newton_residuals(C: Tridiagonal, eigenvalues) -> np.ndarray:
    """``|p(lam)/p'(lam)| / (1 + |lam|)`` for every approximate eigenvalue.

    An exact zero of p' gives ``inf`` unless p vanishes too.
    """
    a, e = C.a, _couplings(C)
    out = np.empty(len(eigenvalues))
    for k, lam in enumerate(eigenvalues):
        p, dp = newton_ratio_kernel(a, e, complex(lam))
        if dp == 0:
            out[k] = 0.0 if p == 0 else math.inf
        else:
            out[k] = abs(p / dp) / (1.0 + abs(lam))
    return out


def gersgorin_disks(C: Tridiagonal) -> tuple[np.ndarray, np.ndarray]:
    """Row Gersgorin disks as (centers, radii)."""
    r = np.zeros(C.n)
    r[1:] += np.abs(C.b)
    r[:-1] += np.abs(C.c)
    return C.a.copy(), r


def _initial_points(C: Tridiagonal) -> np.ndarray:
    """One start per row, on a circle of half the Gersgorin radius.

    Rows of very different scale then start near their own part of the
    spectrum. Angles are spread so that no two starts coincide.
    """
    centers, radii = gersgorin_disks(C)
    n = C.n
    scale = np.maximum(np.abs(centers), radii)
    floor = float(scale.max()) if scale.max() > 0 else 1.0
    rho = 0.5 * np.where(radii > 0, radii, 1e-3 * np.where(scale > 0, scale, floor))
    # offset keeps the starting set off the real axis and asymmetric
    theta = 2.0 * np.pi * np.arange(n) / n + np.pi / (2.0 * n) + 0.4
    return centers + rho * np.exp(1j * theta)


def ehrlich_aberth(
    C: Tridiagonal,
    max_sweeps: int = 200,
    tol: float = 1e-13,
    max_n: int = DEFAULT_MAX_N,
    strict: bool = False,
):
    """All eigenvalues of C as roots of its characteristic polynomial.

    Jacobi-style Ehrlich-Aberth updates, one start point inside each
    Gersgorin disk. A root is frozen once its Newton correction drops below
    ``tol * (1 + |z|)``. Without convergence after
    ``max_sweeps`` the partial result is returned (``stats['converged']`` is
    False), or :class:`NoConvergence` is raised when ``strict``.
    """
    from .driver import Spectrum

    if C.n > max_n:
        raise ValueError(f"oracle is limited to n <= {max_n}, got {C.n}")
    if C.n == 1:
        return Spectrum(np.array([complex(C.a[0])]), {"iterations": 0, "converged": True, "method": "oracle"})

    state = AberthState(_initial_points(C))
    active = np.ones(C.n, dtype=bool)
    a, e = C.a, _couplings(C)
    while state.iterations < max_sweeps and active.any():
        z, _, dzero = aberth_sweep(a, e, state.approximations, active, tol)
        if dzero:
            # nudge roots sitting on a critical point of p
            for k in np.flatnonzero(active):
                _, dp = newton_ratio_kernel(a, e, z[k])
                if dp == 0:
                    z[k] += 1e-8 * (1.0 + abs(z[k])) * (1 + 1j)
        state.approximations = z
        state.iterations += 1
    state.converged = ~active

    converged = bool(state.converged.all())
    spec = Spectrum(
        state.approximations.copy(),
        {"iterations": state.iterations, "converged": converged, "method": "oracle"},
    )
    if not converged:
        msg = f"Ehrlich-Aberth: {int(active.sum())} of {C.n} roots unconverged after {max_sweeps} sweeps"
        if strict:
            raise NoConvergence(msg, partial=spec)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return spec


def match_spectra(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Optimal one-to-one pairing of two eigenvalue multisets.

    Returns ``(index_into_y, distances)`` ordered like ``x``; the pairing
    minimizes the sum of relative distances ``|x - y| / (1 + |x|)``.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.size != y.size:
        raise ValueError(f"multisets differ in size: {x.size} vs {y.size}")
    cost = np.abs(x[:, None] - y[None, :]) / (1.0 + np.abs(x[:, None]))
    rows, cols = linear_sum_assignment(cost)
    order = np.empty(x.size, dtype=int)
    order[rows] = cols
    return order, cost[np.arange(x.size), order]
