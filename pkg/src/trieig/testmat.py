"""Test matrix families: Bessel, Clement, graded, and two scaled matrices
(Test 4, Test 5) with clustered or badly scaled spectra.

Index variables below are 1-based, as in the usual definitions of these families.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .representation import Tridiagonal

__all__ = [
    "BadParams",
    "MatrixSpec",
    "FAMILIES",
    "TEST5_CENTERS",
    "bessel",
    "clement",
    "graded",
    "test4",
    "test5",
    "generate",
    "cluster_counts",
]


class BadParams(ValueError):
    pass


def bessel(n: int, a: float = -4.5, b: float = 2.0) -> Tridiagonal:
    """Generalized Bessel matrix B_n^(a,b); tends to be close to defective."""
    if n < 1:
        raise BadParams("n must be >= 1")
    if a == 0 or a == -1:
        raise BadParams(f"a = {a} makes the first row undefined")
    diag = np.empty(n)
    sub = np.empty(n - 1)
    sup = np.empty(n - 1)
    alpha1 = -b / a
    diag[0] = alpha1
    if n > 1:
        sup[0] = -alpha1
        sub[0] = alpha1 / (a + 1)
    for j in range(2, n + 1):
        den = (2 * j + a - 2) * (2 * j + a - 4)
        if den == 0:
            raise BadParams(f"alpha_{j} has a zero denominator for a = {a}")
        diag[j - 1] = -b * (a - 2) / den
    for j in range(2, n):
        den_g = (2 * j + a - 2) * (2 * j + a - 3)
        den_b = (2 * j + a - 1) * (2 * j + a - 2)
        if den_g == 0 or den_b == 0:
            raise BadParams(f"beta_{j} or gamma_{j} has a zero denominator for a = {a}")
        sup[j - 1] = b * (j + a - 2) / den_g
        sub[j - 1] = -b * j / den_b
    return Tridiagonal(diag, sub, sup)


def clement(n: int) -> Tridiagonal:
    """Zero diagonal, sub b_j = j, super c_j = n - j. Spectrum: +-(n-1), +-(n-3), ..."""
    if n < 1:
        raise BadParams("n must be >= 1")
    j = np.arange(1, n, dtype=float)
    return Tridiagonal(np.zeros(n), j, n - j)


def clement_spectrum(n: int) -> np.ndarray:
    """Closed-form eigenvalues of :func:`clement`, ascending."""
    return np.arange(-(n - 1), n, 2, dtype=float)


def graded(n: int) -> Tridiagonal:
    """Row-signed graded matrix Delta*T, entries of row j of size 3^-(j-1)."""
    if n < 1:
        raise BadParams("n must be >= 1")
    j = np.arange(1, n + 1)
    scale = 3.0 ** (-(j - 1.0))
    delta = np.where((j + 1) // 2 % 2 == 0, 1.0, -1.0)
    diag = delta * scale
    sub = delta[1:] * scale[:-1]
    sup = delta[:-1] * scale[:-1]
    return Tridiagonal(diag, sub, sup)


def _row_scaled(alpha: np.ndarray, beta: np.ndarray) -> Tridiagonal:
    # D^{-1} tridiag(1, alpha, 1) with D = diag(beta)
    return Tridiagonal(alpha / beta, 1.0 / beta[1:], 1.0 / beta[:-1])


def _sign(k: np.ndarray) -> np.ndarray:
    return np.where(k % 2 == 0, 1.0, -1.0)


def test4(n: int) -> Tridiagonal:
    if n < 2:
        raise BadParams("n must be >= 2")
    k = np.arange(1, n + 1)
    return _row_scaled(_sign(k), 20.0 * _sign(k // 5))


def test5(n: int) -> Tridiagonal:
    """Clusters near 1e-5, -1e5 and 1e5; diagonal alternates 1e-5 / 1e5 in size."""
    if n < 2:
        raise BadParams("n must be >= 2")
    k = np.arange(1, n + 1)
    # 10^(5(-1)^k), taken as the correctly rounded constants
    alpha = np.where(k % 2 == 0, 1e5, 1e-5) * _sign(k // 4)
    return _row_scaled(alpha, _sign(k // 3))


# where the spectrum of test5 gathers
TEST5_CENTERS = (1e-5, 1e5, -1e5)


def cluster_counts(eigenvalues, centers=TEST5_CENTERS) -> list[int]:
    """How many eigenvalues lie nearest to each center (absolute distance)."""
    ev = np.asarray(eigenvalues, dtype=complex).reshape(-1, 1)
    nearest = np.argmin(np.abs(ev - np.asarray(centers, dtype=complex)), axis=1)
    return np.bincount(nearest, minlength=len(centers)).tolist()


# these are not pytest tests
test4.__test__ = False
test5.__test__ = False

FAMILIES = {
    "bessel": bessel,
    "clement": clement,
    "graded": graded,
    "test4": test4,
    "test5": test5,
}


@dataclass(frozen=True)
class MatrixSpec:
    family: str
    n: int
    params: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise BadParams(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        if self.n < 1:
            raise BadParams("n must be >= 1")
        if self.params and self.family != "bessel":
            raise BadParams(f"family {self.family} takes no parameters")

    def build(self) -> Tridiagonal:
        return generate(self.family, self.n, *self.params)


def generate(family: str, n: int, *params: float) -> Tridiagonal:
    try:
        gen = FAMILIES[family]
    except KeyError:
        raise BadParams(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    if params and family != "bessel":
        raise BadParams(f"family {family} takes no parameters")
    return gen(n, *params)
