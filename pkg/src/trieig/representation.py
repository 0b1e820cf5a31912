"""Tridiagonal data types and the J-form / LU plumbing.

A J-form matrix has unit superdiagonal, so it is described by its diagonal
``a`` and its subdiagonal ``e``. The iteration never stores a J-form matrix
though: it lives on the factors of ``J - sigma*I = L U`` with

    L = unit lower bidiagonal, subdiagonal l[0..n-2]
    U = upper bidiagonal, diagonal u[0..n-1], superdiagonal all 1

plus the real shift accumulated by non-restoring transforms. Indices in
docstrings are 1-based to match the usual statement of the recurrences;
l_0 and l_n are implicit zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Tridiagonal",
    "JForm",
    "Factored",
    "SplitSegments",
    "ZeroPivot",
    "to_jform",
    "lu_factor",
    "ul_product",
    "lu_product",
    "charpoly",
]


class ZeroPivot(ArithmeticError):
    """``J - sigma*I`` has no LU factorization: pivot ``index`` (1-based) is 0."""

    def __init__(self, index: int):
        super().__init__(f"zero pivot u_{index}")
        self.index = index


def _vec(x) -> np.ndarray:
    arr = np.array(x, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Tridiagonal:
    """General real tridiagonal with diagonal ``a``, sub ``b`` and super ``c``.

    ``b[i]`` is entry (i+1, i) and ``c[i]`` entry (i, i+1), 0-based.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a, b, c = _vec(self.a), _vec(self.b), _vec(self.c)
        if a.size < 1:
            raise ValueError("tridiagonal matrix must have n >= 1")
        if b.size != a.size - 1 or c.size != a.size - 1:
            raise ValueError(f"off-diagonals must have length {a.size - 1}, got {b.size} and {c.size}")
        for name, v in (("a", a), ("b", b), ("c", c)):
            if not np.all(np.isfinite(v)):
                raise ValueError(f"non-finite entry in {name}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.a.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.a) + np.diag(self.b, -1) + np.diag(self.c, 1)

    def trace(self) -> float:
        return float(np.sum(self.a))

    def norm_inf(self) -> float:
        rows = np.abs(self.a).copy()
        rows[1:] += np.abs(self.b)
        rows[:-1] += np.abs(self.c)
        return float(rows.max())

    def segment(self, start: int, stop: int) -> "Tridiagonal":
        """Principal submatrix on rows/columns ``start:stop``."""
        return Tridiagonal(self.a[start:stop], self.b[start : stop - 1], self.c[start : stop - 1])


@dataclass(frozen=True)
class JForm:
    """Tridiagonal with unit superdiagonal: diagonal ``a``, subdiagonal ``e``."""

    a: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        a, e = _vec(self.a), _vec(self.e)
        if a.size < 1 or e.size != a.size - 1:
            raise ValueError(f"J-form needs len(e) == len(a) - 1 >= 0, got {a.size} and {e.size}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(e))):
            raise ValueError("non-finite entry in J-form")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "e", e)

    @property
    def n(self) -> int:
        return self.a.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.a) + np.diag(self.e, -1) + np.diag(np.ones(self.n - 1), 1)

    def as_tridiagonal(self) -> Tridiagonal:
        return Tridiagonal(self.a, self.e, np.ones(self.n - 1))


@dataclass(frozen=True)
class Factored:
    """The pair (L, U) together with the accumulated shift ``acshift``.

    Eigenvalues of the represented matrix are those of ``L U`` plus
    ``acshift``. Entries may be non-finite when the object is the raw output
    of a transform that is about to be rejected.
    """

    u: np.ndarray
    l: np.ndarray
    acshift: float = 0.0

    def __post_init__(self):
        u, l = _vec(self.u), _vec(self.l)
        if u.size < 1 or l.size != u.size - 1:
            raise ValueError(f"factored form needs len(l) == len(u) - 1 >= 0, got {u.size} and {l.size}")
        acshift = float(self.acshift)
        if not np.isfinite(acshift):
            raise ValueError("acshift must be finite")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "acshift", acshift)

    @property
    def n(self) -> int:
        return self.u.size

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.l)))


@dataclass(frozen=True)
class SplitSegments:
    """Unreduced J-form blocks, each with its 0-based row offset."""

    segments: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.segments)

    def __len__(self):
        return len(self.segments)

    @property
    def sizes(self) -> list[int]:
        return [j.n for j, _ in self.segments]


def to_jform(T: Tridiagonal) -> SplitSegments:
    """Diagonal similarity to J-form, splitting where ``b_i * c_i == 0``.

    The scaling makes every superdiagonal entry 1 and leaves ``b_i * c_i`` on
    the subdiagonal; the scaling itself is discarded.
    """
    e = T.b * T.c
    cuts = np.flatnonzero(e == 0.0) + 1
    bounds = [0, *cuts.tolist(), T.n]
    segments = []
    for start, stop in zip(bounds[:-1], bounds[1:]):
        segments.append((JForm(T.a[start:stop], e[start : stop - 1]), start))
    return SplitSegments(segments)


def lu_factor(J: JForm, sigma: float = 0.0) -> Factored:
    """Factor ``J - sigma*I = L U``; raises :class:`ZeroPivot` if impossible.

    Only u_n may vanish, since it never becomes a divisor.
    """
    a, e = J.a, J.e
    n = J.n
    u = np.empty(n)
    l = np.empty(n - 1)
    u[0] = a[0] - sigma
    for i in range(n - 1):
        if u[i] == 0.0:
            raise ZeroPivot(i + 1)
        l[i] = e[i] / u[i]
        u[i + 1] = a[i + 1] - sigma - l[i]
    return Factored(u, l, sigma)


def ul_product(F: Factored) -> JForm:
    """Explicit ``U L``: diagonal u_i + l_i, subdiagonal u_{i+1} l_i."""
    a = F.u.copy()
    a[:-1] += F.l
    return JForm(a, F.u[1:] * F.l)


def lu_product(F: Factored) -> JForm:
    """Explicit ``L U``: diagonal l_{i-1} + u_i, subdiagonal l_i u_i."""
    a = F.u.copy()
    a[1:] += F.l
    return JForm(a, F.l * F.u[:-1])


def charpoly(a, e) -> np.ndarray:
    """Monic characteristic polynomial coefficients (highest degree first).

    Uses the three-term determinant recurrence with couplings ``e_i`` (the
    products of opposite off-diagonal entries). Meant for small n in checks.
    """
    a = np.asarray(a, dtype=float)
    e = np.asarray(e, dtype=float)
    p_prev = np.array([1.0])
    p = np.array([1.0, -a[0]])
    for k in range(1, a.size):
        nxt = np.convolve(p, [1.0, -a[k]])
        nxt[2:] -= e[k - 1] * p_prev
        p_prev, p = p, nxt
    return p
