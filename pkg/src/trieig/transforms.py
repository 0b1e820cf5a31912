"""Single-step qd transforms on factored tridiagonals.

``dqds_step`` is the work horse of the real-shift path. ``qds_step`` and
``complex_dqds_step`` exist to cross-check it and the triple-shift sweep;
the solver never calls them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import complex_dqds_kernel, dqds_kernel, qds_kernel
from .representation import Factored

__all__ = [
    "DEFAULT_GROWTH_THRESHOLD",
    "DqdsResult",
    "ComplexFactored",
    "dqds_step",
    "qds_step",
    "complex_dqds_step",
    "rejection_test",
]

DEFAULT_GROWTH_THRESHOLD = 1000.0


@dataclass(frozen=True)
class DqdsResult:
    """Output of one dqds(sigma) step.

    ``growth`` is ``max_i (|sigma| + |lhat_i| + 3|d_i|) / (|u_i| + |l_i|)``
    with lhat_n = l_n = 0. Components with 0/0 are ignored; components with
    a NaN numerator are caught by the finiteness check instead.
    """

    fhat: Factored
    d: np.ndarray
    growth: float
    sigma: float


@dataclass(frozen=True)
class ComplexFactored:
    u: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=complex).reshape(-1)
        l = np.array(self.l, dtype=complex).reshape(-1)
        if u.size < 1 or l.size != u.size - 1:
            raise ValueError("complex factored form needs len(l) == len(u) - 1 >= 0")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "l", l)

    @property
    def n(self) -> int:
        return self.u.size

    @classmethod
    def from_real(cls, F: Factored) -> "ComplexFactored":
        return cls(F.u.astype(complex), F.l.astype(complex))


def dqds_step(F: Factored, sigma: float) -> DqdsResult:
    """Differential qd step: ``Lhat Uhat = U L - sigma*I``.

    Non-restoring, so the returned factors carry ``acshift + sigma``. No
    zero tests run inside the loop; inf and NaN propagate to the output.
    """
    sigma = float(sigma)
    uh, lh, d, growth = dqds_kernel(F.u, F.l, sigma)
    return DqdsResult(Factored(uh, lh, F.acshift + sigma), d, float(growth), sigma)


def qds_step(F: Factored, sigma: float) -> Factored:
    """Plain (non-differential) qds; same map as :func:`dqds_step` in exact arithmetic."""
    sigma = float(sigma)
    uh, lh = qds_kernel(F.u, F.l, sigma)
    return Factored(uh, lh, F.acshift + sigma)


def complex_dqds_step(F: ComplexFactored, sigma: complex) -> ComplexFactored:
    uh, lh = complex_dqds_kernel(F.u, F.l, complex(sigma))
    return ComplexFactored(uh, lh)


def rejection_test(res: DqdsResult, threshold: float = DEFAULT_GROWTH_THRESHOLD) -> bool:
    """True when the step must be rejected.

    Rejects on any non-finite output or when, element by element,
    ``|sigma| + |lhat| + 3|d| > threshold * (|u| + |l|)``.
    """
    if not (res.fhat.is_finite() and np.all(np.isfinite(res.d))):
        return True
    return bool(res.growth > threshold)
