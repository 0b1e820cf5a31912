"""Triple-shift dqds: three dqds steps with shifts sigma, conj(sigma)-sigma and
-conj(sigma), carried out in real arithmetic by chasing bulges in the factors.

The sweep starts from the real pair (L, U) with ``J = U L`` and returns the
real pair (Lhat, Uhat) with ``Lhat Uhat = Lc^{-1} J Lc`` where ``Lc`` is the
unit lower triangular factor of ``(J - sigma I)(J - conj(sigma) I)``. The
shifts are restored, so ``acshift`` is passed through unchanged.

Two work matrices are updated by elementary similarities at every minor
step i. F begins as U and ends as Lhat, G begins as L and ends as Uhat. Only
the five scalars of :class:`TridqdsWorkspace` are live at any time

    x_l, y_l        the 2x1 bulge hanging below column i-1 of F
    x_r, y_r, z_r   entries (i,i), (i+1,i), (i+2,i) of G

and each minor step applies, in turn

    Z_i   moves the unit superdiagonal of F into G
    L_i   removes the bulge of F, defines uhat_i, fills column i of G
    Y_i   clears column i of G below uhat_i, defines lhat_i, new bulge in F

The condition of L_i and Y_i is ~ 1 + |bulge / pivot|^2, which is the
growth reported by the sweep. It is a squared ratio, so it is compared
against ``threshold**2``; the linear bound then matches the one used for
dqds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import tridqds_kernel
from .representation import Factored
from .transforms import DEFAULT_GROWTH_THRESHOLD

__all__ = [
    "TridqdsWorkspace",
    "TridqdsResult",
    "m_column",
    "tridqds_sweep",
    "growth_diagnostics",
]


@dataclass
class TridqdsWorkspace:
    x_l: float = 0.0
    y_l: float = 0.0
    x_r: float = 0.0
    y_r: float = 0.0
    z_r: float = 0.0


@dataclass(frozen=True)
class TridqdsResult:
    fhat: Factored
    growth: float
    rejected_reason: Optional[str] = None

    @property
    def rejected(self) -> bool:
        return self.rejected_reason is not None


def m_column(F: Factored, sigma: complex) -> tuple[float, float]:
    """Normalized bulge entries from the first column of the shift polynomial.

    With ``J = U L`` and ``M = J^2 - 2 Re(sigma) J + |sigma|^2 I`` this
    returns ``(-M[1,0]/M[0,0], -M[2,0]/M[0,0])``, the entries of the first
    elimination matrix.
    """
    if F.n < 3:
        raise ValueError("m_column needs n >= 3")
    u, l = F.u, F.l
    sigma = complex(sigma)
    re = sigma.real
    s1 = u[0] + l[0]
    m21 = u[1] * l[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = np.float64(s1 * s1 + m21 - 2.0 * re * s1 + (re * re + sigma.imag * sigma.imag))
        y_l = -m21 * u[2] * l[1] / denom
        x_l = -m21 * (s1 + u[1] + l[1] - 2.0 * re) / denom
    return float(x_l), float(y_l)


def growth_diagnostics(ws: TridqdsWorkspace, lhat_prev: float, uhat_i: float) -> float:
    """Condition surrogate of one minor step, from the un-normalized workspace.

    ``max((x_l^2 + y_l^2) / lhat_prev^2, (x_r^2 + y_r^2 + z_r^2) / uhat_i^2)``
    where the left term belongs to the elimination of the F bulge and the
    right term to the clearing of column i of G.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = np.float64(lhat_prev)
        up = np.float64(uhat_i)
        left = (ws.x_l / lp) ** 2 + (ws.y_l / lp) ** 2
        right = (ws.x_r / up) ** 2 + (ws.y_r / up) ** 2 + (ws.z_r / up) ** 2
    return float(np.fmax(left, right))


def tridqds_sweep(
    F: Factored, sigma: complex, threshold: float = DEFAULT_GROWTH_THRESHOLD
) -> TridqdsResult:
    """One restoring triple-shift sweep with the pair (sigma, conj(sigma)).

    Requires n >= 4 and, for the result to be meaningful, no zero l_i. The
    sweep never raises on breakdown: a non-finite output or a growth above
    ``threshold**2`` is reported through ``rejected_reason``.
    """
    if F.n < 4:
        raise ValueError("tridqds_sweep needs n >= 4")
    sigma = complex(sigma)
    uh, lh, growth = tridqds_kernel(F.u, F.l, sigma.real, sigma.real**2 + sigma.imag**2)
    fhat = Factored(uh, lh, F.acshift)
    reason = None
    if not fhat.is_finite():
        reason = "non-finite"
    elif not growth <= threshold * threshold:
        reason = "growth"
    return TridqdsResult(fhat, float(growth), reason)
