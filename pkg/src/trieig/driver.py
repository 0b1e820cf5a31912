"""The outer iteration.

For every unreduced block of the input the solver

1. tries the arithmetic mean of the diagonal as an eigenvalue (prologue),
2. factors ``J - sigma I = L U`` at the mean, or nearby if that would break
   down,
3. repeats, until the block is exhausted:
   deflate 1x1 or 2x2 blocks at the bottom, split at negligible couplings,
   pick a transform (zero shift, Wilkinson-shifted dqds, or tridqds with a
   Francis pair), run it into fresh arrays, and keep it only if its element
   growth is acceptable; otherwise fall back to the other kind of transform.

Eigenvalues are ``eig(L U) + acshift`` throughout. Complex eigenvalues only
come out of 2x2 blocks (or the dense fallback for a stuck 3x3 block), so
they appear in exact conjugate pairs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .representation import Factored, JForm, Tridiagonal, ZeroPivot, lu_factor, to_jform
from .transforms import DEFAULT_GROWTH_THRESHOLD, dqds_step, rejection_test
from .tridqds import tridqds_sweep

__all__ = [
    "SolverOptions",
    "SolverStats",
    "Spectrum",
    "PrologueResult",
    "Decision",
    "MaxIterations",
    "prologue",
    "deflate1_test",
    "deflate2_test",
    "negligible_bottom",
    "trailing_2x2_eigs",
    "split_scan",
    "choose_transform",
    "exterior_shift",
    "solve",
]

log = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class SolverOptions:
    tol: float = EPS
    growth_threshold: float = DEFAULT_GROWTH_THRESHOLD
    maxit_factor: int = 30
    small_l_threshold: float = 1.0 / 16.0
    # startup shift perturbation step, in units of ||C||_inf
    shift_delta: float = 2.0**-10
    # prologue: mu is rejected as a startup shift when some
    # |x_j| < prologue_ratio * max(|x_{j-1}|, |x_{j+1}|)
    prologue_ratio: Optional[float] = None
    max_escalations: int = 5
    # after max(stall_limit, n) transforms without a deflation or split the
    # trailing 2x2 shift is used regardless of the small-l test
    stall_limit: int = 10
    # when every candidate shift is rejected: "least-growth" keeps the finite
    # candidate with the smallest growth, "raise" gives up on the segment
    on_stall: str = "least-growth"
    # False restricts the solver to real dqds steps (complex pairs then come
    # out of 2x2 deflations only)
    use_tridqds: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if not self.growth_threshold >= 1:
            raise ValueError("growth_threshold must be >= 1")
        if not self.maxit_factor >= 1:
            raise ValueError("maxit_factor must be >= 1")
        if not self.stall_limit >= 1:
            raise ValueError("stall_limit must be >= 1")
        if self.on_stall not in ("least-growth", "raise"):
            raise ValueError("on_stall must be 'least-growth' or 'raise'")

    @property
    def x_ratio(self) -> float:
        return math.sqrt(self.tol) if self.prologue_ratio is None else self.prologue_ratio


@dataclass
class SolverStats:
    dqds_count: int = 0
    tridqds_count: int = 0
    rejections: int = 0
    splits: int = 0
    prologue_multiplicity: int = 0
    forced_accepts: int = 0
    direct_3x3: int = 0

    @property
    def transforms(self) -> int:
        return self.dqds_count + self.tridqds_count

    def as_dict(self) -> dict:
        d = asdict(self)
        d["transforms"] = self.transforms
        return d


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    stats: object = field(default_factory=SolverStats)

    def __len__(self):
        return self.eigenvalues.size

    def sorted(self) -> np.ndarray:
        ev = np.asarray(self.eigenvalues, dtype=complex)
        return ev[np.lexsort((ev.imag, ev.real))]


class MaxIterations(RuntimeError):
    """Convergence failure; ``partial`` holds what was found so far."""

    def __init__(self, message, segment=None, partial: Optional[Spectrum] = None):
        super().__init__(message)
        self.segment = segment
        self.partial = partial


@dataclass(frozen=True)
class PrologueResult:
    mu: float
    upsilon: float
    min_x_ratio: float
    deflated_multiplicity: int
    safe_to_shift_at_mu: bool


@dataclass(frozen=True)
class Decision:
    kind: str  # "dqd", "dqds" or "tridqds"
    shift: complex = 0.0

    @classmethod
    def dqd(cls):
        return cls("dqd", 0.0)

    @classmethod
    def dqds(cls, tau: float):
        return cls("dqds", float(tau))

    @classmethod
    def tridqds(cls, sigma: complex):
        return cls("tridqds", complex(sigma))


# ---------------------------------------------------------------------------
# prologue


def _chain_level(C: Tridiagonal, mu: float, src: Optional[np.ndarray]):
    """One level of the recurrence for (mu I - C) applied to Taylor vectors.

    Level 0 (``src is None``) is x with x_1 = 1; level k >= 1 is the k-th
    Taylor coefficient in mu of x, driven by level k-1. Returns the vector and
    the residual of the last row, both scaled by one common positive factor.
    """
    a, b, c = C.a, C.b, C.c
    n = C.n
    x = np.zeros(n)
    s = 1.0  # running scale applied to src
    x[0] = 1.0 if src is None else 0.0
    for j in range(n - 1):
        acc = (mu - a[j]) * x[j]
        if j > 0:
            acc -= b[j - 1] * x[j - 1]
        if src is not None:
            acc += s * src[j]
        x[j + 1] = acc / c[j]
        m = abs(x[j + 1])
        if m > 1e150:
            x[: j + 2] *= 1e-150
            s *= 1e-150
    res = (mu - a[n - 1]) * x[n - 1]
    if n > 1:
        res -= b[n - 2] * x[n - 2]
    if src is not None:
        res += s * src[n - 1]
    return x, res


def prologue(C: Tridiagonal, opts: SolverOptions = SolverOptions()) -> PrologueResult:
    """Check whether the diagonal mean is an eigenvalue of the unreduced C.

    x solves the first n-1 rows of ``(mu I - C) x = 0`` with x_1 = 1 and
    upsilon is the residual of the last row, proportional to p(mu). While the
    residual of the current Taylor level is negligible, mu is counted once
    more and the next level is tried, which yields its multiplicity.
    ``safe_to_shift_at_mu`` is False when some x_j (j >= 2) is tiny next to
    its neighbours, i.e. when ``C - mu I`` is close to an LU breakdown.
    """
    n = C.n
    mu = C.trace() / n
    x, upsilon = _chain_level(C, mu, None)

    mult = 0
    z, res = x, upsilon
    while mult < n and abs(res) <= opts.tol * np.linalg.norm(z):
        mult += 1
        if mult == n:
            break
        z, res = _chain_level(C, mu, z)

    ratio = math.inf
    for j in range(1, n):
        nb = abs(x[j - 1])
        if j + 1 < n:
            nb = max(nb, abs(x[j + 1]))
        if nb > 0:
            ratio = min(ratio, abs(x[j]) / nb)
        elif x[j] == 0:
            ratio = 0.0
    safe = ratio >= opts.x_ratio
    return PrologueResult(float(mu), float(upsilon), float(ratio), mult, bool(safe))


# ---------------------------------------------------------------------------
# deflation, splitting, shifts


def deflate1_test(F: Factored, opts: SolverOptions = SolverOptions()) -> bool:
    """Can u_n + acshift be split off the bottom?"""
    u, l, tol = F.u, F.l, opts.tol
    ln = abs(l[-1])
    lam = abs(u[-1] + F.acshift)
    return bool(
        ln < tol * abs(u[-2])
        and ln < tol * lam
        and abs(l[-1] * u[-1]) < tol * lam
        and ln * (abs(u[-2]) + 1.0) < tol * lam
    )


def negligible_bottom(F: Factored, scale: float, opts: SolverOptions = SolverOptions()) -> bool:
    """Absolute companion of :func:`deflate1_test` for eigenvalues near 0.

    The relative tests compare l_{n-1} with |u_n + Acshift| and can never
    pass when that eigenvalue is tiny. Here the perturbation from dropping
    l_{n-1} is measured against ``scale``, the norm of the segment.
    """
    u, l, tol = F.u, F.l, opts.tol
    ln = abs(l[-1])
    return bool(ln < tol * abs(u[-2]) and ln * (1.0 + abs(u[-1]) + abs(u[-2])) < tol * scale)


def deflate2_test(F: Factored, opts: SolverOptions = SolverOptions()) -> bool:
    """Can the trailing 2x2 block be split off? For n == 3 only |l_1| < tol|u_1|."""
    u, l, tol = F.u, F.l, opts.tol
    n = F.n
    if n == 3:
        return bool(abs(l[0]) < tol * abs(u[0]))
    l2, u2 = l[n - 3], u[n - 3]
    l3, u3 = l[n - 4], u[n - 4]
    det = u3 * (u2 + l2) + l3 * l2
    return bool(abs(l2) < tol * abs(u2) and abs(l2 * (u3 + l3)) < tol * abs(det))


def _quadratic_roots(p: float, q: float, r: float) -> tuple[complex, complex]:
    """Eigenvalues of [[p, 1], [q, r]], real ones ordered by value."""
    half = 0.5 * (p - r)
    disc = half * half + q
    mid = 0.5 * (p + r)
    if disc < 0:
        im = math.sqrt(-disc)
        return complex(mid, -im), complex(mid, im)
    sq = math.sqrt(disc)
    # avoid cancellation: larger-magnitude root first, other from the determinant
    big = mid + math.copysign(sq, mid) if mid != 0 else sq
    det = p * r - q
    small = det / big if big != 0 else mid - sq
    lo, hi = sorted((big, small))
    return complex(lo), complex(hi)


def trailing_2x2_eigs(F: Factored) -> tuple[complex, complex]:
    """Eigenvalues (plus acshift) of the trailing 2x2 block of U L."""
    un1, ln1, un = F.u[-2], F.l[-1], F.u[-1]
    r1, r2 = _quadratic_roots(un1 + ln1, ln1 * un, un)
    return r1 + F.acshift, r2 + F.acshift


def split_scan(F: Factored, opts: SolverOptions = SolverOptions()) -> list[int]:
    """1-based k with l_k negligible in its 4x4 window of U L.

    k runs over 1..n-3; for k = 1 the missing row is taken as u_0 + l_0 = 1,
    l_0 = 0, which reduces the left determinant to u_1 + l_1.
    """
    n = F.n
    if n < 4:
        return []
    u = F.u
    l = np.concatenate(([0.0], F.l, [0.0]))  # l[k] is l_k, l_0 = l_n = 0
    up = np.concatenate(([1.0], u))  # up[k] is u_k, u_0 = 1
    k = np.arange(1, n - 2)
    with np.errstate(all="ignore"):
        det1 = up[k - 1] * (up[k] + l[k]) + l[k - 1] * l[k]
        det2 = up[k + 1] * (up[k + 2] + l[k + 2]) + l[k + 1] * l[k + 2]
        lhs = np.abs(l[k] * up[k + 1] * (up[k + 2] + l[k + 2]) * (up[k - 1] + l[k - 1]))
        hit = (lhs < opts.tol * np.abs(det1 * det2)) & (np.abs(l[k]) < opts.tol * np.abs(up[k]))
    return k[hit].tolist()


def choose_transform(
    F: Factored,
    opts: SolverOptions = SolverOptions(),
    last_rejection: Optional[Decision] = None,
    stalled: bool = False,
) -> Decision:
    """Shift strategy.

    After a rejected tridqds(sigma) try dqds(u_n); after a rejected
    dqds(tau) try tridqds with the degenerate pair (tau, tau). Otherwise,
    once both l_{n-1} and l_{n-2} are below ``small_l_threshold``, shift by
    the trailing 2x2 block of U L: the Wilkinson root if it is real, the
    Francis pair if not. Far from convergence use the zero shift, unless
    ``stalled`` says the zero shift has stopped making progress.
    """
    if last_rejection is not None:
        if last_rejection.kind == "tridqds":
            return Decision.dqds(F.u[-1])
        return Decision.tridqds(complex(last_rejection.shift.real, 0.0))
    n = F.n
    thr = opts.small_l_threshold
    if n >= 3:
        small1 = stalled or abs(F.l[-1]) < thr
        small2 = abs(F.l[-2]) < thr
        if small1 or small2:
            un = F.u[-1]
            r1, r2 = _quadratic_roots(F.u[-2] + F.l[-1], F.l[-1] * un, un)
            if r1.imag != 0.0:
                # a complex pair keeps l_{n-1} away from 0, so either test will do
                return Decision.tridqds(r2)
            if small1:
                tau = r1.real if abs(r1.real - un) <= abs(r2.real - un) else r2.real
                return Decision.dqds(tau)
    return Decision.dqd()


# ---------------------------------------------------------------------------
# solver


def _eig_3x3(F: Factored) -> list:
    from .representation import lu_product

    ev = np.linalg.eigvals(lu_product(F).to_dense())
    return [complex(z) + F.acshift for z in ev]


def _shift_3x3(F: Factored, sigma: complex) -> float:
    """Real shift for a 3x3 block whose trailing 2x2 has the complex pair sigma.

    With λ the real eigenvalue of L U and p the complex pair, LR with shift
    τ shrinks l_1 by |p - τ| / |λ - τ| per step. Over real τ this is least
    at τ = Re p - (Im p)^2 / (λ - Re p), with ratio |Im p| / |λ - p| < 1.
    When that ratio is poor, λ sits close to the pair and shifting at λ
    itself, to deflate it at the bottom, is the better move.
    """
    from .representation import lu_product, charpoly

    J = lu_product(F)
    roots = np.roots(charpoly(J.a, J.e))
    k = int(np.argmin(np.abs(roots.imag)))
    lam = roots[k].real
    rest = np.delete(roots, k)
    pair = rest[np.argmax(np.abs(rest.imag))]
    if pair.imag == 0.0:
        # three real roots after all: Wilkinson-like, the one nearest sigma
        real = roots.real
        return float(real[np.argmin(np.abs(real - sigma.real))])
    delta = lam - pair.real
    if abs(pair.imag) > 0.5 * abs(lam - pair):
        return float(lam)
    return float(pair.real - pair.imag**2 / delta)


class _Segment:
    """Mutable work item: factors plus the shared transform budget."""

    __slots__ = ("F", "budget", "scale")

    def __init__(self, F: Factored, budget: list, scale: float):
        self.F = F
        self.budget = budget
        self.scale = scale


def exterior_shift(C: Tridiagonal, margin: float = 1.0 / 16.0) -> float:
    """A shift left of every Gersgorin disc of C, centred on the diagonal mean.

    ``C - sigma I`` is then strictly diagonally dominant by rows, so its LU
    factorization exists and has bounded element growth.
    """
    mu = C.trace() / C.n
    rad = np.abs(C.a - mu)
    rad[1:] += np.abs(C.b)
    rad[:-1] += np.abs(C.c)
    rho = float(rad.max())
    if rho == 0.0:
        rho = max(abs(mu), 1.0)
    return mu - (1.0 + margin) * rho


def _factor_start(J: JForm, C: Tridiagonal, pro: PrologueResult, opts: SolverOptions) -> Factored:
    """Initial factors: at mu when the prologue allows it, else outside the spectrum."""
    if pro.safe_to_shift_at_mu:
        scale = C.norm_inf()
        for k in range(4):
            sigma = pro.mu + k * opts.shift_delta * scale
            try:
                return lu_factor(J, sigma)
            except ZeroPivot:
                log.debug("zero pivot at startup shift %g", sigma)
    return lu_factor(J, exterior_shift(C))


def _solve_unreduced(J: JForm, C: Tridiagonal, opts: SolverOptions, stats: SolverStats, out: list) -> None:
    n0 = J.n
    if n0 == 1:
        out.append(complex(J.a[0]))
        return
    if n0 == 2:
        out.extend(_quadratic_roots(J.a[0], J.e[0], J.a[1]))
        return

    pro = prologue(C, opts)
    m = pro.deflated_multiplicity
    if m == n0:
        stats.prologue_multiplicity += m
        out.extend([complex(pro.mu)] * m)
        return

    F0 = _factor_start(J, C, pro, opts)
    found: list = []
    budget = [opts.maxit_factor * n0]
    try:
        _iterate(_Segment(F0, budget, C.norm_inf()), opts, stats, found)
    except MaxIterations:
        out.extend(found)  # deflated so far, reported with the failure
        raise

    if m:
        # replace the m computed values nearest mu by mu itself
        stats.prologue_multiplicity += m
        ev = np.asarray(found, dtype=complex)
        keep = np.argsort(np.abs(ev - pro.mu), kind="stable")[m:]
        found = [ev[i] for i in sorted(keep)] + [complex(pro.mu)] * m
    out.extend(found)


def _run(F: Factored, dec: Decision, opts: SolverOptions):
    """Run one transform; returns (factors, growth, accepted)."""
    if dec.kind == "tridqds":
        res = tridqds_sweep(F, dec.shift, opts.growth_threshold)
        return res.fhat, res.growth, not res.rejected
    res = dqds_step(F, dec.shift.real if isinstance(dec.shift, complex) else dec.shift)
    return res.fhat, res.growth, not rejection_test(res, opts.growth_threshold)


def _tridqds_ok(F: Factored, opts: SolverOptions) -> bool:
    return opts.use_tridqds and F.n >= 4


def _escalations(F: Factored, dec: Decision, opts: SolverOptions):
    """Shifts tried after both the first choice and its fallback failed."""
    n = F.n
    base = complex(dec.shift)
    # scale of the trailing 2x2 block of U L
    scale = max(abs(F.u[-1]), abs(F.u[-2] + F.l[-1]), abs(base.real), EPS)
    if not _tridqds_ok(F, opts):
        step = opts.shift_delta * (np.max(np.abs(F.u)) + np.max(np.abs(F.l)))
        for k in range(1, opts.max_escalations + 1):
            yield Decision.dqds(base.real + k * step)
        return
    im = abs(base.imag)
    if im == 0.0:
        im = opts.small_l_threshold * scale
    for k in range(1, opts.max_escalations + 1):
        im *= 2.0
        yield Decision.tridqds(complex(base.real, im))


def _emit_small(F: Factored, out: list) -> None:
    if F.n == 1:
        out.append(complex(F.u[0] + F.acshift))
    else:
        out.extend(trailing_2x2_eigs(F))


def _iterate(seg: _Segment, opts: SolverOptions, stats: SolverStats, out: list) -> None:
    stack = [seg.F]
    budget = seg.budget
    while stack:
        F = stack.pop()
        idle = 0  # transforms since the last deflation or split
        while True:
            n = F.n
            if n <= 2:
                _emit_small(F, out)
                break
            u, l, acs = F.u, F.l, F.acshift
            # exact zero at the bottom decouples regardless of the tests
            if l[-1] == 0.0 or deflate1_test(F, opts) or negligible_bottom(F, seg.scale, opts):
                out.append(complex(u[-1] + acs))
                log.debug("1x1 deflation at n=%d after %d transforms", n, idle)
                F = Factored(u[:-1], l[:-1], acs)
                idle = 0
                continue
            if deflate2_test(F, opts):
                out.extend(trailing_2x2_eigs(F))
                log.debug("2x2 deflation at n=%d after %d transforms", n, idle)
                F = Factored(u[:-2], l[:-2], acs)
                idle = 0
                continue
            if n >= 4:
                cuts = sorted(set(split_scan(F, opts)) | set((np.flatnonzero(l[:-2] == 0.0) + 1).tolist()))
                if cuts:
                    stats.splits += len(cuts)
                    bounds = [0, *cuts, n]
                    # top pieces pushed first so the bottom piece is processed next
                    for lo, hi in zip(bounds[:-1], bounds[1:]):
                        stack.append(Factored(u[lo:hi], l[lo : hi - 1], acs))
                    break

            if budget[0] <= 0:
                raise MaxIterations(f"no convergence within the transform budget (n={n})", segment=F)
            if n == 3 and idle >= 3 * opts.stall_limit:
                # real shifts cannot separate a tight complex pair from a nearby
                # real eigenvalue; finish the block from its dense form
                stats.direct_3x3 += 1
                log.debug("3x3 block finished directly after %d transforms", idle)
                out.extend(_eig_3x3(F))
                break

            dec = choose_transform(F, opts, stalled=idle >= max(opts.stall_limit, n))
            if dec.kind == "tridqds" and not _tridqds_ok(F, opts):
                dec = Decision.dqds(_shift_3x3(F, dec.shift) if n == 3 else dec.shift.real)
            new = _attempt(F, dec, opts, stats, budget)
            if new is None:
                raise MaxIterations(f"every fallback shift was rejected (n={n})", segment=F)
            F = new
            idle += 1


def _attempt(F: Factored, dec: Decision, opts: SolverOptions, stats: SolverStats, budget: list):
    tried = [dec]
    fb = choose_transform(F, opts, last_rejection=dec)
    if fb.kind == "tridqds" and not _tridqds_ok(F, opts):
        fb = None
    if fb is not None:
        tried.append(fb)
    tried.extend(_escalations(F, dec, opts))
    best = None
    for d in tried:
        if budget[0] <= 0:
            return None
        budget[0] -= 1
        new, growth, ok = _run(F, d, opts)
        if ok:
            _count(stats, d)
            return new
        stats.rejections += 1
        log.debug("rejected %s(%s) at n=%d, growth %g", d.kind, d.shift, F.n, growth)
        if new.is_finite() and math.isfinite(growth) and (best is None or growth < best[0]):
            best = (growth, d, new)
    if best is None or opts.on_stall == "raise":
        return None
    stats.forced_accepts += 1
    _count(stats, best[1])
    log.debug("forced accept of %s(%s), growth %g", best[1].kind, best[1].shift, best[0])
    return best[2]


def _count(stats: SolverStats, d: Decision) -> None:
    if d.kind == "tridqds":
        stats.tridqds_count += 1
    else:
        stats.dqds_count += 1


def solve(C: Tridiagonal, opts: SolverOptions = SolverOptions()) -> Spectrum:
    """All eigenvalues of the real tridiagonal C, with multiplicity.

    Raises :class:`MaxIterations` (carrying the partial spectrum) when a
    block does not converge within ``maxit_factor * n`` transforms.
    """
    stats = SolverStats()
    out: list = []
    parts = to_jform(C)
    stats.splits += len(parts) - 1
    for J, offset in parts:
        try:
            _solve_unreduced(J, C.segment(offset, offset + J.n), opts, stats, out)
        except MaxIterations as exc:
            exc.partial = Spectrum(np.asarray(out, dtype=complex), stats)
            raise
    return Spectrum(np.asarray(out, dtype=complex), stats)
