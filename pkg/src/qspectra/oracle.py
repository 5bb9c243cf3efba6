"""Finite-difference eigensolver for the effective radial equation.

Solves

    -1/2 u'' + [(E+M) V(r) + 1/2 c_l(r)] u = (E^2 - M^2)/2 u,   r > r_inner,

self-consistently in ``E``, with ``u = 0`` at both ends of a finite box.
Only the potential and centrifugal term from :mod:`qspectra.qmath` are used,
so agreement with the closed-form results is an independent check.

Two grids are available.  ``uniform`` is the plain three-point scheme in
``x = r - r_inner``.  ``log`` (the default) uses ``x = e^t / alpha`` with
uniform steps in ``t`` and ``u = sqrt(x) v``, which turns the problem into
the symmetric tridiagonal pencil

    [-1/2 d^2/dt^2 + 1/8 + x^2 W] v = lambda x^2 v.

The logarithmic grid resolves the ``x^s`` behaviour at a singular inner
boundary, where a uniform grid loses its second-order convergence.  The
inner cutoff is chosen from the local exponent ``s`` so that the Dirichlet
truncation error stays near machine precision.

For fixed ``E`` the number of pencil eigenvalues below ``sigma = (E^2-M^2)/2``
follows from the inertia of ``A - sigma B`` (Sturm count).  A bound state
with ``k`` nodes is a point where that count steps across ``k + 1/2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numba import njit
from scipy.linalg import solve_banded

from .errors import DomainError, NodeMismatchError, NoRootError
from .qmath import (
    CentrifugalMode,
    PotentialParams,
    centrifugal_from_inner,
    potential_from_inner,
)

__all__ = [
    "GridKind",
    "OracleConfig",
    "TridiagonalOperator",
    "OracleResult",
    "build_operator",
    "sturm_count",
    "eigenvalue_k",
    "oracle_window",
    "oracle_g",
    "oracle_levels",
    "oracle_energy",
]

# smallest alpha * x_min allowed for the logarithmic grid
_XMIN_FLOOR = 1e-140
_XMIN_CEIL = 1e-9
# t-span that n_grid points cover at the reference spacing
_T_REF = math.log(50.0) - math.log(1e-9)


class GridKind(str, Enum):
    LOG = "log"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class OracleConfig:
    """Discretization settings.

    Attributes:
        n_grid: Number of intervals of the uniform grid; for the log grid,
            the number of intervals per ``ln(50 / 1e-9)`` of ``t``.
        r_max_factor: Box length in units of ``1 / alpha``.
        centrifugal_mode: ``exact`` or ``approx`` (Deep regime only).
        richardson: Repeat at ``h/2`` and ``h/4`` and extrapolate.
        e_scan_points: Energies sampled when bracketing roots.
        grid: ``log`` or ``uniform``.
        e_rtol: Bisection tolerance on ``E`` relative to ``M``.
    """

    n_grid: int = 4000
    r_max_factor: float = 50.0
    centrifugal_mode: CentrifugalMode = CentrifugalMode.EXACT
    richardson: bool = True
    e_scan_points: int = 400
    grid: GridKind = GridKind.LOG
    e_rtol: float = 1e-13

    def __post_init__(self) -> None:
        if self.n_grid < 100:
            raise DomainError("n_grid must be at least 100")
        if not self.r_max_factor > 0.0:
            raise DomainError("r_max_factor must be positive")
        if self.e_scan_points < 3:
            raise DomainError("e_scan_points must be at least 3")
        object.__setattr__(self, "centrifugal_mode", CentrifugalMode(self.centrifugal_mode))
        object.__setattr__(self, "grid", GridKind(self.grid))


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal pencil ``A v = lambda B v`` with diagonal ``B``.

    ``weight`` holds the diagonal of ``B`` (all ones on a uniform grid) and
    ``x`` the node offsets from the inner boundary.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    h: float
    weight: np.ndarray = field(default=None)  # type: ignore[assignment]
    x: np.ndarray | None = None

    def __post_init__(self) -> None:
        diag = np.ascontiguousarray(self.diag, dtype=float)
        off = np.ascontiguousarray(self.offdiag, dtype=float)
        if off.size != max(diag.size - 1, 0):
            raise DomainError("offdiag must have one entry fewer than diag")
        w = np.ones_like(diag) if self.weight is None else np.ascontiguousarray(self.weight, dtype=float)
        if w.shape != diag.shape or np.any(w <= 0.0):
            raise DomainError("weight must be positive and match diag")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)
        object.__setattr__(self, "weight", w)

    @property
    def dimension(self) -> int:
        return int(self.diag.size)


@dataclass(frozen=True)
class OracleResult:
    """A bound state found by the eigensolver.

    ``E`` is the Richardson-extrapolated energy when ``richardson`` is on.
    ``energies`` lists the raw values at ``h, h/2, h/4`` and ``ratio`` is
    ``(E_h - E_h/2) / (E_h/2 - E_h/4)``.
    """

    E: float
    n_r: int
    l: int
    grid_error_estimate: float
    converged: bool
    h: float = math.nan
    energies: tuple[float, ...] = ()
    ratio: float = math.nan
    nodes: int = -1
    other_roots: tuple[float, ...] = ()


@njit(cache=True)
def _count(diag, off, w, sigma):
    n = diag.size
    cnt = 0
    d = diag[0] - sigma * w[0]
    for i in range(n):
        if i > 0:
            if d == 0.0:
                d = 1e-300
            d = diag[i] - sigma * w[i] - off[i - 1] * off[i - 1] / d
        if d < 0.0:
            cnt += 1
    return cnt


@njit(cache=True)
def _count_at_energy(a0, xv, xc, w, off, scale, sigma):
    # diag = a0 + scale * xv + 0.5 * xc built on the fly
    n = a0.size
    cnt = 0
    d = 0.0
    for i in range(n):
        di = a0[i] + scale * xv[i] + 0.5 * xc[i] - sigma * w[i]
        if i > 0:
            if d == 0.0:
                d = 1e-300
            di -= off[i - 1] * off[i - 1] / d
        d = di
        if d < 0.0:
            cnt += 1
    return cnt


def sturm_count(op: TridiagonalOperator, sigma: float) -> int:
    """Number of pencil eigenvalues strictly below ``sigma``."""
    return int(_count(op.diag, op.offdiag, op.weight, float(sigma)))


def eigenvalue_k(op: TridiagonalOperator, k: int, tol: float = 1e-13) -> float:
    """``k``-th smallest eigenvalue (``k = 0`` is the lowest) by Sturm bisection.

    Raises:
        IndexError: unless ``0 <= k < op.dimension``.
    """
    if not (0 <= k < op.dimension):
        raise IndexError(f"k={k} out of range for dimension {op.dimension}")
    lo, hi = -1.0, 1.0
    while sturm_count(op, lo) > k:
        lo *= 2.0
    while sturm_count(op, hi) <= k:
        hi *= 2.0
    while hi - lo > max(tol, 4e-16 * max(abs(lo), abs(hi))):
        mid = 0.5 * (lo + hi)
        if sturm_count(op, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class _Grid:
    x: np.ndarray
    weight: np.ndarray
    h: float
    kind: GridKind
    ax_min: float


def _limits(params: PotentialParams, l: int, mode: CentrifugalMode) -> tuple[float, float, float, float]:
    """Local behaviour of the effective potential from qmath evaluations.

    Returns ``(cV, cc, V_inf, c_inf)``: ``x^2 V`` and ``x^2 c_l`` as
    ``x -> 0`` and the limits of ``V`` and ``c_l`` as ``x -> inf``.
    """
    a = params.alpha
    x0 = 1e-12 / a
    cV = x0 * x0 * potential_from_inner(params, x0)
    cc = x0 * x0 * centrifugal_from_inner(mode, l, params, x0)
    xinf = 1e6 / a
    return float(cV), float(cc), float(potential_from_inner(params, xinf)), float(centrifugal_from_inner(mode, l, params, xinf))


def _exponent(cV: float, cc: float, E: float, M: float) -> float:
    """Indicial exponent ``s`` of ``u ~ x^s`` at the inner boundary (nan if complex)."""
    c = 2.0 * (E + M) * cV + cc
    disc = 0.25 + c
    return 0.5 + math.sqrt(disc) if disc > 0.0 else math.nan


def oracle_window(params: PotentialParams, M: float, l: int, config: OracleConfig) -> tuple[float, float] | None:
    """Energies where the oracle looks for bound states.

    Requires ``|E| < M``, a real indicial exponent at the inner boundary and
    ``sigma(E)`` below the asymptotic value of the effective potential.
    """
    cV, cc, v_inf, c_inf = _limits(params, l, config.centrifugal_mode)
    lo, hi = -M, M
    # 1/4 + 2 (E+M) cV + cc > 0, affine in E
    if cV < 0.0:
        hi = min(hi, (-(0.25 + cc) / (2.0 * cV)) - M)
    elif cV > 0.0:
        lo = max(lo, (-(0.25 + cc) / (2.0 * cV)) - M)
    elif 0.25 + cc <= 0.0:
        return None
    # (E^2 - M^2)/2 < (E+M) v_inf + c_inf/2  <=>  E^2 - 2 v_inf E - (M^2 + 2 M v_inf + c_inf) < 0
    b = -2.0 * v_inf
    c = -(M * M + 2.0 * M * v_inf + c_inf)
    disc = b * b - 4.0 * c
    if disc <= 0.0:
        return None
    sq = math.sqrt(disc)
    lo = max(lo, 0.5 * (-b - sq))
    hi = min(hi, 0.5 * (-b + sq))
    if not hi > lo:
        return None
    return lo, hi


def _make_grid(params: PotentialParams, l: int, config: OracleConfig, s_min: float, refine: int) -> _Grid:
    a = params.alpha
    if config.grid is GridKind.UNIFORM:
        n = config.n_grid * refine
        length = config.r_max_factor / a
        h = length / n
        x = h * np.arange(1, n)
        return _Grid(x, np.ones_like(x), h, GridKind.UNIFORM, 0.0)
    excess = 2.0 * s_min - 1.0
    ax_min = 10.0 ** (-16.0 / excess) if excess > 0.0 else 0.0
    ax_min = min(max(ax_min, _XMIN_FLOOR), _XMIN_CEIL)
    t_lo = math.log(ax_min)
    t_hi = math.log(config.r_max_factor)
    span = t_hi - t_lo
    n = max(config.n_grid, int(math.ceil(config.n_grid * span / _T_REF))) * refine
    h = span / n
    t = t_lo + h * np.arange(1, n)
    x = np.exp(t) / a
    return _Grid(x, x * x, h, GridKind.LOG, ax_min)


@dataclass(frozen=True)
class _Discretization:
    grid: _Grid
    a0: np.ndarray
    xv: np.ndarray
    xc: np.ndarray
    off: np.ndarray


def _discretize(params: PotentialParams, l: int, config: OracleConfig, grid: _Grid) -> _Discretization:
    x = grid.x
    v = potential_from_inner(params, x)
    c = centrifugal_from_inner(config.centrifugal_mode, l, params, x)
    h = grid.h
    if grid.kind is GridKind.LOG:
        xx = x * x
        a0 = np.full_like(x, 1.0 / h**2 + 0.125)
        xv, xc = xx * v, xx * c
    else:
        a0 = np.full_like(x, 1.0 / h**2)
        xv, xc = np.asarray(v, dtype=float), np.asarray(c, dtype=float)
    off = np.full(x.size - 1, -0.5 / h**2)
    return _Discretization(grid, a0, np.ascontiguousarray(xv), np.ascontiguousarray(xc), off)


def _count_E(disc: _Discretization, E: float, M: float) -> int:
    sigma = 0.5 * (E * E - M * M)
    return int(_count_at_energy(disc.a0, disc.xv, disc.xc, disc.grid.weight, disc.off, E + M, sigma))


def _operator(disc: _Discretization, E: float, M: float) -> TridiagonalOperator:
    diag = disc.a0 + (E + M) * disc.xv + 0.5 * disc.xc
    return TridiagonalOperator(diag, disc.off, disc.grid.h, disc.grid.weight, disc.grid.x)


def build_operator(
    params: PotentialParams, spec, E_trial: float, l: int, config: OracleConfig = OracleConfig()
) -> TridiagonalOperator:
    """Discretized operator at a fixed trial energy.

    ``diag`` includes ``W = (E_trial + M) V + c_l / 2`` (scaled by ``x^2`` on
    the log grid); the inner cutoff of the log grid follows the indicial
    exponent at ``E_trial``.

    Raises:
        DomainError: if ``E_trial`` is outside ``(-M, M)``.
    """
    M = spec.M
    if not (-M < E_trial < M):
        raise DomainError(f"E_trial={E_trial!r} outside (-M, M)")
    cV, cc, _, _ = _limits(params, l, config.centrifugal_mode)
    s = _exponent(cV, cc, E_trial, M)
    grid = _make_grid(params, l, config, s if math.isfinite(s) else 0.5, 1)
    return _operator(_discretize(params, l, config, grid), E_trial, M)


def oracle_g(params: PotentialParams, spec, E: float, n_r: int, l: int, config: OracleConfig = OracleConfig()) -> float:
    """``g(E) = eigenvalue_{n_r}(E) - (E^2 - M^2)/2`` on the base grid."""
    op = build_operator(params, spec, E, l, config)
    return eigenvalue_k(op, n_r) - 0.5 * (E * E - spec.M**2)


def _bisect_count(disc: _Discretization, M: float, k: int, lo: float, hi: float, tol: float) -> float:
    # predicate count > k flips between lo and hi
    p_lo = _count_E(disc, lo, M) > k
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (_count_E(disc, mid, M) > k) == p_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bracket_near(disc: _Discretization, M: float, k: int, E0: float, width: float, lo_lim: float, hi_lim: float):
    for _ in range(60):
        lo = max(E0 - width, lo_lim)
        hi = min(E0 + width, hi_lim)
        if (_count_E(disc, lo, M) > k) != (_count_E(disc, hi, M) > k):
            return lo, hi
        width *= 2.0
    return None


def _node_count(disc: _Discretization, E: float, M: float, k: int) -> int:
    op = _operator(disc, E, M)
    lam = eigenvalue_k(op, k)
    n = op.dimension
    ab = np.zeros((3, n))
    ab[0, 1:] = op.offdiag
    ab[1, :] = op.diag - lam * op.weight
    ab[2, :-1] = op.offdiag
    v = np.ones(n) / math.sqrt(n)
    for _ in range(3):
        v = solve_banded((1, 1), ab, op.weight * v)
        v /= np.max(np.abs(v))
    big = np.abs(v) >= 1e-10
    s = np.sign(v[big])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _s_min(params: PotentialParams, l: int, config: OracleConfig, lo: float, hi: float, M: float) -> float:
    cV, cc, _, _ = _limits(params, l, config.centrifugal_mode)
    pad = 1e-9 * (hi - lo)
    vals = [_exponent(cV, cc, e, M) for e in (lo + pad, hi - pad)]
    vals = [v for v in vals if math.isfinite(v)]
    return min(vals) if vals else 0.5


def _refine(
    params: PotentialParams, M: float, k: int, l: int, config: OracleConfig, s_min: float, E0: float, lo_lim: float, hi_lim: float
) -> tuple[list[float], list[float]]:
    """Energies of the root near ``E0`` on successively halved grids."""
    energies, hs = [E0], []
    base = _make_grid(params, l, config, s_min, 1)
    hs.append(base.h)
    if not config.richardson:
        return energies, hs
    prev = E0
    width = 1e-6 * M
    for refine in (2, 4):
        grid = _make_grid(params, l, config, s_min, refine)
        disc = _discretize(params, l, config, grid)
        br = _bracket_near(disc, M, k, prev, width, lo_lim, hi_lim)
        if br is None:
            break
        E = _bisect_count(disc, M, k, br[0], br[1], config.e_rtol * M)
        width = max(2.0 * abs(E - prev), 1e-9 * M)
        energies.append(E)
        hs.append(grid.h)
        prev = E
    return energies, hs


def oracle_levels(
    params: PotentialParams, spec, l: int, n_r_max: int, config: OracleConfig = OracleConfig()
) -> list[OracleResult]:
    """Every bracketed bound state with ``k <= n_r_max`` nodes, sorted by ``(n_r, E)``.

    ``n_r`` of each result is the eigenvalue index ``k`` whose crossing was
    found; ``nodes`` is the node count of the eigenvector at the root.
    """
    M = spec.M
    win = oracle_window(params, M, l, config)
    if win is None:
        return []
    lo_w, hi_w = win
    s_min = _s_min(params, l, config, lo_w, hi_w, M)
    base = _make_grid(params, l, config, s_min, 1)
    disc = _discretize(params, l, config, base)
    pad = 1e-9 * (hi_w - lo_w)
    Es = np.linspace(lo_w + pad, hi_w - pad, config.e_scan_points)
    counts = [_count_E(disc, float(e), M) for e in Es]
    results = []
    for i in range(len(Es) - 1):
        c0, c1 = counts[i], counts[i + 1]
        if c0 == c1:
            continue
        for k in range(min(c0, c1), min(max(c0, c1), n_r_max + 1)):
            E0 = _bisect_count(disc, M, k, float(Es[i]), float(Es[i + 1]), config.e_rtol * M)
            energies, hs = _refine(params, M, k, l, config, s_min, E0, lo_w + pad, hi_w - pad)
            trunc = _truncation(params, l, config, base, energies[-1], M)
            results.append(_finish(disc, M, k, l, energies, hs, trunc))
    results.sort(key=lambda r: (r.n_r, r.E))
    return results


def _truncation(params: PotentialParams, l: int, config: OracleConfig, grid: _Grid, E: float, M: float) -> float:
    # relative error from cutting the log grid at ax_min, for u ~ x^s at energy E
    if grid.kind is GridKind.UNIFORM:
        return 0.0
    cV, cc, _, _ = _limits(params, l, config.centrifugal_mode)
    s = _exponent(cV, cc, E, M)
    excess = 2.0 * s - 1.0 if math.isfinite(s) else 0.0
    return grid.ax_min**excess if excess > 0.0 else 1.0


def _finish(disc, M, k, l, energies, hs, trunc) -> OracleResult:
    nodes = _node_count(disc, energies[0], M, k)
    trunc_err = M * trunc
    if len(energies) == 3:
        e1, e2, e3 = energies
        d12, d23 = e1 - e2, e2 - e3
        ratio = d12 / d23 if d23 != 0.0 else math.inf
        E = e3 + (e3 - e2) / 3.0
        # spread between the two order-2 extrapolants bounds the O(h^4) remainder
        est = abs(E - (e2 + (e2 - e1) / 3.0)) + trunc_err
        return OracleResult(E, k, l, est, bool(est < 1e-7 * M), hs[0], tuple(energies), ratio, nodes)
    return OracleResult(energies[0], k, l, math.inf, False, hs[0], tuple(energies), math.nan, nodes)


def oracle_energy(
    params: PotentialParams, spec, n_r: int, l: int, config: OracleConfig = OracleConfig()
) -> OracleResult:
    """Bound state with ``n_r`` nodes for angular momentum ``l``.

    Raises:
        NoRootError: if no crossing of eigenvalue ``n_r`` is bracketed.
        NodeMismatchError: if crossings exist but none has ``n_r`` nodes.
    """
    found = [r for r in oracle_levels(params, spec, l, n_r, config) if r.n_r == n_r]
    if not found:
        raise NoRootError(f"no bound state with index {n_r} for l={l}")
    good = [r for r in found if r.nodes == n_r]
    if not good:
        raise NodeMismatchError(f"roots for index {n_r} have node counts {[r.nodes for r in found]}")
    best = good[0]
    others = tuple(r.E for r in found if r is not best)
    if others:
        warnings.warn(f"additional roots for n_r={n_r}, l={l}: {others}", RuntimeWarning, stacklevel=2)
        best = OracleResult(**{**best.__dict__, "other_roots": others})
    return best
