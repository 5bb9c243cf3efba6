"""Bound-state radial functions ``u(r)``: evaluation, normalization and tabulation.

With ``z = |q| e^{-2 alpha r}`` the closed forms are

* Deep: ``N (1-z)^delta_l z^w_l P_n^{(2 w_l, 2 delta_l - 1)}(1 - 2z)``,
* ShallowNegative: ``C (1-z)^delta z^w 2F1(delta+w-p, delta+w+p; 2w+1; z)``,
* Positive: ``C y^p (1-y)^w 2F1(p+w-delta+1, p+w+delta; 2p+1; y)`` with
  ``y = q / (q + e^{2 alpha r})``.

``N`` is analytic; ``C`` is fixed by numerical normalization with the first
lobe from the inner boundary taken positive.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, TailError
from .qmath import PotentialParams, Regime, inner_boundary
from .specfun import hyp2f1, jacobi_p, log_gamma
from .spectrum import EnergyLevel, ParticleSpec

__all__ = [
    "Spacing",
    "RadialGrid",
    "RadialTable",
    "wavefunction_deep",
    "wavefunction_shallow",
    "wavefunction_positive",
    "wavefunction",
    "deep_normalization",
    "tail_cutoff",
    "norm_quadrature",
    "default_points",
    "normalize_numeric",
    "count_nodes",
]

GL_ORDER = 64
TAIL_BUDGET = 1e-12
MAX_SPAN_ALPHA = 1e4
NODE_FLOOR = 1e-10
DEFAULT_POINTS = 2001
MAX_POINTS = 200_001

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


class Spacing(str, Enum):
    UNIFORM = "Uniform"


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    n_points: int
    spacing: Spacing = Spacing.UNIFORM

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise DomainError("n_points must be at least 2")
        if not self.r_max > self.r_min:
            raise DomainError("r_max must exceed r_min")
        object.__setattr__(self, "spacing", Spacing(self.spacing))

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n_points)


@dataclass(frozen=True)
class RadialTable:
    """``u`` sampled on ``grid``; ``norm`` is the quadrature value of the integral of ``u^2``."""

    grid: RadialGrid
    values: np.ndarray
    norm: float
    level: EnergyLevel
    scale: float = field(default=1.0)

    @property
    def r(self) -> np.ndarray:
        return self.grid.points


def _check_regime(params: PotentialParams, regime: Regime) -> None:
    if params.regime is not regime:
        raise DomainError(f"level requires the {regime.value} regime, got q={params.q!r}")


def _check_r(params: PotentialParams, r: float) -> None:
    r0 = inner_boundary(params)
    if not r > r0:
        raise DomainError(f"r={r!r} is not inside the domain r > {r0!r}")


def _z(params: PotentialParams, r: float) -> tuple[float, float]:
    """``(z, 1 - z)`` with ``z = |q| e^{-2 alpha r}``, both accurate near ``z = 1``."""
    arg = math.log(abs(params.q)) - 2.0 * params.alpha * r
    return math.exp(arg), -math.expm1(arg)


def _pow(base: float, expo: float) -> float:
    if base == 0.0:
        return 0.0 if expo > 0.0 else (1.0 if expo == 0.0 else math.inf)
    return math.exp(expo * math.log(base))


def _deep_raw(params: PotentialParams, level: EnergyLevel, r: float) -> float:
    a = level.aux
    z, omz = _z(params, r)
    return _pow(omz, a.delta_l) * _pow(z, a.w_l) * jacobi_p(level.n_r, 2.0 * a.w_l, 2.0 * a.delta_l - 1.0, 1.0 - 2.0 * z)


def deep_normalization(params: PotentialParams, level: EnergyLevel) -> float:
    """Analytic constant ``N_{n_r,l}`` of the Deep-regime wave function, in log space."""
    a = level.aux
    n, w, d = level.n_r, a.w_l, a.delta_l
    log_n2 = (
        math.log(4.0 * params.alpha * w * (n + w + d) / (n + d))
        + log_gamma(n + 1.0)
        + log_gamma(n + 2.0 * w + 2.0 * d)
        - log_gamma(n + 2.0 * w + 1.0)
        - log_gamma(n + 2.0 * d)
    )
    return math.exp(0.5 * log_n2)


def _shallow_raw(params: PotentialParams, level: EnergyLevel, r: float) -> float:
    a = level.aux
    d, p, w = a.delta, a.p, a.w
    z, omz = _z(params, r)
    return _pow(omz, d) * _pow(z, w) * hyp2f1(d + w - p, d + w + p, 2.0 * w + 1.0, z)


def _positive_raw(params: PotentialParams, level: EnergyLevel, r: float) -> float:
    a = level.aux
    d, p, w = a.delta, a.p, a.w
    # y = q / (q + e^{2 alpha r}),  1 - y = 1 / (1 + q e^{-2 alpha r})
    t = math.log(params.q) - 2.0 * params.alpha * r
    y = 1.0 / (1.0 + math.exp(-t))
    omy = 1.0 / (1.0 + math.exp(t))
    return _pow(y, p) * _pow(omy, w) * hyp2f1(p + w - d + 1.0, p + w + d, 2.0 * p + 1.0, y)


_RAW = {
    Regime.DEEP: _deep_raw,
    Regime.SHALLOW_NEGATIVE: _shallow_raw,
    Regime.POSITIVE: _positive_raw,
}


def wavefunction_deep(params: PotentialParams, spec: ParticleSpec, level: EnergyLevel, r: float) -> float:
    """Analytically normalized Deep-regime ``u(r)`` for ``r > r0``."""
    _check_regime(params, Regime.DEEP)
    _check_r(params, r)
    return deep_normalization(params, level) * _deep_raw(params, level, r)


def wavefunction_shallow(
    params: PotentialParams, spec: ParticleSpec, level: EnergyLevel, r: float, C: float = 1.0
) -> float:
    """ShallowNegative ``u(r)`` for ``r > 0`` with prefactor ``C``."""
    _check_regime(params, Regime.SHALLOW_NEGATIVE)
    _check_r(params, r)
    return C * _shallow_raw(params, level, r)


def wavefunction_positive(
    params: PotentialParams, spec: ParticleSpec, level: EnergyLevel, r: float, C: float = 1.0
) -> float:
    """Positive-regime ``u(r)`` for ``r > 0`` with prefactor ``C``."""
    _check_regime(params, Regime.POSITIVE)
    _check_r(params, r)
    return C * _positive_raw(params, level, r)


def wavefunction(params: PotentialParams, spec: ParticleSpec, level: EnergyLevel, r: float) -> float:
    """Dispatch on the regime; Deep values carry ``N``, the others ``C = 1``."""
    if params.regime is Regime.DEEP:
        return wavefunction_deep(params, spec, level, r)
    if params.regime is Regime.SHALLOW_NEGATIVE:
        return wavefunction_shallow(params, spec, level, r)
    return wavefunction_positive(params, spec, level, r)


def tail_cutoff(params: PotentialParams, level: EnergyLevel) -> float:
    """``r_max`` such that the tail of ``u^2`` beyond it is below ``1e-12``.

    The span is the largest of ``50/alpha``, ``15/(alpha k)`` (so that
    ``e^{-2 alpha k span} < 1e-13``) and the tail-integral bound, where ``k``
    is the decay exponent.

    Raises:
        TailError: if that needs ``r_max > r_inner + 1e4 / alpha``.
    """
    a = params.alpha
    k = level.aux.decay
    r_in = inner_boundary(params)
    if k is None or not k > 0.0:
        raise TailError(f"decay exponent {k!r} is not positive")
    rate = 4.0 * a * k
    span = max(50.0 / a, 15.0 / (a * k), math.log(max(1.0 / (TAIL_BUDGET * rate), 1.0)) / rate)
    if span > MAX_SPAN_ALPHA / a:
        raise TailError(f"decay exponent {k!r} needs r_max - r_inner = {span:.3g} > {MAX_SPAN_ALPHA / a:.3g}")
    return r_in + span


def _panels(params: PotentialParams, level: EnergyLevel, r_max: float) -> np.ndarray:
    a = params.alpha
    r_in = inner_boundary(params)
    k = level.aux.decay
    # geometric grading towards the inner boundary, then widening panels
    edges = [0.0] + list(np.geomspace(1e-8, 1.0, 17) / a)
    width_cap = max(1.0 / a, 0.5 / (a * k))
    width = 1.0 / a
    x_end = r_max - r_in
    while edges[-1] < x_end:
        edges.append(min(edges[-1] + width, x_end))
        width = min(width * 1.25, width_cap)
    return r_in + np.asarray(edges)


def norm_quadrature(f: Callable[[float], float], edges: np.ndarray) -> float:
    """Composite 64-point Gauss-Legendre integral of ``f^2`` over the panels ``edges``."""
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        vals = np.array([f(mid + half * x) for x in _GL_X])
        total += half * float(np.dot(_GL_W, vals * vals))
    return total


def _first_lobe_sign(f: Callable[[float], float], edges: np.ndarray) -> float:
    rs = np.linspace(edges[0], edges[-1], 20001)[1:]
    vals = np.array([f(r) for r in rs])
    big = np.abs(vals) >= 1e-6 * np.max(np.abs(vals))
    return 1.0 if vals[big][0] > 0.0 else -1.0


def default_points(params: PotentialParams, level: EnergyLevel, r_max: float) -> int:
    """Uniform table size that resolves every node of ``level``.

    Nodes crowd towards the inner boundary with spacing of order
    ``1 / (2 alpha (n_r + 1)^2)``; the table step is an eighth of that,
    with at least 2001 and at most 200001 points.
    """
    step = 1.0 / (16.0 * params.alpha * (level.n_r + 1) ** 2)
    n = math.ceil((r_max - inner_boundary(params)) / step) + 1
    return int(min(max(n, DEFAULT_POINTS), MAX_POINTS))


def normalize_numeric(
    params: PotentialParams,
    spec: ParticleSpec,
    level: EnergyLevel,
    grid: RadialGrid | None = None,
    evaluator: Callable[[float], float] | None = None,
) -> RadialTable:
    """Normalized table of ``u`` on ``grid``.

    For the Deep regime without a custom ``evaluator`` the analytic ``N`` is
    kept and ``norm`` reports the quadrature check.  Otherwise ``C`` is
    chosen so that the integral of ``u^2`` is 1 and the first lobe is
    positive; ``norm`` is then the integral after scaling.  ``evaluator``
    replaces the built-in un-normalized ``u(r)``.

    Raises:
        TailError: if no admissible ``r_max`` meets the tail budget.
    """
    r_in = inner_boundary(params)
    r_max = tail_cutoff(params, level)
    if grid is None:
        grid = RadialGrid(r_in, r_max, default_points(params, level, r_max))
    if grid.r_min < r_in:
        raise DomainError(f"grid starts at {grid.r_min!r} below the inner boundary {r_in!r}")
    raw = _RAW[params.regime]
    f = evaluator if evaluator is not None else (lambda r: raw(params, level, r))
    edges = _panels(params, level, max(r_max, grid.r_max))
    if params.regime is Regime.DEEP and evaluator is None:
        scale = deep_normalization(params, level)
        norm = scale * scale * norm_quadrature(f, edges)
    else:
        integral = norm_quadrature(f, edges)
        scale = _first_lobe_sign(f, edges) / math.sqrt(integral)
        norm = scale * scale * integral
    values = np.array([scale * f(r) if r > r_in else 0.0 for r in grid.points])
    return RadialTable(grid, values, norm, level, scale)


def count_nodes(table: RadialTable) -> int:
    """Strict sign changes of ``table.values`` ignoring entries below ``1e-10 max|u|``."""
    v = np.asarray(table.values, dtype=float)
    if v.size == 0:
        return 0
    big = np.abs(v) >= NODE_FLOOR * np.max(np.abs(v))
    s = np.sign(v[big])
    return int(np.count_nonzero(s[1:] != s[:-1]))
