"""Closed-form Green's functions and their Dirichlet-restricted form.

Both base Green's functions share the structure

    G(x1, x2) = Gamma-ratio * psi_a(x_<) psi_b(x_>)

and are returned without the overall ``-1/(2 alpha)`` factor.  With
``y = e^{-2x}`` the Manning-Rosen form reads

    [(1-y1)(1-y2)]^delta (y1 y2)^w F(a, b; 2w+1; y_>) F(a, b; 2 delta; 1 - y_<),

``a = delta + w - p``, ``b = delta + w + p``.  The Rosen-Morse form uses
``y = 1 / (1 + e^{2x})`` and

    (y1 y2)^p [(1-y1)(1-y2)]^w F(a, b; 2p+1; y_>) F(a, b; 2w+1; 1 - y_<),

``a = p + w - delta + 1``, ``b = p + w + delta``, so that its value at the
wall ``x0 = -ln(q)/2`` carries the Positive-regime quantization residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError, QuantizationPole
from .qmath import PotentialParams, Regime
from .specfun import gamma_sign_log, hyp2f1
from .spectrum import ParticleSpec, QuantumNumbers, admissible_energy_window, aux_parameters

__all__ = [
    "GreensEvalPoint",
    "POLE_TOL",
    "ZERO_TOL",
    "greens_manning_rosen",
    "greens_rosen_morse",
    "wall_coordinate",
    "dirichlet_greens",
    "greens_diagonal_at_wall",
    "DualityScan",
    "duality_zeros",
]

POLE_TOL = 1e-9
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class GreensEvalPoint:
    """``value`` includes ``exp(prefactor_log)`` and its sign."""

    x1: float
    x2: float
    E: float
    value: float
    prefactor_log: float


def _gamma_ratio(a: float, b: float, c1: float, c2: float) -> tuple[float, int]:
    """``log|Gamma(a) Gamma(b) / (Gamma(c1) Gamma(c2))|`` and its sign."""
    n = round(a)
    if n <= 0 and abs(a - n) < POLE_TOL:
        raise PoleError(f"M1 - L_E = {a!r} is at a bound-state pole")
    total, sign = 0.0, 1
    for x, s in ((a, 1), (b, 1), (c1, -1), (c2, -1)):
        lg, sg = gamma_sign_log(x)
        total += s * lg
        sign *= sg
    return total, sign


def _mr_parameters(params: PotentialParams, spec: ParticleSpec, E: float, l: int) -> tuple[float, float, float]:
    if params.regime is Regime.POSITIVE:
        raise DomainError("the Manning-Rosen Green's function needs q < 0")
    aux = aux_parameters(params, spec, E, QuantumNumbers(0, l))
    if not aux.admissible:
        raise DomainError(f"E={E!r} is not admissible: {aux.reason}")
    if params.regime is Regime.DEEP:
        return aux.delta_l, aux.w_l, aux.p_l
    return aux.delta, aux.w, aux.p


def _rm_parameters(params: PotentialParams, spec: ParticleSpec, E: float) -> tuple[float, float, float]:
    if params.regime is not Regime.POSITIVE:
        raise DomainError("the Rosen-Morse Green's function needs q > 0")
    aux = aux_parameters(params, spec, E, QuantumNumbers(0, 0))
    if not aux.admissible:
        raise DomainError(f"E={E!r} is not admissible: {aux.reason}")
    return aux.delta, aux.p, aux.w


def _mr_factors(delta: float, w: float, p: float, x1: float, x2: float) -> tuple[float, float, float]:
    """``(log|Gamma-ratio|, sign, remaining product)`` for the Manning-Rosen form."""
    a, b = delta + w - p, delta + w + p
    lg, sg = _gamma_ratio(a, b, 2.0 * delta, 2.0 * w + 1.0)
    xs, xl = min(x1, x2), max(x1, x2)
    y1, y2 = math.exp(-2.0 * x1), math.exp(-2.0 * x2)
    om1, om2 = -math.expm1(-2.0 * x1), -math.expm1(-2.0 * x2)
    powers = delta * math.log(om1 * om2) + w * math.log(y1 * y2)
    f_far = hyp2f1(a, b, 2.0 * w + 1.0, math.exp(-2.0 * xl))
    f_near = hyp2f1(a, b, 2.0 * delta, -math.expm1(-2.0 * xs))
    return lg, sg, math.exp(powers) * f_far * f_near


def greens_manning_rosen(
    params: PotentialParams, spec: ParticleSpec, E: float, l: int, x1: float, x2: float
) -> GreensEvalPoint:
    """Manning-Rosen Green's function at ``x1, x2 > 0`` (Deep or ShallowNegative mapping).

    Raises:
        PoleError: when ``M1 - L_E`` is within ``1e-9`` of a non-positive integer.
        DomainError: for ``x <= 0``, ``q > 0`` or an inadmissible ``E``.
    """
    if not (x1 > 0.0 and x2 > 0.0):
        raise DomainError("x1 and x2 must be positive")
    delta, w, p = _mr_parameters(params, spec, E, l)
    lg, sg, rest = _mr_factors(delta, w, p, x1, x2)
    return GreensEvalPoint(x1, x2, E, sg * math.exp(lg) * rest, lg)


def _rm_factors(delta: float, p: float, w: float, x1: float, x2: float) -> tuple[float, float, float, float]:
    a, b = p + w - delta + 1.0, p + w + delta
    lg, sg = _gamma_ratio(a, b, 2.0 * p + 1.0, 2.0 * w + 1.0)
    xs, xl = min(x1, x2), max(x1, x2)

    def y_pair(x: float) -> tuple[float, float]:
        # y = (1 - tanh x)/2 = 1/(1 + e^{2x}),  1 - y = 1/(1 + e^{-2x})
        return 1.0 / (1.0 + math.exp(2.0 * x)), 1.0 / (1.0 + math.exp(-2.0 * x))

    (y1, o1), (y2, o2) = y_pair(x1), y_pair(x2)
    powers = p * math.log(y1 * y2) + w * math.log(o1 * o2)
    f_far = hyp2f1(a, b, 2.0 * p + 1.0, y_pair(xl)[0])
    f_near = hyp2f1(a, b, 2.0 * w + 1.0, y_pair(xs)[1])
    return lg, sg, math.exp(powers) * f_near, f_far


def greens_rosen_morse(params: PotentialParams, spec: ParticleSpec, E: float, x1: float, x2: float) -> GreensEvalPoint:
    """Rosen-Morse Green's function of the Positive regime at real ``x1, x2``.

    Raises:
        PoleError: when ``M1 - L_E`` is within ``1e-9`` of a non-positive integer.
        DomainError: for ``q <= 0`` or an inadmissible ``E``.
    """
    delta, p, w = _rm_parameters(params, spec, E)
    lg, sg, rest, f_far = _rm_factors(delta, p, w, x1, x2)
    return GreensEvalPoint(x1, x2, E, sg * math.exp(lg) * rest * f_far, lg)


def wall_coordinate(params: PotentialParams) -> float:
    """``x0 = -ln|q| / 2``, the image of ``r = 0``."""
    if params.regime is Regime.DEEP:
        raise DomainError("the Dirichlet construction applies only for q > -1")
    return -0.5 * math.log(abs(params.q))


def _base(params: PotentialParams, spec: ParticleSpec, E: float, x1: float, x2: float) -> float:
    if params.regime is Regime.POSITIVE:
        return greens_rosen_morse(params, spec, E, x1, x2).value
    return greens_manning_rosen(params, spec, E, 0, x1, x2).value


def _wall_factors(params: PotentialParams, spec: ParticleSpec, E: float) -> tuple[float, float, float]:
    """``(G(x0, x0), quantization factor, companion factor)``.

    The quantization factor is the hypergeometric function of the solution
    that decays at large ``x``; the companion belongs to the other solution
    and cancels from the Dirichlet Green's function.
    """
    x0 = wall_coordinate(params)
    if params.regime is Regime.POSITIVE:
        delta, p, w = _rm_parameters(params, spec, E)
        a, b = p + w - delta + 1.0, p + w + delta
        lg, sg, rest, f_far = _rm_factors(delta, p, w, x0, x0)
        f_near = hyp2f1(a, b, 2.0 * w + 1.0, 1.0 / (1.0 + math.exp(-2.0 * x0)))
        return sg * math.exp(lg) * rest * f_far, f_far, f_near
    delta, w, p = _mr_parameters(params, spec, E, 0)
    a, b = delta + w - p, delta + w + p
    lg, sg, rest = _mr_factors(delta, w, p, x0, x0)
    f_far = hyp2f1(a, b, 2.0 * w + 1.0, math.exp(-2.0 * x0))
    f_near = hyp2f1(a, b, 2.0 * delta, -math.expm1(-2.0 * x0))
    return sg * math.exp(lg) * rest, f_far, f_near


def greens_diagonal_at_wall(params: PotentialParams, spec: ParticleSpec, E: float) -> tuple[float, float]:
    """``(G(x0, x0), scale)``.

    ``scale`` is ``|G(x0, x0)|`` with the quantization factor, which tends
    to 1 far from the wall, replaced by 1.
    """
    g, f_far, _ = _wall_factors(params, spec, E)
    return g, abs(g / f_far) if f_far != 0.0 else math.inf


def dirichlet_greens(params: PotentialParams, spec: ParticleSpec, E: float, x1: float, x2: float) -> float:
    """``G(x1,x2) - G(x1,x0) G(x0,x2) / G(x0,x0)`` for ``x1, x2 >= x0``.

    Raises:
        QuantizationPole: when ``|G(x0,x0)| < 1e-12 * scale``, i.e. ``E`` is a bound state.
        DomainError: for points behind the wall or in the Deep regime.
    """
    x0 = wall_coordinate(params)
    if not (x1 >= x0 and x2 >= x0):
        raise DomainError(f"x1, x2 must be >= x0 = {x0!r}")
    g00, scale = greens_diagonal_at_wall(params, spec, E)
    if abs(g00) < ZERO_TOL * scale:
        raise QuantizationPole(f"G(x0, x0) vanishes at E={E!r}: bound state")
    if x1 == x0 or x2 == x0:
        return 0.0
    g12 = _base(params, spec, E, x1, x2)
    return g12 - _base(params, spec, E, x1, x0) * _base(params, spec, E, x0, x2) / g00


@dataclass(frozen=True)
class DualityScan:
    """Zeros of ``G(x0, x0)`` found on an energy scan.

    ``zeros`` are poles of the Dirichlet Green's function (the quantization
    factor vanishes); ``removable`` are zeros of the companion factor, which
    cancel from the Dirichlet Green's function.
    """

    grid: np.ndarray
    zeros: list[float]
    removable: list[float]


def duality_zeros(params: PotentialParams, spec: ParticleSpec, n_points: int = 4001) -> DualityScan:
    """Scan ``G(x0, x0)`` on ``n_points`` energies per admissible window.

    Sign changes are refined by bisection and kept when ``|G|`` shrinks
    (a zero) rather than grows (a Gamma pole).
    """

    def g(E: float) -> float:
        try:
            return _wall_factors(params, spec, E)[0]
        except PoleError:
            return math.nan

    grid_all: list[np.ndarray] = []
    zeros: list[float] = []
    removable: list[float] = []
    for win in admissible_energy_window(params, spec, QuantumNumbers(0, 0)):
        pad = 1e-12 * (win.hi - win.lo)
        Es = np.linspace(win.lo + pad, win.hi - pad, n_points)
        vals = np.array([g(float(e)) for e in Es])
        grid_all.append(Es)
        for i in range(n_points - 1):
            v0, v1 = vals[i], vals[i + 1]
            if not (np.isfinite(v0) and np.isfinite(v1)) or v0 * v1 > 0.0:
                continue
            lo, hi, flo = float(Es[i]), float(Es[i + 1]), float(v0)
            start = max(abs(v0), abs(v1))
            while hi - lo > 1e-14 * max(1.0, abs(lo)):
                mid = 0.5 * (lo + hi)
                fm = g(mid)
                if not math.isfinite(fm):
                    break
                if (fm > 0.0) == (flo > 0.0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            E = 0.5 * (lo + hi)
            end = g(E)
            if not (math.isfinite(end) and abs(end) <= start):
                continue
            _, f_far, f_near = _wall_factors(params, spec, E)
            (zeros if abs(f_far) <= abs(f_near) else removable).append(E)
    grid = np.concatenate(grid_all) if grid_all else np.array([])
    return DualityScan(grid, zeros, removable)
