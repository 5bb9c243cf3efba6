"""Deformed hyperbolic functions, regime classification and the radial potential.

The q-deformed functions are

    sinh_q x = (e^x - q e^-x) / 2,    cosh_q x = (e^x + q e^-x) / 2,

and the potential is ``V(r) = -V1 / cosh_q^2(alpha r) - V2 tanh_q(alpha r)``.
For ``q <= -1`` it is rewritten with ``|q|`` as
``V(r) = -V1 / sinh_|q|^2(alpha r) - V2 coth_|q|(alpha r)`` on ``r > r0``
with ``r0 = ln|q| / (2 alpha)``.

Everything is evaluated through ``y = |q| e^{-2 alpha r}`` and ``expm1`` so
that large radii do not overflow and points close to ``r0`` keep full
relative precision.  The ``*_from_inner`` variants take the offset
``x = r - r_inner`` instead of ``r`` for grids that resolve ``x`` far below
the spacing of floats near ``r0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, PoleError

__all__ = [
    "Regime",
    "DeformedKind",
    "CentrifugalMode",
    "PotentialParams",
    "regime_of",
    "deformed_hyperbolic",
    "inner_boundary",
    "potential_value",
    "potential_from_inner",
    "centrifugal",
    "centrifugal_from_inner",
]

_TINY = 1e-300


class Regime(str, Enum):
    DEEP = "Deep"
    SHALLOW_NEGATIVE = "ShallowNegative"
    POSITIVE = "Positive"


class DeformedKind(str, Enum):
    SINH = "SinhQ"
    COSH = "CoshQ"
    TANH = "TanhQ"
    COTH = "CothQ"


class CentrifugalMode(str, Enum):
    EXACT = "exact"
    APPROXIMATE = "approx"


def regime_of(q: float) -> Regime:
    """Classify the deformation parameter.

    Raises:
        DomainError: if ``q`` is zero or not finite.
    """
    if not math.isfinite(q) or q == 0.0:
        raise DomainError(f"q must be finite and nonzero, got {q!r}")
    if q <= -1.0:
        return Regime.DEEP
    if q < 0.0:
        return Regime.SHALLOW_NEGATIVE
    return Regime.POSITIVE


@dataclass(frozen=True)
class PotentialParams:
    """Parameters of the deformed potential.

    Attributes:
        V1: Strength of the ``1/cosh_q^2`` term.
        V2: Strength of the ``tanh_q`` term.
        alpha: Inverse range, must be positive.
        q: Deformation parameter, nonzero.
    """

    V1: float
    V2: float
    alpha: float
    q: float

    def __post_init__(self) -> None:
        for name in ("V1", "V2", "alpha", "q"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.alpha <= 0.0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if self.q == 0.0:
            raise DomainError("q must be nonzero")

    @property
    def regime(self) -> Regime:
        return regime_of(self.q)


def _brackets(q: float, x: float) -> tuple[float, float, float]:
    """Return ``(A, m, p)`` with sinh_q x = A m / 2 and cosh_q x = A p / 2.

    For ``x >= 0``: A = e^x, m = 1 - q e^{-2x}, p = 1 + q e^{-2x}.
    For ``x < 0``:  A = e^{-x}, m = e^{2x} - q, p = e^{2x} + q.
    Differences of nearly equal terms go through expm1.
    """
    if x >= 0.0:
        amp = math.exp(x)
        u = q * math.exp(-2.0 * x)
        m = -math.expm1(math.log(q) - 2.0 * x) if q > 0.0 else 1.0 - u
        p = -math.expm1(math.log(-q) - 2.0 * x) if q < 0.0 else 1.0 + u
    else:
        amp = math.exp(-x)
        e2 = math.exp(2.0 * x)
        m = q * math.expm1(2.0 * x - math.log(q)) if q > 0.0 else e2 - q
        p = -q * math.expm1(2.0 * x - math.log(-q)) if q < 0.0 else e2 + q
    return amp, m, p


def deformed_hyperbolic(kind: DeformedKind | str, x: float, q: float) -> float:
    """Evaluate sinh_q, cosh_q, tanh_q or coth_q at ``x``.

    Overflow-safe for ``|x| <= 700``.

    Raises:
        DomainError: if ``q == 0`` or ``x`` is not finite.
        PoleError: if the denominator of tanh_q / coth_q vanishes.
    """
    kind = DeformedKind(kind)
    if q == 0.0 or not math.isfinite(q):
        raise DomainError(f"q must be finite and nonzero, got {q!r}")
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    amp, minus, plus = _brackets(q, x)
    if kind is DeformedKind.SINH:
        return 0.5 * amp * minus
    if kind is DeformedKind.COSH:
        return 0.5 * amp * plus
    num, den = (minus, plus) if kind is DeformedKind.TANH else (plus, minus)
    if abs(den) < _TINY:
        raise PoleError(f"{kind.value} has a pole at x={x!r} for q={q!r}")
    return num / den


def inner_boundary(params: PotentialParams) -> float:
    """Left end of the radial domain: ``ln|q| / (2 alpha)`` if ``q <= -1``, else 0."""
    if params.regime is Regime.DEEP:
        return math.log(abs(params.q)) / (2.0 * params.alpha)
    return 0.0


def _inv_sinh2(z):
    # 1/sinh^2 z = 4 e^{-2z} / (1 - e^{-2z})^2, free of overflow for large z
    e = np.exp(-2.0 * z)
    return 4.0 * e / np.expm1(-2.0 * z) ** 2


def _shape_from_inner(params: PotentialParams, x):
    """Return ``(s2, t)`` with ``V = -V1 s2 - V2 t`` at ``r = r_inner + x``.

    ``s2`` is 1/sinh_|q|^2 (Deep) or 1/cosh_q^2, ``t`` is coth_|q| or tanh_q.
    """
    a = params.alpha
    x = np.asarray(x, dtype=float)
    if params.regime is Regime.DEEP:
        # sinh_|q|(alpha (r0 + x)) = sqrt|q| sinh(alpha x)
        s2 = _inv_sinh2(a * x) / abs(params.q)
        t = 1.0 / np.tanh(a * x)
        return s2, t
    # cosh_q(alpha r) = e^{alpha r} (1 + y) / 2 with y = q e^{-2 alpha r}
    e = np.exp(-2.0 * a * x)
    y = params.q * e
    den = 1.0 + y
    s2 = 4.0 * e / den**2
    t = (1.0 - y) / den
    return s2, t


def potential_from_inner(params: PotentialParams, x):
    """Potential at ``r = inner_boundary(params) + x`` for offsets ``x > 0``.

    Accepts scalars or arrays; returns the same shape.
    """
    s2, t = _shape_from_inner(params, x)
    v = -params.V1 * s2 - params.V2 * t
    return v if np.ndim(v) else float(v)


def potential_value(params: PotentialParams, r: float) -> float:
    """Potential ``V(r)`` for ``r`` strictly inside the domain.

    Raises:
        DomainError: if ``r <= inner_boundary(params)``.
    """
    r0 = inner_boundary(params)
    if not r > r0:
        raise DomainError(f"r={r!r} is not inside the domain r > {r0!r}")
    a = params.alpha
    if params.regime is Regime.DEEP:
        aq = abs(params.q)
        one_minus_y = -math.expm1(math.log(aq) - 2.0 * a * r)
        y = 1.0 - one_minus_y
        # 1/sinh^2 = 4 y / (|q| (1-y)^2), coth = (1+y)/(1-y)
        s2 = 4.0 * y / (aq * one_minus_y**2)
        t = (1.0 + y) / one_minus_y
    else:
        e = math.exp(-2.0 * a * r)
        y = params.q * e
        s2 = 4.0 * e / (1.0 + y) ** 2
        t = (1.0 - y) / (1.0 + y)
    return -params.V1 * s2 - params.V2 * t


def _check_l(l: int) -> None:
    if int(l) != l or l < 0:
        raise DomainError(f"l must be a non-negative integer, got {l!r}")


def centrifugal(mode: CentrifugalMode | str, l: int, params: PotentialParams, r: float) -> float:
    """Centrifugal term: ``l(l+1)/r^2`` or its Deep-regime approximation.

    The approximation is ``l(l+1) alpha^2 (1/3 + |q| / sinh_|q|^2(alpha r))``.

    Raises:
        DomainError: for an approximate request outside the Deep regime, a
            negative ``l``, or ``r`` outside the domain.
    """
    mode = CentrifugalMode(mode)
    _check_l(l)
    r0 = inner_boundary(params)
    if not r > r0:
        raise DomainError(f"r={r!r} is not inside the domain r > {r0!r}")
    ll = l * (l + 1)
    if mode is CentrifugalMode.EXACT:
        return ll / r**2
    if params.regime is not Regime.DEEP:
        raise DomainError("the approximate centrifugal term is defined only for q <= -1")
    a = params.alpha
    aq = abs(params.q)
    one_minus_y = -math.expm1(math.log(aq) - 2.0 * a * r)
    y = 1.0 - one_minus_y
    return ll * a**2 * (1.0 / 3.0 + 4.0 * y / one_minus_y**2)


def centrifugal_from_inner(mode: CentrifugalMode | str, l: int, params: PotentialParams, x):
    """Centrifugal term at ``r = inner_boundary(params) + x`` (array friendly)."""
    mode = CentrifugalMode(mode)
    _check_l(l)
    x = np.asarray(x, dtype=float)
    ll = l * (l + 1)
    if mode is CentrifugalMode.EXACT:
        out = ll / (inner_boundary(params) + x) ** 2
    else:
        if params.regime is not Regime.DEEP:
            raise DomainError("the approximate centrifugal term is defined only for q <= -1")
        a = params.alpha
        # |q| / sinh_|q|^2(alpha r) = 1 / sinh^2(alpha x)
        out = ll * a**2 * (1.0 / 3.0 + _inv_sinh2(a * x))
    return out if np.ndim(out) else float(out)
