"""Bound-state energies in the three deformation regimes.

Deep regime (``q <= -1``, any ``l``): the pole condition of the
Manning-Rosen Green's function gives the implicit energy equation

    M^2 - E^2 = (M+E)^2 V2^2 / (alpha^2 D^2) + alpha^2 D^2 - alpha^2 l(l+1)/3,
    D = n_r + delta_l,

which is solved by bracketing and bisection.  Because the equation is the
square of the pole condition it also has roots on the branch where the
tail exponent would be negative; those are rejected with ``pole_residual``.

ShallowNegative (``-1 < q < 0``) and Positive (``q > 0``) regimes, ``l = 0``:
bound states are zeros of a Gauss hypergeometric function of ``E``
evaluated at the position of the domain wall.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ScanWarning
from .qmath import PotentialParams, Regime
from .specfun import hyp2f1

__all__ = [
    "ParticleSpec",
    "QuantumNumbers",
    "AuxParams",
    "EnergyWindow",
    "EnergyLevel",
    "LevelMethod",
    "SpecialKind",
    "aux_parameters",
    "admissible_energy_window",
    "energy_residual_deep",
    "pole_residual_deep",
    "solve_spectrum_deep",
    "quantization_residual_shallow",
    "quantization_residual_positive",
    "positive_argument",
    "solve_spectrum_transcendental",
    "special_case_params",
    "special_case_spectrum",
    "rosen_morse_residual",
    "eckart_residual",
    "scan_residual",
    "DEEP_SCAN_POINTS",
    "TRANSCENDENTAL_SCAN_POINTS",
    "BISECTION_RTOL",
]

DEEP_SCAN_POINTS = 2001
TRANSCENDENTAL_SCAN_POINTS = 4001
BISECTION_RTOL = 1e-12


@dataclass(frozen=True)
class ParticleSpec:
    """Rest mass of the particle (natural units)."""

    M: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.M) and self.M > 0.0):
            raise DomainError(f"M must be positive and finite, got {self.M!r}")


@dataclass(frozen=True)
class QuantumNumbers:
    n_r: int
    l: int

    def __post_init__(self) -> None:
        if int(self.n_r) != self.n_r or self.n_r < 0:
            raise DomainError(f"n_r must be a non-negative integer, got {self.n_r!r}")
        if int(self.l) != self.l or self.l < 0:
            raise DomainError(f"l must be a non-negative integer, got {self.l!r}")


@dataclass(frozen=True)
class AuxParams:
    """Regime-specific derived quantities at one energy.

    Deep regime fills ``L_E, M1, M2, w_l, delta_l`` (and ``p_l = L_E + 1/2``);
    the other regimes fill ``delta, p, w``.  ``w`` is the exponent of the
    ``|q| e^{-2 alpha r}`` factor for ShallowNegative and the non-decaying
    exponent for Positive, where ``p`` controls the decay.
    """

    regime: Regime
    admissible: bool
    reason: str = ""
    L_E: float | None = None
    M1: float | None = None
    M2: float | None = None
    w_l: float | None = None
    delta_l: float | None = None
    p_l: float | None = None
    delta: float | None = None
    p: float | None = None
    w: float | None = None

    @property
    def decay(self) -> float | None:
        """Exponent ``k`` of the large-r decay ``exp(-2 alpha k r)``."""
        if self.regime is Regime.DEEP:
            return self.w_l
        if self.regime is Regime.SHALLOW_NEGATIVE:
            return self.w
        return self.p


@dataclass(frozen=True)
class EnergyWindow:
    """Open interval ``(lo, hi)`` of admissible energies."""

    lo: float
    hi: float
    constraints_active: tuple[str, ...] = ()


class LevelMethod(str, Enum):
    CLOSED_FORM_DEEP = "ClosedFormDeep"
    TRANSCENDENTAL_SHALLOW = "TranscendentalShallow"
    TRANSCENDENTAL_POSITIVE = "TranscendentalPositive"
    SPECIAL_CASE = "SpecialCase"


class SpecialKind(str, Enum):
    MANNING_ROSEN = "ManningRosen"
    ROSEN_MORSE = "RosenMorse"
    ECKART = "Eckart"


@dataclass(frozen=True)
class EnergyLevel:
    """A solved bound state.

    ``flags`` may contain ``"MultiRoot"`` when several genuine roots share
    one ``(n_r, l)``.
    """

    E: float
    n_r: int
    l: int
    residual: float
    method: LevelMethod
    aux: AuxParams
    window: EnergyWindow | None = None
    flags: tuple[str, ...] = ()


# Radicands as polynomials in E, highest power first: name -> (coeffs, strict)
def _radicands(params: PotentialParams, spec: ParticleSpec, l: int) -> dict[str, tuple[list[float], bool]]:
    M, V1, V2, a, q = spec.M, params.V1, params.V2, params.alpha, params.q
    aq = abs(q)
    regime = params.regime
    if regime is Regime.DEEP:
        cl = a * a * l * (l + 1) / 3.0
        k = 2.0 * V1 / (a * a * aq)
        return {
            "delta_l": ([-k, (l + 0.5) ** 2 - k * M], False),
            "L_E": ([-1.0, 2.0 * V2, M * M + 2.0 * M * V2 + cl], False),
            "w_l": ([-1.0, -2.0 * V2, M * M - 2.0 * M * V2 + cl], True),
        }
    if l != 0:
        raise DomainError(f"only l = 0 is supported in the {regime.value} regime")
    if regime is Regime.SHALLOW_NEGATIVE:
        k = 8.0 * V1 / (a * a * aq)
        return {
            "delta": ([-k, 1.0 - k * M], False),
            "p": ([-1.0, 2.0 * V2, M * M + 2.0 * M * V2], False),
            "w": ([-1.0, -2.0 * V2, M * M - 2.0 * M * V2], True),
        }
    k = 8.0 * V1 / (a * a * q)
    return {
        "delta": ([k, 1.0 + k * M], False),
        "p": ([-1.0, -2.0 * V2, M * M - 2.0 * M * V2], True),
        "w": ([-1.0, 2.0 * V2, M * M + 2.0 * M * V2], False),
    }


def _radicand_values(params: PotentialParams, spec: ParticleSpec, E: float, l: int) -> dict[str, float]:
    # product forms; same polynomials as _radicands but without cancellation
    M, V1, V2, a, q = spec.M, params.V1, params.V2, params.alpha, params.q
    t = M + E
    regime = params.regime
    if regime is Regime.DEEP:
        cl = a * a * l * (l + 1) / 3.0
        return {
            "delta_l": (l + 0.5) ** 2 - 2.0 * t * V1 / (a * a * abs(q)),
            "L_E": t * (M - E + 2.0 * V2) + cl,
            "w_l": t * (M - E - 2.0 * V2) + cl,
        }
    if regime is Regime.SHALLOW_NEGATIVE:
        return {
            "delta": 1.0 - 8.0 * t * V1 / (a * a * abs(q)),
            "p": t * (M - E + 2.0 * V2),
            "w": t * (M - E - 2.0 * V2),
        }
    return {
        "delta": 1.0 + 8.0 * t * V1 / (a * a * q),
        "p": t * (M - E - 2.0 * V2),
        "w": t * (M - E + 2.0 * V2),
    }


def aux_parameters(params: PotentialParams, spec: ParticleSpec, E: float, qn: QuantumNumbers) -> AuxParams:
    """Derived parameters of the matching regime at energy ``E``.

    Never raises for a negative radicand; the result is then flagged
    ``admissible=False`` with a reason and the affected fields are ``None``.
    """
    regime = params.regime
    if regime is not Regime.DEEP and qn.l != 0:
        raise DomainError(f"only l = 0 is supported in the {regime.value} regime")
    a = params.alpha
    rad = _radicand_values(params, spec, E, qn.l)
    bad = [name for name, v in rad.items() if v < 0.0]
    roots = {name: math.sqrt(v) if v >= 0.0 else None for name, v in rad.items()}
    if regime is Regime.DEEP:
        sd, sL, sw = roots["delta_l"], roots["L_E"], roots["w_l"]
        w_l = None if sw is None else sw / (2.0 * a)
        aux = dict(
            delta_l=None if sd is None else 0.5 + sd,
            L_E=None if sL is None else -0.5 + sL / (2.0 * a),
            p_l=None if sL is None else sL / (2.0 * a),
            w_l=w_l,
            M1=None if (sd is None or w_l is None) else sd + w_l,
            M2=None if (sd is None or w_l is None) else sd - w_l,
        )
        decay_name = "w_l"
    else:
        sd, sp, sw = roots["delta"], roots["p"], roots["w"]
        aux = dict(
            delta=None if sd is None else 0.5 * (1.0 + sd),
            p=None if sp is None else sp / (2.0 * a),
            w=None if sw is None else sw / (2.0 * a),
        )
        decay_name = "w" if regime is Regime.SHALLOW_NEGATIVE else "p"
    if bad:
        return AuxParams(regime, False, "negative radicand: " + ", ".join(bad), **aux)
    if not rad[decay_name] > 0.0:
        return AuxParams(regime, False, f"{decay_name} = 0: no decaying tail", **aux)
    if not (-spec.M < E < spec.M):
        return AuxParams(regime, False, "E outside (-M, M)", **aux)
    return AuxParams(regime, True, "", **aux)


def _sign_set(coeffs: Sequence[float], lo: float, hi: float) -> list[float]:
    """Breakpoints of the polynomial inside (lo, hi)."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if c.size <= 1:
        return []
    pts = []
    for r in np.roots(c):
        if abs(r.imag) <= 1e-14 * max(1.0, abs(r.real)) and lo < r.real < hi:
            pts.append(float(r.real))
    return pts


def admissible_energy_window(params: PotentialParams, spec: ParticleSpec, qn: QuantumNumbers) -> list[EnergyWindow]:
    """Maximal open subintervals of ``(-M, M)`` where ``aux_parameters`` is admissible.

    Breakpoints are the real roots of the (affine or quadratic) radicands.
    """
    M = spec.M
    rads = _radicands(params, spec, qn.l)
    cuts: dict[float, set[str]] = {}
    for name, (coeffs, _strict) in rads.items():
        for x in _sign_set(coeffs, -M, M):
            cuts.setdefault(x, set()).add(name)
    edges = sorted(set([-M, M] + list(cuts)))
    windows: list[EnergyWindow] = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if not hi > lo:
            continue
        mid = 0.5 * (lo + hi)
        if not aux_parameters(params, spec, mid, qn).admissible:
            continue
        if windows and windows[-1].hi == lo and aux_parameters(params, spec, lo, qn).admissible:
            prev = windows.pop()
            lo = prev.lo
        windows.append(EnergyWindow(lo, hi))
    out = []
    for w in windows:
        active = sorted(cuts.get(w.lo, {"mass"} if w.lo == -M else set()) | cuts.get(w.hi, {"mass"} if w.hi == M else set()))
        out.append(EnergyWindow(w.lo, w.hi, tuple(active)))
    return out


def _deep_D(params: PotentialParams, spec: ParticleSpec, E: float, qn: QuantumNumbers) -> float:
    rad = _radicand_values(params, spec, E, qn.l)["delta_l"]
    if rad < 0.0:
        raise DomainError(f"E={E!r} is outside the admissible window (delta_l complex)")
    return qn.n_r + 0.5 + math.sqrt(rad)


def energy_residual_deep(params: PotentialParams, spec: ParticleSpec, E: float, qn: QuantumNumbers) -> float:
    """Residual of the implicit Deep-regime energy equation.

    ``R(E) = (M^2 - E^2) - [(M+E)^2 V2^2 / (alpha^2 D^2) + alpha^2 D^2 - alpha^2 l(l+1)/3]``.

    Raises:
        DomainError: outside the Deep regime or where ``D`` is not real.
    """
    if params.regime is not Regime.DEEP:
        raise DomainError("energy_residual_deep requires q <= -1")
    if not (-spec.M <= E <= spec.M):
        raise DomainError(f"E={E!r} outside [-M, M]")
    M, V2, a, l = spec.M, params.V2, params.alpha, qn.l
    D = _deep_D(params, spec, E, qn)
    t = M + E
    return (M - E) * t - (t * t * V2 * V2 / (a * a * D * D) + a * a * D * D - a * a * l * (l + 1) / 3.0)


def pole_residual_deep(params: PotentialParams, spec: ParticleSpec, E: float, qn: QuantumNumbers) -> float:
    """``M1 - L_E + n_r``; zero on genuine levels, ``2 w_l`` on the spurious branch."""
    aux = aux_parameters(params, spec, E, qn)
    if aux.M1 is None or aux.L_E is None:
        raise DomainError(f"E={E!r} outside the admissible window")
    return aux.M1 - aux.L_E + qn.n_r


def _scan_points(window: EnergyWindow, n: int) -> np.ndarray:
    if n < 3:
        raise DomainError("scan needs at least 3 points")
    E = np.linspace(window.lo, window.hi, n)
    pad = 1e-12 * (window.hi - window.lo)
    E[0] += pad
    E[-1] -= pad
    return E


def _bisect(f: Callable[[float], float], lo: float, hi: float, flo: float, tol: float) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _curvature_warning(E: np.ndarray, r: np.ndarray, label: str) -> None:
    # a same-sign dip whose parabolic vertex crosses zero hints at two
    # roots inside one cell
    for i in range(1, len(r) - 1):
        r0, rm, rp = r[i], r[i - 1], r[i + 1]
        if not (np.sign(rm) == np.sign(r0) == np.sign(rp)) or r0 == 0.0:
            continue
        if abs(r0) > abs(rm) or abs(r0) > abs(rp):
            continue
        curv = 0.5 * (rm + rp) - r0
        if curv == 0.0:
            continue
        slope = 0.5 * (rp - rm)
        vertex = r0 - slope * slope / (4.0 * curv)
        if abs(slope) < 2.0 * abs(curv) and np.sign(vertex) != np.sign(r0):
            warnings.warn(
                f"{label}: residual dips toward zero near E={E[i]:.12g} without a sign change; "
                "two roots may share one scan cell",
                ScanWarning,
                stacklevel=3,
            )


def scan_residual(
    f: Callable[[float], float], window: EnergyWindow, n_points: int, tol: float, label: str = "scan"
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Evaluate ``f`` on a uniform grid over ``window`` and bisect every sign change.

    Returns the grid, the residual values and the refined roots.
    """
    E = _scan_points(window, n_points)
    r = np.array([f(e) for e in E])
    roots = []
    for i in range(len(E) - 1):
        if r[i] == 0.0:
            roots.append(float(E[i]))
        elif r[i] * r[i + 1] < 0.0:
            roots.append(_bisect(f, float(E[i]), float(E[i + 1]), float(r[i]), tol))
    if r[-1] == 0.0:
        roots.append(float(E[-1]))
    _curvature_warning(E, r, label)
    return E, r, roots


def solve_spectrum_deep(
    params: PotentialParams,
    spec: ParticleSpec,
    n_r_max: int,
    l_max: int,
    scan_points: int = DEEP_SCAN_POINTS,
    rtol: float = BISECTION_RTOL,
) -> list[EnergyLevel]:
    """All genuine Deep-regime levels with ``n_r <= n_r_max`` and ``l <= l_max``.

    Each admissible window is scanned on a uniform grid; sign changes of
    ``energy_residual_deep`` are bisected to ``rtol * M``.  A root is kept
    only if ``w_l > 0``, ``delta_l > 1/2`` and ``|pole_residual_deep| < w_l``.
    """
    if params.regime is not Regime.DEEP:
        raise DomainError("solve_spectrum_deep requires q <= -1")
    levels: list[EnergyLevel] = []
    for l in range(l_max + 1):
        for n in range(n_r_max + 1):
            qn = QuantumNumbers(n, l)
            found = []
            for win in admissible_energy_window(params, spec, qn):
                f = lambda e, qn=qn: energy_residual_deep(params, spec, e, qn)  # noqa: E731
                _, _, roots = scan_residual(f, win, scan_points, rtol * spec.M, f"deep n_r={n} l={l}")
                for E in roots:
                    aux = aux_parameters(params, spec, E, qn)
                    if not aux.admissible or not (aux.w_l > 0.0 and aux.delta_l > 0.5):
                        continue
                    if not abs(aux.M1 - aux.L_E + n) < aux.w_l:
                        continue
                    found.append(EnergyLevel(E, n, l, f(E), LevelMethod.CLOSED_FORM_DEEP, aux, win))
            if len(found) > 1:
                found = [replace(lv, flags=("MultiRoot",)) for lv in found]
            levels.extend(found)
    levels.sort(key=lambda lv: (lv.l, lv.n_r, lv.E))
    return levels


def positive_argument(q: float) -> float:
    """Argument of the Positive-regime condition at the wall, ``q / (1 + q)``."""
    return q / (1.0 + q)


def quantization_residual_shallow(params: PotentialParams, spec: ParticleSpec, E: float) -> float:
    """``2F1(delta+w-p, delta+w+p; 2w+1; |q|)``; bound states are its zeros."""
    if params.regime is not Regime.SHALLOW_NEGATIVE:
        raise DomainError("quantization_residual_shallow requires -1 < q < 0")
    aux = aux_parameters(params, spec, E, QuantumNumbers(0, 0))
    if not aux.admissible:
        raise DomainError(f"E={E!r} is not admissible: {aux.reason}")
    d, p, w = aux.delta, aux.p, aux.w
    return hyp2f1(d + w - p, d + w + p, 2.0 * w + 1.0, abs(params.q))


def quantization_residual_positive(params: PotentialParams, spec: ParticleSpec, E: float) -> float:
    """``2F1(p+w-delta+1, p+w+delta; 2p+1; q/(1+q))``; bound states are its zeros.

    ``p`` is the decay exponent.  The argument is the value of
    ``q / (q + e^{2 alpha r})`` at the wall ``r = 0``.
    """
    if params.regime is not Regime.POSITIVE:
        raise DomainError("quantization_residual_positive requires q > 0")
    aux = aux_parameters(params, spec, E, QuantumNumbers(0, 0))
    if not aux.admissible:
        raise DomainError(f"E={E!r} is not admissible: {aux.reason}")
    d, p, w = aux.delta, aux.p, aux.w
    return hyp2f1(p + w - d + 1.0, p + w + d, 2.0 * p + 1.0, positive_argument(params.q))


def _residual_for(params: PotentialParams, spec: ParticleSpec) -> tuple[Callable[[float], float], LevelMethod]:
    if params.regime is Regime.SHALLOW_NEGATIVE:
        return (lambda e: quantization_residual_shallow(params, spec, e)), LevelMethod.TRANSCENDENTAL_SHALLOW
    if params.regime is Regime.POSITIVE:
        return (lambda e: quantization_residual_positive(params, spec, e)), LevelMethod.TRANSCENDENTAL_POSITIVE
    raise DomainError("transcendental conditions apply only for q > -1")


def solve_spectrum_transcendental(
    params: PotentialParams,
    spec: ParticleSpec,
    count_max: int,
    scan_points: int = TRANSCENDENTAL_SCAN_POINTS,
    rtol: float = BISECTION_RTOL,
) -> list[EnergyLevel]:
    """s-wave levels of the ShallowNegative or Positive regime.

    Roots are labelled ``n_r = 0, 1, ...`` in increasing energy and the list
    is cut at ``count_max`` levels.  Emits ``ScanWarning`` when the residual
    curvature suggests two roots inside one scan cell.
    """
    f, method = _residual_for(params, spec)
    qn = QuantumNumbers(0, 0)
    found = []
    for win in admissible_energy_window(params, spec, qn):
        _, _, roots = scan_residual(f, win, scan_points, rtol * spec.M, f"{params.regime.value} residual")
        found.extend((E, win) for E in roots)
    found.sort(key=lambda t: t[0])
    levels = []
    for n, (E, win) in enumerate(found[:count_max]):
        aux = aux_parameters(params, spec, E, qn)
        if not aux.admissible:
            continue
        levels.append(EnergyLevel(E, n, 0, f(E), method, aux, win))
    return levels


def special_case_params(kind: SpecialKind | str, params: PotentialParams) -> PotentialParams:
    """Map the parameters of a named special potential onto the general form.

    ``params.q`` is ignored.  ManningRosen uses ``q = -1``; RosenMorse uses
    ``q = 1`` with ``V2 -> -V2``; Eckart uses ``q = 1`` with ``V1 -> -V1``.
    """
    kind = SpecialKind(kind)
    if kind is SpecialKind.MANNING_ROSEN:
        return PotentialParams(params.V1, params.V2, params.alpha, -1.0)
    if kind is SpecialKind.ROSEN_MORSE:
        return PotentialParams(params.V1, -params.V2, params.alpha, 1.0)
    return PotentialParams(-params.V1, params.V2, params.alpha, 1.0)


def special_case_spectrum(
    kind: SpecialKind | str,
    params: PotentialParams,
    spec: ParticleSpec,
    n_r_max: int = 3,
    l_max: int = 0,
    count_max: int = 10,
) -> list[EnergyLevel]:
    """Levels of the Manning-Rosen, Rosen-Morse or Eckart potential.

    ``params`` holds ``V1, V2, alpha`` in the convention of the named
    potential.  Energies are those of the delegate solver; the method tag
    becomes ``SpecialCase``.
    """
    kind = SpecialKind(kind)
    mapped = special_case_params(kind, params)
    if kind is SpecialKind.MANNING_ROSEN:
        levels = solve_spectrum_deep(mapped, spec, n_r_max, l_max)
    else:
        levels = solve_spectrum_transcendental(mapped, spec, count_max)
    return [replace(lv, method=LevelMethod.SPECIAL_CASE) for lv in levels]


def rosen_morse_residual(V1: float, V2: float, alpha: float, spec: ParticleSpec, E: float) -> float:
    """Standard Rosen-Morse condition ``2F1(p+w-delta+1, p+w+delta; 2p+1; 1/2)``.

    For ``V(r) = -V1/cosh^2(alpha r) + V2 tanh(alpha r)``, written out
    directly (not through the general-q code path).
    """
    M, a = spec.M, alpha
    t = M + E
    rad_p = t * (M - E + 2.0 * V2)
    rad_w = t * (M - E - 2.0 * V2)
    rad_d = 1.0 + 8.0 * t * V1 / (a * a)
    if min(rad_p, rad_w, rad_d) < 0.0 or rad_p == 0.0:
        raise DomainError(f"E={E!r} is not admissible for the Rosen-Morse potential")
    p = math.sqrt(rad_p) / (2.0 * a)
    w = math.sqrt(rad_w) / (2.0 * a)
    d = 0.5 * (1.0 + math.sqrt(rad_d))
    return hyp2f1(p + w - d + 1.0, p + w + d, 2.0 * p + 1.0, 0.5)


def eckart_residual(V1: float, V2: float, alpha: float, spec: ParticleSpec, E: float) -> float:
    """Eckart condition ``2F1(p+w-dbar+1, p+w+dbar; 2p+1; 1/2)``.

    For ``V(r) = V1/cosh^2(alpha r) - V2 tanh(alpha r)`` with
    ``dbar = (1 + sqrt(1 - 8 (E+M) V1 / alpha^2)) / 2``.
    """
    M, a = spec.M, alpha
    t = M + E
    rad_p = t * (M - E - 2.0 * V2)
    rad_w = t * (M - E + 2.0 * V2)
    rad_d = 1.0 - 8.0 * t * V1 / (a * a)
    if min(rad_p, rad_w, rad_d) < 0.0 or rad_p == 0.0:
        raise DomainError(f"E={E!r} is not admissible for the Eckart potential")
    p = math.sqrt(rad_p) / (2.0 * a)
    w = math.sqrt(rad_w) / (2.0 * a)
    d = 0.5 * (1.0 + math.sqrt(rad_d))
    return hyp2f1(p + w - d + 1.0, p + w + d, 2.0 * p + 1.0, 0.5)
