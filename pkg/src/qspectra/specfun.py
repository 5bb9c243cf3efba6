"""Gamma-function helpers, the Gauss hypergeometric function and Jacobi polynomials.

``gauss_2f1`` sums the defining series for ``0 <= z <= 1/2`` and maps
``1/2 < z < 1`` onto ``1 - z`` with the standard linear transformation.
Every result carries an absolute error estimate that combines the series
truncation bound with accumulated rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import zeta

from .errors import ConvergenceError, DomainError, ParameterError, PoleError

__all__ = [
    "Hyp2F1Method",
    "Hyp2F1Result",
    "log_gamma",
    "gamma_sign_log",
    "rgamma",
    "gauss_2f1",
    "hyp2f1",
    "jacobi_p",
]

EPS = 2.0**-52
MAX_TERMS = 100_000
POLY_TOL = 1e-9
DEGENERATE_TOL = 1e-6
# shift of c used when c - a - b is (nearly) an integer and the direct series
# is too slow; balances O(h^2) bias against O(eps/h) cancellation
PERTURB_STEP = 1e-5
# largest series length tried as an alternative to the transformation
DIRECT_BUDGET = 20_000


class Hyp2F1Method(str, Enum):
    DIRECT_SERIES = "DirectSeries"
    LINEAR_TRANSFORM = "LinearTransform"
    POLYNOMIAL_SUM = "PolynomialSum"


@dataclass(frozen=True)
class Hyp2F1Result:
    """Value of 2F1 with an absolute error estimate and the path taken."""

    value: float
    abs_error_estimate: float
    method: Hyp2F1Method


# Taylor coefficients of ln Gamma(2 + e) = sum_k c_k e^k:
# c_1 = 1 - euler_gamma, c_k = (-1)^k (zeta(k) - 1) / k for k >= 2
_LG2_COEF = np.concatenate(
    ([1.0 - np.euler_gamma], [(-1.0) ** k * (zeta(k) - 1.0) / k for k in range(2, 40)])
)
# within this distance of 1 or 2 the libm lgamma loses relative accuracy
_LG_SERIES_RADIUS = 0.2


def _lgamma_near_two(e: float) -> float:
    acc = 0.0
    for c in _LG2_COEF[::-1]:
        acc = acc * e + c
    return acc * e


def log_gamma(x: float) -> float:
    """``ln Gamma(x)`` for ``x > 0``.

    Backed by ``math.lgamma`` except near the zeros at 1 and 2, where a
    Taylor series keeps the relative error at the ulp level.

    Raises:
        DomainError: if ``x <= 0`` or is not finite.
    """
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError(f"log_gamma requires a finite positive argument, got {x!r}")
    if abs(x - 2.0) < _LG_SERIES_RADIUS:
        return _lgamma_near_two(x - 2.0)
    if abs(x - 1.0) < _LG_SERIES_RADIUS:
        # ln Gamma(1 + e) = ln Gamma(2 + e) - ln(1 + e)
        return _lgamma_near_two(x - 1.0) - math.log1p(x - 1.0)
    return math.lgamma(x)


def _is_nonpositive_int(x: float, tol: float = 0.0) -> bool:
    n = round(x)
    return n <= 0 and abs(x - n) <= tol


def gamma_sign_log(x: float) -> tuple[float, int]:
    """Return ``(ln|Gamma(x)|, sign Gamma(x))`` for any real non-pole ``x``.

    Raises:
        PoleError: at non-positive integers.
    """
    if _is_nonpositive_int(x):
        raise PoleError(f"Gamma has a pole at {x!r}")
    if x > 0.0:
        return log_gamma(x), 1
    sign = 1 if math.floor(x) % 2 == 0 else -1
    return math.lgamma(x), sign


def rgamma(x: float) -> float:
    """``1 / Gamma(x)``, exactly zero at the poles of Gamma."""
    if _is_nonpositive_int(x):
        return 0.0
    lg, s = gamma_sign_log(x)
    return s * math.exp(-lg)


def _series(a: float, b: float, c: float, z: float, n_poly: int | None = None) -> tuple[float, float]:
    """Partial sums of 2F1; returns ``(value, abs_error)``.

    With ``n_poly`` the sum stops after ``n_poly + 1`` terms (a terminating
    series).  Otherwise it runs until a geometric bound on the tail falls
    below one ulp of the running sum.
    """
    t = 1.0
    s = 1.0
    round_err = 0.0
    tail = 0.0
    k = 0
    k_mono = max(0.0, -a, -b, -c) + 2.0
    while True:
        if n_poly is not None and k >= n_poly:
            break
        t *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        k += 1
        s += t
        # term k carries ~5k roundings from the recurrence, plus the addition
        round_err += (abs(t) * (5.0 * k + 1.0) + abs(s)) * EPS
        if t == 0.0 and n_poly is None:
            break
        if n_poly is None and k >= k_mono:
            ratio = abs((a + k) * (b + k) / ((c + k) * (k + 1))) * z
            rho = max(ratio, z)
            if rho < 1.0:
                tail = abs(t) * rho / (1.0 - rho)
                if tail <= EPS * abs(s) or tail < 1e-300:
                    break
        if k >= MAX_TERMS:
            raise ConvergenceError(
                f"2F1({a}, {b}; {c}; {z}) series did not converge in {MAX_TERMS} terms"
            )
    return s, float(tail + round_err + EPS * abs(s))


def _terms_needed(a: float, b: float, c: float, z: float) -> float:
    if z <= 0.0:
        return 1.0
    return max(abs(a), abs(b), abs(c)) * 2.0 + math.log(EPS) / math.log(z) + 10.0


def _transform(a: float, b: float, c: float, z: float) -> tuple[float, float]:
    """Linear transformation onto ``1 - z``; ``c - a - b`` must not be an integer."""
    s = c - a - b
    w = 1.0 - z
    lg_c, sg_c = gamma_sign_log(c)
    out = 0.0
    err = 0.0
    # term 1: Gamma(c) Gamma(s) / (Gamma(c-a) Gamma(c-b)) F(a, b; 1-s; w)
    # term 2: w^s Gamma(c) Gamma(-s) / (Gamma(a) Gamma(b)) F(c-a, c-b; 1+s; w)
    for p1, p2, g, cc in ((c - a, c - b, s, 1.0 - s), (a, b, -s, 1.0 + s)):
        if _is_nonpositive_int(p1) or _is_nonpositive_int(p2):
            continue
        lg_g, sg_g = gamma_sign_log(g)
        lg1, sg1 = gamma_sign_log(p1)
        lg2, sg2 = gamma_sign_log(p2)
        log_coef = lg_c + lg_g - lg1 - lg2
        if g == -s:
            log_coef += s * math.log(w)
        coef = sg_c * sg_g * sg1 * sg2 * math.exp(log_coef)
        fa, fb = (a, b) if g == s else (c - a, c - b)
        f, f_err = _series(fa, fb, cc, w)
        term = coef * f
        out += term
        # lgamma is accurate to a few ulp of its magnitude
        coef_rel = 4.0 * EPS * (abs(lg_c) + abs(lg_g) + abs(lg1) + abs(lg2) + abs(s * math.log(w)) + 4.0)
        err += abs(coef) * f_err + abs(term) * coef_rel
    return out, err + EPS * abs(out)


def gauss_2f1(a: float, b: float, c: float, z: float) -> Hyp2F1Result:
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` for ``0 <= z < 1``.

    Parameters
    ----------
    a, b, c : float
        Real parameters.  ``c`` must not be a non-positive integer unless the
        series terminates first.
    z : float
        Argument in ``[0, 1)``.

    Returns
    -------
    Hyp2F1Result
        ``method`` is ``PolynomialSum`` exactly when ``a`` or ``b`` is within
        1e-9 of a non-positive integer.

    Raises
    ------
    DomainError
        If ``z`` is outside ``[0, 1)`` or an input is not finite.
    ParameterError
        If ``c`` is a non-positive integer and the series does not terminate
        before the division by zero.
    ConvergenceError
        If a series needs more than 100000 terms.
    """
    for name, v in (("a", a), ("b", b), ("c", c), ("z", z)):
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")
    if not (0.0 <= z < 1.0):
        raise DomainError(f"z must lie in [0, 1), got {z!r}")

    poly = [int(-round(p)) for p in (a, b) if _is_nonpositive_int(p, POLY_TOL)]
    c_pole = _is_nonpositive_int(c, 1e-12)
    if poly:
        n = min(poly)
        if c_pole and -round(c) < n:
            raise ParameterError(f"c={c!r} is a pole before the series terminates at degree {n}")
        exact = (a == -n) or (b == -n)
        if not exact:
            # parameter only near an integer: the terms past degree n are
            # tiny but nonzero, so keep summing while that is cheap
            try:
                value, err = _series(a, b, c, z)
                return Hyp2F1Result(value, err, Hyp2F1Method.POLYNOMIAL_SUM)
            except ConvergenceError:
                pass
        aa, bb = (-float(n), b) if abs(a + n) <= POLY_TOL else (a, -float(n))
        value, err = _series(aa, bb, c, z, n_poly=n)
        if not exact:
            # first-order effect of the snapped offset on the dropped terms
            err += abs(aa - a + bb - b) * (abs(value) + 1.0) * n
        return Hyp2F1Result(value, err, Hyp2F1Method.POLYNOMIAL_SUM)
    if c_pole:
        raise ParameterError(f"c={c!r} is a non-positive integer")

    if z <= 0.5:
        value, err = _series(a, b, c, z)
        return Hyp2F1Result(value, err, Hyp2F1Method.DIRECT_SERIES)

    s = c - a - b
    affordable = _terms_needed(a, b, c, z) < DIRECT_BUDGET
    if abs(s - round(s)) >= DEGENERATE_TOL:
        value, err = _transform(a, b, c, z)
        # large parameters make the two transformed terms cancel; the plain
        # series may then be the more accurate of the two
        if err > 1e-13 * max(1.0, abs(value)) and affordable:
            v2, e2 = _series(a, b, c, z)
            if e2 < err:
                return Hyp2F1Result(v2, e2, Hyp2F1Method.DIRECT_SERIES)
        return Hyp2F1Result(value, err, Hyp2F1Method.LINEAR_TRANSFORM)

    # c - a - b is (nearly) an integer: the transformation has cancelling
    # Gamma poles.  Use the direct series when it is affordable.
    if _terms_needed(a, b, c, z) < 0.5 * MAX_TERMS:
        value, err = _series(a, b, c, z)
        return Hyp2F1Result(value, err, Hyp2F1Method.DIRECT_SERIES)
    # symmetric averages at c +/- h cancel the odd terms of the expansion in
    # h; Richardson over h, 2h, 4h removes the h^2 bias and estimates the rest
    h = PERTURB_STEP
    avgs = []
    errs = []
    for step in (h, 2.0 * h, 4.0 * h):
        up, up_err = _transform(a, b, c + step, z)
        dn, dn_err = _transform(a, b, c - step, z)
        avgs.append(0.5 * (up + dn))
        errs.append(max(up_err, dn_err))
    r1 = (4.0 * avgs[0] - avgs[1]) / 3.0
    r2 = (4.0 * avgs[1] - avgs[2]) / 3.0
    value = r1
    err = float((4.0 * errs[0] + errs[1]) / 3.0 + abs(r1 - r2) / 15.0 + EPS * abs(value))
    return Hyp2F1Result(value, err, Hyp2F1Method.LINEAR_TRANSFORM)


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Shortcut for ``gauss_2f1(a, b, c, z).value``."""
    return gauss_2f1(a, b, c, z).value


def jacobi_p(n: int, a: float, b: float, x: float) -> float:
    """Jacobi polynomial ``P_n^(a,b)(x)`` by the three-term recurrence.

    Raises:
        DomainError: if ``n < 0``, ``a <= -1``, ``b <= -1`` or ``|x| > 1``.
    """
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    if not (a > -1.0 and b > -1.0):
        raise DomainError(f"Jacobi parameters must exceed -1, got a={a!r}, b={b!r}")
    if not (-1.0 <= x <= 1.0):
        raise DomainError(f"x must lie in [-1, 1], got {x!r}")
    n = int(n)
    p_prev = 1.0
    if n == 0:
        return p_prev
    p = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
    ab = a + b
    ab2 = a * a - b * b
    for k in range(2, n + 1):
        k2 = 2.0 * k + ab
        c1 = 2.0 * k * (k + ab) * (k2 - 2.0)
        c2 = (k2 - 1.0) * (k2 * (k2 - 2.0) * x + ab2)
        c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * k2
        p_prev, p = p, (c2 * p - c3 * p_prev) / c1
    return p
