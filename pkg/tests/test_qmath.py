from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qspectra.errors import DomainError, PoleError
from qspectra.qmath import (
    CentrifugalMode,
    DeformedKind,
    PotentialParams,
    Regime,
    centrifugal,
    centrifugal_from_inner,
    deformed_hyperbolic,
    inner_boundary,
    potential_from_inner,
    potential_value,
    regime_of,
)


def test_regime_boundaries_are_inclusive():
    assert regime_of(-1.0) is Regime.DEEP
    assert regime_of(-5.0) is Regime.DEEP
    assert regime_of(-0.999999) is Regime.SHALLOW_NEGATIVE
    assert regime_of(1e-12) is Regime.POSITIVE
    with pytest.raises(DomainError):
        regime_of(0.0)


def test_params_validation():
    with pytest.raises(DomainError):
        PotentialParams(0.1, 0.1, 0.0, -1.0)
    with pytest.raises(DomainError, match="q must be nonzero"):
        PotentialParams(0.1, 0.1, 1.0, 0.0)
    with pytest.raises(DomainError):
        PotentialParams(float("nan"), 0.1, 1.0, 1.0)


def test_deformed_examples():
    assert deformed_hyperbolic(DeformedKind.SINH, 0.7, 1.0) == pytest.approx(math.sinh(0.7), rel=1e-15)
    assert deformed_hyperbolic("CoshQ", 0.0, -3.0) == -1.0
    # extended-precision value of tanh_q(5) for q = 0.25
    assert deformed_hyperbolic("TanhQ", 5.0, 0.25) == pytest.approx(0.99997730029276003616, rel=1e-14)


def test_deformed_errors():
    with pytest.raises(DomainError):
        deformed_hyperbolic("SinhQ", 1.0, 0.0)
    x0 = 0.5 * math.log(2.0)
    assert deformed_hyperbolic("TanhQ", x0, 2.0) == 0.0
    with pytest.raises(PoleError):
        deformed_hyperbolic("CothQ", x0, 2.0)


def test_overflow_safe():
    v = deformed_hyperbolic("SinhQ", 700.0, 3.0)
    assert math.isfinite(v) and v > 0
    assert deformed_hyperbolic("TanhQ", -700.0, 3.0) == pytest.approx(-1.0)
    assert deformed_hyperbolic("TanhQ", 700.0, 3.0) == 1.0


def test_q_one_reduces_to_standard():
    xs = np.linspace(-20, 20, 401)
    for x in xs:
        for kind, f in (("SinhQ", math.sinh), ("CoshQ", math.cosh), ("TanhQ", math.tanh)):
            assert deformed_hyperbolic(kind, x, 1.0) == pytest.approx(f(x), rel=1e-14, abs=0)
        if x != 0.0:
            assert deformed_hyperbolic("CothQ", x, 1.0) == pytest.approx(1 / math.tanh(x), rel=1e-14)


@settings(max_examples=300, deadline=None)
@given(x=st.floats(-30, 30), q=st.floats(-50, 50).filter(lambda v: abs(v) > 1e-6))
def test_pythagorean_identity(x, q):
    s = deformed_hyperbolic("SinhQ", x, q)
    c = deformed_hyperbolic("CoshQ", x, q)
    assert abs(c * c - s * s - q) <= 1e-12 * max(c * c, s * s)


@settings(max_examples=300, deadline=None)
@given(x=st.floats(-20, 20), q=st.floats(1e-4, 1e4))
def test_shift_identity(x, q):
    lhs = deformed_hyperbolic("SinhQ", x, q)
    rhs = math.sqrt(q) * math.sinh(x - 0.5 * math.log(q))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


def test_inner_boundary():
    assert inner_boundary(PotentialParams(0, 0, 0.5, -1.0)) == 0.0
    assert inner_boundary(PotentialParams(0, 0, 1.0, -math.e**2)) == pytest.approx(1.0, rel=1e-15)
    assert inner_boundary(PotentialParams(0, 0, 2.0, 0.5)) == 0.0
    for q, a in ((-3.0, 0.1), (-7.5, 0.05), (-1.2, 2.0)):
        r0 = inner_boundary(PotentialParams(0.1, 0.1, a, q))
        assert abs(1 - abs(q) * math.exp(-2 * a * r0)) <= 4e-16


def test_potential_examples():
    p = PotentialParams(0.0, 2.0, 1.0, 1.0)
    assert potential_value(p, 10.0) == pytest.approx(-2.0, abs=1e-8)
    p = PotentialParams(1.0, 0.0, 1.0, -1.0)
    r = 1e-6
    assert potential_value(p, r) == pytest.approx(-1.0 / r**2, rel=1e-6)
    # extended-precision value of the |q| form
    p = PotentialParams(0.3, 0.1, 0.5, -4.0)
    assert potential_value(p, 2.0) == pytest.approx(-1.1080457391514558656, rel=1e-14)
    with pytest.raises(DomainError):
        potential_value(p, inner_boundary(p))


@pytest.mark.parametrize(
    "V1,V2,alpha,q,r",
    [(0.3, 0.1, 0.5, -4.0, 3.1), (0.05, 0.02, 0.1, -3.0, 11.5), (-0.05, 0.02, 0.25, -0.5, 0.3), (0.08, 0.03, 0.2, 2.0, 1.7)],
)
def test_potential_matches_mpmath(V1, V2, alpha, q, r):
    mp.mp.dps = 40
    e = mp.e ** (alpha * mp.mpf(r))
    c = (e + mp.mpf(q) / e) / 2
    s = (e - mp.mpf(q) / e) / 2
    ref = -mp.mpf(V1) / c**2 - mp.mpf(V2) * s / c
    assert potential_value(PotentialParams(V1, V2, alpha, q), r) == pytest.approx(float(ref), rel=1e-13)


def test_potential_tends_to_minus_v2():
    for q in (-3.0, -0.5, 2.0):
        p = PotentialParams(0.2, 0.7, 0.3, q)
        assert potential_value(p, 200.0) == pytest.approx(-0.7, rel=1e-12)


def test_potential_decreasing_for_positive_q():
    p = PotentialParams(0.0, 0.4, 0.7, 1.5)
    r = np.linspace(1e-3, 30, 2000)
    v = [potential_value(p, x) for x in r]
    assert np.all(np.diff(v) < 0) or np.all(np.diff(v)[: np.argmax(np.diff(v) == 0)] < 0)


def test_from_inner_agrees_with_potential_value():
    for q in (-1.0, -3.0, -0.4, 0.5):
        p = PotentialParams(0.07, 0.3, 0.2, q)
        r0 = inner_boundary(p)
        x = np.array([0.3, 1.0, 7.0, 40.0])
        ref = np.array([potential_value(p, r0 + xi) for xi in x])
        np.testing.assert_allclose(potential_from_inner(p, x), ref, rtol=1e-12)


def test_from_inner_resolves_tiny_offsets():
    p = PotentialParams(0.05, 0.0, 0.1, -3.0)
    x = 1e-100
    # -V1 / (|q| sinh^2(alpha x)) with sinh(t) ~ t
    assert potential_from_inner(p, x) == pytest.approx(-0.05 / (3.0 * (0.1 * x) ** 2), rel=1e-12)


def test_centrifugal_examples():
    p = PotentialParams(0.1, 0.1, 1.0, -1.0)
    assert centrifugal(CentrifugalMode.EXACT, 0, p, 0.4) == 0.0
    r = 0.01
    assert centrifugal("approx", 1, p, r) == pytest.approx(2 / r**2, rel=1e-3)
    with pytest.raises(DomainError):
        centrifugal("approx", 1, PotentialParams(0.1, 0.1, 1.0, 0.5), 1.0)
    with pytest.raises(DomainError):
        centrifugal("exact", -1, p, 1.0)


def test_centrifugal_sweep_golden():
    p = PotentialParams(0.1, 0.1, 0.05, -3.0)
    r0 = inner_boundary(p)
    rs = np.linspace(r0 + 0.1 / 0.05, r0 + 5 / 0.05, 2001)
    dev = max(abs(centrifugal("approx", 2, p, r) - centrifugal("exact", 2, p, r)) / centrifugal("exact", 2, p, r) for r in rs)
    # dense mpmath sweep; the maximum sits at the left end of the range
    assert dev == pytest.approx(41.160127527129527, rel=1e-10)


def test_centrifugal_from_inner_agrees():
    p = PotentialParams(0.1, 0.1, 0.05, -3.0)
    r0 = inner_boundary(p)
    for mode in ("exact", "approx"):
        for x in (0.5, 3.0, 60.0):
            assert centrifugal_from_inner(mode, 2, p, x) == pytest.approx(centrifugal(mode, 2, p, r0 + x), rel=1e-12)
