from __future__ import annotations

import ast
import math
from pathlib import Path

import numpy as np
import pytest

import qspectra.oracle as oracle_mod
from qspectra.errors import DomainError, NoRootError
from qspectra.oracle import (
    OracleConfig,
    TridiagonalOperator,
    build_operator,
    eigenvalue_k,
    oracle_energy,
    oracle_g,
    oracle_levels,
    oracle_window,
    sturm_count,
)
from qspectra.qmath import PotentialParams
from qspectra.spectrum import ParticleSpec, solve_spectrum_deep, solve_spectrum_transcendental

SPEC = ParticleSpec(1.0)
BOX = PotentialParams(0.0, 0.0, 0.5, 0.5)
UNIFORM = OracleConfig(n_grid=2000, r_max_factor=5.0, grid="uniform")


def test_config_validation():
    with pytest.raises(DomainError):
        OracleConfig(n_grid=99)
    with pytest.raises(DomainError):
        OracleConfig(r_max_factor=0.0)


def test_two_by_two():
    op = TridiagonalOperator(np.array([2.0, 2.0]), np.array([-1.0]), 1.0)
    assert eigenvalue_k(op, 0) == pytest.approx(1.0, abs=1e-13)
    assert eigenvalue_k(op, 1) == pytest.approx(3.0, abs=1e-13)
    assert sturm_count(op, 2.0) == 1


def test_index_error():
    op = TridiagonalOperator(np.array([2.0, 2.0]), np.array([-1.0]), 1.0)
    with pytest.raises(IndexError):
        eigenvalue_k(op, 2)
    with pytest.raises(IndexError):
        eigenvalue_k(op, -1)


def test_operator_shape_checks():
    with pytest.raises(DomainError):
        TridiagonalOperator(np.ones(3), np.ones(3), 1.0)


def test_random_matches_dense():
    rng = np.random.default_rng(12345)
    d = rng.normal(size=50)
    e = rng.normal(size=49)
    op = TridiagonalOperator(d, e, 1.0)
    dense = np.linalg.eigvalsh(np.diag(d) + np.diag(e, 1) + np.diag(e, -1))
    got = np.array([eigenvalue_k(op, k) for k in range(50)])
    assert np.max(np.abs(got - dense)) < 1e-11


def test_box_spectrum():
    op = build_operator(BOX, SPEC, 0.0, 0, UNIFORM)
    L = UNIFORM.r_max_factor / BOX.alpha
    assert op.dimension == UNIFORM.n_grid - 1
    h = op.h
    for k in range(4):
        exact = (k + 1) ** 2 * math.pi**2 / (2 * L * L)
        # three-point scheme error is -(k+1)^4 pi^4 h^2 / (24 L^4)
        assert abs(eigenvalue_k(op, k) - exact) < 2 * (k + 1) ** 4 * math.pi**4 * h * h / (24 * L**4)


def test_constant_shift():
    op = build_operator(BOX, SPEC, 0.0, 0, UNIFORM)
    shifted = TridiagonalOperator(op.diag + 0.37, op.offdiag, op.h)
    # Sturm counts resolve eigenvalues to about eps * ||A||
    tol = 100 * np.finfo(float).eps * float(np.max(np.abs(op.diag)))
    for k in range(3):
        assert eigenvalue_k(shifted, k) == pytest.approx(eigenvalue_k(op, k) + 0.37, abs=tol)


def test_operator_symmetric_by_construction():
    op = build_operator(PotentialParams(-0.02, 0.3, 0.1, -1.0), SPEC, 0.0, 1, OracleConfig())
    dense = np.diag(op.diag) + np.diag(op.offdiag, 1) + np.diag(op.offdiag, -1)
    assert np.array_equal(dense, dense.T)


def test_build_operator_rejects_energy_outside_mass_shell():
    with pytest.raises(DomainError):
        build_operator(BOX, SPEC, 1.0, 0, UNIFORM)


def test_free_case_has_no_root():
    with pytest.raises(NoRootError):
        oracle_energy(PotentialParams(0.0, 0.0, 0.1, -1.0), SPEC, 0, 0)


def test_deep_cross_check_l0():
    p = PotentialParams(-0.02, 0.3, 0.1, -1.0)
    closed = [lv.E for lv in solve_spectrum_deep(p, SPEC, 3, 0)]
    for n, E in enumerate(closed):
        res = oracle_energy(p, SPEC, n, 0)
        assert abs(res.E - E) < 1e-6
        assert res.nodes == n
        assert res.converged
        assert 3.5 <= res.ratio <= 4.5


def test_deep_l0_independent_of_centrifugal_mode():
    p = PotentialParams(-0.02, 0.3, 0.1, -1.0)
    a = oracle_energy(p, SPEC, 0, 0, OracleConfig(centrifugal_mode="exact"))
    b = oracle_energy(p, SPEC, 0, 0, OracleConfig(centrifugal_mode="approx"))
    assert a.E == b.E


def test_deep_cross_check_l2_approximate_mode():
    p = PotentialParams(-0.02, 0.3, 0.1, -1.0)
    closed = [lv.E for lv in solve_spectrum_deep(p, SPEC, 2, 2) if lv.l == 2]
    got = oracle_levels(p, SPEC, 2, 2, OracleConfig(centrifugal_mode="approx"))
    assert [r.E for r in got] == pytest.approx(closed, abs=1e-6)


def test_positive_cross_check():
    p = PotentialParams(0.08, 0.03, 0.2, 2.0)
    (lv,) = solve_spectrum_transcendental(p, SPEC, 3)
    res = oracle_energy(p, SPEC, 0, 0)
    assert abs(res.E - lv.E) < 1e-6
    assert res.converged and 3.5 <= res.ratio <= 4.5


def test_shallow_cross_check():
    p = PotentialParams(-0.02, 0.3, 0.1, -0.5)
    closed = [lv.E for lv in solve_spectrum_transcendental(p, SPEC, 3)]
    got = oracle_levels(p, SPEC, 0, 3)
    assert [r.E for r in got] == pytest.approx(closed, abs=1e-6)
    assert [r.nodes for r in got] == list(range(len(closed)))


def test_uniform_grid_converges_at_second_order_for_regular_boundary():
    p = PotentialParams(0.08, 0.03, 0.2, 2.0)
    res = oracle_energy(p, SPEC, 0, 0, OracleConfig(grid="uniform", n_grid=4000, r_max_factor=40.0))
    assert 3.5 <= res.ratio <= 4.5
    assert abs(res.E - 0.93780799265791) < 1e-6


def test_g_is_finite_on_window():
    p = PotentialParams(0.08, 0.03, 0.2, 2.0)
    lo, hi = oracle_window(p, SPEC.M, 0, OracleConfig())
    cfg = OracleConfig(n_grid=400)
    for E in np.linspace(lo, hi, 12)[1:-1]:
        assert math.isfinite(oracle_g(p, SPEC, float(E), 0, 0, cfg))


def test_g_changes_sign_at_level():
    p = PotentialParams(0.08, 0.03, 0.2, 2.0)
    E0 = 0.93780799265791
    assert oracle_g(p, SPEC, E0 - 1e-3, 0, 0) * oracle_g(p, SPEC, E0 + 1e-3, 0, 0) < 0


def test_oracle_depends_only_on_qmath():
    tree = ast.parse(Path(oracle_mod.__file__).read_text())
    local = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom) and node.level > 0:
            local.add(node.module)
        if isinstance(node, ast.ImportFrom) and node.level == 0 and node.module:
            assert not node.module.startswith("qspectra")
        if isinstance(node, ast.Import):
            assert not any(a.name.startswith("qspectra") for a in node.names)
    # errors holds only exception classes
    assert local <= {"qmath", "errors"}
