"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible without ``-s``)
before asserting.
"""

from __future__ import annotations

import functools
import itertools
import math
import time

import mpmath
import numpy as np

from qspectra.greens import duality_zeros
from qspectra.oracle import OracleConfig, oracle_levels
from qspectra.qmath import PotentialParams, Regime, inner_boundary
from qspectra.specfun import gamma_sign_log, gauss_2f1, jacobi_p, log_gamma
from qspectra.spectrum import (
    ParticleSpec,
    QuantumNumbers,
    admissible_energy_window,
    eckart_residual,
    quantization_residual_positive,
    rosen_morse_residual,
    solve_spectrum_deep,
    solve_spectrum_transcendental,
    special_case_params,
    special_case_spectrum,
)
from qspectra.verify import verify_levels
from qspectra.wavefun import count_nodes, normalize_numeric, tail_cutoff, wavefunction

SPEC = ParticleSpec(1.0)
TOL = 1e-6
N_R_DEPTH = 40

DEEP_GRID = [
    PotentialParams(V1, V2, a, q)
    for a, V1, V2, q in itertools.product((0.05, 0.1), (0.05, 0.1), (0.02, 0.05), (-1.0, -3.0))
]
# the grid above binds nothing at l = 0, so a binding grid is added
DEEP_SUPPLEMENT = [
    PotentialParams(V1, V2, a, q)
    for a, V1, V2, q in itertools.product((0.05, 0.1), (-0.02, 0.0), (0.2, 0.3), (-1.0, -3.0))
]
SHALLOW_SETS = [
    PotentialParams(-0.02, 0.3, 0.1, -0.5),
    PotentialParams(-0.02, 0.3, 0.1, -0.25),
    PotentialParams(-0.02, 0.3, 0.05, -0.5),
]
POSITIVE_SETS = [PotentialParams(0.08, 0.03, a, q) for a, q in itertools.product((0.1, 0.2), (0.5, 2.0))]


def _report(capsys, number: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")


@functools.lru_cache(maxsize=None)
def _closed(params: PotentialParams, l_max: int = 0, depth: int = N_R_DEPTH) -> tuple:
    if params.regime is Regime.DEEP:
        return tuple(solve_spectrum_deep(params, SPEC, depth, l_max))
    return tuple(solve_spectrum_transcendental(params, SPEC, depth + 1))


@functools.lru_cache(maxsize=None)
def _oracle(params: PotentialParams, l: int, mode: str, depth: int = N_R_DEPTH) -> tuple:
    return tuple(oracle_levels(params, SPEC, l, depth, OracleConfig(centrifugal_mode=mode)))


def _match(params: PotentialParams, l: int, mode: str, n_r_set: set[int] | None = None) -> tuple[int, list[str]]:
    """Two-way match of analytic and oracle levels; returns (matched, problems)."""
    depth = N_R_DEPTH if n_r_set is None else max(n_r_set)
    closed = [lv for lv in _closed(params, l, depth) if lv.l == l and (n_r_set is None or lv.n_r in n_r_set)]
    found = [r for r in _oracle(params, l, mode, depth) if n_r_set is None or r.nodes in n_r_set]
    problems = []
    used: set[int] = set()
    for lv in closed:
        cands = [i for i in range(len(found)) if i not in used]
        if not cands:
            problems.append(f"{params} l={l} n_r={lv.n_r}: no oracle level")
            continue
        i = min(cands, key=lambda j: abs(found[j].E - lv.E))
        used.add(i)
        dE = found[i].E - lv.E
        if not (abs(dE) < TOL * SPEC.M and found[i].nodes == lv.n_r):
            problems.append(f"{params} l={l} n_r={lv.n_r}: dE={dE:.2e} nodes={found[i].nodes}")
    for i, r in enumerate(found):
        if i not in used:
            problems.append(f"{params} l={l}: oracle level E={r.E:.10f} ({r.nodes} nodes) missed")
    return len(closed) - sum("no oracle" in p for p in problems), problems


def test_criterion_1_deep_l0_against_oracle(capsys):
    t0 = time.perf_counter()
    matched, problems = 0, []
    for params in DEEP_GRID + DEEP_SUPPLEMENT:
        m, p = _match(params, 0, "exact")
        matched += m
        problems += p
    elapsed = time.perf_counter() - t0
    grid_levels = sum(len([lv for lv in _closed(p) if lv.l == 0]) for p in DEEP_GRID)
    ok = not problems and elapsed < 60.0
    _report(
        capsys, 1,
        ok,
        f"{matched} Deep l=0 levels matched both ways at 1e-6*M "
        f"({grid_levels} on the stated grid), {elapsed:.1f} s",
    )
    assert not problems, problems
    assert elapsed < 60.0


def test_criterion_2_deep_l_positive_model_consistency(capsys):
    matched, problems = 0, []
    for params in DEEP_GRID + DEEP_SUPPLEMENT:
        for l in (1, 2):
            m, p = _match(params, l, "approx", {0, 1})
            matched += m
            problems += p
    grid_levels = sum(
        len([lv for lv in _closed(p, 2, 1) if lv.l in (1, 2)]) for p in DEEP_GRID
    )
    _report(
        capsys, 2, not problems and matched > 0,
        f"{matched} Deep levels with l in (1, 2), n_r in (0, 1) matched ({grid_levels} on the stated grid)",
    )
    assert not problems, problems
    assert matched > 0


def test_criterion_3_centrifugal_error_shrinks_with_alpha(capsys):
    from qspectra.verify import approximation_error_report

    series = {}
    for l in (1, 2):
        vals = []
        for a in (0.1, 0.05, 0.025):
            rows = approximation_error_report(PotentialParams(0.0, 0.3, a, -1.0), SPEC, [l], 0).rows
            (row,) = [r for r in rows if r.n_r == 0]
            vals.append(abs(row.dE_phys) / SPEC.M)
        series[l] = vals
    ok = all(v[0] > v[1] > v[2] for v in series.values()) and all(math.isfinite(x) for v in series.values() for x in v)
    text = "; ".join(f"l={l}: " + ", ".join(f"{x:.2e}" for x in v) for l, v in series.items())
    _report(capsys, 3, ok, f"|E_exact - E_approx|/M for alpha = 0.1, 0.05, 0.025: {text}")
    assert ok


def test_criterion_4_transcendental_against_oracle(capsys):
    matched, problems = 0, []
    for params in SHALLOW_SETS + POSITIVE_SETS:
        rep = verify_levels(params, SPEC, N_R_DEPTH, 0, tol=TOL, mode="exact")
        matched += sum(r.passed for r in rep.rows)
        problems += [f"{params}: {r}" for r in rep.rows if not r.passed]
    _report(capsys, 4, not problems and matched > 0, f"{matched} ShallowNegative/Positive roots matched with node counts")
    assert not problems, problems
    assert matched > 0


def test_criterion_5_greens_duality(capsys):
    problems, n_zeros = [], 0
    for params in SHALLOW_SETS + POSITIVE_SETS:
        (win,) = admissible_energy_window(params, SPEC, QuantumNumbers(0, 0))
        cell = (win.hi - win.lo) / 4000
        roots = [lv.E for lv in solve_spectrum_transcendental(params, SPEC, N_R_DEPTH + 1)]
        zeros = sorted(duality_zeros(params, SPEC, 4001).zeros)
        n_zeros += len(zeros)
        if len(zeros) != len(roots) or any(abs(z - E) > cell for z, E in zip(zeros, roots)):
            problems.append(f"{params}: zeros {zeros} roots {roots}")
    _report(capsys, 5, not problems, f"{n_zeros} zeros of G(x0,x0) within one 4001-point scan cell of the roots")
    assert not problems, problems


def test_criterion_6_special_cases(capsys):
    worst_rm = worst_eck = 0.0
    for V1, V2, a in ((0.08, 0.03, 0.2), (0.05, -0.02, 0.1), (-0.03, 0.1, 0.3)):
        rm_params = PotentialParams(V1, V2, a, 1.0)
        eck_params = special_case_params("Eckart", rm_params)
        for params, other in ((rm_params, lambda E: rosen_morse_residual(V1, -V2, a, SPEC, E)),
                              (eck_params, lambda E: eckart_residual(V1, V2, a, SPEC, E))):
            for win in admissible_energy_window(params, SPEC, QuantumNumbers(0, 0)):
                for E in np.linspace(win.lo, win.hi, 402)[1:-1]:
                    lhs = quantization_residual_positive(params, SPEC, float(E))
                    rhs = other(float(E))
                    err = abs(lhs - rhs) / max(abs(rhs), 1e-300)
                    if params is rm_params:
                        worst_rm = max(worst_rm, err)
                    else:
                        worst_eck = max(worst_eck, err)
    identical = all(
        [lv.E for lv in special_case_spectrum("ManningRosen", p, SPEC, n_r_max=5, l_max=2)]
        == [lv.E for lv in solve_spectrum_deep(PotentialParams(p.V1, p.V2, p.alpha, -1.0), SPEC, 5, 2)]
        for p in DEEP_SUPPLEMENT
    )
    ok = worst_rm <= 1e-14 and worst_eck <= 1e-14 and identical
    _report(
        capsys, 6, ok,
        f"q=1 residual vs Rosen-Morse {worst_rm:.1e}, Eckart wiring {worst_eck:.1e}, q=-1 path identical: {identical}",
    )
    assert ok


def test_criterion_7_special_function_properties(capsys):
    rng = np.random.default_rng(20261016)
    n = 10_000
    fails = {"gauss": 0, "contiguous": 0, "jacobi": 0, "log_gamma": 0}
    # failures that the exact function shows as well
    gauss_exact = 0

    for _ in range(n):
        while True:
            a, b = rng.uniform(-2, 2, 2)
            c = a + b + rng.uniform(0.6, 3.0)
            if c > 0.05:
                break
        parts = [gamma_sign_log(x) for x in (c, c - a - b, c - a, c - b)]
        sign = parts[0][1] * parts[1][1] * parts[2][1] * parts[3][1]
        limit = sign * math.exp(parts[0][0] + parts[1][0] - parts[2][0] - parts[3][0])
        errs = [abs(gauss_2f1(a, b, c, 1 - 10.0**-k).value - limit) for k in (2, 4, 6)]
        if not (errs[0] > errs[1] > errs[2]):
            fails["gauss"] += 1
            exact = [abs(float(mpmath.hyp2f1(a, b, c, 1 - mpmath.mpf(10) ** -k)) - limit) for k in (2, 4, 6)]
            if not (exact[0] > exact[1] > exact[2]):
                gauss_exact += 1

        a, b = rng.uniform(-4, 4, 2)
        c, z = rng.uniform(0.2, 6), rng.uniform(0, 0.95)
        f0 = gauss_2f1(a, b, c, z).value
        f1 = gauss_2f1(a + 1, b, c, z).value
        f2 = gauss_2f1(a + 1, b + 1, c + 1, z).value
        scale = max(abs(c * f0), abs(c * f1), abs(b * z * f2), 1.0)
        if abs(c * f0 - c * f1 + b * z * f2) > 1e-9 * scale:
            fails["contiguous"] += 1

        k = int(rng.integers(0, 61))
        pa, pb = rng.uniform(-0.9, 8, 2)
        x = rng.uniform(-1, 1)
        lhs = jacobi_p(k, pa, pb, -x)
        rhs = (-1) ** k * jacobi_p(k, pb, pa, x)
        env = max(abs(jacobi_p(k, pa, pb, t)) for t in (-1.0, -0.5, 0.0, 0.5, 1.0)) + abs(lhs)
        if abs(lhs - rhs) > 1e-12 * max(abs(rhs), 1e-3 * env):
            fails["jacobi"] += 1

        xg = float(np.exp(rng.uniform(math.log(0.1), math.log(1e5))))
        lg1, lg0 = log_gamma(xg + 1), log_gamma(xg) + math.log(xg)
        if abs(lg1 - lg0) > 1e-13 * max(abs(lg1), 1.0):
            fails["log_gamma"] += 1

    ok = not any(fails.values())
    _report(
        capsys, 7, ok,
        f"{n} samples per property, failures {fails}, "
        f"{gauss_exact} of the Gauss-summation failures also occur for mpmath's exact values",
    )
    assert ok, fails


def _all_levels():
    levels = []
    for params in DEEP_GRID + DEEP_SUPPLEMENT:
        levels += [(params, lv) for lv in _closed(params, 2)]
    for params in SHALLOW_SETS + POSITIVE_SETS:
        levels += [(params, lv) for lv in _closed(params)]
    return levels


def test_criterion_8_wavefunction_invariants(capsys):
    bad: dict[str, list[str]] = {"norm": [], "nodes": [], "inner": [], "outer": []}
    levels = _all_levels()
    for params, lv in levels:
        table = normalize_numeric(params, SPEC, lv)
        peak = float(np.max(np.abs(table.values)))
        tag = f"{params} n_r={lv.n_r} l={lv.l} E={lv.E:.8f}"
        if abs(table.norm - 1.0) > 1e-8:
            bad["norm"].append(tag)
        if count_nodes(table) != lv.n_r:
            bad["nodes"].append(tag)
        r_in = inner_boundary(params)
        u_in = abs(wavefunction(params, SPEC, lv, r_in + 1e-8 / params.alpha) * table.scale)
        if not u_in < 1e-6 * peak:
            ratio = u_in / peak
            d = lv.aux.delta_l if params.regime is Regime.DEEP else lv.aux.delta
            bad["inner"].append(f"{tag} ratio={ratio:.2e} delta={d:.4f}")
        u_out = abs(wavefunction(params, SPEC, lv, tail_cutoff(params, lv)) * table.scale)
        if not u_out < 1e-10 * peak:
            bad["outer"].append(tag)
    ok = not any(bad.values())
    counts = {k: len(v) for k, v in bad.items()}
    small_delta = sum("delta=0." in t for t in bad["inner"])
    _report(
        capsys, 8, ok,
        f"{len(levels)} levels, violations {counts}; of the inner-boundary ones {small_delta} have delta < 1",
    )
    assert ok, bad


def test_criterion_9_richardson_ratio(capsys):
    ratios, outside, unconverged = [], [], 0
    for params in DEEP_GRID + DEEP_SUPPLEMENT:
        for l, mode in ((0, "exact"), (1, "approx"), (2, "approx"), (1, "exact"), (2, "exact")):
            for r in _oracle(params, l, mode, N_R_DEPTH if l == 0 else 1):
                if not r.converged:
                    unconverged += 1
                    continue
                ratios.append(r.ratio)
                if not 3.5 <= r.ratio <= 4.5:
                    outside.append(f"{params} l={l} {mode} E={r.E:.8f} ratio={r.ratio:.3f}")
    for params in SHALLOW_SETS + POSITIVE_SETS:
        for r in _oracle(params, 0, "exact"):
            if not r.converged:
                unconverged += 1
                continue
            ratios.append(r.ratio)
            if not 3.5 <= r.ratio <= 4.5:
                outside.append(f"{params} E={r.E:.8f} ratio={r.ratio:.3f}")
    ok = not outside and len(ratios) > 0
    _report(
        capsys, 9, ok,
        f"{len(ratios)} converged levels, ratio range [{min(ratios):.3f}, {max(ratios):.3f}], "
        f"{unconverged} not converged",
    )
    assert ok, outside

