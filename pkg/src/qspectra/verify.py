"""Cross-checks of the closed-form and transcendental spectra against the oracle.

Kept apart from :mod:`qspectra.oracle` so that the oracle itself depends on
nothing but :mod:`qspectra.qmath`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

from .oracle import OracleConfig, OracleResult, oracle_levels
from .qmath import CentrifugalMode, PotentialParams, Regime
from .spectrum import EnergyLevel, ParticleSpec, solve_spectrum_deep, solve_spectrum_transcendental

__all__ = [
    "ReportRow",
    "ApproximationReport",
    "approximation_error_report",
    "VerifyRow",
    "VerifyReport",
    "verify_levels",
]

REPORT_COLUMNS = ("n_r", "l", "E_closed", "E_approx", "E_exact", "dE_model", "dE_phys", "h", "converged")
VERIFY_COLUMNS = REPORT_COLUMNS + ("nodes", "richardson_ratio", "passed")


def _to_csv(rows: list[dict], columns: tuple[str, ...]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns)
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (format(v, ".17g") if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def _json_safe(rows: list[dict]) -> list[dict]:
    return [{k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in r.items()} for r in rows]


def _by_nodes(results: list[OracleResult], n_r: int, near: float) -> OracleResult | None:
    cands = [r for r in results if r.nodes == n_r]
    if not cands:
        return None
    return min(cands, key=lambda r: abs(r.E - near) if math.isfinite(near) else r.E)


@dataclass(frozen=True)
class ReportRow:
    n_r: int
    l: int
    E_closed: float
    E_approx: float
    E_exact: float
    dE_model: float
    dE_phys: float
    h: float
    converged: bool


@dataclass(frozen=True)
class ApproximationReport:
    rows: tuple[ReportRow, ...]

    def to_csv(self) -> str:
        return _to_csv([asdict(r) for r in self.rows], REPORT_COLUMNS)

    def to_json(self) -> str:
        return json.dumps(_json_safe([asdict(r) for r in self.rows]), indent=2)


def approximation_error_report(
    params: PotentialParams,
    spec: ParticleSpec,
    l_list: list[int],
    n_r_max: int,
    config: OracleConfig = OracleConfig(),
) -> ApproximationReport:
    """Compare the closed form with the oracle under both centrifugal terms.

    ``dE_model = E_approx - E_closed`` tests the closed form against the
    problem it solves; ``dE_phys = E_exact - E_approx`` is the error made by
    the approximate centrifugal term.  Missing levels give ``nan`` entries.
    """
    if params.regime is not Regime.DEEP:
        raise ValueError("approximation_error_report requires q <= -1")
    closed = solve_spectrum_deep(params, spec, n_r_max, max(l_list)) if l_list else []
    rows = []
    for l in l_list:
        approx = oracle_levels(params, spec, l, n_r_max, _with_mode(config, CentrifugalMode.APPROXIMATE))
        exact = oracle_levels(params, spec, l, n_r_max, _with_mode(config, CentrifugalMode.EXACT))
        for n in range(n_r_max + 1):
            cl = [lv.E for lv in closed if lv.l == l and lv.n_r == n]
            e_closed = cl[0] if cl else math.nan
            ra = _by_nodes(approx, n, e_closed)
            re = _by_nodes(exact, n, ra.E if ra else e_closed)
            if ra is None and re is None and not cl:
                continue
            e_a = ra.E if ra else math.nan
            e_e = re.E if re else math.nan
            conv = bool(ra and ra.converged and re and re.converged)
            h = ra.h if ra else (re.h if re else math.nan)
            rows.append(ReportRow(n, l, e_closed, e_a, e_e, e_a - e_closed, e_e - e_a, h, conv))
    return ApproximationReport(tuple(rows))


def _with_mode(config: OracleConfig, mode: CentrifugalMode) -> OracleConfig:
    return OracleConfig(**{**asdict(config), "centrifugal_mode": mode})


@dataclass(frozen=True)
class VerifyRow:
    """One analytic level against the oracle.

    ``E_approx`` uses the centrifugal term the closed form solves (the
    approximate one for Deep ``l > 0``, otherwise the exact one);
    ``E_exact`` always uses the exact term.  ``dE_model`` compares the
    analytic level with the oracle level selected by ``mode``.
    """

    n_r: int
    l: int
    E_closed: float
    E_approx: float
    E_exact: float
    dE_model: float
    dE_phys: float
    h: float
    converged: bool
    nodes: int
    richardson_ratio: float
    passed: bool


@dataclass(frozen=True)
class VerifyReport:
    rows: tuple[VerifyRow, ...]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_csv(self) -> str:
        return _to_csv([asdict(r) for r in self.rows], VERIFY_COLUMNS)

    def to_json(self) -> str:
        return json.dumps(_json_safe([asdict(r) for r in self.rows]), indent=2)


def _analytic_levels(params: PotentialParams, spec: ParticleSpec, n_r_max: int, l_max: int) -> list[EnergyLevel]:
    if params.regime is Regime.DEEP:
        return solve_spectrum_deep(params, spec, n_r_max, l_max)
    return solve_spectrum_transcendental(params, spec, n_r_max + 1)


def _pair(found: list[OracleResult], E: float, used: set[int]) -> OracleResult | None:
    best = None
    for i, r in enumerate(found):
        if i not in used and (best is None or abs(r.E - E) < abs(found[best].E - E)):
            best = i
    if best is None:
        return None
    used.add(best)
    return found[best]


def verify_levels(
    params: PotentialParams,
    spec: ParticleSpec,
    n_r_max: int,
    l_max: int = 0,
    config: OracleConfig = OracleConfig(),
    tol: float = 1e-6,
    mode: CentrifugalMode | str = CentrifugalMode.APPROXIMATE,
) -> VerifyReport:
    """Match analytic levels with oracle levels in both directions.

    A row passes when ``|dE_model| < tol * M`` and the oracle eigenvector
    has ``n_r`` nodes.  Oracle levels with no analytic partner appear with
    ``E_closed = nan`` and fail.  ``mode = exact`` compares the analytic
    level with ``E_exact`` instead of ``E_approx``.
    """
    mode = CentrifugalMode(mode)
    if params.regime is not Regime.DEEP:
        l_max = 0
    analytic = _analytic_levels(params, spec, n_r_max, l_max)
    rows = []
    for l in range(l_max + 1):
        exact = oracle_levels(params, spec, l, n_r_max, _with_mode(config, CentrifugalMode.EXACT))
        if l > 0:
            approx = oracle_levels(params, spec, l, n_r_max, _with_mode(config, CentrifugalMode.APPROXIMATE))
        else:
            approx = exact
        primary, secondary = (approx, exact) if mode is CentrifugalMode.APPROXIMATE else (exact, approx)
        used: set[int] = set()
        used_sec: set[int] = set()
        for lv in (a for a in analytic if a.l == l):
            r = _pair(primary, lv.E, used)
            s = r if secondary is primary else _pair(secondary, r.E if r else lv.E, used_sec)
            ra, re = (r, s) if mode is CentrifugalMode.APPROXIMATE else (s, r)
            e_a = ra.E if ra else math.nan
            e_e = re.E if re else math.nan
            e_sel = r.E if r else math.nan
            dE = e_sel - lv.E
            ok = bool(r is not None and abs(dE) < tol * spec.M and r.nodes == lv.n_r)
            rows.append(
                VerifyRow(
                    lv.n_r, l, lv.E, e_a, e_e, dE, e_e - e_a,
                    r.h if r else math.nan, bool(r and r.converged), r.nodes if r else -1,
                    r.ratio if r else math.nan, ok,
                )
            )
        for i, r in enumerate(primary):
            if i not in used:
                e_a = r.E if mode is CentrifugalMode.APPROXIMATE else math.nan
                e_e = r.E if mode is CentrifugalMode.EXACT or secondary is primary else math.nan
                rows.append(
                    VerifyRow(r.nodes, l, math.nan, e_a, e_e, math.nan, math.nan, r.h, r.converged, r.nodes, r.ratio, False)
                )
    return VerifyReport(tuple(rows))
