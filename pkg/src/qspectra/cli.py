"""Command-line front end.

Subcommands ``spectrum``, ``wavefunction``, ``verify``, ``scan`` and
``report`` write CSV files plus ``manifest.json`` into ``--out``.  Exit
codes: 0 success, 1 usage error, 2 empty result, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import json
import logging
import math
import os
import re
import sys
import warnings
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from . import __version__
from .errors import QSpectraError, ScanWarning
from .oracle import OracleConfig
from .qmath import CentrifugalMode, PotentialParams, Regime, inner_boundary
from .spectrum import (
    DEEP_SCAN_POINTS,
    TRANSCENDENTAL_SCAN_POINTS,
    EnergyLevel,
    ParticleSpec,
    AuxParams,
    QuantumNumbers,
    admissible_energy_window,
    aux_parameters,
    energy_residual_deep,
    pole_residual_deep,
    quantization_residual_positive,
    quantization_residual_shallow,
    scan_residual,
    solve_spectrum_deep,
    solve_spectrum_transcendental,
)
from .verify import approximation_error_report, verify_levels
from .wavefun import RadialGrid, count_nodes, normalize_numeric, tail_cutoff

log = logging.getLogger("qspectra")

EXIT_OK, EXIT_USAGE, EXIT_EMPTY, EXIT_VERIFY = 0, 1, 2, 3

SPECTRUM_COLUMNS = (
    "method", "q_regime", "n_r", "l", "E", "residual", "w", "delta", "p",
    "admissible_window_lo", "admissible_window_hi",
)
DEFAULTS: dict[str, Any] = {
    "M": 1.0,
    "alpha": None,
    "V1": None,
    "V2": None,
    "q": None,
    "nmax": 3,
    "lmax": 0,
    "nr": 0,
    "l": 0,
    "tol": 1e-6,
    "grid_points": None,
    "rmax_factor": None,
    "centrifugal": "approx",
    "out": ".",
}
_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(Exception):
    """Invalid command-line or configuration input (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        # let values such as -2e-2 through as numbers, not option names
        self._negative_number_matcher = re.compile(r"^-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _fmt(v: Any) -> Any:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".17g")
    return v


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    """RFC-4180 CSV (CRLF line ends) with 17-significant-digit floats."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _digest(obj: Any) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def write_manifest(out: Path, command: str, cfg: dict[str, Any], extra: dict[str, Any], config_file: str | None) -> None:
    digests = {"effective_config": _digest(cfg)}
    if config_file:
        digests["config_file"] = hashlib.sha256(Path(config_file).read_bytes()).hexdigest()
    manifest = {
        "command": command,
        "params": {k: cfg[k] for k in ("V1", "V2", "alpha", "q")},
        "spec": {"M": cfg["M"]},
        "config": cfg,
        "config_digests": digests,
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        **extra,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(_json_clean(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _json_clean(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qspectra", description="Klein-Gordon bound states in q-deformed Rosen-Morse potentials.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--M", type=float, help="particle mass (default 1)")
        p.add_argument("--alpha", type=float, help="inverse range, > 0")
        p.add_argument("--V1", type=float, help="strength of the 1/cosh_q^2 term")
        p.add_argument("--V2", type=float, help="strength of the tanh_q term")
        p.add_argument("--q", type=float, help="deformation parameter, nonzero")
        p.add_argument("--nmax", type=int, help="largest radial quantum number (default 3)")
        p.add_argument("--lmax", type=int, help="largest orbital quantum number, Deep regime only (default 0)")
        p.add_argument("--tol", type=float, help="verification tolerance relative to M (default 1e-6)")
        p.add_argument(
            "--grid-points", dest="grid_points", type=int,
            help="energy scan points (spectrum, scan), oracle n_grid (verify, report) or r samples (wavefunction)",
        )
        p.add_argument(
            "--rmax-factor", dest="rmax_factor", type=float,
            help="box length in units of 1/alpha (oracle) or table extent (wavefunction)",
        )
        p.add_argument("--centrifugal", choices=("exact", "approx"), help="oracle centrifugal term for verify")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--config", help="JSON file with default values for any flag")

    for name, text in (
        ("spectrum", "bound-state energies"),
        ("wavefunction", "tabulate one normalized radial function"),
        ("verify", "cross-check analytic levels against the eigensolver"),
        ("scan", "tabulate the quantization residual over the admissible window"),
        ("report", "centrifugal approximation error table (Deep regime)"),
    ):
        p = sub.add_parser(name, help=text)
        common(p)
        if name in ("wavefunction", "scan"):
            p.add_argument("--nr", type=int, help="radial quantum number of the selected level (default 0)")
            p.add_argument("--l", type=int, help="orbital quantum number of the selected level (default 0)")
    return parser


def _load_config(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    norm = {str(k).lstrip("-").replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(norm) - set(DEFAULTS))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return norm


def _merge(args: argparse.Namespace) -> dict[str, Any]:
    cfg = dict(DEFAULTS)
    cfg.update(_load_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if cfg["q"] is not None and float(cfg["q"]) == 0.0:
        raise UsageError("q must be nonzero")
    for key in ("alpha", "V1", "V2", "q"):
        if cfg[key] is None:
            raise UsageError(f"--{key} is required")
        cfg[key] = float(cfg[key])
    cfg["M"] = float(cfg["M"])
    for key in ("nmax", "lmax", "nr", "l"):
        if int(cfg[key]) != cfg[key] or cfg[key] < 0:
            raise UsageError(f"--{key} must be a non-negative integer")
        cfg[key] = int(cfg[key])
    if cfg["centrifugal"] not in ("exact", "approx"):
        raise UsageError("--centrifugal must be exact or approx")
    if not (cfg["tol"] > 0):
        raise UsageError("--tol must be positive")
    return cfg


def _setup(cfg: dict[str, Any]) -> tuple[PotentialParams, ParticleSpec, Path]:
    params = PotentialParams(cfg["V1"], cfg["V2"], cfg["alpha"], cfg["q"])
    spec = ParticleSpec(cfg["M"])
    if params.regime is not Regime.DEEP and cfg["lmax"] > 0:
        log.warning("only l = 0 is available for q > -1; ignoring --lmax")
        cfg["lmax"] = 0
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return params, spec, out


def _solve(params: PotentialParams, spec: ParticleSpec, cfg: dict[str, Any]) -> list[EnergyLevel]:
    if params.regime is Regime.DEEP:
        pts = cfg["grid_points"] or DEEP_SCAN_POINTS
        return solve_spectrum_deep(params, spec, cfg["nmax"], cfg["lmax"], scan_points=pts)
    pts = cfg["grid_points"] or TRANSCENDENTAL_SCAN_POINTS
    return solve_spectrum_transcendental(params, spec, cfg["nmax"] + 1, scan_points=pts)


def _level_row(params: PotentialParams, lv: EnergyLevel) -> list[Any]:
    a = lv.aux
    if params.regime is Regime.DEEP:
        w, d, p = a.w_l, a.delta_l, a.p_l
    else:
        w, d, p = a.w, a.delta, a.p
    lo, hi = (lv.window.lo, lv.window.hi) if lv.window else (None, None)
    return [lv.method.value, params.regime.value, lv.n_r, lv.l, lv.E, lv.residual, w, d, p, lo, hi]


def cmd_spectrum(cfg: dict[str, Any], config_file: str | None) -> int:
    params, spec, out = _setup(cfg)
    levels = _solve(params, spec, cfg)
    write_csv(out / "spectrum.csv", SPECTRUM_COLUMNS, [_level_row(params, lv) for lv in levels])
    write_manifest(out, "spectrum", cfg, {"n_levels": len(levels)}, config_file)
    if not levels:
        print("no bound states found", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def cmd_wavefunction(cfg: dict[str, Any], config_file: str | None) -> int:
    params, spec, out = _setup(cfg)
    n, l = cfg["nr"], cfg["l"]
    QuantumNumbers(n, l)
    if params.regime is Regime.DEEP:
        cfg["lmax"] = max(cfg["lmax"], l)
        cfg["nmax"] = max(cfg["nmax"], n)
    elif l != 0:
        raise UsageError("only l = 0 is available for q > -1")
    else:
        cfg["nmax"] = max(cfg["nmax"], n)
    levels = [lv for lv in _solve(params, spec, cfg) if lv.n_r == n and lv.l == l]
    if not levels:
        raise UsageError(f"no level with n_r={n}, l={l}")
    level = levels[0]
    r_in = inner_boundary(params)
    r_max = r_in + cfg["rmax_factor"] / params.alpha if cfg["rmax_factor"] else tail_cutoff(params, level)
    grid = RadialGrid(r_in, r_max, cfg["grid_points"] or 2001)
    table = normalize_numeric(params, spec, level, grid)
    rows = [[r, u, u * u] for r, u in zip(table.r.tolist(), table.values.tolist())]
    write_csv(out / f"wf_{n}_{l}.csv", ("r", "u", "u_squared"), rows)
    extra = {"E": level.E, "n_r": n, "l": l, "norm": table.norm, "nodes": count_nodes(table)}
    write_manifest(out, "wavefunction", cfg, extra, config_file)
    return EXIT_OK


def _oracle_config(cfg: dict[str, Any]) -> OracleConfig:
    kw: dict[str, Any] = {}
    if cfg["grid_points"]:
        kw["n_grid"] = cfg["grid_points"]
    if cfg["rmax_factor"]:
        kw["r_max_factor"] = cfg["rmax_factor"]
    return OracleConfig(**kw)


def cmd_verify(cfg: dict[str, Any], config_file: str | None) -> int:
    params, spec, out = _setup(cfg)
    report = verify_levels(
        params, spec, cfg["nmax"], cfg["lmax"], _oracle_config(cfg), cfg["tol"], CentrifugalMode(cfg["centrifugal"])
    )
    (out / "verify.csv").write_bytes(report.to_csv().encode())
    n_fail = sum(not r.passed for r in report.rows)
    write_manifest(out, "verify", cfg, {"rows": len(report.rows), "failed": n_fail}, config_file)
    if not report.rows:
        print("no bound states found by either solver", file=sys.stderr)
        return EXIT_EMPTY
    if n_fail:
        print(f"{n_fail} of {len(report.rows)} rows failed at tol={cfg['tol']:g}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_scan(cfg: dict[str, Any], config_file: str | None) -> int:
    params, spec, out = _setup(cfg)
    qn = QuantumNumbers(cfg["nr"], cfg["l"])
    if params.regime is Regime.DEEP:
        f = lambda e: energy_residual_deep(params, spec, e, qn)  # noqa: E731
        pts = cfg["grid_points"] or DEEP_SCAN_POINTS
    else:
        if qn.l != 0:
            raise UsageError("only l = 0 is available for q > -1")
        qn = QuantumNumbers(0, 0)
        res = quantization_residual_shallow if params.regime is Regime.SHALLOW_NEGATIVE else quantization_residual_positive
        f = lambda e: res(params, spec, e)  # noqa: E731
        pts = cfg["grid_points"] or TRANSCENDENTAL_SCAN_POINTS
    windows = admissible_energy_window(params, spec, qn)
    if not windows:
        raise UsageError("the admissible energy window is empty")
    rows: list[list[Any]] = []
    n_roots = 0
    for win in windows:
        Es, rs, roots = scan_residual(f, win, pts, 1e-12 * spec.M, "scan")
        rows.extend(["scan", float(e), float(r)] for e, r in zip(Es, rs))
        for E in roots:
            kind = "root"
            if params.regime is Regime.DEEP:
                aux = _deep_aux(params, spec, E, qn)
                if aux is None or abs(pole_residual_deep(params, spec, E, qn)) >= aux.w_l:
                    kind = "rejected"
            n_roots += kind == "root"
            rows.append([kind, E, f(E)])
    write_csv(out / "scan.csv", ("kind", "E", "residual"), rows)
    write_manifest(out, "scan", cfg, {"roots": n_roots}, config_file)
    return EXIT_OK


def _deep_aux(params: PotentialParams, spec: ParticleSpec, E: float, qn: QuantumNumbers) -> AuxParams | None:
    aux = aux_parameters(params, spec, E, qn)
    if not aux.admissible or not (aux.w_l > 0.0 and aux.delta_l > 0.5):
        return None
    return aux


def cmd_report(cfg: dict[str, Any], config_file: str | None) -> int:
    params, spec, out = _setup(cfg)
    if params.regime is not Regime.DEEP:
        raise UsageError("report needs the Deep regime (q <= -1)")
    report = approximation_error_report(params, spec, list(range(cfg["lmax"] + 1)), cfg["nmax"], _oracle_config(cfg))
    (out / "report.csv").write_bytes(report.to_csv().encode())
    (out / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    write_manifest(out, "report", cfg, {"rows": len(report.rows)}, config_file)
    return EXIT_OK if report.rows else EXIT_EMPTY


COMMANDS = {
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "report": cmd_report,
}


def _configure_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("QSPECTRA_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("qspectra").setLevel(level)
    logging.captureWarnings(True)
    if level > logging.WARNING:
        warnings.simplefilter("ignore", ScanWarning)


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    _configure_logging()
    try:
        args = build_parser().parse_args(argv)
        cfg = _merge(args)
        return COMMANDS[args.command](cfg, args.config)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (QSpectraError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - keep the exit-code contract
        log.debug("unexpected failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
