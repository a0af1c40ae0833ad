"""Batch front end: ``twpa linear|gain|sweep|touchstone``.

Runs are described by a TOML file; every physical key carries its SI unit
as a suffix (``f_p_hz``, ``c_j_f``) so no unit guessing ever happens.  All
keys are optional — omitted ones fall back to the reference design — and
every resolved value, defaulted or not, is echoed to ``run_manifest.txt``.
Data CSVs are byte-deterministic (fixed scientific formatting, no
timestamps; the manifest carries the timestamp).

Exit codes: 0 success, 2 configuration/usage error, 3 solver failure,
4 Touchstone parse error.
"""

from __future__ import annotations

import argparse
import datetime
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .device import (
    REF_C_J,
    REF_C_RESONATOR,
    REF_CELLS_PER_SUPERCELL,
    REF_CORNER_PHASE,
    REF_CORNER_PHASE_REF,
    REF_F_RESONATOR,
    REF_I_C,
    REF_N_CORNERS,
    REF_N_SERIES,
    REF_N_UNIT_CELLS,
    REF_R_RESONATOR,
    DeviceSpec,
    JunctionParams,
    ResonatorParams,
    _even_corner_positions,
    branch_inductance,
    branch_plasma_frequency,
    linear_s21,
    matched_shunt_capacitance,
)
from .hbsolver import (
    HbOptions,
    PumpDrive,
    SolverError,
    conversion_gain,
    solve_pump,
    sweep,
)
from .netcore import FrequencyGrid, SingularElementError, SingularNetworkError
from .touchstone import (
    TouchstoneError,
    parse_touchstone,
    read_touchstone,
    write_touchstone,
)

# 17 significant digits: enough to round-trip IEEE doubles, so reruns diff
# clean against baselines.
_NUM = "{:.16e}"


class ConfigError(ValueError):
    """Configuration problem, reported with the offending key path."""


# ---------------------------------------------------------------------------
# configuration schema
#
# Each entry: key -> (type, default).  A default of _MATCHED is resolved to
# the impedance-matched ground capacitance once the junction is known.

_MATCHED = object()

_DEVICE_KEYS = {
    "i_c_a": (float, REF_I_C),
    "c_j_f": (float, REF_C_J),
    "n_series": (int, REF_N_SERIES),
    "l_scale": (float, 1.0),
    "c_ground_f": (float, _MATCHED),
    "n_unit_cells": (int, REF_N_UNIT_CELLS),
    "cells_per_supercell": (int, REF_CELLS_PER_SUPERCELL),
    "resonator_after_cell": (int, 4),
    "resonator_enabled": (bool, True),
    "f_r_hz": (float, REF_F_RESONATOR),
    "c_r_f": (float, REF_C_RESONATOR),
    "r_r_ohm": (float, REF_R_RESONATOR),
    "n_corners": (int, REF_N_CORNERS),
    "corner_extra_phase_rad": (float, REF_CORNER_PHASE),
    "corner_phase_ref_hz": (float, REF_CORNER_PHASE_REF),
    "z_system_ohm": (float, 50.0),
}

_PUMP_KEYS = {
    "f_p_hz": (float, 7.5e9),
    "p_dbm": (float, -70.2),
    "n_harmonics": (int, 3),
}

_BAND_KEYS = {
    "f_start_hz": (float, 4.0e9),
    "f_stop_hz": (float, 11.0e9),
    "f_step_hz": (float, 10.0e6),
}

_SOLVER_KEYS = {
    "tol": (float, 1e-9),
    "max_iter": (int, 50),
    "n_steps": (int, 5),
    "start_fraction": (float, 0.1),
    "k_sidebands": (int, 1),
}

_SECTIONS = {
    "device": _DEVICE_KEYS,
    "pump": _PUMP_KEYS,
    "signal_band": _BAND_KEYS,
    "solver": _SOLVER_KEYS,
}

_TOP_KEYS = {
    "normalization": (str, "absolute"),
    "output_dir": (str, "."),
}


@dataclass
class RunConfig:
    """Fully resolved run description plus a provenance trail."""

    spec: DeviceSpec
    drive: PumpDrive
    grid: FrequencyGrid
    opts: HbOptions
    k_sidebands: int
    normalization: str
    out_dir: Path
    overrides: dict = field(default_factory=dict)
    override_paths: list = field(default_factory=list)
    resolved: list = field(default_factory=list)
    config_path: Path | None = None


def _typecheck(path: str, value, want):
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if want is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected a string, got {value!r}")
    return value


def _resolve_section(name, raw, schema, trail):
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected a table")
    for key in raw:
        if key not in schema:
            raise ConfigError(f"{name}.{key}: unknown key")
    out = {}
    for key, (want, default) in schema.items():
        if key in raw:
            out[key] = _typecheck(f"{name}.{key}", raw[key], want)
            trail.append((f"{name}.{key}", out[key], False))
        else:
            out[key] = default
            if default is not _MATCHED:
                trail.append((f"{name}.{key}", default, True))
    return out


def load_config(
    path: Path | None, out_override: Path | None = None
) -> RunConfig:
    """Read, validate and fully resolve a run configuration.

    ``path`` may be None (all defaults).  Raises ConfigError for unknown
    keys, type mismatches, violated invariants or missing override files.
    """
    if path is None:
        raw = {}
        base_dir = Path.cwd()
    else:
        path = Path(path)
        try:
            raw = tomllib.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path.name}: {exc}") from None
        base_dir = path.parent

    known_top = set(_SECTIONS) | set(_TOP_KEYS) | {"overrides"}
    for key in raw:
        if key not in known_top:
            raise ConfigError(f"{key}: unknown key")

    trail = []
    sections = {
        name: _resolve_section(name, raw.get(name, {}), schema, trail)
        for name, schema in _SECTIONS.items()
    }
    top = {}
    for key, (want, default) in _TOP_KEYS.items():
        if key in raw:
            top[key] = _typecheck(key, raw[key], want)
            trail.append((key, top[key], False))
        else:
            top[key] = default
            trail.append((key, default, True))

    dev = sections["device"]
    try:
        junction = JunctionParams(
            i_c=dev["i_c_a"],
            c_j=dev["c_j_f"],
            n_series=dev["n_series"],
            l_scale=dev["l_scale"],
        )
    except ValueError as exc:
        raise ConfigError(f"device: {exc}") from None

    c_ground = dev["c_ground_f"]
    if c_ground is _MATCHED:
        c_ground = matched_shunt_capacitance(junction, dev["z_system_ohm"])
        trail.append(("device.c_ground_f", c_ground, True))

    resonator = None
    if dev["resonator_enabled"]:
        try:
            resonator = ResonatorParams(
                f_r=dev["f_r_hz"], c_r=dev["c_r_f"], r_loss=dev["r_r_ohm"]
            )
        except ValueError as exc:
            raise ConfigError(f"device: {exc}") from None

    n_supercells = -(-dev["n_unit_cells"] // dev["cells_per_supercell"])
    if dev["n_corners"] < 0:
        raise ConfigError("device.n_corners: must be >= 0")
    if dev["n_corners"] >= n_supercells:
        raise ConfigError(
            f"device.n_corners: {dev['n_corners']} corners do not fit in "
            f"{n_supercells} supercells"
        )
    try:
        spec = DeviceSpec(
            junction=junction,
            c_ground=c_ground,
            resonator=resonator,
            n_unit_cells=dev["n_unit_cells"],
            cells_per_supercell=dev["cells_per_supercell"],
            resonator_after_cell=dev["resonator_after_cell"],
            corner_positions=_even_corner_positions(n_supercells, dev["n_corners"]),
            corner_extra_phase=dev["corner_extra_phase_rad"],
            corner_phase_ref_hz=dev["corner_phase_ref_hz"],
            z_system=dev["z_system_ohm"],
        )
    except ValueError as exc:
        raise ConfigError(f"device: {exc}") from None

    pump = sections["pump"]
    try:
        drive = PumpDrive(
            f_p=pump["f_p_hz"], p_dbm=pump["p_dbm"], n_harmonics=pump["n_harmonics"]
        )
    except ValueError as exc:
        raise ConfigError(f"pump: {exc}") from None

    band = sections["signal_band"]
    if not band["f_start_hz"] < band["f_stop_hz"]:
        raise ConfigError("signal_band: f_start_hz must be below f_stop_hz")
    if not band["f_step_hz"] > 0.0:
        raise ConfigError("signal_band.f_step_hz: must be positive")
    f = np.arange(
        band["f_start_hz"],
        band["f_stop_hz"] + 0.5 * band["f_step_hz"],
        band["f_step_hz"],
    )
    grid = FrequencyGrid(f)

    sol = sections["solver"]
    try:
        opts = HbOptions(
            tol=sol["tol"],
            max_iter=sol["max_iter"],
            n_steps=sol["n_steps"],
            start_fraction=sol["start_fraction"],
        )
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from None
    if sol["k_sidebands"] < 1:
        raise ConfigError("solver.k_sidebands: must be >= 1")

    if top["normalization"] not in ("absolute", "relative-to-linear"):
        raise ConfigError(
            "normalization: must be 'absolute' or 'relative-to-linear'"
        )

    overrides = {}
    override_paths = []
    raw_overrides = raw.get("overrides", [])
    if not isinstance(raw_overrides, list):
        raise ConfigError("overrides: expected an array of tables")
    for i, entry in enumerate(raw_overrides):
        where = f"overrides[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where}: expected a table")
        extra = set(entry) - {"supercell", "path"}
        if extra:
            raise ConfigError(f"{where}.{sorted(extra)[0]}: unknown key")
        if "supercell" not in entry or "path" not in entry:
            raise ConfigError(f"{where}: needs both 'supercell' and 'path'")
        idx = _typecheck(f"{where}.supercell", entry["supercell"], int)
        p = base_dir / _typecheck(f"{where}.path", entry["path"], str)
        if not 0 <= idx < spec.n_supercells:
            raise ConfigError(
                f"{where}.supercell: {idx} outside 0..{spec.n_supercells - 1}"
            )
        if idx in overrides:
            raise ConfigError(f"{where}.supercell: duplicate index {idx}")
        if not p.is_file():
            raise ConfigError(f"{where}.path: no such file: {p}")
        try:
            overrides[idx] = read_touchstone(p).data
        except TouchstoneError as exc:
            raise ConfigError(f"{where}.path: {p.name}: {exc}") from None
        override_paths.append((idx, str(p)))
        trail.append((f"{where}", f"supercell {idx} <- {p}", False))

    out_dir = Path(out_override) if out_override else Path(top["output_dir"])
    return RunConfig(
        spec=spec,
        drive=drive,
        grid=grid,
        opts=opts,
        k_sidebands=sol["k_sidebands"],
        normalization=top["normalization"],
        out_dir=out_dir,
        overrides=overrides,
        override_paths=override_paths,
        resolved=trail,
        config_path=path,
    )


# ---------------------------------------------------------------------------
# output helpers


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _NUM.format(v)
    return str(v)


def write_manifest(cfg: RunConfig, command: str, extra: list | None = None):
    """run_manifest.txt: every resolved parameter, defaults marked."""
    lines = [
        f"command: {command}",
        f"config file: {cfg.config_path if cfg.config_path else '(none; all defaults)'}",
        f"generated: {datetime.datetime.now(datetime.timezone.utc).isoformat()}",
        "",
        "# resolved parameters ('default' = not set in the config file)",
    ]
    for key, value, is_default in cfg.resolved:
        mark = "  (default)" if is_default else ""
        lines.append(f"{key} = {_fmt_value(value)}{mark}")
    lines += [
        "",
        "# derived device quantities",
        f"n_supercells = {cfg.spec.n_supercells}",
        f"corner_positions = {list(cfg.spec.corner_positions)}",
        f"branch_inductance_h = {_NUM.format(branch_inductance(cfg.spec.junction))}",
        f"plasma_frequency_hz = {_NUM.format(branch_plasma_frequency(cfg.spec.junction))}",
        f"signal_points = {cfg.grid.n_points}",
    ]
    if cfg.spec.resonator is not None:
        lines.append(f"resonator_l_h = {_NUM.format(cfg.spec.resonator.l_r)}")
    if extra:
        lines += ["", "# run details"] + list(extra)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    (cfg.out_dir / "run_manifest.txt").write_text("\n".join(lines) + "\n")


def _write_csv(path: Path, header: list, columns: list):
    rows = zip(*columns)
    text = ",".join(header) + "\n"
    text += "\n".join(",".join(_NUM.format(v) for v in row) for row in rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n")


def _band_average(gain_db: np.ndarray) -> float:
    finite = gain_db[np.isfinite(gain_db)]
    return float(np.mean(finite)) if finite.size else math.nan


def _dip_frequency(f_hz: np.ndarray, db: np.ndarray) -> float:
    finite = np.isfinite(db)
    if not np.any(finite):
        return math.nan
    idx = np.nonzero(finite)[0]
    return float(f_hz[idx[np.argmin(db[idx])]])


# ---------------------------------------------------------------------------
# commands


def cmd_linear(cfg: RunConfig, verbose: bool = False) -> int:
    spectrum = linear_s21(cfg.spec, cfg.grid, overrides=cfg.overrides or None)
    _write_csv(
        cfg.out_dir / "linear_s21.csv",
        ["freq_hz", "s21_re", "s21_im", "s21_db", "s11_db"],
        [
            cfg.grid.f_hz,
            spectrum.s21.real,
            spectrum.s21.imag,
            spectrum.s21_db,
            spectrum.s11_db,
        ],
    )
    dip = _dip_frequency(cfg.grid.f_hz, spectrum.s21_db)
    write_manifest(cfg, "linear", [f"s21_dip_hz = {_NUM.format(dip)}"])
    if verbose:
        print(f"linear: dip at {dip / 1e9:.4f} GHz", file=sys.stderr)
    print(f"wrote {cfg.out_dir / 'linear_s21.csv'}")
    return 0


def _pump_report(cfg: RunConfig, sol) -> list:
    lines = [
        f"pump_iterations = {sol.iterations}",
        f"pump_residual = {_NUM.format(sol.residual_norm)}",
        f"pump_peak_junction_phase_rad = {_NUM.format(float(np.max(sol.peak_junction_phase)))}",
        "",
        "# pump amplitude profile (per-junction branch phase, every 10th cell)",
        "# cell  |phase_fund|_rad",
    ]
    amp = np.abs(sol.branch_phase_harmonics[:, 0])
    cells = list(range(0, amp.size, 10))
    if cells[-1] != amp.size - 1:
        cells.append(amp.size - 1)
    lines += [f"{c:6d}  {_NUM.format(amp[c])}" for c in cells]
    return lines


def cmd_gain(cfg: RunConfig, verbose: bool = False) -> int:
    if cfg.overrides:
        raise ConfigError(
            "overrides: Touchstone substitution applies to the linear command only"
        )
    if verbose:
        print(
            f"solving pump at {cfg.drive.f_p / 1e9:.4f} GHz, "
            f"{cfg.drive.p_dbm:+.2f} dBm",
            file=sys.stderr,
        )
    sol = solve_pump(cfg.spec, cfg.drive, cfg.opts)
    if verbose:
        print(
            f"pump converged: {sol.iterations} iterations, "
            f"residual {sol.residual_norm:.2e}",
            file=sys.stderr,
        )
    gain = conversion_gain(
        sol,
        cfg.spec,
        cfg.grid,
        k_sb=cfg.k_sidebands,
        normalization=cfg.normalization,
    )
    _write_csv(
        cfg.out_dir / "gain.csv",
        ["freq_hz", "gain_db", "s21_re", "s21_im", "idler_db"],
        [
            cfg.grid.f_hz,
            gain.gain_db,
            gain.s21_pumped.real,
            gain.s21_pumped.imag,
            gain.idler_db,
        ],
    )
    report = _pump_report(cfg, sol)
    write_manifest(cfg, "gain", report)
    (cfg.out_dir / "pump_report.txt").write_text("\n".join(report) + "\n")
    print(f"wrote {cfg.out_dir / 'gain.csv'}")
    return 0


def cmd_sweep(cfg: RunConfig, df_list, dp_list, verbose: bool = False) -> int:
    if cfg.overrides:
        raise ConfigError(
            "overrides: Touchstone substitution applies to the linear command only"
        )
    result = sweep(
        cfg.spec,
        cfg.drive,
        df_list,
        dp_list,
        cfg.grid,
        cfg.opts,
        k_sb=cfg.k_sidebands,
        normalization=cfg.normalization,
    )
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    summary = ["df_hz,dp_db,band_avg_gain_db,dip_freq_hz,status"]
    detail = []
    for i, pt in enumerate(result.points):
        name = f"gain_p{i:03d}.csv"
        if pt.status == "ok":
            _write_csv(
                cfg.out_dir / name,
                ["freq_hz", "gain_db", "s21_re", "s21_im", "idler_db"],
                [
                    cfg.grid.f_hz,
                    pt.gain.gain_db,
                    pt.gain.s21_pumped.real,
                    pt.gain.s21_pumped.imag,
                    pt.gain.idler_db,
                ],
            )
            avg = _band_average(pt.gain.gain_db)
            dip = _dip_frequency(cfg.grid.f_hz, pt.gain.gain_db)
            summary.append(
                f"{_NUM.format(pt.df)},{_NUM.format(pt.dp)},"
                f"{_NUM.format(avg)},{_NUM.format(dip)},ok"
            )
            detail.append(f"point {i}: df={pt.df:g} dp={pt.dp:g} -> {name}")
            if verbose:
                print(
                    f"point {i}: df={pt.df:g} Hz dp={pt.dp:g} dB "
                    f"avg={avg:.2f} dB",
                    file=sys.stderr,
                )
        else:
            summary.append(
                f"{_NUM.format(pt.df)},{_NUM.format(pt.dp)},nan,nan,failed"
            )
            detail.append(f"point {i}: df={pt.df:g} dp={pt.dp:g} FAILED: {pt.message}")
            if verbose:
                print(f"point {i} failed: {pt.message}", file=sys.stderr)
    (cfg.out_dir / "sweep_summary.csv").write_text("\n".join(summary) + "\n")
    write_manifest(
        cfg,
        "sweep",
        [f"df_list = {list(df_list)}", f"dp_list = {list(dp_list)}", ""] + detail,
    )
    print(f"wrote {cfg.out_dir / 'sweep_summary.csv'} ({len(result.points)} points)")
    if result.all_failed:
        print("all sweep points failed", file=sys.stderr)
        return 3
    return 0


def cmd_touchstone_info(path: Path, n_ports: int | None) -> int:
    doc = read_touchstone(path, n_ports=n_ports)
    f = doc.data.grid.f_hz
    print(
        f"{doc.data.n_ports} ports, {doc.data.grid.n_points} points, "
        f"{f[0] / 1e9:g}-{f[-1] / 1e9:g} GHz, {doc.fmt.upper()}, "
        f"R {doc.resistance:g}"
    )
    return 0


def cmd_touchstone_convert(
    src: Path, dst: Path, fmt: str, precision: int, n_ports: int | None
) -> int:
    doc = read_touchstone(src, n_ports=n_ports)
    dst.parent.mkdir(parents=True, exist_ok=True)
    dst.write_text(write_touchstone(doc, fmt=fmt, precision=precision))
    print(f"wrote {dst} ({doc.fmt.upper()} -> {fmt.upper()})")
    return 0


def cmd_touchstone_roundtrip(path: Path, precision: int, n_ports: int | None) -> int:
    doc = read_touchstone(path, n_ports=n_ports)
    again = parse_touchstone(
        write_touchstone(doc, precision=precision), n_ports=doc.data.n_ports
    )
    s_a, s_b = doc.data.s, again.data.s
    scale = np.maximum(np.abs(s_a), 1e-300)
    err_s = float(np.max(np.abs(s_a - s_b) / scale))
    err_f = float(
        np.max(
            np.abs(doc.data.grid.f_hz - again.data.grid.f_hz)
            / np.abs(doc.data.grid.f_hz)
        )
    )
    err = max(err_s, err_f)
    print(
        f"roundtrip max relative error: {err:.3e} "
        f"({doc.fmt.upper()}, {doc.data.n_ports} ports, "
        f"{doc.data.grid.n_points} points, precision {precision})"
    )
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _parse_float_list(text: str, flag: str) -> list:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"{flag}: expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twpa",
        description="Frequency-domain simulation of a Josephson traveling-wave "
        "parametric amplifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="TOML run configuration")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--verbose", action="store_true")
        return p

    add_run("linear", "pump-off transmission of the device chain")
    add_run("gain", "pumped small-signal gain spectrum")
    p_sweep = add_run("sweep", "gain over pump frequency/power offsets")
    p_sweep.add_argument(
        "--df-list", default="0", help="pump frequency offsets in Hz, comma separated"
    )
    p_sweep.add_argument(
        "--dp-list",
        default="-1,0,1",
        help="pump power offsets in dB, comma separated",
    )

    p_ts = sub.add_parser("touchstone", help="S-parameter file utilities")
    ts_sub = p_ts.add_subparsers(dest="ts_command", required=True)

    p_info = ts_sub.add_parser("info", help="print port count, grid and format")
    p_info.add_argument("path", type=Path)
    p_info.add_argument("--ports", type=int, default=None)

    p_conv = ts_sub.add_parser("convert", help="rewrite in another number format")
    p_conv.add_argument("src", type=Path)
    p_conv.add_argument("dst", type=Path)
    p_conv.add_argument("--format", required=True, choices=["ri", "ma", "db"])
    p_conv.add_argument("--precision", type=int, default=12)
    p_conv.add_argument("--ports", type=int, default=None)

    p_rt = ts_sub.add_parser("roundtrip", help="parse-write-parse error report")
    p_rt.add_argument("path", type=Path)
    p_rt.add_argument("--precision", type=int, default=12)
    p_rt.add_argument("--ports", type=int, default=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "touchstone":
            if args.ts_command == "info":
                return cmd_touchstone_info(args.path, args.ports)
            if args.ts_command == "convert":
                return cmd_touchstone_convert(
                    args.src, args.dst, args.format, args.precision, args.ports
                )
            return cmd_touchstone_roundtrip(args.path, args.precision, args.ports)

        cfg = load_config(args.config, out_override=args.out)
        if args.command == "linear":
            return cmd_linear(cfg, verbose=args.verbose)
        if args.command == "gain":
            return cmd_gain(cfg, verbose=args.verbose)
        df_list = _parse_float_list(args.df_list, "--df-list")
        dp_list = _parse_float_list(args.dp_list, "--dp-list")
        if not df_list or not dp_list:
            raise ConfigError("--df-list/--dp-list: at least one value each")
        return cmd_sweep(cfg, df_list, dp_list, verbose=args.verbose)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, SingularElementError, SingularNetworkError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except TouchstoneError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
