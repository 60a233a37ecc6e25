"""Command-line front end: ``xyqfi scan ...``.

Settings come from flags, then an optional TOML config file (same keys as
the long flags, dashes or underscores), then built-in defaults.
"""
from __future__ import annotations

import argparse
import logging
import sys
from datetime import datetime, timezone

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .chain_model import DEFAULT_CONFIG, ParameterTag, QuadratureConfig
from .correlations import parse_separation
from .errors import XYQFIError
from .scan import MODES, PRESETS, JGrid, ScanSpec, parse_values, preset_spec, run_scan, to_csv, to_json

log = logging.getLogger("xyqfi")

DEFAULTS = {
    "mode": None,
    "preset": None,
    "grid_J": "-2:2:0.01",
    "refine": True,
    "gamma": "1",
    "D": "0",
    "r": "1,2,3,4,5,6,inf",
    "tags": "J",
    "out": None,
    "format": "csv",
    "tol": DEFAULT_CONFIG.rel_tol,
    "abs_tol": DEFAULT_CONFIG.abs_tol,
    "max_subdivisions": DEFAULT_CONFIG.max_subdivisions,
    "critical_guard": DEFAULT_CONFIG.critical_guard,
    "threads": 1,
    "oracle_N": "8,10,12",
    "timestamp": False,
}


def _listify(v):
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="xyqfi", description="Fisher-information scans of the XY chain with DM interaction.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scan", help="run a parameter scan and emit CSV or JSON rows")
    s.add_argument("--config", help="TOML file with defaults for any flag below")
    s.add_argument("--mode", choices=MODES)
    s.add_argument("--preset", choices=sorted(PRESETS))
    s.add_argument("--grid-J", dest="grid_J", metavar="A:B:STEP", help="J range (single value allowed)")
    s.add_argument("--no-refine", dest="refine", action="store_const", const=False,
                   help="skip the finer J step near J = +-1")
    s.add_argument("--gamma", help="value, comma list or a:b:step")
    s.add_argument("--D", dest="D", help="value, comma list or a:b:step")
    s.add_argument("--r", help="separations, e.g. 1,2,3,inf")
    s.add_argument("--tags", help="subset of J,gamma,D")
    s.add_argument("--out", help="output file (default stdout)")
    s.add_argument("--format", choices=("csv", "json"))
    s.add_argument("--tol", type=float, help="relative quadrature tolerance")
    s.add_argument("--abs-tol", dest="abs_tol", type=float)
    s.add_argument("--max-subdivisions", dest="max_subdivisions", type=int)
    s.add_argument("--critical-guard", dest="critical_guard", type=float)
    s.add_argument("--threads", type=int)
    s.add_argument("--oracle-N", dest="oracle_N", help="chain length(s) for oracle-check, e.g. 8,10,12")
    s.add_argument("--timestamp", action="store_const", const=True,
                   help="add a generation time to JSON metadata (breaks byte-identical output)")
    s.add_argument("-v", "--verbose", action="count", default=0)

    sub.add_parser("presets", help="list preset names and their settings")
    return ap


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    raw = raw.get("scan", raw)
    cfg = {}
    for k, v in raw.items():
        key = k.replace("-", "_")
        if key == "grid_j":
            key = "grid_J"
        if key == "d":
            key = "D"
        if key not in DEFAULTS:
            raise XYQFIError(f"unknown config key {k!r} in {path}")
        cfg[key] = _listify(v)
    return cfg


def resolve(args: argparse.Namespace) -> dict:
    """flags > config file > defaults"""
    merged = dict(DEFAULTS)
    merged.update(load_config(args.config))
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    return merged


def spec_from_settings(s: dict, explicit: set) -> ScanSpec:
    cfg = QuadratureConfig(
        abs_tol=float(s["abs_tol"]),
        rel_tol=float(s["tol"]),
        max_subdivisions=int(s["max_subdivisions"]),
        critical_guard=float(s["critical_guard"]),
    )
    fields = dict(
        j_grid=JGrid.parse(str(s["grid_J"]), refine=bool(s["refine"])),
        gammas=tuple(parse_values(str(s["gamma"]))),
        Ds=tuple(parse_values(str(s["D"]))),
        r_list=tuple(parse_separation(x) for x in str(s["r"]).split(",") if x.strip()),
        tags=tuple(ParameterTag.parse(t.strip()) for t in str(s["tags"]).split(",") if t.strip()),
        cfg=cfg,
        oracle_N=tuple(int(x) for x in str(s["oracle_N"]).split(",")),
    )
    if s["preset"]:
        # preset supplies mode and its own grids; only explicitly given keys override it
        keep = {"cfg", "tags", "oracle_N"}
        overrides = {k: v for k, v in fields.items() if k in keep}
        for key, name in (("grid_J", "j_grid"), ("gamma", "gammas"), ("D", "Ds"), ("r", "r_list")):
            if key in explicit:
                overrides[name] = fields[name]
        if explicit & {"grid_J", "gamma", "D"}:
            overrides["points"] = None
        if s["mode"] and s["mode"] != PRESETS[s["preset"]]["mode"]:
            raise XYQFIError(f"preset {s['preset']} runs mode {PRESETS[s['preset']]['mode']}, not {s['mode']}")
        return preset_spec(s["preset"], **overrides)
    if not s["mode"]:
        raise XYQFIError("either --mode or --preset is required")
    if s["mode"] == "asymptotic-decay" and "r" not in explicit:
        fields["r_list"] = (8, 16, 32, 64)
    return ScanSpec(mode=s["mode"], **fields)


def _explicit_keys(args, file_cfg) -> set:
    keys = set(file_cfg)
    keys.update(k for k in DEFAULTS if getattr(args, k, None) is not None)
    return keys


def cmd_scan(args) -> int:
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    settings = resolve(args)
    spec = spec_from_settings(settings, _explicit_keys(args, load_config(args.config)))
    result = run_scan(spec, threads=max(1, int(settings["threads"])))
    if result.excluded:
        log.warning("%d grid point(s) excluded (critical guard or J=0)", len(result.excluded))
    if settings["format"] == "json":
        stamp = datetime.now(timezone.utc).isoformat() if settings["timestamp"] else None
        text = to_json(result, stamp)
    else:
        text = to_csv(result)
    if settings["out"]:
        with open(settings["out"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if result.failures:
        log.warning("%d row(s) carry errors or failed comparisons", result.failures)
    return 0


def cmd_presets(args) -> int:
    for name in sorted(PRESETS):
        sys.stdout.write(f"{name}: {preset_spec(name).echo()}\n")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "scan":
            return cmd_scan(args)
        return cmd_presets(args)
    except (XYQFIError, OSError, ValueError) as exc:
        sys.stderr.write(f"xyqfi: error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
