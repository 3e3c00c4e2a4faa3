"""Command-line front end: ``fadecap bound|sweep|selftest``.

Configs are plain ``key = value`` files (``#`` starts a comment; lists are
comma separated; ``a:b:step`` expands to an inclusive range) or JSON
objects with the same keys.

Exit codes: 0 success, 1 self-test failure, 2 invalid config or violated
precondition, 3 numerical non-convergence, 4 sweep finished with failed points.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .analysis import (FIGURES, RANGE_COLUMNS, RATIO_COLUMNS, SIR_COLUMNS, SweepSpec, range_map,
                       sir_tradeoff, square_setup, sweep_ratio)
from .bounds import awgn_upper, awgn_upper_approx, approx_lb, lower_bound_cor2, lower_bound_thm1
from .errors import ConvergenceError, PreconditionError
from .pulse import PulseSpec, pulse_for_grid
from .scattering import BrickRect, SeparableJakesExp, TwoLevelBrick, grid_match

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_NUMERIC, EXIT_PARTIAL = 0, 1, 2, 3, 4

SCHEMA = {
    "bound": str, "kind": str, "shape": str, "figure": str, "lattice_method": str,
    "tf": float, "delta_h": float, "tau0": float, "nu0": float, "eps": float,
    "snr_db": float, "n_sub": int, "eta": float, "bandwidth": float, "power": float,
    "threshold": float, "outer_scale": float, "nu_d": float, "tau_rms": float,
    "tau_cut": float, "quad_order": int, "theta_tol": float, "lattice_tol": float,
    "force_failure": bool,
}
LIST_KEYS = {"tf", "delta_h", "eps", "snr_db"}
TOLERANCE_KEYS = {"theta_tol", "lattice_tol"}


class ConfigError(ValueError):
    pass


def _convert(key, text):
    kind = SCHEMA[key]
    try:
        if kind is bool:
            low = str(text).strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return low in ("true", "1", "yes")
        if kind is int:
            val = float(text)
            if val != int(val):
                raise ValueError(text)
            return int(val)
        if kind is float:
            return float(text)
        return str(text).strip()
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value {text!r} for {key}") from None


def _expand(key, raw):
    if isinstance(raw, list):
        return [_convert(key, v) for v in raw]
    text = str(raw).strip()
    if key in LIST_KEYS and ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigError(f"range for {key} must be start:stop:step with positive step")
        start, stop, step = parts
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(max(count, 0))]
    if key in LIST_KEYS:
        return [_convert(key, p) for p in text.split(",") if p.strip()]
    return _convert(key, text)


def parse_config(text):
    """Validated config dict; list keys always map to lists."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            raw = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON config: {exc}") from None
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            raw[key] = value
    cfg = {}
    for key, value in raw.items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        val = _expand(key, value)
        if key in LIST_KEYS and not isinstance(val, list):
            val = [val]
        cfg[key] = val
    _validate(cfg)
    return cfg


def _validate(cfg):
    for key, val in cfg.items():
        vals = val if isinstance(val, list) else [val]
        if SCHEMA[key] in (int, float) and key != "snr_db":
            if any(not math.isfinite(v) or v < 0 for v in vals):
                raise ConfigError(f"{key} must be finite and non-negative")
        if key in TOLERANCE_KEYS and any(v <= 0 for v in vals):
            raise ConfigError(f"{key} must be positive")
    if "snr_db" in cfg and not cfg["snr_db"]:
        raise ConfigError("snr_db grid is empty")
    if ("tau0" in cfg or "nu0" in cfg) and "delta_h" in cfg:
        raise ConfigError("give either tau0/nu0 or delta_h, not both")
    if ("tau0" in cfg) != ("nu0" in cfg):
        raise ConfigError("tau0 and nu0 must be given together")


def _one(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing config key {key!r}")
        return default
    val = cfg[key]
    if isinstance(val, list):
        if len(val) != 1:
            raise ConfigError(f"{key} must be a single value here")
        return val[0]
    return val


def _support(cfg):
    if "tau0" in cfg:
        tau0, nu0 = cfg["tau0"], cfg["nu0"]
    else:
        half = math.sqrt(_one(cfg, "delta_h")) / 2.0
        tau0 = nu0 = half
    if not (tau0 > 0 and nu0 > 0):
        raise ConfigError("support must have positive area")
    return tau0, nu0


def _model(cfg, tau0, nu0, eps):
    shape = cfg.get("shape", "brick")
    if shape == "brick":
        return BrickRect(tau0, nu0)
    if shape == "twolevel":
        scale = cfg.get("outer_scale", 2.0)
        return TwoLevelBrick(tau0, nu0, eps, scale * tau0, scale * nu0)
    if shape == "jakes":
        return SeparableJakesExp(_one(cfg, "nu_d"), _one(cfg, "tau_rms"), _one(cfg, "tau_cut"))
    raise ConfigError(f"unknown shape {shape!r}")


def _tolerances(cfg):
    return {
        "quadrature_order": cfg.get("quad_order", 16),
        "theta_tol": cfg.get("theta_tol", 1e-9),
        "lattice_method": cfg.get("lattice_method", "poisson"),
        "gamma_xtol": 1e-10,
        "scan_step_db": 0.25,
        "crossing_tol_db": 0.01,
    }


def _config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def _fmt(value):
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.11e}"


def _to_builtin(obj):
    if isinstance(obj, dict):
        return {k: _to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_builtin(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _dump_json(doc):
    return json.dumps(_to_builtin(doc), indent=2, sort_keys=True, allow_nan=True) + "\n"


def _csv_text(rows, columns):
    buf = io.StringIO()
    with_error = any(r.get("error") for r in rows)
    header = list(columns) + (["error"] if with_error else [])
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for r in rows:
        line = [_fmt(r[c]) for c in columns]
        if with_error:
            line.append(r.get("error", ""))
        writer.writerow(line)
    return buf.getvalue()


def _write(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _metadata(cfg, extra=None):
    meta = {"tool_version": __version__, "config_hash": _config_hash(cfg),
            "tolerances": _tolerances(cfg), "config": cfg}
    meta.update(extra or {})
    return meta


def cmd_bound(cfg, out=None, fmt="json"):
    kind = cfg.get("bound", "cor2")
    inputs = dict(cfg)
    if kind == "awgn":
        bandwidth = _one(cfg, "bandwidth", 1.0)
        power = _one(cfg, "power")
        nu0 = cfg.get("nu0", 0.0)
        value = awgn_upper(bandwidth, power, nu0, cfg.get("eta", 0.0), _one(cfg, "eps", 0.0))
        per_hz = value / bandwidth if bandwidth > 0 else math.nan
        doc = {"bound": "awgn", "value_nat_per_s": value, "value_nat_per_s_per_hz": per_hz,
               "value_bit_per_s_per_hz": per_hz / math.log(2), "terms": None, "gamma_opt": None}
    elif kind in ("cor2", "thm1", "approx"):
        tf = _one(cfg, "tf", 1.02)
        eps = _one(cfg, "eps", 0.0)
        rho = 10.0 ** (_one(cfg, "snr_db") / 10.0)
        tau0, nu0 = _support(cfg)
        if kind == "approx":
            res_value = float(approx_lb(rho, 4.0 * tau0 * nu0))
            terms, gamma = None, None
        else:
            if "delta_h" in cfg:
                pulse, grid, _ = square_setup(4.0 * tau0 * nu0, tf)
            else:
                grid = grid_match(tau0, nu0, tf)
                pulse = pulse_for_grid(tf, grid)
            if kind == "cor2":
                res = lower_bound_cor2(pulse, grid, rho, tau0, nu0, eps)
            else:
                model = _model(cfg, tau0, nu0, eps)
                res = lower_bound_thm1(pulse, grid, model, rho, _one(cfg, "n_sub", 8),
                                       theta_tol=cfg.get("theta_tol", 1e-9))
            res_value, gamma = res.value, res.gamma_opt
            terms = {"coherent_term": res.coherent_term, "logdet_penalty": res.logdet_penalty,
                     "interference_penalty": res.interference_penalty}
        upper = float(awgn_upper_approx(1.0, rho, eps))
        doc = {"bound": kind, "value_nat_per_s_per_hz": res_value,
               "value_bit_per_s_per_hz": res_value / math.log(2),
               "clamped_nat_per_s_per_hz": max(res_value, 0.0),
               "upper_nat_per_s_per_hz": upper, "ratio": res_value / upper if upper > 0 else math.nan,
               "terms": terms, "gamma_opt": gamma}
    else:
        raise ConfigError(f"unknown bound {kind!r}")
    doc["inputs"] = inputs
    doc.update({k: v for k, v in _metadata(cfg).items() if k != "config"})
    if fmt == "csv":
        row = {k: doc[k] for k in ("value_nat_per_s_per_hz", "value_bit_per_s_per_hz")}
        _write(_csv_text([row], list(row)), out)
        _write_sidecar(out, _metadata(cfg))
    else:
        _write(_dump_json(doc), out)
    return EXIT_OK


def _write_sidecar(out, meta):
    if out and out != "-":
        with open(out + ".meta.json", "w", encoding="utf-8") as fh:
            fh.write(_dump_json(meta))


def _sweep_settings(cfg, figure):
    if figure is not None:
        if figure not in FIGURES:
            raise ConfigError(f"unknown figure preset {figure!r}; choose from {sorted(FIGURES)}")
        preset = dict(FIGURES[figure])
        for key in ("tf", "snr_db"):
            if key in cfg:
                preset[key] = tuple(cfg[key])
        if "delta_h" in cfg:
            preset["spreads"] = tuple(cfg["delta_h"])
        if "eps" in cfg:
            preset["eps"] = tuple(cfg["eps"])
        return preset
    kind = cfg.get("kind", "ratio")
    settings = {"kind": kind, "tf": tuple(cfg.get("tf", [1.02])),
                "spreads": tuple(cfg.get("delta_h", [1e-4])), "eps": tuple(cfg.get("eps", [1e-6]))}
    if kind == "ratio":
        if "snr_db" not in cfg:
            raise ConfigError("ratio sweep needs snr_db")
        settings["snr_db"] = tuple(cfg["snr_db"])
    elif kind not in ("sir", "range"):
        raise ConfigError(f"unknown sweep kind {kind!r}")
    return settings


def cmd_sweep(cfg, figure=None, out=None, fmt="csv"):
    settings = _sweep_settings(cfg, figure)
    kind = settings["kind"]
    threshold = cfg.get("threshold", 0.75)
    try:
        if kind == "ratio":
            spec = SweepSpec(settings["snr_db"], settings["tf"], settings["spreads"], settings["eps"], threshold)
            rows, columns = sweep_ratio(spec), RATIO_COLUMNS
        elif kind == "sir":
            rows = [r for dh in settings["spreads"] for r in sir_tradeoff(settings["tf"], dh)]
            columns = SIR_COLUMNS
        else:
            SweepSpec((0.0,), settings["tf"], settings["spreads"], settings["eps"], threshold)
            tf = settings["tf"][0]
            rows, columns = range_map(settings["spreads"], settings["eps"], tf, threshold), RANGE_COLUMNS
    except ValueError as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise ConfigError(str(exc)) from None
    failed = sum(1 for r in rows if r.get("error"))
    meta = _metadata(cfg, {"figure": figure, "kind": kind, "columns": list(columns),
                           "n_rows": len(rows), "failed_rows": failed})
    if fmt == "json":
        _write(_dump_json({"rows": [{c: r[c] for c in columns} | ({"error": r["error"]} if r.get("error") else {})
                                    for r in rows], **meta}), out)
    else:
        _write(_csv_text(rows, columns), out)
        _write_sidecar(out, meta)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_selftest(cfg=None, force_failure=False, stream=None):
    from .selftest import run_checks

    stream = stream or sys.stdout
    force_failure = force_failure or bool((cfg or {}).get("force_failure", False))
    results = run_checks(force_failure=force_failure)
    for name, ok, detail in results:
        stream.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_SELFTEST


def build_parser():
    parser = argparse.ArgumentParser(prog="fadecap", description="Capacity bounds for underspread fading channels")
    parser.add_argument("command", choices=("bound", "sweep", "selftest"))
    parser.add_argument("--config", help="key=value or JSON config file")
    parser.add_argument("--figure", help="sweep preset: " + ", ".join(sorted(FIGURES)))
    parser.add_argument("--out", help="output path (stdout if omitted)")
    parser.add_argument("--format", choices=("csv", "json"), dest="fmt")
    parser.add_argument("--force-fail", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = {}
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    cfg = parse_config(fh.read())
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
        elif args.command == "bound" or (args.command == "sweep" and not args.figure):
            raise ConfigError("--config is required")
        if args.command == "selftest":
            return cmd_selftest(cfg, args.force_fail)
        if args.command == "bound":
            return cmd_bound(cfg, args.out, args.fmt or "json")
        return cmd_sweep(cfg, args.figure, args.out, args.fmt or "csv")
    except (ConfigError, PreconditionError) as exc:
        sys.stderr.write(f"fadecap: error: {exc}\n")
        return EXIT_CONFIG
    except ConvergenceError as exc:
        sys.stderr.write(f"fadecap: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        sys.stderr.write(f"fadecap: error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
