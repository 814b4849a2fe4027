"""Command-line experiments: JSON config plus flag overrides, JSON/CSV reports.

    python -m hardybound --command constants --p 3 --alpha 0
    python -m hardybound --config run.json --resolution 128 --out report.json

Floats are written with 17 significant digits and fields in a fixed order,
so identical inputs give byte-identical files.  Wall-clock time is only
written with ``--timing``.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import constants as K
from .errors import ConfigError, HardyError
from .geometry import Domain, PuncturedSpace, domain_from_config, uncovered_samples, unit_square
from .grid import build_grid, distance_power_field, field_from_function
from .inequalities import holder_chain_check, l1_hardy_check, semiconcavity_sweep
from .rayleigh import default_init, minimize, random_init, sharpness_sequence
from .witness import (
    default_tolerance,
    distance_power,
    nodes_away_from,
    radial_ground_state,
    radial_solution,
    step1_witness,
    verify_supersolution,
)

COMMANDS = ("estimate", "sharpness", "verify-witness", "step1", "check-inequalities", "constants")
FORMATS = ("json", "csv")
CANDIDATES = ("distance_power", "radial_ground_state", "radial_solution")

_TOP_KEYS = ("command", "domain", "params", "grid", "solver", "seed", "out", "format", "options")
_OPTION_KEYS = {
    "bbox": "list",
    "delta": "real",
    "gamma": "real",
    "mu": "real",
    "tolerance": "real",
    "candidate": "str",
    "center": "list",
    "away_radius": "real",
    "rho": "real",
    "k_min": "int",
    "k_max": "int",
    "eps_fraction": "real",
    "sample_budget": "int",
    "slack": "real",
    "s": "real",
    "bumps": "int",
}


@dataclass
class ExperimentConfig:
    command: str = "constants"
    domain: dict = field(default_factory=lambda: unit_square().to_config())
    params: dict = field(default_factory=lambda: {"n": 2, "p": 3.0, "alpha": 0.0})
    grid: dict = field(default_factory=lambda: {"resolution": 64, "band": 1.0})
    solver: dict = field(default_factory=lambda: {"step": 1.0, "max_iter": 200, "rel_tol": 1e-6, "init": "default"})
    seed: int = 0
    out: str | None = None
    format: str = "json"
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "domain": self.domain,
            "params": self.params,
            "grid": self.grid,
            "solver": self.solver,
            "seed": self.seed,
            "format": self.format,
            "options": dict(sorted(self.options.items())),
        }

    def hardy_params(self) -> K.HardyParams:
        return K.HardyParams(self.params["n"], self.params["p"], self.params["alpha"])

    def build_domain(self) -> Domain:
        return domain_from_config(self.domain)


# -- parsing and validation ------------------------------------------------------


def _fail(path: str, msg: str):
    raise ConfigError(f"{path}: {msg}")


def _real(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        _fail(path, f"expected a finite number, got {value!r}")
    return float(value)


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        _fail(path, f"expected an integer, got {value!r}")
    return int(value)


def _section(data: dict, key: str, defaults: dict) -> dict:
    raw = data.get(key, {})
    if not isinstance(raw, dict):
        _fail(f"config.{key}", "expected an object")
    unknown = sorted(set(raw) - set(defaults))
    if unknown:
        _fail(f"config.{key}.{unknown[0]}", "unknown field")
    out = dict(defaults)
    out.update(raw)
    return out


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a decoded config; every error names the offending field."""
    if not isinstance(data, dict):
        _fail("config", "expected a JSON object at top level")
    unknown = sorted(set(data) - set(_TOP_KEYS))
    if unknown:
        _fail(f"config.{unknown[0]}", "unknown field")
    base = ExperimentConfig()
    cfg = ExperimentConfig(
        command=data.get("command", base.command),
        domain=data.get("domain", base.domain),
        params=_section(data, "params", base.params),
        grid=_section(data, "grid", base.grid),
        solver=_section(data, "solver", base.solver),
        seed=data.get("seed", base.seed),
        out=data.get("out", base.out),
        format=data.get("format", base.format),
        options=data.get("options", {}),
    )
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    """Re-check every field (types, ranges, module preconditions) in place."""
    if cfg.command not in COMMANDS:
        _fail("config.command", f"unknown command {cfg.command!r}; expected one of {list(COMMANDS)}")
    if cfg.format not in FORMATS:
        _fail("config.format", f"expected one of {list(FORMATS)}, got {cfg.format!r}")
    cfg.seed = _int(cfg.seed, "config.seed")
    if cfg.seed < 0:
        _fail("config.seed", "must be >= 0")
    if cfg.out is not None and not isinstance(cfg.out, str):
        _fail("config.out", "expected a path string")

    cfg.params["n"] = _int(cfg.params["n"], "config.params.n")
    cfg.params["p"] = _real(cfg.params["p"], "config.params.p")
    cfg.params["alpha"] = _real(cfg.params["alpha"], "config.params.alpha")
    try:
        params = cfg.hardy_params()
    except HardyError as exc:
        _fail("config.params", str(exc))

    cfg.grid["resolution"] = _int(cfg.grid["resolution"], "config.grid.resolution")
    if cfg.grid["resolution"] < 8:
        _fail("config.grid.resolution", "must be >= 8")
    cfg.grid["band"] = _real(cfg.grid["band"], "config.grid.band")
    if cfg.grid["band"] < 1:
        _fail("config.grid.band", "must be >= 1")

    cfg.solver["step"] = _real(cfg.solver["step"], "config.solver.step")
    if cfg.solver["step"] <= 0:
        _fail("config.solver.step", "must be positive")
    cfg.solver["max_iter"] = _int(cfg.solver["max_iter"], "config.solver.max_iter")
    if cfg.solver["max_iter"] < 0:
        _fail("config.solver.max_iter", "must be >= 0")
    cfg.solver["rel_tol"] = _real(cfg.solver["rel_tol"], "config.solver.rel_tol")
    if cfg.solver["rel_tol"] < 0:
        _fail("config.solver.rel_tol", "must be >= 0")
    if cfg.solver["init"] not in ("default", "random"):
        _fail("config.solver.init", f"expected 'default' or 'random', got {cfg.solver['init']!r}")

    if not isinstance(cfg.domain, dict):
        _fail("config.domain", "expected an object")
    try:
        domain = cfg.build_domain()
    except HardyError as exc:
        _fail("config.domain", str(exc))
    if domain.dim != params.n:
        _fail("config.domain", f"domain dimension {domain.dim} does not match params.n = {params.n}")

    opts = cfg.options
    if not isinstance(opts, dict):
        _fail("config.options", "expected an object")
    for key, value in opts.items():
        kind = _OPTION_KEYS.get(key)
        path = f"config.options.{key}"
        if kind is None:
            _fail(path, "unknown field")
        if kind == "real":
            opts[key] = _real(value, path)
        elif kind == "int":
            opts[key] = _int(value, path)
        elif kind == "str" and not isinstance(value, str):
            _fail(path, "expected a string")
        elif kind == "list" and not isinstance(value, list):
            _fail(path, "expected a list")
    _validate_command(cfg, params, domain)


def _validate_command(cfg: ExperimentConfig, params: K.HardyParams, domain: Domain) -> None:
    opts = cfg.options
    cmd = cfg.command
    if cmd != "constants" and not params.supercritical:
        _fail("config.params", f"command {cmd} needs alpha + p > n")
    if cmd in ("estimate", "verify-witness", "check-inequalities") and not domain.bounded and "bbox" not in opts:
        _fail("config.options.bbox", f"required for the unbounded domain {domain.kind}")
    if "bbox" in opts:
        bbox = opts["bbox"]
        if len(bbox) != 2 or any(len(b) != params.n for b in bbox):
            _fail("config.options.bbox", f"expected [lo, hi] with {params.n} coordinates each")
    if cmd == "sharpness":
        if not isinstance(domain, PuncturedSpace):
            _fail("config.domain.shape", "sharpness runs on a punctured-space domain")
        if opts.get("k_max", 8) < 2:
            _fail("config.options.k_max", "must be >= 2")
        if opts.get("rho", 1.0) <= 0:
            _fail("config.options.rho", "must be positive")
    if cmd == "step1":
        if not domain.bounded:
            _fail("config.domain.shape", "step1 needs a bounded domain")
        c = K.hardy_constant(params)
        delta = opts.get("delta", 0.5 * c)
        if not 0 < delta < c:
            _fail("config.options.delta", f"must lie in (0, {c!r})")
        if not 0 < opts.get("eps_fraction", 0.5) < 1:
            _fail("config.options.eps_fraction", "must lie in (0, 1)")
    if cmd == "verify-witness":
        kind = opts.get("candidate", "distance_power")
        if kind not in CANDIDATES:
            _fail("config.options.candidate", f"expected one of {list(CANDIDATES)}")
        if kind == "distance_power" and "gamma" in opts and not 0 < opts["gamma"] < K.gamma_upper(params):
            _fail("config.options.gamma", f"must lie in (0, {K.gamma_upper(params)!r})")
        if kind != "distance_power" and "center" not in opts and not isinstance(domain, PuncturedSpace):
            _fail("config.options.center", "required unless the domain is a punctured space")
        if opts.get("tolerance", 0.0) < 0:
            _fail("config.options.tolerance", "must be >= 0")
    if cmd == "constants" and "gamma" in opts and params.supercritical:
        if not 0 < opts["gamma"] < K.gamma_upper(params):
            _fail("config.options.gamma", f"must lie in (0, {K.gamma_upper(params)!r})")


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


# -- commands ----------------------------------------------------------------------


def _grid(cfg: ExperimentConfig, domain: Domain):
    bbox = cfg.options.get("bbox") or domain.bounding_box()
    return build_grid(domain, bbox, cfg.grid["resolution"], cfg.grid["band"])


def _constants_payload(cfg, params):
    out = {}
    if params.supercritical:
        out["optimal_gamma"] = K.optimal_gamma(params)
        out["gamma_upper"] = K.gamma_upper(params)
        if "gamma" in cfg.options:
            out["supersolution_constant"] = K.supersolution_constant(params, cfg.options["gamma"])
        if "delta" in cfg.options:
            out["epsilon_bound"] = K.epsilon_bound(params, cfg.options["delta"])
    return out


def _estimate(cfg, params, domain):
    grid = _grid(cfg, domain)
    init = random_init(grid, cfg.seed) if cfg.solver["init"] == "random" else default_init(params, grid)
    rep = minimize(params, grid, init, cfg.solver["step"], cfg.solver["max_iter"], cfg.solver["rel_tol"])
    out = rep.to_dict()
    out["ratio_to_c"] = rep.best_value / K.hardy_constant(params)
    return out


def _sharpness(cfg, params, domain):
    o = cfg.options
    rows = sharpness_sequence(
        params, domain.point, o.get("rho", 1.0), o.get("k_max", 8), cfg.grid["resolution"], cfg.grid["band"], o.get("k_min", 1)
    )
    return {
        "hardy_constant": K.hardy_constant(params),
        "table": [
            {
                "k": r.k,
                "quotient": r.quotient.value,
                "numerator": r.quotient.numerator,
                "denominator": r.quotient.denominator,
                "oracle": r.oracle,
                "relative_gap": r.relative_gap,
            }
            for r in rows
        ],
    }


def _verify(cfg, params, domain):
    o = cfg.options
    grid = _grid(cfg, domain)
    kind = o.get("candidate", "distance_power")
    test_nodes = None
    if kind == "distance_power":
        gamma = o.get("gamma", K.optimal_gamma(params))
        cand = distance_power(params, gamma)
        mu = o.get("mu", K.supersolution_constant(params, gamma))
    else:
        center = o.get("center", list(getattr(domain, "point", ())))
        if kind == "radial_ground_state":
            cand, mu = radial_ground_state(params, center), o.get("mu", K.hardy_constant(params))
        else:
            cand, mu = radial_solution(params, center), o.get("mu", 0.0)
        if "away_radius" in o:
            test_nodes = nodes_away_from(grid, center, o["away_radius"])
    tol = o.get("tolerance", default_tolerance(grid))
    out = {"candidate": kind, "exponent": cand.exponent}
    out.update(verify_supersolution(cand, mu, grid, tol, test_nodes).to_dict())
    return out


def _step1(cfg, params, domain):
    o = cfg.options
    grid = _grid(cfg, domain)
    delta = o.get("delta", 0.5 * K.hardy_constant(params))
    w = step1_witness(domain, params, delta, grid, o.get("eps_fraction", 0.5), o.get("sample_budget", 1024))
    missed = uncovered_samples(domain, [b.location for b in w.centers], w.eps, w.samples)
    rep = verify_supersolution(w.supersolution, w.mu, grid, o.get("tolerance"), w.test_nodes)
    return {
        "delta": delta,
        "epsilon_bound": K.epsilon_bound(params, delta),
        "eps": w.eps,
        "mu": w.mu,
        "num_centers": len(w.centers),
        "num_samples": int(len(w.samples)),
        "uncovered": int(len(missed)),
        "residual": rep.to_dict(),
    }


def random_bumps(domain: Domain, grid, rng: np.random.Generator, count: int):
    """Smooth bumps ``exp(-1 / (1 - |x - x0|^2 / r^2))`` with ``B(x0, r)`` well inside the domain."""
    lo, hi = grid.lo, grid.lo + grid.h * np.asarray(grid.cell_dims)
    fields = []
    while len(fields) < count:
        x0 = rng.uniform(lo, hi)
        if not domain.contains(x0[None])[0]:
            continue
        room = float(domain._distance(x0[None])[0]) - 2 * grid.h
        if room < 4 * grid.h:
            continue
        r = rng.uniform(4 * grid.h, room)

        def bump(x, x0=x0, r=r):
            q = np.sum((x - x0) ** 2, axis=-1) / r**2
            return np.where(q < 1, np.exp(-1.0 / np.maximum(1.0 - q, 1e-300)), 0.0)

        fields.append(field_from_function(grid, bump))
    return fields


def _inequalities(cfg, params, domain):
    o = cfg.options
    grid = _grid(cfg, domain)
    slack = o.get("slack")
    s = o.get("s", params.alpha + params.p)
    if not s > params.n:
        s = params.n + 1.0
    rng = np.random.default_rng(cfg.seed)
    bumps = random_bumps(domain, grid, rng, o.get("bumps", 5))
    l1 = [l1_hardy_check(domain, grid, s, b, slack) for b in bumps]
    l1.append(l1_hardy_check(domain, grid, s, distance_power_field(grid, 1.0), slack))
    worst_l1 = min(l1, key=lambda r: r.ratio)
    chain = holder_chain_check(domain, grid, params, bumps[0], slack) if bumps else None
    reports = {
        "semiconcavity": semiconcavity_sweep(domain, grid, slack),
        "l1_hardy": worst_l1,
        "holder_chain": chain,
        "holder_chain_extremal": holder_chain_check(domain, grid, params, default_init(params, grid), slack),
    }
    return {
        "s": s,
        "checks": [dict(name=k, **v.to_dict()) for k, v in reports.items() if v is not None],
    }


_DISPATCH = {
    "estimate": _estimate,
    "sharpness": _sharpness,
    "verify-witness": _verify,
    "step1": _step1,
    "check-inequalities": _inequalities,
}


def run(cfg: ExperimentConfig) -> dict:
    """Run one experiment; the report is deterministic apart from ``wall_clock_seconds``."""
    validate(cfg)
    params = cfg.hardy_params()
    domain = cfg.build_domain()
    t0 = time.perf_counter()
    if cfg.command == "constants":
        payload = _constants_payload(cfg, params)
    else:
        try:
            payload = _DISPATCH[cfg.command](cfg, params, domain)
        except HardyError as exc:
            raise type(exc)(f"{cfg.command}: {exc}") from None
    dc = K.derived_constants(params)
    return {
        "version": __version__,
        "command": cfg.command,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "constants": {
            "c_alpha_p_n": dc.c_alpha_p_n,
            "c_p": dc.c_p,
            "c_p_n": dc.c_p_n,
            "k_alpha_p_n": dc.k_alpha_p_n,
        },
        "payload": payload,
        "wall_clock_seconds": time.perf_counter() - t0,
    }


# -- serialisation -----------------------------------------------------------------


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return json.dumps(None) if math.isnan(x) else ("1e999" if x > 0 else "-1e999")
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _json(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_json(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_json(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _json(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, float):
        return _fmt_float(obj)
    return json.dumps(obj)


def _csv_table(report: dict):
    payload, cmd = report["payload"], report["command"]
    if cmd == "estimate":
        return ["iteration", "value"], payload["trace"]
    if cmd == "sharpness":
        cols = ["k", "quotient", "numerator", "denominator", "oracle", "relative_gap"]
        return cols, [[r[c] for c in cols] for r in payload["table"]]
    if cmd == "check-inequalities":
        cols = ["name", "lhs", "rhs", "ratio", "passed", "slack_used"]
        return cols, [[r[c] for c in cols] for r in payload["checks"]]
    if cmd == "step1":
        flat = {k: v for k, v in payload.items() if k != "residual"}
        flat.update({f"residual_{k}": v for k, v in payload["residual"].items() if k != "worst_node"})
        return list(flat), [list(flat.values())]
    if cmd == "verify-witness":
        flat = {k: v for k, v in payload.items() if k != "worst_node"}
        return list(flat), [list(flat.values())]
    rows = [[k, v] for k, v in report["constants"].items()] + [[k, v] for k, v in payload.items()]
    return ["name", "value"], rows


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_float(v)
    return str(v)


def emit(report: dict, fmt: str = "json", timing: bool = False) -> bytes:
    """Serialise a report; byte-stable for equal reports (timing excluded by default)."""
    if fmt not in FORMATS:
        raise ConfigError(f"format: expected one of {list(FORMATS)}, got {fmt!r}")
    report = _plain(report)
    if not timing:
        report = {k: v for k, v in report.items() if k != "wall_clock_seconds"}
    if fmt == "json":
        return (_json(report, 2, 0) + "\n").encode("utf-8")
    header, rows = _csv_table(report)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue().encode("utf-8")


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hardybound", description="Weighted distance Hardy inequality experiments.")
    ap.add_argument("--config", metavar="PATH", help="JSON experiment config")
    ap.add_argument("--command", choices=COMMANDS)
    ap.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    ap.add_argument("--format", choices=FORMATS)
    ap.add_argument("--resolution", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--n", type=int)
    ap.add_argument("--p", type=float)
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--delta", type=float)
    ap.add_argument("--gamma", type=float)
    ap.add_argument("--mu", type=float)
    ap.add_argument("--timing", action="store_true", help="include wall-clock seconds in the output")
    return ap


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data = load_config(args.config) if args.config else {}
    if not isinstance(data, dict):
        raise ConfigError(f"{args.config}: expected a JSON object at top level")
    data = copy.deepcopy(data)
    for key in ("command", "out", "format", "seed"):
        if getattr(args, key) is not None:
            data[key] = getattr(args, key)
    if args.resolution is not None:
        data.setdefault("grid", {})["resolution"] = args.resolution
    for key in ("n", "p", "alpha"):
        if getattr(args, key) is not None:
            data.setdefault("params", {})[key] = getattr(args, key)
    for key in ("delta", "gamma", "mu"):
        if getattr(args, key) is not None:
            data.setdefault("options", {})[key] = getattr(args, key)
    return parse_config(data)


def main(argv=None) -> int:
    parser = build_parser()
    parser.__class__ = _Parser
    try:
        args = parser.parse_args(argv)
        cfg = config_from_args(args)
        report = run(cfg)
        data = emit(report, cfg.format, args.timing)
        if cfg.out:
            with open(cfg.out, "wb") as fh:
                fh.write(data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
    except _ArgError as exc:
        print(f"error: USAGE: {exc}", file=sys.stderr)
        return 2
    except HardyError as exc:
        msg = " ".join(str(exc).split())
        print(f"error: {exc.code}: {msg}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1
    except OSError as exc:
        print(f"error: IO: {' '.join(str(exc).split())}", file=sys.stderr)
        return 1
    return 0
