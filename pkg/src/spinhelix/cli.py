"""
Command-line experiment runner.

    spinhelix <experiment> [--config FILE] [--n 5 --delta 0.3 ...]

Every run writes a table (CSV with a ``#`` config header, or JSON) plus a
``.meta.json`` sidecar with versions, tolerances and wall time. Exit codes:
0 success, 1 configuration error, 2 solver failure at one or more points.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import logging
import math
import operator
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from importlib import metadata
from pathlib import Path

import numpy as np
import scipy

from .config import TOL
from .gft import gft
from .model import ChainSpec, critical_anisotropy
from .ness import NessSolverError, build_liouvillian, observables, solve_ness
from .singularities import (
    classify_numerically,
    h00_gap_profile,
    omega_k,
    omega_lambda,
    omega_star,
    omega_star_cardinalities,
    quadratic_coefficient,
)
from .zeno import c_ratio, characteristic_dissipation, purity_prediction

log = logging.getLogger("spinhelix")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2

NESS_EXPERIMENTS = {"sweep_delta", "sweep_phi", "gft_sweep", "purity_vs_gamma", "ness_single"}
ZENO_EXPERIMENTS = {"gamma_ch_sweep", "k_gap_sweep", "h00_gap_sweep", "theta_dependence"}
COUNT_EXPERIMENTS = {"omega_enumerate", "omega_count"}
EXPERIMENTS = NESS_EXPERIMENTS | ZENO_EXPERIMENTS | COUNT_EXPERIMENTS

NESS_MAX_N = 6
ZENO_MAX_N = 12
COUNT_MAX_N = 2000

# swept parameter and default range per experiment
SWEEPS = {
    "sweep_delta": ("delta", "-1", "1", False),
    "gft_sweep": ("delta", "-1", "1", False),
    "sweep_phi": ("phi_total", "0", "2*pi", True),
    "gamma_ch_sweep": ("varphi", "0", "pi", True),
    "k_gap_sweep": ("varphi", "0", "pi", True),
    "h00_gap_sweep": ("varphi", "0", "pi", True),
    "theta_dependence": ("theta", "0", "pi", True),
    "purity_vs_gamma": ("gamma", "10", "1e4", False),
}


class ConfigError(ValueError):
    pass


# --- angle parsing ------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    raise ConfigError("unsupported expression")


def parse_number(text) -> float:
    """Decimal or arithmetic in ``pi``: "0.3", "pi/2", "pi*1/10", "3*pi/4", "3pi/4", "1e3"."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().lower().replace("π", "pi")
    # allow implicit multiplication such as "3pi/4"
    s = "".join(c + "*" if c.isdigit() and s[i + 1 : i + 3] == "pi" else c for i, c in enumerate(s))
    try:
        value = _eval_node(ast.parse(s, mode="eval"))
    except (SyntaxError, ConfigError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc
    if not math.isfinite(value):
        raise ConfigError(f"non-finite value {text!r}")
    return value


# --- configuration ------------------------------------------------------


@dataclass
class ExperimentConfig:
    experiment: str
    n: int = 5
    delta: float | None = None  # None: tuned to cos(varphi(m))
    gamma: float = 1000.0
    theta: float = math.pi / 2
    phi_total: float = math.pi / 10
    j: float = 1.0
    m: int = 0
    start: float | None = None
    stop: float | None = None
    points: int = 50
    out: str | None = None
    format: str = "csv"
    threads: int = 1
    force: bool = False
    extended: str = "auto"  # auto | on | off

    @property
    def sweep_parameter(self):
        return SWEEPS.get(self.experiment, (None,))[0]

    def grid(self) -> np.ndarray:
        name, lo, hi, open_ = SWEEPS[self.experiment]
        a = parse_number(lo) if self.start is None else self.start
        b = parse_number(hi) if self.stop is None else self.stop
        if name == "gamma":
            return np.geomspace(a, b, self.points)
        if open_:
            # midpoints keep the sweep off the excluded endpoints
            return a + (b - a) * (np.arange(self.points) + 0.5) / self.points
        return np.linspace(a, b, self.points)

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {sorted(EXPERIMENTS)}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.extended not in ("auto", "on", "off"):
            raise ConfigError("extended must be auto, on or off")
        if self.points < 2 and self.experiment in SWEEPS:
            raise ConfigError("a sweep needs points >= 2")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not self.gamma > 0:
            raise ConfigError("gamma must be positive")
        if not 0 <= self.phi_total < 2 * math.pi:
            raise ConfigError("phi_total must lie in [0, 2pi)")
        low = 3 if self.experiment in ZENO_EXPERIMENTS | COUNT_EXPERIMENTS else 2
        if self.n < low:
            raise ConfigError(f"{self.experiment} needs n >= {low}")
        if not 0 <= self.m <= self.n - 2:
            raise ConfigError(f"winding number m must lie in 0..{self.n - 2}")
        cap = (
            NESS_MAX_N
            if self.experiment in NESS_EXPERIMENTS
            else ZENO_MAX_N
            if self.experiment in ZENO_EXPERIMENTS
            else COUNT_MAX_N
        )
        if self.n > cap and not self.force:
            raise ConfigError(f"n = {self.n} exceeds the desk-scale cap {cap} for {self.experiment}; pass --force")
        if self.experiment in SWEEPS:
            g = self.grid()
            if not np.all(np.isfinite(g)):
                raise ConfigError("sweep bounds must be finite")
            if self.sweep_parameter == "gamma" and g.min() <= 0:
                raise ConfigError("gamma sweep bounds must be positive")
            if self.sweep_parameter == "phi_total" and (g.min() < 0 or g.max() >= 2 * math.pi):
                raise ConfigError("phi_total sweep must stay inside [0, 2pi)")
        return self

    @property
    def varphi(self) -> float:
        return (self.phi_total + 2 * math.pi * self.m) / (self.n - 1)

    def tuned_delta(self) -> float:
        if self.delta is not None:
            return self.delta
        return critical_anisotropy(self.m, self.phi_total, self.n)

    def header(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name in ("out", "threads"):
                continue  # neither changes the data
            out[f.name] = getattr(self, f.name)
        return out


_INT_KEYS = {"n", "m", "points", "threads"}
_STR_KEYS = {"experiment", "out", "format", "extended"}
_BOOL_KEYS = {"force"}
_KEY_ALIASES = {"N": "n", "Delta": "delta", "Gamma": "gamma", "Phi": "phi_total", "phi-total": "phi_total", "J": "j"}


def _coerce(key, value):
    if key in _STR_KEYS:
        return str(value)
    if key in _BOOL_KEYS:
        if isinstance(value, bool):
            return value
        v = str(value).strip().lower()
        if v not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"{key} expects a boolean, got {value!r}")
        return v in ("true", "1", "yes")
    if key in _INT_KEYS:
        x = parse_number(value)
        if x != int(x):
            raise ConfigError(f"{key} expects an integer, got {value!r}")
        return int(x)
    return parse_number(value)


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    known = {f.name for f in fields(ExperimentConfig)}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _KEY_ALIASES.get(key, key.lower().replace("-", "_"))
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def build_config(experiment, file_values=None, overrides=None) -> ExperimentConfig:
    values = dict(file_values or {})
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = _coerce(k, v)
    if values.pop("experiment", experiment) != experiment:
        raise ConfigError("experiment in config file disagrees with the command line")
    try:
        cfg = ExperimentConfig(experiment=experiment, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


# --- per-point workers --------------------------------------------------


def _chain(cfg: ExperimentConfig, **changes) -> ChainSpec:
    c = replace(cfg, **changes)
    return ChainSpec(
        N=c.n, Delta=c.tuned_delta(), Gamma=c.gamma, theta_L=c.theta, phi_L=0.0, theta_R=c.theta, phi_R=c.phi_total, J=c.j
    )


def _use_extended(cfg, Gamma) -> bool:
    return cfg.extended == "on" or (cfg.extended == "auto" and Gamma >= 1e3)


def _ness_row(cfg: ExperimentConfig, spec: ChainSpec) -> dict:
    res = solve_ness(build_liouvillian(spec), extended=_use_extended(cfg, spec.Gamma))
    obs = observables(res.rho, spec)
    spec_ = gft(obs.transverse_profile, spec.Phi)
    row = {
        "vne_entropy": obs.vne_entropy,
        "purity_defect": obs.purity_defect,
        "spin_current_mean": float(np.mean(obs.spin_current)),
        "spin_current_spread": float(np.ptp(obs.spin_current)),
        "energy_current_mean": float(np.mean(obs.energy_current)) if obs.energy_current.size else math.nan,
        "gft_peak": spec_.peak(),
    }
    for m, c in enumerate(spec_.coefficients):
        row[f"gft_abs_{m}"] = float(abs(c))
    row["residual"] = res.residual
    row["method"] = res.method
    return row


def _ness_columns(cfg) -> list:
    return (
        ["vne_entropy", "purity_defect", "spin_current_mean", "spin_current_spread", "energy_current_mean", "gft_peak"]
        + [f"gft_abs_{m}" for m in range(cfg.n - 1)]
        + ["residual", "method"]
    )


def _zeno_row(cfg, varphi, theta) -> dict:
    cd = characteristic_dissipation(theta, varphi, cfg.n, cfg.j)
    return {
        "gamma_ch": cd.Gamma_ch,
        "gamma_ch_sq": cd.Gamma_ch_sq,
        "divergence_reason": cd.divergence_reason,
        "k_rcond": cd.k_rcond,
    }


def evaluate_point(cfg: ExperimentConfig, x: float) -> dict:
    """One sweep point. Solver failures are recorded in the row, never raised."""
    name = cfg.experiment
    row = {cfg.sweep_parameter: float(x)}
    try:
        if name in ("sweep_delta", "gft_sweep"):
            row.update(_ness_row(cfg, _chain(cfg, delta=float(x))))
        elif name == "sweep_phi":
            row.update(_ness_row(cfg, _chain(cfg, phi_total=float(x))))
        elif name == "purity_vs_gamma":
            row.update(_ness_row(cfg, _chain(cfg, gamma=float(x))))
            cd = characteristic_dissipation(cfg.theta, cfg.varphi, cfg.n, cfg.j) if cfg.n >= 3 else None
            g = cd.Gamma_ch if cd is not None else math.nan
            row["gamma_ch"] = g
            row["predicted_purity_defect"] = purity_prediction(g, float(x)) if math.isfinite(g) else math.nan
        elif name == "gamma_ch_sweep":
            row.update(_zeno_row(cfg, x, cfg.theta))
            row["classification"] = classify_numerically(x, cfg.theta, cfg.n, cfg.j).predicted
        elif name == "k_gap_sweep":
            c = classify_numerically(x, cfg.theta, cfg.n, cfg.j)
            row.update(k_min_eig=c.k_min_eig, k_norm=c.k_norm, classification=c.predicted)
        elif name == "h00_gap_sweep":
            gap, coupling = h00_gap_profile(x, cfg.theta, cfg.n, cfg.j)
            row.update(h00_gap=gap, coupling=coupling)
        elif name == "theta_dependence":
            row.update(_zeno_row(cfg, cfg.varphi, x))
            row["c_ratio"] = c_ratio(cfg.n, cfg.varphi, x, cfg.j)
        else:  # pragma: no cover - guarded by validate()
            raise ConfigError(name)
        row["status"] = "ok"
        row["error"] = ""
    except (NessSolverError, np.linalg.LinAlgError, ArithmeticError, RuntimeError) as exc:
        row["status"] = "failed"
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _columns(cfg) -> list:
    p = cfg.sweep_parameter
    name = cfg.experiment
    if name in ("sweep_delta", "gft_sweep", "sweep_phi"):
        body = _ness_columns(cfg)
    elif name == "purity_vs_gamma":
        body = _ness_columns(cfg) + ["gamma_ch", "predicted_purity_defect"]
    elif name == "gamma_ch_sweep":
        body = ["gamma_ch", "gamma_ch_sq", "divergence_reason", "k_rcond", "classification"]
    elif name == "k_gap_sweep":
        body = ["k_min_eig", "k_norm", "classification"]
    elif name == "h00_gap_sweep":
        body = ["h00_gap", "coupling"]
    elif name == "theta_dependence":
        body = ["gamma_ch", "gamma_ch_sq", "divergence_reason", "k_rcond", "c_ratio"]
    return [p] + body + ["status", "error"]


def _count_table(cfg):
    if cfg.experiment == "omega_enumerate":
        kset = set(omega_k(cfg.n).angles)
        lset = set(omega_lambda(cfg.n).angles)
        rows = []
        for a in omega_star(cfg.n):
            kind = "omega_K" if a in kset else "omega_Lambda" if a in lset else ""
            rows.append({"d": a.d, "k": a.k, "label": str(a), "value": a.value, "subset": kind})
        return ["d", "k", "label", "value", "subset"], rows, {}
    counts = omega_star_cardinalities(cfg.n)
    rows = [{"N": N, "cardinality": int(c)} for N, c in zip(range(3, cfg.n + 1), counts)]
    extra = {"quadratic_coefficient": quadratic_coefficient(cfg.n)} if cfg.n >= 4 else {}
    return ["N", "cardinality"], rows, extra


def _ness_single(cfg):
    spec = _chain(cfg)
    row = {"delta": spec.Delta}
    try:
        res = solve_ness(build_liouvillian(spec), extended=_use_extended(cfg, spec.Gamma))
        obs = observables(res.rho, spec)
        row.update(vne_entropy=obs.vne_entropy, purity_defect=obs.purity_defect, residual=res.residual, method=res.method)
        for n, v in enumerate(obs.spin_current, 1):
            row[f"spin_current_{n}"] = float(v)
        for n, v in enumerate(obs.energy_current, 2):
            row[f"energy_current_{n}"] = float(v)
        for k, b in enumerate(obs.magnetization_profile, 1):
            row[f"sx_{k}"], row[f"sy_{k}"], row[f"sz_{k}"] = b.x, b.y, b.z
        for m, c in enumerate(gft(obs.transverse_profile, spec.Phi).coefficients):
            row[f"gft_abs_{m}"] = float(abs(c))
        row.update(status="ok", error="")
    except (NessSolverError, np.linalg.LinAlgError, ArithmeticError, RuntimeError) as exc:
        row.update(status="failed", error=f"{type(exc).__name__}: {exc}")
    N = cfg.n
    cols = (
        ["delta", "vne_entropy", "purity_defect", "residual", "method"]
        + [f"spin_current_{n}" for n in range(1, N)]
        + [f"energy_current_{n}" for n in range(2, N)]
        + [f"s{a}_{k}" for k in range(1, N + 1) for a in "xyz"]
        + [f"gft_abs_{m}" for m in range(N - 1)]
        + ["status", "error"]
    )
    return cols, [row]


def _point_task(args):
    cfg, x = args
    return evaluate_point(cfg, x)


def run_table(cfg: ExperimentConfig):
    """Return (columns, rows, extra metadata) for a validated config."""
    if cfg.experiment in COUNT_EXPERIMENTS:
        return _count_table(cfg)
    if cfg.experiment == "ness_single":
        cols, rows = _ness_single(cfg)
        return cols, rows, {}
    grid = cfg.grid()
    tasks = [(cfg, float(x)) for x in grid]
    if cfg.threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(_point_task, tasks))  # map preserves sweep order
    else:
        rows = [_point_task(t) for t in tasks]
    return _columns(cfg), rows, {}


# --- output -------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return "" if v is None else str(v)


def render_csv(cfg, columns, rows) -> str:
    buf = io.StringIO()
    for k, v in cfg.header().items():
        buf.write(f"# {k} = {_fmt(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def render_json(cfg, columns, rows) -> str:
    doc = {
        "config": {k: _jsonable(v) for k, v in cfg.header().items()},
        "columns": columns,
        "rows": [{c: _jsonable(r.get(c)) for c in columns} for r in rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def package_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def run(cfg: ExperimentConfig) -> int:
    t0 = time.perf_counter()
    columns, rows, extra = run_table(cfg)
    wall = time.perf_counter() - t0
    out = Path(cfg.out or f"{cfg.experiment}.{cfg.format}")
    text = render_csv(cfg, columns, rows) if cfg.format == "csv" else render_json(cfg, columns, rows)
    n_failed = sum(r.get("status") == "failed" for r in rows)
    meta = {
        "version": package_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "config": {k: _jsonable(v) for k, v in cfg.header().items()},
        "tolerances": asdict(TOL),
        "wall_time_s": wall,
        "rows": len(rows),
        "failed_points": n_failed,
        **{k: _jsonable(v) for k, v in extra.items()},
    }
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    Path(str(out) + ".meta.json").write_text(json.dumps(meta, indent=1) + "\n")
    log.info("wrote %d rows to %s in %.2fs", len(rows), out, wall)
    if n_failed:
        for r in rows:
            if r.get("status") == "failed":
                print(f"solver failure: {r.get('error')}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinhelix", description="Boundary-driven XXZ chain experiments.")
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--config", help="flat 'key = value' file")
    p.add_argument("--n", dest="n")
    p.add_argument("--delta")
    p.add_argument("--gamma")
    p.add_argument("--theta")
    p.add_argument("--phi-total", dest="phi_total")
    p.add_argument("--m")
    p.add_argument("--j")
    p.add_argument("--start")
    p.add_argument("--stop")
    p.add_argument("--points")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--threads")
    p.add_argument("--extended", choices=["auto", "on", "off"])
    p.add_argument("--force", action="store_true", default=None, help="lift the desk-scale size caps")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    overrides = {
        k: getattr(args, k)
        for k in ("n", "delta", "gamma", "theta", "phi_total", "m", "j", "start", "stop", "points", "out", "format", "threads", "extended", "force")
    }
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = build_config(args.experiment, file_values, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
