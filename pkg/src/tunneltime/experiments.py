"""Experiment drivers and the ``tunneltime`` command line.

Each driver takes an :class:`ExperimentConfig`, writes CSV tables (with a
full parameter header) and a gnuplot script into the output directory, and
returns the rows it wrote.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np
from scipy import optimize

from . import distributions as dist
from . import grid_oracle as go
from . import rabi
from . import spectral as spc
from .scattering import PhysicalParams
from .wavepacket import GaussianSpectrum, QuadratureError, QuadratureSpec, TimeSeries, WavePacket, write_csv

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3
PIPELINES = ("spectral", "time", "grid")
DEFAULT_SWEEP = (0.5, 1, 2, 4, 6, 8, 10, 12, 14, 17, 20, 25, 30, 35, 40)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    m: float = 0.5
    hbar: float = 1.0
    V0: float = 2.0
    k0: float = 1.0
    sigma_k: float = 0.05
    x0: float = -50.0
    L_values: tuple = DEFAULT_SWEEP
    t_min: float = 0.0
    t_max: float = 120.0
    n_t: int = 1200
    quad_order: int = 16
    quad_rtol: float = 1e-9
    out: str = "out"
    pipelines: tuple = ("spectral", "time")
    workers: int = 0
    profile_L: float = 5.0
    zero_dt: float = 1e-3
    rabi_omega0: float = 1.0
    rabi_n: int = 8192
    grid_x_min: float = -400.0
    grid_x_max: float = 200.0
    grid_n_x: int = 2**16
    grid_dt: float = 0.01
    validate_L: float = 5.0
    tol_grid_l2: float = 1e-3
    tol_peak_time: float = 0.5
    tol_tf: float = 0.01
    tol_qs: float = 0.02
    tol_rabi: float = 1e-3
    tol_rabi_density: float = 1e-6

    def __post_init__(self):
        bad = [p for p in self.pipelines if p not in PIPELINES]
        if bad:
            raise ConfigError(f"unknown pipeline(s) {bad}; choose from {PIPELINES}")
        if not self.t_min < self.t_max:
            raise ConfigError("t_min must be below t_max")
        if self.n_t < 16:
            raise ConfigError("n_t must be at least 16")
        if any(L < 0 for L in self.L_values):
            raise ConfigError("barrier widths must be non-negative")

    # derived objects
    def physical(self, L: float = 0.0) -> PhysicalParams:
        return PhysicalParams(self.m, self.hbar, self.V0, float(L))

    def spectrum(self) -> GaussianSpectrum:
        return GaussianSpectrum(self.k0, self.sigma_k, self.x0)

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(order=self.quad_order, rtol=self.quad_rtol)

    def grid(self) -> go.GridSpec:
        return go.GridSpec(self.grid_x_min, self.grid_x_max, self.grid_n_x, self.grid_dt)

    @property
    def window(self) -> tuple[float, float]:
        return (self.t_min, self.t_max)

    def header(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            d[f.name] = ";".join(map(str, v)) if isinstance(v, tuple) else v
        return d


def _parse_sweep(raw: str) -> tuple:
    raw = raw.strip()
    if ":" in raw:
        parts = [float(s) for s in raw.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigError("range sweeps are start:stop:step with step > 0")
        a, b, h = parts
        n = int(math.floor((b - a) / h + 1e-9)) + 1
        return tuple(round(a + i * h, 12) for i in range(n))
    return tuple(float(s) for s in raw.replace(";", ",").split(",") if s.strip())


def _coerce(name: str, raw: str):
    kinds = {f.name: f for f in fields(ExperimentConfig)}
    if name not in kinds:
        raise ConfigError(f"unknown config key {name!r}")
    default = kinds[name].default
    try:
        if name == "L_values":
            return _parse_sweep(raw)
        if name == "pipelines":
            return tuple(s.strip() for s in raw.split(",") if s.strip())
        if isinstance(default, bool):
            return raw.strip().lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def parse_assignments(lines, source="config") -> dict:
    out = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key = key.strip()
        out[key] = _coerce(key, val.strip())
    return out


def load_config(path=None, overrides=(), **extra) -> ExperimentConfig:
    values = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file {path} not found")
        values.update(parse_assignments(p.read_text(encoding="utf-8").splitlines(), str(path)))
    values.update(parse_assignments(overrides, "--set"))
    values.update(extra)
    return ExperimentConfig(**values)


# -- pipelines for one L -----------------------------------------------------------


def time_domain_means(cfg: ExperimentConfig, L: float) -> dict:
    """TF from the exit current and QS from the regional occupation, on the configured window.

    The exit current is divided by the transmitted probability before
    normalizing: the TF density is unchanged, but opaque barriers (P_T far
    below the stationary threshold) stay resolvable.  For the same reason the
    exit-field quadrature takes its absolute tolerance relative to the
    transmitted amplitude ``sqrt(P_T)``.
    """
    spec, p, q = cfg.spectrum(), cfg.physical(L), cfg.quadrature()
    wp = WavePacket(spec, p, q)
    out = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", spc.RegimeWarning)
        p_t = spc.tf_normalization(spec, p)
    exit_wp = WavePacket(spec, p, replace(q, atol=q.atol * min(1.0, math.sqrt(p_t))))
    j = exit_wp.sample("current_at_exit", cfg.window, cfg.n_t)
    j = TimeSeries(j.t, j.values / p_t, {**j.meta, "conditioned": "transmitted", "P_T": p_t})
    tf = dist.tf_from_current(j)
    out["tf_mean"], out["tf_spread"] = dist.moments(tf)
    out["tf_tail"] = max(1.0 - tf.Z, 0.0)
    if L > 0:
        s = wp.sample("regional", cfg.window, cfg.n_t)
        qs = dist.qs_from_signal(s)
        out["qs_mean"], out["qs_spread"] = dist.moments(qs)
        out["qs_tail"] = max(1.0 - qs.Z / _dwell_normalization(spec, p), 0.0)
    else:
        out["qs_mean"] = out["qs_spread"] = out["qs_tail"] = math.nan
    return out


def _dwell_normalization(spec, p) -> float:
    """``int |phi|^2 tau_D dk``, the time integral of the regional occupation."""
    return float(spc._integrate(lambda k: [spc.spectral_weight("QS_regional", spec, p, k)], spec, p, None)[0])


def spectral_means(cfg: ExperimentConfig, L: float) -> dict:
    spec, p = cfg.spectrum(), cfg.physical(L)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", spc.RegimeWarning)
        out = {
            "tf_mean_spectral": spc.tf_mean_spectral(spec, p),
            "qs_mean_spectral": spc.qs_regional_mean_spectral(spec, p) if L > 0 else math.nan,
            "qs_mean_exact": spc.qs_regional_mean_exact(spec, p) if L > 0 else math.nan,
            "above_barrier_fraction": spc.above_barrier_fraction(spec, p),
        }
    try:
        out["regime"] = spc.classify(spec, p).value
    except spc.NoTunnelingError:
        out["regime"] = "no_tunneling"
    return out


def grid_means(cfg: ExperimentConfig, L: float) -> dict:
    spec, p, g = cfg.spectrum(), cfg.physical(L), cfg.grid()
    every = max(1, round((cfg.t_max - cfg.t_min) / (cfg.n_t - 1) / g.dt))
    s = go.sample(spec, p, g, "regional", cfg.t_max, every=every)
    keep = s.t >= cfg.t_min - 1e-9
    qs = dist.qs_from_signal(type(s)(s.t[keep], s.values[keep], s.meta))
    return {"qs_mean_grid": qs.mean(), "L_snap": s.meta["L_snap"]}


FIG2_COLUMNS = (
    "L", "tf_mean", "qs_mean", "tf_mean_spectral", "qs_mean_spectral", "qs_mean_exact", "qs_mean_grid",
    "tf_spread", "qs_spread", "tf_tail", "qs_tail", "above_barrier_fraction", "regime", "errors",
)


def fig2_row(cfg: ExperimentConfig, L: float) -> dict:
    row = {"L": float(L)}
    errors = []
    steps = {"spectral": spectral_means, "time": time_domain_means, "grid": grid_means}
    for name in PIPELINES:
        if name not in cfg.pipelines:
            continue
        try:
            row.update(steps[name](cfg, L))
        except (QuadratureError, ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
            errors.append(f"{name}: {type(exc).__name__}: {exc}".replace(",", ";"))
    row["errors"] = " | ".join(errors)
    return row


def _pool_map(cfg: ExperimentConfig, fn, items):
    """Map in input order; a worker pool only changes the wall time."""
    workers = cfg.workers or min(len(items), os.cpu_count() or 1)
    if workers <= 1 or len(items) <= 1:
        return [fn(cfg, it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, [cfg] * len(items), items))


# -- tables and plot scripts --------------------------------------------------------


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if math.isnan(v) else f"{v:.17g}"
    return str(v)


def write_table(path, cfg: ExperimentConfig, columns, rows):
    header = "# " + ", ".join(f"{k}={v}" for k, v in cfg.header().items())
    lines = [header, ",".join(columns)]
    lines += [",".join(_cell(r.get(c)) for c in columns) for r in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_table(path):
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    cols = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        row = {}
        for c, v in zip(cols, cells):
            try:
                row[c] = float(v) if v != "" else math.nan
            except ValueError:
                row[c] = v
        rows.append(row)
    return rows


def _gnuplot(path, csv_name, title, xlabel, ylabel, series):
    plots = ", \\\n     ".join(f"'{csv_name}' using {x}:{y} with {style} title '{t}'" for x, y, style, t in series)
    Path(path).write_text(
        "set datafile separator ','\n"
        "set datafile commentschars '#'\n"
        "set key autotitle columnhead\n"
        f"set title '{title}'\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'\n"
        "set terminal pngcairo size 900,600\n"
        f"set output '{Path(csv_name).stem}.png'\n"
        f"plot {plots}\n",
        encoding="utf-8",
    )


def _out(cfg) -> Path:
    d = Path(cfg.out)
    d.mkdir(parents=True, exist_ok=True)
    return d


def run_fig2(cfg: ExperimentConfig) -> list[dict]:
    rows = sorted(_pool_map(cfg, fig2_row, sorted(cfg.L_values)), key=lambda r: r["L"])
    d = _out(cfg)
    write_table(d / "fig2.csv", cfg, FIG2_COLUMNS, rows)
    _gnuplot(d / "fig2.gp", "fig2.csv", "Mean TF and QS times", "L", "time",
             [(1, 2, "linespoints lw 2", "TF"), (1, 3, "linespoints dt 4", "QS"),
              (1, 4, "lines dt 2", "TF spectral"), (1, 5, "lines dt 3", "QS spectral")])
    return rows


# -- entrance-current zero crossing ---------------------------------------------------


@dataclass(frozen=True)
class ZeroCrossing:
    L: float
    peak_time: float
    t_zero: float | None

    def __post_init__(self):
        if self.t_zero is not None and not self.t_zero > self.peak_time > 0:
            raise ValueError("need t_zero > peak_time > 0")

    @property
    def censored(self) -> bool:
        return self.t_zero is None


def find_zero_crossing(wp: WavePacket, window, n: int, dt_tol: float = 1e-3) -> ZeroCrossing:
    """Global positive peak of ``j(0, t)`` (scan + golden) and the first sign change after it (bisection)."""
    s = wp.sample("current_at_entrance", window, n)
    t, j = s.t, s.values

    def j_at(tt):
        return float(wp.current([0.0], [tt])[0, 0])

    i = int(np.argmax(j))
    if j[i] <= 0:
        raise ValueError("entrance current never positive on the window")
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, t.size - 1)]
    if 0 < i < t.size - 1:
        res = optimize.minimize_scalar(lambda x: -j_at(x), bracket=(lo, t[i], hi), method="golden", tol=1e-8)
        peak = float(res.x) if lo <= res.x <= hi else float(t[i])
    else:
        peak = float(t[i])
    neg = np.nonzero(j[i:] < 0)[0]
    if neg.size == 0:
        return ZeroCrossing(wp.p.L, peak, None)
    k = i + int(neg[0])
    a, b = max(t[k - 1], peak), t[k]
    tz = optimize.bisect(j_at, a, b, xtol=dt_tol / 2) if j_at(a) > 0 else float(a)
    return ZeroCrossing(wp.p.L, peak, float(tz))


def _zero_crossing_row(cfg, L):
    wp = WavePacket(cfg.spectrum(), cfg.physical(L), cfg.quadrature())
    try:
        zc = find_zero_crossing(wp, cfg.window, cfg.n_t, cfg.zero_dt)
        return {"L": float(L), "peak_time": zc.peak_time, "t_zero": zc.t_zero,
                "censored": int(zc.censored), "errors": ""}
    except (QuadratureError, ValueError, ArithmeticError) as exc:
        return {"L": float(L), "peak_time": None, "t_zero": None, "censored": 1,
                "errors": f"{type(exc).__name__}: {exc}".replace(",", ";")}


ZERO_COLUMNS = ("L", "peak_time", "t_zero", "censored", "errors")


def run_zero_crossing(cfg: ExperimentConfig) -> list[dict]:
    rows = _pool_map(cfg, _zero_crossing_row, sorted(cfg.L_values))
    d = _out(cfg)
    write_table(d / "zero_crossing.csv", cfg, ZERO_COLUMNS, rows)
    _gnuplot(d / "zero_crossing.gp", "zero_crossing.csv", "First zero of j(0,t)", "L", "time",
             [(1, 3, "linespoints", "t_zero"), (1, 2, "points", "peak")])
    return rows


def run_current_profile(cfg: ExperimentConfig, L: float | None = None) -> dict:
    """Dense ``j(0,t)`` trace, its zero crossing, and the continuity check against ``p_(0,inf)``."""
    L = cfg.profile_L if L is None else float(L)
    wp = WavePacket(cfg.spectrum(), cfg.physical(L), cfg.quadrature())
    n = 4 * cfg.n_t
    s = wp.sample("current_at_entrance", cfg.window, n)
    zc = find_zero_crossing(wp, cfg.window, cfg.n_t, cfg.zero_dt)
    flux = float(np.trapezoid(s.values, s.t))
    right = wp.cumulative(0.0, [cfg.t_max, cfg.t_min])
    gained = float(right[0] - right[1])
    d = _out(cfg)
    meta = dict(s.meta)
    meta.update(t_zero="" if zc.censored else zc.t_zero, peak_time=zc.peak_time)
    write_csv(d / f"current_profile_L{L:g}.csv", meta, s.t, s.values, "j0")
    marker = "" if zc.censored else f"set arrow from {zc.t_zero},graph 0 to {zc.t_zero},graph 1 nohead dt 2\n"
    gp = d / f"current_profile_L{L:g}.gp"
    _gnuplot(gp, f"current_profile_L{L:g}.csv", f"j(0,t) at L={L:g}", "t", "j(0,t)", [(1, 2, "lines", "j0")])
    if marker:
        text = gp.read_text(encoding="utf-8").replace("plot ", marker + "plot ", 1)
        gp.write_text(text, encoding="utf-8")
    return {"L": L, "peak_time": zc.peak_time, "t_zero": zc.t_zero, "flux": flux, "gained": gained,
            "continuity_error": abs(flux - gained)}


# -- Rabi ---------------------------------------------------------------------------


def run_rabi(cfg: ExperimentConfig) -> dict:
    rp = rabi.RabiParams(cfg.rabi_omega0)
    n = cfg.rabi_n
    half = rabi.population_signal(rp, (0.0, rp.period / 2), n)
    toa, _ = dist.split_toa_tod(half)
    full = rabi.population_signal(rp, (0.0, rp.period), n)
    qs = dist.qs_from_signal(full)
    a_toa, a_qs = rabi.analytic_toa(rp, n), rabi.analytic_qs(rp, n)
    out = {
        "T_R": rp.period,
        "toa_mean": toa.mean(),
        "toa_expected": rp.period / 4,
        "qs_mean": qs.mean(),
        "qs_expected": rp.period / 2,
        "toa_density_error": float(np.max(np.abs(toa.density - a_toa.density))),
        "qs_density_error": float(np.max(np.abs(qs.density - a_qs.density))),
    }
    out["toa_rel_error"] = abs(out["toa_mean"] / out["toa_expected"] - 1)
    out["qs_rel_error"] = abs(out["qs_mean"] / out["qs_expected"] - 1)
    d = _out(cfg)
    write_table(d / "rabi.csv", cfg, tuple(out), [out])
    toa.to_csv(d / "rabi_toa.csv")
    qs.to_csv(d / "rabi_qs.csv")
    return out


# -- validation ---------------------------------------------------------------------


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(np.isfinite(self.measured) and self.measured < self.tolerance)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.measured:.3e} (tol {self.tolerance:.1e})"


def _peak_time(t, v):
    i = int(np.argmax(v))
    if 0 < i < t.size - 1:
        # vertex of the parabola through the three samples around the maximum
        y0, y1, y2 = v[i - 1], v[i], v[i + 1]
        den = y0 - 2 * y1 + y2
        if den != 0:
            return float(t[i] + 0.5 * (t[1] - t[0]) * (y0 - y2) / den)
    return float(t[i])


def grid_checks(cfg: ExperimentConfig) -> list[Check]:
    spec, g = cfg.spectrum(), cfg.grid()
    p = cfg.physical(cfg.validate_L)
    L_snap, _ = g.snap(p.L)
    wp = WavePacket(spec, p.with_L(L_snap), cfg.quadrature())
    x = g.x
    m = (x >= -100) & (x <= 50)
    checks = []
    prop = go.Propagator(g, p)
    state = go.init_gaussian(spec, g, p)
    for t in (10.0, 25.0, 40.0):
        state = prop.run(state, t)
        ref = wp.psi(x[m], [t])[0]
        checks.append(Check(f"grid vs quadrature psi, L2 at t={t:g}", go.relative_l2(state.psi[m], ref),
                            cfg.tol_grid_l2))
    t_end = 45.0  # past the occupation peak, before the default domain edges light up
    every = 10
    gs = go.sample(spec, p, g, "regional", t_end, every=every)
    qs = wp.sample("regional", (0.0, t_end), gs.t.size)
    checks.append(Check("regional occupation peak time, grid vs quadrature",
                        abs(_peak_time(gs.t, gs.values) - _peak_time(qs.t, qs.values)), cfg.tol_peak_time))
    return checks


def spectral_checks(cfg: ExperimentConfig) -> list[Check]:
    checks = []
    for L in (0.5, 2.0, 5.0, 8.0, 12.0):
        row = {**time_domain_means(cfg, L), **spectral_means(cfg, L)}
        checks.append(Check(f"TF mean, spectral vs time, L={L:g}",
                            abs(row["tf_mean_spectral"] / row["tf_mean"] - 1), cfg.tol_tf))
        if L in (2.0, 5.0):
            checks.append(Check(f"QS mean, spectral vs time, L={L:g}",
                                abs(row["qs_mean_spectral"] / row["qs_mean"] - 1), cfg.tol_qs))
    row = {**time_domain_means(cfg, 10.0), **spectral_means(cfg, 10.0)}
    checks.append(Check("QS mean, spectral vs time, L=10", abs(row["qs_mean_spectral"] / row["qs_mean"] - 1),
                        cfg.tol_qs))
    return checks


def window_sensitivity(cfg: ExperimentConfig, L: float = 10.0) -> dict:
    base = time_domain_means(cfg, L)
    out = {}
    for t_max in (0.8 * cfg.t_max, 1.2 * cfg.t_max):
        n = round(cfg.n_t * (t_max - cfg.t_min) / (cfg.t_max - cfg.t_min))
        alt = time_domain_means(replace(cfg, t_max=t_max, n_t=n), L)
        out[t_max] = (alt["tf_mean"] - base["tf_mean"], alt["qs_mean"] - base["qs_mean"])
    return out


def run_validate(cfg: ExperimentConfig, stream=None) -> list[Check]:
    stream = stream or sys.stdout
    rb = run_rabi(cfg)
    checks = [
        Check("Rabi TOA mean vs T_R/4", rb["toa_rel_error"], cfg.tol_rabi),
        Check("Rabi QS mean vs T_R/2", rb["qs_rel_error"], cfg.tol_rabi),
        Check("Rabi TOA density, max pointwise error", rb["toa_density_error"], cfg.tol_rabi_density),
        Check("Rabi QS density, max pointwise error", rb["qs_density_error"], cfg.tol_rabi_density),
    ]
    if "spectral" in cfg.pipelines or "time" in cfg.pipelines:
        checks += spectral_checks(cfg)
    if "grid" in cfg.pipelines:
        checks += grid_checks(cfg)
    for c in checks:
        print(c.line(), file=stream)
    if "time" in cfg.pipelines:
        for t_max, (dtf, dqs) in window_sensitivity(cfg).items():
            print(f"INFO  window [t_min, {t_max:g}] at L=10: dTF={dtf:+.3e}, dQS={dqs:+.3e}", file=stream)
    return checks


# -- CLI ------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tunneltime", description="Tunneling-time distributions for a rectangular barrier.")
    ap.add_argument("--config", help="key = value config file")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    ap.add_argument("--pipelines", help="comma list from spectral,time,grid")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("fig2", help="TF and QS means versus barrier width")
    sub.add_parser("zero-crossing", help="first sign change of the entrance current versus L")
    cp = sub.add_parser("current-profile", help="dense entrance-current trace for one L")
    cp.add_argument("--L", type=float, default=None)
    sub.add_parser("rabi", help="two-level check against closed forms")
    sub.add_parser("validate", help="cross-pipeline oracle checks")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    extra = {}
    if args.out:
        extra["out"] = args.out
    try:
        overrides = list(args.set)
        if args.pipelines:
            overrides.append(f"pipelines = {args.pipelines}")
        cfg = load_config(args.config, overrides, **extra)
    except ConfigError as exc:
        print(f"tunneltime: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "fig2":
            rows = run_fig2(cfg)
            for r in rows:
                print(f"L={r['L']:g}  TF={_cell(r.get('tf_mean'))}  QS={_cell(r.get('qs_mean'))}  "
                      f"above={_cell(r.get('above_barrier_fraction'))}  {r.get('errors', '')}")
        elif args.command == "zero-crossing":
            for r in run_zero_crossing(cfg):
                print(f"L={r['L']:g}  peak={_cell(r['peak_time'])}  t_zero={_cell(r['t_zero'])}")
        elif args.command == "current-profile":
            r = run_current_profile(cfg, args.L)
            print(", ".join(f"{k}={_cell(v)}" for k, v in r.items()))
        elif args.command == "rabi":
            r = run_rabi(cfg)
            print(", ".join(f"{k}={v:.10g}" for k, v in r.items()))
        else:
            checks = run_validate(cfg)
            return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION
    except (QuadratureError, ArithmeticError, np.linalg.LinAlgError, go.BoundaryLeakError) as exc:
        print(f"tunneltime: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
