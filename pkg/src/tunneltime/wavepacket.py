"""Gaussian wave packet built from barrier scattering states by k-quadrature.

    Psi(x, t) = (2 pi)^(-1/2) int dk phi(k) psi_k(x) exp(-i E_k t / hbar)

``psi_k`` is the left-incident scattering state of the rectangular barrier,
``exp(ikx) + r exp(-ikx)`` for x < 0, the evanescent/oscillatory in-barrier
form on [0, L] and ``t exp(ikx)`` for x > L.  Spatial derivatives are taken
analytically per mode, never by differencing Psi.

The k-integral uses composite Gauss-Legendre panels.  The panel count follows
the largest phase slope in the evaluation batch, extra geometric panels
cluster around the barrier-top momentum, and every batch is checked against a
half-resolution rule; failure to meet the tolerance raises QuadratureError.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from numpy.polynomial.legendre import leggauss

from .scattering import PhysicalParams, _inside, exit_amplitude, reflection_amplitude

NARROW_BAND_RATIO = 0.2
WINDOW_SIGMAS = 12.0
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class QuadratureError(RuntimeError):
    """Tolerance not met at the maximum refinement."""


@dataclass(frozen=True)
class GaussianSpectrum:
    """Incident packet ``phi(k) = (2 pi s^2)^(-1/4) exp(-(k-k0)^2 / 4s^2) exp(-i k x0)``."""

    k0: float = 1.0
    sigma_k: float = 0.05
    x0: float = -50.0

    def __post_init__(self):
        if not self.sigma_k > 0:
            raise ValueError("sigma_k must be positive")
        if not self.k0 > 0:
            raise ValueError("k0 must be positive")

    @property
    def narrow_band(self) -> bool:
        return self.sigma_k / self.k0 < NARROW_BAND_RATIO

    @property
    def sigma_x(self) -> float:
        return 1.0 / (2.0 * self.sigma_k)

    def amplitude(self, k):
        k = np.asarray(k, dtype=float)
        env = (2.0 * np.pi * self.sigma_k**2) ** -0.25 * np.exp(-((k - self.k0) ** 2) / (4.0 * self.sigma_k**2))
        return env * np.exp(-1j * k * self.x0)

    def density(self, k):
        k = np.asarray(k, dtype=float)
        return np.exp(-((k - self.k0) ** 2) / (2.0 * self.sigma_k**2)) / (_SQRT_2PI * self.sigma_k)

    def width_at(self, t, p: PhysicalParams):
        """Free-packet position spread at time t."""
        sx = self.sigma_x
        return sx * np.sqrt(1.0 + (p.hbar * np.asarray(t) / (2.0 * p.m * sx**2)) ** 2)


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the composite Gauss-Legendre k-quadrature.

    ``k_min``/``k_max`` default to ``k0 -+ 12 sigma_k`` (floored at 1e-6).
    Accuracy target per batch is ``atol + rtol * max|integral|``.
    """

    k_min: float | None = None
    k_max: float | None = None
    order: int = 16
    rtol: float = 1e-9
    atol: float = 1e-15
    min_panels: int = 32
    max_panels: int = 4096
    top_panels: int = 32

    def window(self, spec: GaussianSpectrum) -> tuple[float, float]:
        lo = self.k_min if self.k_min is not None else max(1e-6, spec.k0 - WINDOW_SIGMAS * spec.sigma_k)
        hi = self.k_max if self.k_max is not None else spec.k0 + WINDOW_SIGMAS * spec.sigma_k
        if not (0 < lo < hi):
            raise ValueError(f"invalid k window [{lo}, {hi}]")
        return lo, hi


def panel_nodes(lo: float, hi: float, n_panels: int, order: int, k_b: float | None = None, top_panels: int = 0):
    """Nodes and weights of a composite GL rule on [lo, hi].

    With ``k_b`` inside the window, ``k_b`` becomes a panel edge and
    ``top_panels`` geometrically graded edges are added on each side of it.
    """
    edges = [np.linspace(lo, hi, n_panels + 1)]
    if k_b is not None and lo <= k_b <= hi:
        edges.append([k_b])
        if top_panels:
            d = np.geomspace(1e-6, 0.05, top_panels)
            edges.append(k_b + d)
            edges.append(k_b - d)
    e = np.unique(np.concatenate(edges))
    e = e[(e >= lo) & (e <= hi)]
    xg, wg = leggauss(order)
    half = np.diff(e) / 2.0
    mid = (e[1:] + e[:-1]) / 2.0
    return (mid[:, None] + half[:, None] * xg).ravel(), (half[:, None] * wg).ravel()


@dataclass(frozen=True)
class QuadratureReport:
    panels: int
    nodes: int
    error: float
    scale: float


def adaptive_k_integral(evaluate, lo, hi, q: QuadratureSpec, k_b=None, n_start=None):
    """Integrate ``evaluate(k, w) -> array`` (already weighted and summed over k).

    Starts from ``n_start`` panels (or ``q.min_panels``), compares with the
    half-panel rule and doubles until the difference meets the tolerance.
    """
    n = max(q.min_panels, int(n_start or 0))
    n += n % 2
    while True:
        kc, wc = panel_nodes(lo, hi, n // 2, q.order, k_b, q.top_panels)
        kf, wf = panel_nodes(lo, hi, n, q.order, k_b, q.top_panels)
        coarse = evaluate(kc, wc)
        fine = evaluate(kf, wf)
        err = float(np.max(np.abs(fine - coarse))) if np.size(fine) else 0.0
        scale = float(np.max(np.abs(fine))) if np.size(fine) else 0.0
        if err <= q.atol + q.rtol * scale:
            return fine, QuadratureReport(n, kf.size, err, scale)
        if n >= q.max_panels:
            raise QuadratureError(
                f"k-quadrature did not converge: error {err:.3e} at {n} panels (scale {scale:.3e})"
            )
        n = min(2 * n, q.max_panels)


def modes(k, x, p: PhysicalParams, derivative: bool = True):
    """Scattering states and their x-derivatives, shape ``(len(k), len(x))``.

    With ``derivative=False`` the second array is ``None``.
    """
    k = np.asarray(k, dtype=float)[:, None]
    x = np.asarray(x, dtype=float)[None, :]
    val = np.empty(np.broadcast_shapes(k.shape, x.shape), dtype=complex)
    der = np.empty_like(val) if derivative else None
    left = x[0] < 0
    right = x[0] > p.L
    mid = ~(left | right)
    if left.any():
        r = reflection_amplitude(k, p)
        fwd = np.exp(1j * k * x[:, left])
        bwd = r * fwd.conj()
        val[:, left] = fwd + bwd
        if derivative:
            der[:, left] = 1j * k * (fwd - bwd)
    if mid.any():
        v, d = _inside(k, x[:, mid], p)
        val[:, mid] = v
        if derivative:
            der[:, mid] = d
    if right.any():
        out = exit_amplitude(k, p) * np.exp(1j * k * (x[:, right] - p.L))
        val[:, right] = out
        if derivative:
            der[:, right] = 1j * k * out
    return val, der


@dataclass
class TimeSeries:
    """Uniformly sampled real signal with a descriptor of what was sampled."""

    t: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.t.ndim != 1 or self.t.shape != self.values.shape:
            raise ValueError("t and values must be 1-D arrays of equal length")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("t grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("signal values must be finite")

    def to_csv(self, path, value_name="value"):
        write_csv(path, self.meta, self.t, self.values, value_name)

    @classmethod
    def from_csv(cls, path):
        meta, t, v = read_csv(path)
        return cls(t, v, meta)


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def write_csv(path, meta: dict, t, values, value_name="value"):
    path = Path(path)
    header = "# " + ", ".join(f"{key}={_fmt(val)}" for key, val in meta.items())
    lines = [header, f"t,{value_name}"]
    lines += [f"{a:.17g},{b:.17g}" for a, b in zip(t, values)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_header(line: str) -> dict:
    meta = {}
    body = line.lstrip("#").strip()
    for item in body.split(", ") if body else []:
        key, _, raw = item.partition("=")
        try:
            val: object = float(raw)
        except ValueError:
            val = raw
        meta[key.strip()] = val
    return meta


def read_csv(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta = parse_header(lines[0]) if lines and lines[0].startswith("#") else {}
    start = 2 if meta or (lines and lines[0].startswith("#")) else 1
    data = np.array([[float(c) for c in ln.split(",")] for ln in lines[start:] if ln.strip()])
    return meta, data[:, 0], data[:, 1]


def params_header(spec: GaussianSpectrum, p: PhysicalParams) -> dict:
    return {
        "L": p.L,
        "k0": spec.k0,
        "sigma_k": spec.sigma_k,
        "x0": spec.x0,
        "m": p.m,
        "hbar": p.hbar,
        "V0": p.V0,
    }


def params_hash(spec: GaussianSpectrum, p: PhysicalParams, q: QuadratureSpec) -> str:
    blob = repr((sorted(params_header(spec, p).items()), sorted(asdict(q).items())))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


SIGNAL_KINDS = ("current_at_exit", "current_at_entrance", "regional", "cumulative", "density_at")
MIN_SAMPLES = 16


class WavePacket:
    """Quadrature evaluation of Psi, its current and regional occupations."""

    # block sizes bounding the (t, k) and (k, x) work arrays
    _x_block = 512
    _t_block = 400

    def __init__(self, spec: GaussianSpectrum, p: PhysicalParams, q: QuadratureSpec | None = None):
        self.spec = spec
        self.p = p
        self.q = q or QuadratureSpec()
        self.window = self.q.window(spec)
        self.last_report: QuadratureReport | None = None

    # -- core k-sum --------------------------------------------------------

    def _panels_for(self, x, t):
        lo, hi = self.window
        v_max = self.p.velocity(hi)
        slope = np.max(np.abs(x), initial=0.0) + abs(self.spec.x0) + self.p.L + v_max * np.max(np.abs(t), initial=0.0)
        n_coarse = math.ceil((slope + 10.0) * (hi - lo) / (2.0 * math.pi))
        return 2 * n_coarse

    def fields(self, x, t, derivative=True):
        """``Psi`` (and ``dPsi/dx``) on the grid ``t x x``; arrays of shape (nt, nx)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        p, spec = self.p, self.spec

        def evaluate(k, w):
            amp = spec.amplitude(k) * w / _SQRT_2PI
            val, der = modes(k, x, p, derivative)
            phase = np.exp(-1j * np.outer(t, p.energy(k) / p.hbar))
            out = [phase @ (amp[:, None] * val)]
            if derivative:
                out.append(phase @ (amp[:, None] * der))
            return np.stack(out)

        res, self.last_report = adaptive_k_integral(
            evaluate, *self.window, self.q, k_b=p.k_b, n_start=self._panels_for(x, t)
        )
        return (res[0], res[1]) if derivative else res[0]

    def _chunked(self, x, t, derivative):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        nx, nt = self._x_block, self._t_block
        val = np.empty((t.size, x.size), dtype=complex)
        der = np.empty_like(val) if derivative else None
        worst = None
        for i in range(0, t.size, nt):
            for j in range(0, x.size, nx):
                r = self.fields(x[j : j + nx], t[i : i + nt], derivative)
                if derivative:
                    val[i : i + nt, j : j + nx], der[i : i + nt, j : j + nx] = r
                else:
                    val[i : i + nt, j : j + nx] = r
                if worst is None or self.last_report.error > worst.error:
                    worst = self.last_report
        self.last_report = worst
        return (val, der) if derivative else val

    # -- pointwise observables --------------------------------------------

    def psi(self, x, t):
        return self._chunked(x, t, derivative=False)

    def density(self, x, t):
        return np.abs(self.psi(x, t)) ** 2

    def current(self, x, t):
        val, der = self._chunked(x, t, derivative=True)
        return self.p.hbar / self.p.m * np.imag(np.conj(val) * der)

    # -- spatial integrals -------------------------------------------------

    def support(self, t) -> tuple[float, float]:
        """Interval holding all incident, reflected and transmitted probability at t."""
        lo, hi = self.window
        t = abs(float(t))
        x0 = self.spec.x0
        margin = WINDOW_SIGMAS * float(self.spec.width_at(t, self.p))
        v_lo, v_hi = self.p.velocity(lo), self.p.velocity(hi)
        spread = [x0 + v_lo * t, x0 + v_hi * t, -x0 - v_lo * t, -x0 - v_hi * t]
        return min(spread) - margin, max(max(spread) + margin, self.p.L + margin)

    def _x_nodes(self, a, b, width=1.0, order=16):
        cuts = sorted({a, b, *[c for c in (0.0, self.p.L) if a < c < b]})
        xs, ws = [], []
        xg, wg = leggauss(order)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            n = max(1, math.ceil((hi - lo) / width))
            e = np.linspace(lo, hi, n + 1)
            h = np.diff(e) / 2.0
            c = (e[1:] + e[:-1]) / 2.0
            xs.append((c[:, None] + h[:, None] * xg).ravel())
            ws.append((h[:, None] * wg).ravel())
        if not xs:
            return np.empty(0), np.empty(0)
        return np.concatenate(xs), np.concatenate(ws)

    def occupation(self, a, b, t):
        """``int_a^b rho(x, t) dx`` for each t; infinite bounds are cut at the packet support."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if not a < b:
            raise ValueError("regional occupation needs a < b")
        out = np.empty(t.size)
        if np.isfinite(a) and np.isfinite(b):
            xs, ws = self._x_nodes(a, b)
            if xs.size:
                out[:] = self.density(xs, t) @ ws
            else:
                out[:] = 0.0
            return out
        for i, ti in enumerate(t):
            s_lo, s_hi = self.support(ti)
            lo = max(a, s_lo)
            hi = min(b, s_hi)
            if lo >= hi:
                out[i] = 0.0
                continue
            xs, ws = self._x_nodes(lo, hi)
            out[i] = float(self.density(xs, [ti])[0] @ ws)
        return out

    def k_norm(self) -> float:
        """Momentum-space norm of the packet over the quadrature window."""
        lo, hi = self.window
        k, w = panel_nodes(lo, hi, self.q.min_panels, self.q.order)
        return float(np.sum(self.spec.density(k) * w))

    def norm(self, t):
        return self.occupation(-np.inf, np.inf, t)

    def cumulative(self, x_cut, t):
        """``F(x_cut, t) = int_{x_cut}^inf rho dx`` via the complement of ``int_-inf^x_cut``."""
        return self.k_norm() - self.occupation(-np.inf, x_cut, t) if np.isfinite(x_cut) else self.k_norm()

    # -- signals -------------------------------------------------------------

    def sample(self, kind: str, window, n: int, x=None, region=None) -> TimeSeries:
        """Materialize a measurement signal on a uniform time grid."""
        if kind not in SIGNAL_KINDS:
            raise ValueError(f"unknown signal kind {kind!r}")
        t_i, t_f = map(float, window)
        if not t_i < t_f:
            raise ValueError("time window must satisfy t_i < t_f")
        if n < MIN_SAMPLES:
            raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n}")
        t = np.linspace(t_i, t_f, n)
        meta = {"kind": kind}
        if kind == "current_at_exit":
            vals = self.current([self.p.L], t)[:, 0]
            meta["x"] = self.p.L
        elif kind == "current_at_entrance":
            vals = self.current([0.0], t)[:, 0]
            meta["x"] = 0.0
        elif kind == "regional":
            a, b = region if region is not None else (0.0, self.p.L)
            vals = self.occupation(a, b, t)
            meta["a"], meta["b"] = float(a), float(b)
        elif kind == "cumulative":
            xc = self.p.L if x is None else float(x)
            vals = self.cumulative(xc, t)
            meta["x"] = xc
        else:
            xc = self.p.L if x is None else float(x)
            vals = self.density([xc], t)[:, 0]
            meta["x"] = xc
        meta.update(params_header(self.spec, self.p))
        meta["hash"] = params_hash(self.spec, self.p, self.q)
        return TimeSeries(t, vals, meta)


# -- flat functional surface ---------------------------------------------------


def psi_at(x, t, spec, p, q=None) -> complex:
    return complex(WavePacket(spec, p, q).psi([x], [t])[0, 0])


def current_at(x, t, spec, p, q=None) -> float:
    return float(WavePacket(spec, p, q).current([x], [t])[0, 0])


def regional_occupation(a, b, t, spec, p, q=None) -> float:
    return float(WavePacket(spec, p, q).occupation(a, b, [t])[0])


def cumulative_F(x_cut, t, spec, p, q=None) -> float:
    return float(WavePacket(spec, p, q).cumulative(x_cut, [t])[0])


def sample_signal(kind, window, n, spec, p, q=None, x=None, region=None) -> TimeSeries:
    return WavePacket(spec, p, q).sample(kind, window, n, x=x, region=region)
