"""Crank-Nicolson propagator on a uniform grid, used as a brute-force oracle.

The tridiagonal Cayley operator ``(1 + i H dt / 2 hbar)`` is factored once
with LAPACK ``zgttrf``; each step is a tridiagonal product and one
``zgttrs`` back-substitution.  The barrier edges sit on grid points and take
the mean value ``V0/2`` there, which keeps reflection from the steps second
order in ``dx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack

from .scattering import PhysicalParams
from .wavepacket import GaussianSpectrum, TimeSeries, params_header

BOUNDARY_DARK = 1e-10


class GridResolutionError(ValueError):
    pass


class BoundaryLeakError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    x_min: float = -400.0
    x_max: float = 200.0
    n_x: int = 2**16
    dt: float = 0.01

    def __post_init__(self):
        if not self.x_min < 0 < self.x_max:
            raise ValueError("grid must contain x = 0")
        if self.n_x < 16 or not self.dt > 0:
            raise ValueError("need n_x >= 16 and dt > 0")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_x - 1)

    @property
    def x(self) -> np.ndarray:
        # origin pinned to a node so the barrier edges can be too
        i0 = round(-self.x_min / self.dx)
        return (np.arange(self.n_x) - i0) * self.dx

    def snap(self, L: float) -> tuple[float, float]:
        """Barrier width rounded to a whole number of cells, and the snap distance."""
        Ls = round(L / self.dx) * self.dx
        return Ls, Ls - L


@dataclass
class GridState:
    psi: np.ndarray
    t: float = 0.0

    def norm(self, g: GridSpec) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * g.dx)

    def copy(self) -> "GridState":
        return GridState(self.psi.copy(), self.t)


def check_resolution(spec: GaussianSpectrum, g: GridSpec, p: PhysicalParams | None = None):
    dx_max = 2 * math.pi / (spec.k0 + 12 * spec.sigma_k) / 16
    if g.dx > dx_max:
        raise GridResolutionError(f"dx={g.dx:.4g} exceeds {dx_max:.4g} for this spectrum")
    margin = 6 * spec.sigma_x
    L = p.L if p is not None else 0.0
    if not (g.x_min < spec.x0 - margin and g.x_max > L + abs(spec.x0) + margin):
        raise GridResolutionError("domain too small for the packet and barrier")


def init_gaussian(spec: GaussianSpectrum, g: GridSpec, p: PhysicalParams | None = None) -> GridState:
    """``exp(i k0 (x - x0) - (x - x0)^2 / (4 sigma_x^2))`` normalized on the grid.

    The constant phase ``exp(-i k0 x0)`` matches the momentum-space
    amplitude used by :class:`~tunneltime.wavepacket.WavePacket`.
    """
    check_resolution(spec, g, p)
    x = g.x
    psi = np.exp(1j * spec.k0 * (x - spec.x0) - (x - spec.x0) ** 2 / (4.0 * spec.sigma_x**2))
    psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * g.dx)
    return GridState(psi, 0.0)


def potential(g: GridSpec, p: PhysicalParams) -> np.ndarray:
    x = g.x
    if p.L == 0 or p.V0 == 0:
        return np.zeros_like(x)
    L, _ = g.snap(p.L)
    tol = 1e-9 * g.dx
    v = np.where((x > tol) & (x < L - tol), p.V0, 0.0)
    v[np.abs(x) <= tol] = 0.5 * p.V0
    v[np.abs(x - L) <= tol] = 0.5 * p.V0
    return v


class Propagator:
    """Factored Crank-Nicolson step for a fixed grid and potential."""

    def __init__(self, g: GridSpec, p: PhysicalParams):
        self.g, self.p = g, p
        a = p.hbar / (2.0 * p.m * g.dx**2)  # off-diagonal of H / hbar, sign flipped
        self.diag = 2.0 * a + potential(g, p) / p.hbar
        self.off = -a
        half = 0.5j * g.dt
        n = g.n_x
        dl = np.full(n - 1, half * self.off, dtype=complex)
        d = 1.0 + half * self.diag.astype(complex)
        du = dl.copy()
        self._lu = lapack.zgttrf(dl, d, du)
        info = self._lu[-1]
        if info != 0:
            raise np.linalg.LinAlgError(f"zgttrf failed with info={info}")
        self._half = half

    def _rhs(self, psi):
        out = (1.0 - self._half * self.diag) * psi
        out[1:] -= self._half * self.off * psi[:-1]
        out[:-1] -= self._half * self.off * psi[1:]
        return out

    def step(self, state: GridState) -> GridState:
        dl, d, du, du2, ipiv, _ = self._lu
        x, info = lapack.zgttrs(dl, d, du, du2, ipiv, self._rhs(state.psi))
        if info != 0:
            raise np.linalg.LinAlgError(f"zgttrs failed with info={info}")
        return GridState(x, state.t + self.g.dt)

    def run(self, state: GridState, t_end: float) -> GridState:
        n = round((t_end - state.t) / self.g.dt)
        if n < 0 or abs(state.t + n * self.g.dt - t_end) > 1e-9 * max(1.0, abs(t_end)):
            raise ValueError("t_end must be a forward multiple of dt from the current time")
        for _ in range(n):
            state = self.step(state)
        return state


def step(state: GridState, g: GridSpec, p: PhysicalParams) -> GridState:
    """One Crank-Nicolson step; builds the factorization, so prefer :class:`Propagator` in loops."""
    return Propagator(g, p).step(state)


def propagate(state: GridState, g: GridSpec, p: PhysicalParams, times) -> list[GridState]:
    """States at each requested time (sorted, on the dt lattice)."""
    prop = Propagator(g, p)
    out = []
    for t in sorted(times):
        state = prop.run(state, t)
        out.append(state.copy())
    return out


def boundary_density(state: GridState, width: int = 8) -> float:
    rho = np.abs(state.psi) ** 2
    return float(max(rho[:width].max(), rho[-width:].max()))


def check_boundaries(state: GridState):
    b = boundary_density(state)
    if b >= BOUNDARY_DARK:
        raise BoundaryLeakError(f"boundary density {b:.3e} at t={state.t:g}; enlarge the domain")


def gradient(psi, dx):
    """Fourth-order central difference; second order on the two outermost points."""
    d = np.empty_like(psi)
    d[2:-2] = (psi[:-4] - 8 * psi[1:-3] + 8 * psi[3:-1] - psi[4:]) / (12 * dx)
    d[1] = (psi[2] - psi[0]) / (2 * dx)
    d[-2] = (psi[-1] - psi[-3]) / (2 * dx)
    d[0] = (psi[1] - psi[0]) / dx
    d[-1] = (psi[-1] - psi[-2]) / dx
    return d


@dataclass
class Observables:
    density: np.ndarray
    current: np.ndarray
    regions: dict = field(default_factory=dict)


def regional(state: GridState, g: GridSpec, a: float, b: float) -> float:
    """Trapezoid sum of ``|psi|^2`` over grid nodes in ``[a, b]``."""
    x = g.x
    tol = 1e-9 * g.dx
    m = (x >= a - tol) & (x <= b + tol)
    if m.sum() < 2:
        return 0.0
    return float(np.trapezoid(np.abs(state.psi[m]) ** 2, x[m]))


def observables(state: GridState, g: GridSpec, p: PhysicalParams, regions=None) -> Observables:
    rho = np.abs(state.psi) ** 2
    j = (p.hbar / p.m) * np.imag(np.conj(state.psi) * gradient(state.psi, g.dx))
    regs = {tuple(r): regional(state, g, *r) for r in (regions or ())}
    return Observables(rho, j, regs)


def sample(spec: GaussianSpectrum, p: PhysicalParams, g: GridSpec, kind: str, t_max: float, every: int = 1,
           x: float | None = None, region=None) -> TimeSeries:
    """Propagate from t=0 and record ``regional`` occupation or ``current`` at ``x`` every few steps."""
    if kind not in ("regional", "current", "density"):
        raise ValueError(f"unknown grid signal {kind!r}")
    L_snap, snap = g.snap(p.L)
    if kind == "regional" and region is None:
        region = (0.0, L_snap)
    if kind != "regional" and x is None:
        raise ValueError("point signals need x")
    prop = Propagator(g, p)
    state = init_gaussian(spec, g, p)
    n_steps = round(t_max / g.dt)
    xs = g.x
    i_x = int(np.argmin(np.abs(xs - x))) if x is not None else None
    ts, vals = [], []

    def record(s):
        ts.append(s.t)
        if kind == "regional":
            vals.append(regional(s, g, *region))
        else:
            lo, hi = max(i_x - 2, 0), min(i_x + 3, g.n_x)
            seg = s.psi[lo:hi]
            if kind == "density":
                vals.append(float(abs(s.psi[i_x]) ** 2))
            else:
                d = gradient(seg, g.dx)[i_x - lo]
                vals.append(float(p.hbar / p.m * np.imag(np.conj(s.psi[i_x]) * d)))

    record(state)
    for i in range(1, n_steps + 1):
        state = prop.step(state)
        if i % every == 0:
            record(state)
    check_boundaries(state)
    meta = dict(params_header(spec, p))
    meta.update(kind=f"grid_{kind}", x_min=g.x_min, x_max=g.x_max, n_x=g.n_x, dt=g.dt, L_snap=L_snap, snap=snap)
    if x is not None:
        meta["x"] = float(xs[i_x])
    return TimeSeries(np.array(ts), np.array(vals), meta)


def relative_l2(a, b) -> float:
    """``||a - b|| / ||b||`` on a common grid."""
    return float(np.sqrt(np.sum(np.abs(a - b) ** 2) / np.sum(np.abs(b) ** 2)))
