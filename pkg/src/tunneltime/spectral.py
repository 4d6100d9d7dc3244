"""Spectral averages and asymptotics for barrier-exit TF and in-barrier QS times.

The TF mean is a ``|phi|^2 T``-weighted average of the exit arrival time
``-x0/v + tau_W``; the regional QS mean uses the dwell-time weight
``|phi|^2 tau_D``.  Weights continue above the barrier through the complex
evanescence parameter, so the k-integrals run across ``k_b`` unchanged.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, replace
from enum import Enum

import numpy as np
from scipy import optimize

from . import scattering as sc
from .scattering import PhysicalParams
from .wavepacket import GaussianSpectrum, QuadratureSpec, adaptive_k_integral, params_header, write_csv


class RegimeWarning(UserWarning):
    """An asymptotic formula is used outside its domain of validity."""


class SaddleBreakdownError(ValueError):
    """The Gaussian saddle for the transmitted spectrum has lost its curvature."""


class NoTunnelingError(ValueError):
    """The packet is centred at or above the barrier top."""


class DegenerateMaximumError(ValueError):
    """The filtered spectrum has no isolated maximum."""


class Regime(str, Enum):
    PRE_OPAQUE = "pre_opaque"
    HARTMAN = "hartman"
    ABOVE_BARRIER = "above_barrier"


class WeightKind(str, Enum):
    TF = "TF"
    QS_REGIONAL = "QS_regional"
    QS_LOCAL = "QS_local"


SPECTRAL_QUAD = QuadratureSpec(rtol=1e-11, atol=0.0, min_panels=128, max_panels=8192, top_panels=24)


def spectral_weight(kind, spec: GaussianSpectrum, p: PhysicalParams, k):
    k = np.asarray(k, dtype=float)
    kind = WeightKind(kind)
    phi2 = spec.density(k)
    if kind is WeightKind.TF:
        return phi2 * sc.transmission_probability(k, p)
    if kind is WeightKind.QS_REGIONAL:
        return phi2 * sc.dwell_time(k, p)
    return phi2 * sc.transmission_probability(k, p) / p.velocity(k)


def _integrate(integrands, spec, p, q):
    """Sum ``w * f(k)`` for a stack of integrands ``f``; returns one value per row."""
    q = q or SPECTRAL_QUAD
    lo, hi = q.window(spec)

    def evaluate(k, w):
        return np.array([np.sum(w * row) for row in integrands(k)])

    res, _ = adaptive_k_integral(evaluate, lo, hi, q, k_b=p.k_b)
    return res


def _narrow_band_check(spec):
    if not spec.narrow_band:
        warnings.warn("spectral means assume a narrow-band packet", RegimeWarning, stacklevel=3)


def tf_mean_spectral(spec: GaussianSpectrum, p: PhysicalParams, q: QuadratureSpec | None = None) -> float:
    """Flux-weighted mean exit time ``E_TF[-x0/v + tau_W]``."""
    _narrow_band_check(spec)

    def rows(k):
        w = spectral_weight(WeightKind.TF, spec, p, k)
        return w, w * (-spec.x0 / p.velocity(k) + sc.wigner_exit_time(k, p))

    Z, N = _integrate(rows, spec, p, q)
    return float(N / Z)


def tf_normalization(spec, p, q=None) -> float:
    """Total transmitted probability ``int |phi|^2 T dk`` (the TF time integral of the exit flux)."""
    return float(_integrate(lambda k: [spectral_weight(WeightKind.TF, spec, p, k)], spec, p, q)[0])


def remainder(spec: GaussianSpectrum, p: PhysicalParams, q=None) -> float:
    """Phase-integral remainder ``(pi / Z_QS) int |phi|^2 T m^2 L^2 / (2 hbar^2 eps^2) dk``.

    ``Z_QS = 2 pi int |phi|^2 tau_D dk``.  The 1/eps^2 factor changes sign at
    ``k_b``; ``k_b`` is a panel edge so the quadrature takes its principal value.
    """

    def rows(k):
        e2 = p.k_b**2 - k**2
        T = sc.transmission_probability(k, p)
        return (
            spectral_weight(WeightKind.QS_REGIONAL, spec, p, k),
            spec.density(k) * T * p.m**2 * p.L**2 / (2.0 * p.hbar**2 * e2),
        )

    Z, I = _integrate(rows, spec, p, q)
    return float(math.pi * I / (2.0 * math.pi * Z)) if Z > 0 else 0.0


def phase_integral(k, p: PhysicalParams):
    """``int_0^L |psi_k|^2 d_k(arg psi_k) dx`` minus the exit-phase part, in closed form.

    Differentiating the in-barrier phase ``arctan((k/eps) tanh(eps (x-L)))``
    with respect to k (eps depends on k) gives two pieces; the second,
    ``-(k^2+eps^2) sinh^2(eps L) / (2 eps^4)``, is of order one in the opaque
    limit and carries the entrance-side delay of the in-barrier density.
    """
    k = sc._check_k(k)
    e2 = p.k_b**2 - k**2
    L = p.L
    eps = sc.epsilon(k, p)
    _, S = sc.cosh_sinhc(eps, L)
    T = sc.transmission_probability(k, p)
    # k^2 L^2/(2 e2) - (k^2+e2) S^2/(2 e2) without the 1/e2 cancellation
    s2_minus_L2 = _sinhc_sq_excess(eps, L)
    return T * (-(k**2) * s2_minus_L2 / 2.0 - S**2 / 2.0)


def _sinhc_sq_excess(eps, L):
    """``(S^2 - L^2) / eps^2`` with ``S = sinh(eps L)/eps``, smooth at eps = 0."""
    z = np.asarray(eps, dtype=complex) * L
    z2 = z * z
    small = np.abs(z) < 0.1
    # S^2 = L^2 (sinh z / z)^2 = L^2 (1 + z^2/3 + 2 z^4/45 + z^6/315 + 2 z^8/14175)
    series = 1 / 3 + 2 * z2 / 45 + z2**2 / 315 + 2 * z2**3 / 14175
    safe = np.where(small, 1.0, z)
    direct = ((np.sinh(safe) / safe) ** 2 - 1.0) / np.where(small, 1.0, z2)
    g = np.where(small, series, direct)
    return sc._real(L**4 * g, "sinhc^2 excess")


def qs_regional_mean_spectral(
    spec: GaussianSpectrum, p: PhysicalParams, q=None, include_remainder: bool = True
) -> float:
    """Dwell-weighted mean ``E_QS[-x0/v + tau_W]`` plus, optionally, :func:`remainder`."""
    _narrow_band_check(spec)
    if p.L == 0:
        raise ValueError("regional QS needs a barrier of positive width")

    def rows(k):
        w = spectral_weight(WeightKind.QS_REGIONAL, spec, p, k)
        return w, w * (-spec.x0 / p.velocity(k) + sc.wigner_exit_time(k, p))

    Z, N = _integrate(rows, spec, p, q)
    mean = float(N / Z)
    return mean + remainder(spec, p, q) if include_remainder else mean


def qs_regional_mean_exact(spec: GaussianSpectrum, p: PhysicalParams, q=None) -> float:
    """Regional QS mean with the full in-barrier phase derivative.

    Equals ``E_QS[-x0/v + tau_W] + E_QS[phase_integral / (v^2 tau_D)]``; this
    is the time-integrated first moment of ``int_0^L |Psi|^2 dx`` over all t
    without further approximation.
    """
    if p.L == 0:
        raise ValueError("regional QS needs a barrier of positive width")

    def rows(k):
        v = p.velocity(k)
        w = spectral_weight(WeightKind.QS_REGIONAL, spec, p, k)
        extra = spec.density(k) * phase_integral(k, p) / v**2
        return w, w * (-spec.x0 / v + sc.wigner_exit_time(k, p)) + extra

    Z, N = _integrate(rows, spec, p, q)
    return float(N / Z)


def qs_local_mean_spectral(spec: GaussianSpectrum, p: PhysicalParams, q=None) -> float:
    """Density-weighted mean at ``x = L``: weight ``|phi|^2 T / v``, time ``(L-x0)/v + tau_W``."""
    _narrow_band_check(spec)

    def rows(k):
        w = spectral_weight(WeightKind.QS_LOCAL, spec, p, k)
        return w, w * ((p.L - spec.x0) / p.velocity(k) + sc.wigner_exit_time(k, p))

    Z, N = _integrate(rows, spec, p, q)
    return float(N / Z)


def above_barrier_fraction(spec: GaussianSpectrum, p: PhysicalParams, q=None) -> float:
    """Share of transmitted flux carried by ``k > k_b``.

    The numerator gets its own adaptive pass on ``[k_b, k_max]`` so that
    fractions far below the total's tolerance are still resolved.
    """
    q = q or SPECTRAL_QUAD
    lo, hi = q.window(spec)
    Z = tf_normalization(spec, p, q)
    if p.k_b >= hi:
        return 0.0
    upper = replace(q, k_min=max(lo, p.k_b), k_max=hi)
    above = _integrate(lambda k: [spectral_weight(WeightKind.TF, spec, p, k)], spec, p, upper)[0]
    return float(np.clip(above / Z, 0.0, 1.0))


# -- filtered momentum and widths -------------------------------------------


def _log_weight(spec, p):
    def f(k):
        return np.log(spec.density(k)) + np.log(sc.transmission_probability(k, p))

    return f


def k_star(spec: GaussianSpectrum, p: PhysicalParams, q: QuadratureSpec | None = None, sub_barrier: bool = False) -> float:
    """Maximizer of ``|phi|^2 T`` over the quadrature window.

    A 64-point scan brackets the global maximum, golden-section search
    narrows it, and a root of the finite-difference log-derivative polishes
    it to ~1e-10.  ``sub_barrier`` restricts the search to ``k < k_b``.
    """
    q = q or QuadratureSpec()
    lo, hi = q.window(spec)
    if sub_barrier:
        hi = min(hi, p.k_b * (1.0 - 1e-9))
    f = _log_weight(spec, p)
    grid = np.linspace(lo, hi, 64)
    vals = f(grid)
    i = int(np.argmax(vals))
    if i in (0, grid.size - 1):
        raise DegenerateMaximumError(f"maximum of the filtered spectrum sits on the window edge k={grid[i]:.6g}")
    peaks = np.nonzero((vals[1:-1] > vals[:-2]) & (vals[1:-1] > vals[2:]))[0]
    if peaks.size > 1:
        warnings.warn(
            f"filtered spectrum has {peaks.size} local maxima; returning the global one", RegimeWarning, stacklevel=2
        )
    L_star = _safe_lstar(spec, p)
    if L_star is not None and p.L >= L_star and not sub_barrier:
        warnings.warn("k_star used beyond the sub-barrier dominated regime", RegimeWarning, stacklevel=2)
    res = optimize.minimize_scalar(lambda k: -f(k), bracket=(grid[i - 1], grid[i], grid[i + 1]), method="golden",
                                   tol=1e-10)
    k = float(res.x)
    h = 1e-5

    def dlog(kk):
        return (f(kk + h) - f(kk - h)) / (2 * h)

    a, b = k - 1e-6, k + 1e-6
    if dlog(a) > 0 > dlog(b):
        k = optimize.brentq(dlog, a, b, xtol=1e-13)
    return k


def k_star_shift(spec: GaussianSpectrum, p: PhysicalParams) -> float:
    """Leading-order filtered momentum ``k0 + 2 sigma_k^2 k0 L / eps(k0)``."""
    eps0 = _eps0(spec, p)
    return spec.k0 + 2.0 * spec.sigma_k**2 * spec.k0 * p.L / eps0


def _eps0(spec, p):
    if spec.k0 >= p.k_b:
        raise NoTunnelingError("k0 >= k_b: the packet is not in the tunneling regime")
    return math.sqrt(p.k_b**2 - spec.k0**2)


@dataclass(frozen=True)
class EffectiveWidth:
    formula: float
    curvature: float


def sigma_eff(spec: GaussianSpectrum, p: PhysicalParams, at: float | None = None) -> EffectiveWidth:
    """Width of the transmitted spectrum around ``at`` (default :func:`k_star`).

    ``formula`` uses ``1/s^2 = 1/sigma_k^2 - 2 k_b^2 L / eps(at)^3``;
    ``curvature`` uses ``-d^2/dk^2 ln(|phi|^2 T)`` by central differences.
    """
    k = k_star(spec, p, sub_barrier=True) if at is None else float(at)
    if not 0 < k < p.k_b:
        raise SaddleBreakdownError("effective width is defined for sub-barrier momenta only")
    eps = math.sqrt(p.k_b**2 - k**2)
    inv2 = 1.0 / spec.sigma_k**2 - 2.0 * p.k_b**2 * p.L / eps**3
    if not inv2 > 0:
        raise SaddleBreakdownError(
            "Gaussian saddle lost its curvature (L >= L_c); the transmitted spectrum is above-barrier dominated"
        )
    f = _log_weight(spec, p)
    h = 1e-4
    curv = -(f(k + h) - 2.0 * f(k) + f(k - h)) / h**2
    return EffectiveWidth(1.0 / math.sqrt(inv2), 1.0 / math.sqrt(curv) if curv > 0 else math.inf)


def crossover_lengths(spec: GaussianSpectrum, p: PhysicalParams) -> tuple[float, float]:
    """``L* = (k_b-k0)^2 / (4 sigma_k^2 eps0)`` and ``L_c = eps0^3 / (2 k_b^2 sigma_k^2)``."""
    eps0 = _eps0(spec, p)
    s2 = spec.sigma_k**2
    return (p.k_b - spec.k0) ** 2 / (4.0 * s2 * eps0), eps0**3 / (2.0 * p.k_b**2 * s2)


def _safe_lstar(spec, p):
    try:
        return crossover_lengths(spec, p)[0]
    except NoTunnelingError:
        return None


def classify(spec: GaussianSpectrum, p: PhysicalParams) -> Regime:
    eps0 = _eps0(spec, p)
    L_star, _ = crossover_lengths(spec, p)
    if p.L < 1.0 / eps0:
        return Regime.PRE_OPAQUE
    if p.L < L_star:
        return Regime.HARTMAN
    return Regime.ABOVE_BARRIER


def tf_mean_opaque(spec: GaussianSpectrum, p: PhysicalParams) -> float:
    """Opaque-barrier estimate ``-x0/v(k*) + tau_W^inf(k*)``."""
    eps0 = _eps0(spec, p)
    if eps0 * p.L < 3.0:
        warnings.warn("opaque estimate used with eps(k0) L < 3", RegimeWarning, stacklevel=2)
    k = k_star(spec, p, sub_barrier=True)
    return float(-spec.x0 / p.velocity(k) + sc.wigner_exit_time_opaque(k, p))


@dataclass(frozen=True)
class SpreadEstimate:
    sqrt_form: float
    linear_form: float
    valid: bool


def tf_spread_estimate(spec: GaussianSpectrum, p: PhysicalParams) -> SpreadEstimate:
    """``(1 - L/L_c)^(1/2) / (2 v(k*) sigma_k)`` and its linearization, k* from the shift formula."""
    _, L_c = crossover_lengths(spec, p)
    if p.L >= L_c:
        raise SaddleBreakdownError("TF spread estimate requires L < L_c")
    v = p.velocity(k_star_shift(spec, p))
    base = 1.0 / (2.0 * v * spec.sigma_k)
    return SpreadEstimate(base * math.sqrt(1.0 - p.L / L_c), base * (1.0 - p.L / (2.0 * L_c)), p.L < 0.1 * L_c)


def qs_spread_estimate(spec: GaussianSpectrum, p: PhysicalParams) -> float:
    return 1.0 / (2.0 * spec.sigma_k * p.velocity(spec.k0))


# -- regime report ------------------------------------------------------------


@dataclass(frozen=True)
class RegimeReport:
    L: float
    k_star: float
    sigma_eff: float | None
    L_star: float
    L_c: float
    above_barrier_fraction: float
    regime: Regime

    def row(self) -> dict:
        d = asdict(self)
        d["regime"] = self.regime.value
        return d


def regime_report(spec: GaussianSpectrum, p: PhysicalParams, q=None) -> RegimeReport:
    L_star, L_c = crossover_lengths(spec, p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        try:
            ks = k_star(spec, p, q)
        except DegenerateMaximumError:
            ks = math.nan
        try:
            width = sigma_eff(spec, p, at=k_star(spec, p, q, sub_barrier=True)).formula
        except (SaddleBreakdownError, DegenerateMaximumError):
            width = None
    return RegimeReport(p.L, ks, width, L_star, L_c, above_barrier_fraction(spec, p, q), classify(spec, p))


def write_regime_csv(path, reports, spec: GaussianSpectrum, p: PhysicalParams):
    header = "# " + ", ".join(f"{k}={v!r}" for k, v in params_header(spec, p).items() if k != "L")
    cols = ["L", "k_star", "sigma_eff", "L_star", "L_c", "above_barrier_fraction", "regime"]
    lines = [header, ",".join(cols)]
    for r in reports:
        row = r.row()
        lines.append(",".join("" if row[c] is None else (f"{row[c]:.17g}" if isinstance(row[c], float) else str(row[c]))
                              for c in cols))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


__all__ = [name for name in dir() if not name.startswith("_") and name not in {"annotations", "replace"}]
