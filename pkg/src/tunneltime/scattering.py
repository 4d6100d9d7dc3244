"""Stationary scattering off a rectangular barrier ``V0`` on ``[0, L]``.

Every quantity is written through the even functions ``cosh(eps L)`` and
``sinh(eps L) / eps`` of the complex evanescence parameter
``eps = sqrt(k_b**2 - k**2)``.  Above the barrier ``eps`` is purely imaginary
and the same expressions continue to their trigonometric form, so there is a
single code path for sub-barrier, barrier-top and above-barrier momenta.

All functions accept scalar or array ``k`` and broadcast with numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

# |eps| * max(L, 1) below this uses Taylor series in (eps L)^2
BARRIER_TOP_THRESHOLD = 1e-4
# imaginary residue tolerated before a physical quantity is made real
IMAG_RESIDUE_TOL = 1e-10


@dataclass(frozen=True)
class PhysicalParams:
    """Mass, action, barrier height and width in natural units."""

    m: float = 0.5
    hbar: float = 1.0
    V0: float = 2.0
    L: float = 0.0

    def __post_init__(self):
        if not (self.m > 0 and self.hbar > 0 and self.V0 > 0):
            raise ValueError("m, hbar and V0 must be positive")
        if not self.L >= 0:
            raise ValueError("barrier width L must be non-negative")
        if not np.isfinite(self.k_b) or self.k_b <= 0:
            raise ValueError("barrier wavenumber k_b must be finite and positive")

    @property
    def k_b(self) -> float:
        return float(np.sqrt(2.0 * self.m * self.V0) / self.hbar)

    def with_L(self, L: float) -> "PhysicalParams":
        return PhysicalParams(m=self.m, hbar=self.hbar, V0=self.V0, L=float(L))

    def energy(self, k):
        return self.hbar**2 * np.asarray(k) ** 2 / (2.0 * self.m)

    def velocity(self, k):
        return self.hbar * np.asarray(k) / self.m


class Regime(str, Enum):
    SUB_BARRIER = "sub_barrier"
    BARRIER_TOP = "barrier_top"
    ABOVE_BARRIER = "above_barrier"


@dataclass(frozen=True)
class BarrierChannel:
    epsilon: complex
    regime: Regime


def _check_k(k):
    k = np.asarray(k, dtype=float)
    if np.any(~(k > 0)):
        raise ValueError("wavenumber k must be strictly positive")
    return k


def epsilon(k, p: PhysicalParams):
    """Complex ``eps(k)``: real > 0 below ``k_b``, ``+i sqrt(k^2 - k_b^2)`` above."""
    k = np.asarray(k, dtype=float)
    return np.sqrt((p.k_b**2 - k**2) + 0j)


def barrier_epsilon(k: float, p: PhysicalParams) -> BarrierChannel:
    k = float(_check_k(k))
    eps = complex(epsilon(k, p))
    if abs(eps) * max(p.L, 1.0) < BARRIER_TOP_THRESHOLD:
        regime = Regime.BARRIER_TOP
    elif k < p.k_b:
        regime = Regime.SUB_BARRIER
    else:
        regime = Regime.ABOVE_BARRIER
    return BarrierChannel(eps, regime)


def _real(z, what: str):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        scale = np.maximum(np.abs(z), 1.0)
        if np.any(np.abs(z.imag) > IMAG_RESIDUE_TOL * scale):
            raise ArithmeticError(f"{what}: imaginary residue above tolerance")
        return z.real
    return z


def _near_top(eps, L):
    return np.abs(eps) * max(L, 1.0) < BARRIER_TOP_THRESHOLD


def cosh_sinhc(eps, y):
    """Return ``cosh(eps y)`` and ``sinh(eps y) / eps`` (both real for real eps^2)."""
    eps, y = np.broadcast_arrays(np.asarray(eps, dtype=complex), np.asarray(y, dtype=float))
    z = eps * y
    small = np.abs(z) < 1e-3
    safe = np.where(small, 1.0, eps)
    c = np.cosh(z)
    s = np.where(small, y * (1.0 + z**2 / 6.0 + z**4 / 120.0), np.sinh(z) / safe)
    return _real(c, "cosh"), _real(s, "sinh/eps")


def _sinhc_excess(eps, L):
    """``(sinh(2 eps L) / (2 eps) - L) / eps**2``, smooth through eps = 0."""
    u = 2.0 * np.asarray(eps, dtype=complex) * L
    u2 = u * u
    small = np.abs(u) < 0.1
    safe = np.where(small, 1.0, u)
    series = 1 / 6 + u2 / 120 + u2**2 / 5040 + u2**3 / 362880 + u2**4 / 39916800
    direct = (np.sinh(safe) / safe - 1.0) / np.where(small, 1.0, u2)
    g = np.where(small, series, direct)
    return _real(4.0 * L**3 * g, "sinhc excess")


def _parts(k, p):
    k = _check_k(k)
    eps = epsilon(k, p)
    e2 = p.k_b**2 - k**2  # eps^2, real
    C, S = cosh_sinhc(eps, p.L)
    return k, eps, e2, C, S


def exit_amplitude(k, p: PhysicalParams):
    """``t(k, L) exp(ikL)``: the transmitted wave's amplitude at ``x = L``."""
    k, _, e2, C, S = _parts(k, p)
    return 2.0 * k / (2.0 * k * C + 1j * (e2 - k**2) * S)


def transmission_amplitude(k, p: PhysicalParams):
    """``t(k, L)`` with the transmitted wave written as ``t exp(ikx)`` for x > L."""
    k = _check_k(k)
    return np.exp(-1j * k * p.L) * exit_amplitude(k, p)


def transmission_probability(k, p: PhysicalParams):
    k, _, e2, C, S = _parts(k, p)
    return 4.0 * k**2 / ((e2 - k**2) ** 2 * S**2 + 4.0 * k**2 * C**2)


def reflection_amplitude(k, p: PhysicalParams):
    """``r(k, L)`` of the incident-side wave ``exp(ikx) + r exp(-ikx)``."""
    k, _, e2, C, S = _parts(k, p)
    return -1j * (k**2 + e2) * S / (2.0 * k * C + 1j * (e2 - k**2) * S)


def psi_inside(k, x, p: PhysicalParams):
    """In-barrier scattering state for ``0 <= x <= L``."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > p.L)):
        raise ValueError("psi_inside requires 0 <= x <= L")
    return _inside(k, x, p)[0]


def _inside(k, x, p):
    # value and x-derivative; callers guarantee 0 <= x <= L
    k = _check_k(k)
    eps = epsilon(k, p)
    e2 = p.k_b**2 - k**2
    amp = exit_amplitude(k, p)
    cy, sy = cosh_sinhc(eps, np.asarray(x) - p.L)
    value = amp * (cy + 1j * k * sy)
    deriv = amp * (e2 * sy + 1j * k * cy)
    return value, deriv


def dwell_time(k, p: PhysicalParams):
    """Smith dwell time ``(1/v) * int_0^L |psi_k|^2 dx`` in closed form."""
    k, eps, e2, C, S = _parts(k, p)
    L = p.L
    num = 2.0 * L + 2.0 * S * C + 2.0 * k**2 * _sinhc_excess(eps, L)
    den = (e2 - k**2) ** 2 * S**2 + 4.0 * k**2 * C**2
    return p.m * k / p.hbar * num / den


def dwell_time_opaque(k, p: PhysicalParams):
    """Opaque-barrier saturation ``2mk / (hbar eps (k^2 + eps^2))``; sub-barrier only."""
    k = _check_k(k)
    eps = np.sqrt(p.k_b**2 - k**2)
    return 2.0 * p.m * k / (p.hbar * eps * (k**2 + eps**2))


def exit_phase(k, p: PhysicalParams):
    """Barrier part of the transmitted phase, ``arg t = -kL + exit_phase``, modulo pi.

    Scalars come back in (-pi/2, pi/2).  Below the barrier the arctan
    argument is bounded; above it ``cosh(eps L)`` becomes a cosine and the
    argument passes through infinity, so a strictly increasing 1-D sweep of
    k is unwrapped with period pi to keep it continuous.
    """
    k, _, e2, C, S = _parts(k, p)
    with np.errstate(divide="ignore"):
        phi = np.arctan(-(e2 - k**2) * S / (2.0 * k * C))
    if np.ndim(phi) == 1 and phi.size > 1 and np.all(np.diff(k) > 0):
        phi = np.unwrap(phi, period=np.pi)
    return phi


def wigner_exit_time(k, p: PhysicalParams):
    """Exit Wigner phase time ``hbar d(exit_phase)/dE`` in closed form."""
    k, eps, e2, C, S = _parts(k, p)
    L = p.L
    q = (k**2 + e2) ** 2
    num = 2.0 * q * _sinhc_excess(eps, L) + 2.0 * L * (3.0 * k**2 + e2)
    den = q * S**2 + 4.0 * k**2
    return p.m / (p.hbar * k) * num / den


def wigner_exit_time_opaque(k, p: PhysicalParams):
    """Hartman limit ``2m / (hbar k eps)``; sub-barrier only."""
    k = _check_k(k)
    eps = np.sqrt(p.k_b**2 - k**2)
    return 2.0 * p.m / (p.hbar * k * eps)
