"""Resonant two-level (Rabi) model with closed-form TF and QS distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import Kind, TimeDistribution
from .wavepacket import TimeSeries


@dataclass(frozen=True)
class RabiParams:
    omega0: float = 1.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega0


def excited_population(t, rp: RabiParams):
    return np.sin(rp.omega0 * np.asarray(t) / 2.0) ** 2


def population_signal(rp: RabiParams, window, n: int) -> TimeSeries:
    t = np.linspace(*window, n)
    return TimeSeries(t, excited_population(t, rp), {"kind": "rabi_p1", "omega0": rp.omega0})


def analytic_toa(rp: RabiParams, n: int = 8192) -> TimeDistribution:
    """Arrival-half-cycle density ``(w/2) sin(w t)`` on ``[0, T_R/2]``; mean ``T_R/4``."""
    t = np.linspace(0.0, rp.period / 2.0, n)
    return TimeDistribution(t, np.clip(0.5 * rp.omega0 * np.sin(rp.omega0 * t), 0.0, None), 1.0, Kind.TOA)


def analytic_qs(rp: RabiParams, n: int = 8192) -> TimeDistribution:
    """Full-period density ``(w/pi) sin^2(w t / 2)`` on ``[0, T_R]``; mean ``T_R/2``."""
    t = np.linspace(0.0, rp.period, n)
    return TimeDistribution(t, rp.omega0 / np.pi * excited_population(t, rp), rp.period / 2.0, Kind.QS)
