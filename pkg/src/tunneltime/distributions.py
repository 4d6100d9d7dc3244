"""Time distributions obtained by post-processing one measured signal p(t).

Activity (time-of-flow, TF) normalizes ``|dp/dt|``; presence (quantum
stroboscopic, QS) normalizes ``p`` itself.  TOA/TOD split the activity by the
sign of ``dp/dt``.  All normalizations are relative to the sampled window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .wavepacket import MIN_SAMPLES, TimeSeries, read_csv, write_csv

STATIONARY_Z = 1e-14
NEGATIVE_CLIP = 1e-12


class StationarySignalError(ValueError):
    """The signal has no activity on the window; TF is undefined."""


class EmptySignalError(ValueError):
    """The signal has no presence on the window; QS is undefined."""


class Kind(str, Enum):
    TF = "TF"
    QS = "QS"
    TOA = "TOA"
    TOD = "TOD"


@dataclass
class TimeDistribution:
    t: np.ndarray
    density: np.ndarray
    Z: float
    kind: Kind
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.density = np.asarray(self.density, dtype=float)
        if np.any(self.density < 0):
            raise ValueError("density must be non-negative")
        if not self.Z > 0:
            raise ValueError("normalization must be positive")

    @property
    def window(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    def integral(self) -> float:
        return float(np.trapezoid(self.density, self.t))

    def mean(self) -> float:
        return moments(self)[0]

    def spread(self) -> float:
        return moments(self)[1]

    def to_csv(self, path):
        meta = dict(self.meta)
        meta["distribution"] = self.kind.value
        meta["Z"] = float(self.Z)
        write_csv(path, meta, self.t, self.density, "density")

    @classmethod
    def from_csv(cls, path):
        meta, t, d = read_csv(path)
        kind = Kind(meta.pop("distribution"))
        Z = float(meta.pop("Z"))
        return cls(t, d, Z, kind, meta)


def moments(d: TimeDistribution) -> tuple[float, float]:
    """Mean and standard deviation by the trapezoidal rule on the stored grid."""
    mean = np.trapezoid(d.t * d.density, d.t)
    second = np.trapezoid(d.t**2 * d.density, d.t)
    return float(mean), float(np.sqrt(max(second - mean**2, 0.0)))


def derivative(values, t):
    """Fourth-order finite-difference derivative on a uniform grid.

    Central stencil in the interior, one-sided fourth-order stencils on the
    two points at each edge.
    """
    f = np.asarray(values, dtype=float)
    t = np.asarray(t, dtype=float)
    if f.size < 5:
        raise ValueError("need at least 5 samples for a fourth-order derivative")
    h = np.diff(t)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("derivative requires a uniform time grid")
    h = h[0]
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    return d


def _check(s: TimeSeries):
    if s.t.size < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {s.t.size}")


def _normalized(t, weight, kind, meta, empty_exc, what):
    Z = float(np.trapezoid(weight, t))
    if not Z > STATIONARY_Z:
        raise empty_exc(f"{what}: normalization {Z:.3e} vanishes on the window")
    return TimeDistribution(t, weight / Z, Z, kind, dict(meta))


def tf_from_signal(s: TimeSeries) -> TimeDistribution:
    _check(s)
    rate = derivative(s.values, s.t)
    return _normalized(s.t, np.abs(rate), Kind.TF, s.meta, StationarySignalError, "TF")


def tf_from_current(s: TimeSeries) -> TimeDistribution:
    """TF from a directly sampled current ``j(x0, t)``; no differencing."""
    _check(s)
    return _normalized(s.t, np.abs(s.values), Kind.TF, s.meta, StationarySignalError, "TF")


def qs_from_signal(s: TimeSeries) -> TimeDistribution:
    _check(s)
    p = s.values
    if np.any(p < -NEGATIVE_CLIP):
        raise ValueError(f"signal negative beyond {NEGATIVE_CLIP:g}: upstream quadrature failure")
    return _normalized(s.t, np.clip(p, 0.0, None), Kind.QS, s.meta, EmptySignalError, "QS")


def split_toa_tod(s: TimeSeries) -> tuple[TimeDistribution | None, TimeDistribution | None]:
    """Arrival (dp/dt > 0) and departure (dp/dt < 0) activity, each self-normalized.

    A branch with no activity on the window is returned as ``None``.
    """
    _check(s)
    rate = derivative(s.values, s.t)
    out = []
    for kind, w in ((Kind.TOA, np.clip(rate, 0.0, None)), (Kind.TOD, np.clip(-rate, 0.0, None))):
        try:
            out.append(_normalized(s.t, w, kind, s.meta, StationarySignalError, kind.value))
        except StationarySignalError:
            out.append(None)
    return out[0], out[1]
