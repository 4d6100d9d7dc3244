"""Tunneling-time distributions from one measured signal: activity (TF) versus presence (QS)."""

from .distributions import TimeDistribution, moments, qs_from_signal, split_toa_tod, tf_from_current, tf_from_signal
from .rabi import RabiParams
from .scattering import PhysicalParams
from .wavepacket import GaussianSpectrum, QuadratureSpec, TimeSeries, WavePacket

__version__ = "0.1.0"

__all__ = [
    "GaussianSpectrum",
    "PhysicalParams",
    "QuadratureSpec",
    "RabiParams",
    "TimeDistribution",
    "TimeSeries",
    "WavePacket",
    "moments",
    "qs_from_signal",
    "split_toa_tod",
    "tf_from_current",
    "tf_from_signal",
]
