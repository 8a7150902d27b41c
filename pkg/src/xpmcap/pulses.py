"""Sampled transmit pulses and their linear propagation.

Pulses live on a uniform time grid; chromatic dispersion and walk-off
delays are applied as all-pass filters in the frequency domain, so pulse
energy is conserved exactly up to FFT rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import LinkParams
from .errors import ConfigError, GridError

#: Energy fraction within two samples of the window edge above which a
#: dispersed pulse is considered to have outgrown its grid.
EDGE_ENERGY_TOL = 1e-6

PULSE_KINDS = ("nyquist-sinc", "root-raised-cosine", "gaussian")


@dataclass(frozen=True)
class PulseShape:
    """Transmit pulse family; sampled pulses are normalized to unit energy.

    kind     one of ``nyquist-sinc``, ``root-raised-cosine``, ``gaussian``
    rolloff  excess-bandwidth factor for root-raised-cosine (0..1)
    width_s  RMS amplitude width for gaussian, seconds
    """

    kind: str = "nyquist-sinc"
    rolloff: float = 0.1
    width_s: float | None = None

    def __post_init__(self):
        if self.kind not in PULSE_KINDS:
            raise ConfigError(f"unknown pulse kind '{self.kind}'; "
                              f"expected one of {PULSE_KINDS}")
        if self.kind == "root-raised-cosine" and not 0.0 <= self.rolloff <= 1.0:
            raise ConfigError("rolloff must lie in [0, 1]")
        if self.kind == "gaussian":
            if self.width_s is None or self.width_s <= 0:
                raise ConfigError("gaussian pulse requires width_s > 0")

    def samples(self, grid: "TimeFreqGrid", symbol_period: float) -> np.ndarray:
        """Complex baseband samples on the grid, unit energy (trapezoid)."""
        t = grid.times
        T = symbol_period
        if self.kind == "nyquist-sinc":
            g = np.sinc(t / T)
        elif self.kind == "root-raised-cosine":
            g = _rrc(t, T, self.rolloff)
        else:
            g = np.exp(-(t ** 2) / (2.0 * self.width_s ** 2))
        g = g.astype(np.complex128)
        energy = grid.dt * float(np.sum(np.abs(g) ** 2))
        if energy <= 0:
            raise ConfigError("pulse has no energy on this grid")
        return g / math.sqrt(energy)


def _rrc(t: np.ndarray, T: float, beta: float) -> np.ndarray:
    """Root-raised-cosine impulse response (any normalization)."""
    if beta == 0.0:
        return np.sinc(t / T)
    x = t / T
    out = np.empty_like(x)
    # Singular points: x = 0 and x = +-1/(4 beta).
    xs = 1.0 / (4.0 * beta)
    near0 = np.isclose(x, 0.0, atol=1e-12)
    nears = np.isclose(np.abs(x), xs, atol=1e-9)
    regular = ~(near0 | nears)
    xr = x[regular]
    num = np.sin(np.pi * xr * (1 - beta)) + 4 * beta * xr * np.cos(np.pi * xr * (1 + beta))
    den = np.pi * xr * (1 - (4 * beta * xr) ** 2)
    out[regular] = num / den
    out[near0] = 1.0 + beta * (4.0 / np.pi - 1.0)
    out[nears] = (beta / math.sqrt(2.0)) * (
        (1 + 2 / np.pi) * math.sin(np.pi / (4 * beta))
        + (1 - 2 / np.pi) * math.cos(np.pi / (4 * beta)))
    return out


@dataclass(frozen=True)
class TimeFreqGrid:
    """Uniform time grid with its FFT frequency companion.

    n_samples must be a power of two; t_span is the total window (s).
    """

    n_samples: int
    t_span: float

    def __post_init__(self):
        if self.n_samples < 2 or self.n_samples & (self.n_samples - 1):
            raise ConfigError("n_samples must be a power of two >= 2")
        if not (isinstance(self.t_span, (int, float)) and self.t_span > 0
                and math.isfinite(self.t_span)):
            raise ConfigError("t_span must be finite and > 0")

    @property
    def dt(self) -> float:
        return self.t_span / self.n_samples

    @cached_property
    def times(self) -> np.ndarray:
        n = self.n_samples
        return (np.arange(n) - n // 2) * self.dt

    @cached_property
    def omega(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_samples, self.dt)

    @classmethod
    def for_link(cls, link: LinkParams, n_samples: int = 4096,
                 n_symbols: int = 64) -> "TimeFreqGrid":
        """Default grid: n_symbols symbol periods, validated against link."""
        grid = cls(n_samples, n_symbols * link.symbol_period)
        grid.check_covers(link)
        return grid

    def check_covers(self, link: LinkParams) -> None:
        """Require the window to cover the coefficient lags plus the
        dispersion-induced pulse spread at the far end of the span.

        Walk-off between carriers is handled separately by internal
        zero-padding in the coefficient engine and does not constrain the
        user-facing window.
        """
        needed = (4 * (link.memory + 1) * link.symbol_period
                  + link.dispersion_spread_s(link.length_km))
        if self.t_span < needed:
            raise GridError(
                f"time window {self.t_span:.3e} s is smaller than the "
                f"{needed:.3e} s required by memory {link.memory} and the "
                f"dispersion spread at {link.length_km} km")

    def scaled(self, factor: int) -> "TimeFreqGrid":
        """Same dt, window enlarged by an integer power-of-two factor."""
        return TimeFreqGrid(self.n_samples * factor, self.t_span * factor)

    def refined(self) -> "TimeFreqGrid":
        """Same window, twice the sample count."""
        return TimeFreqGrid(self.n_samples * 2, self.t_span)


def dispersed_pulse(pulse: PulseShape, link: LinkParams, z_km: float,
                    grid: TimeFreqGrid, walkoff_delay_s: float = 0.0,
                    check_edges: bool = True) -> np.ndarray:
    """Pulse after z_km of dispersive propagation plus a group delay.

    The all-pass response exp(j beta2 w^2 z / 2) and the delay phase are
    applied in the frequency domain. Raises GridError when more than
    EDGE_ENERGY_TOL of the energy sits within two samples of the window
    edge, which signals wrap-around of the periodic transform.
    """
    if not 0.0 <= z_km <= link.length_km:
        raise ConfigError("z must lie within [0, span length]")
    base = pulse.samples(grid, link.symbol_period)
    w = grid.omega
    phase = 0.5 * link.beta2_s2_per_km * z_km * w * w - w * walkoff_delay_s
    out = np.fft.ifft(np.fft.fft(base) * np.exp(1j * phase))
    if check_edges:
        total = float(np.sum(np.abs(out) ** 2))
        edge = float(np.sum(np.abs(out[:2]) ** 2) + np.sum(np.abs(out[-2:]) ** 2))
        if edge > EDGE_ENERGY_TOL * total:
            raise GridError(
                f"pulse energy at window edge ({edge / total:.2e} of total) "
                f"exceeds {EDGE_ENERGY_TOL:.0e}; enlarge the time window")
    return out
