"""Physical link description, unit conversions and the additive-noise model.

All internal quantities are SI except fiber lengths (km) and the
nonlinearity coefficient (1/(W km)), matching the conventional units of
the input parameters. Powers are always watts internally; dBm and mW
appear only at CLI boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

from .errors import ConfigError, NumericalError

PLANCK_H = 6.62607015e-34  # J s

#: Default noise variance per quadrature (W). Calibrated so that
#: 2*sigma^2 = 2.0 mW, which reproduces the reference additive-noise
#: capacity curve; use :func:`ase_noise_variance` for physically derived
#: values instead.
DEFAULT_SIGMA_SQ_W = 1.0e-3

#: Default WDM carrier separation (Hz); conventional 50 GHz grid at 32 Gbaud.
DEFAULT_CHANNEL_SPACING_HZ = 50.0e9

#: Default reference carrier frequency (Hz), c/1550 nm.
DEFAULT_CENTER_FREQ_HZ = 299792458.0 / 1550e-9


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _finite(x: float) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


@dataclass(frozen=True)
class LinkParams:
    """Single-span fiber link and transmission parameters.

    gamma              nonlinearity coefficient, 1/(W km)
    alpha_db_per_km    attenuation, dB/km
    beta2_ps2_per_km   group-velocity dispersion, ps^2/km
    length_km          span length, km
    baud_rate          symbol rate, symbols/s
    channel_spacing_hz WDM carrier separation, Hz
    memory             one-sided coefficient window (lags run -memory..memory)
    """

    gamma: float = 1.2
    alpha_db_per_km: float = 0.2
    beta2_ps2_per_km: float = -21.7
    length_km: float = 250.0
    baud_rate: float = 32.0e9
    channel_spacing_hz: float = DEFAULT_CHANNEL_SPACING_HZ
    memory: int = 5

    def __post_init__(self):
        for name in ("gamma", "alpha_db_per_km", "beta2_ps2_per_km",
                     "length_km", "baud_rate", "channel_spacing_hz"):
            _require(_finite(getattr(self, name)), f"link.{name} must be finite")
        _require(self.gamma >= 0, "gamma must be >= 0")
        _require(self.alpha_db_per_km >= 0, "attenuation must be >= 0")
        _require(self.length_km >= 0, "span length must be >= 0")
        _require(self.baud_rate > 0, "baud rate must be > 0")
        _require(self.channel_spacing_hz >= 0, "channel spacing must be >= 0")
        _require(isinstance(self.memory, int) and self.memory >= 0,
                 "memory must be a nonnegative integer")

    @property
    def alpha_np_per_km(self) -> float:
        """Attenuation in nepers/km."""
        return self.alpha_db_per_km * math.log(10.0) / 10.0

    @property
    def beta2_s2_per_km(self) -> float:
        return self.beta2_ps2_per_km * 1e-24

    @property
    def symbol_period(self) -> float:
        return 1.0 / self.baud_rate

    def walkoff_delay_s(self, z_km: float) -> float:
        """Relative group delay between the two carriers after z_km."""
        omega = 2.0 * math.pi * self.channel_spacing_hz
        return self.beta2_s2_per_km * omega * z_km

    def dispersion_spread_s(self, z_km: float) -> float:
        """Two-sided group-delay spread of a baud-rate-wide signal at z_km."""
        return abs(self.beta2_s2_per_km) * z_km * 2.0 * math.pi * self.baud_rate

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class NoiseParams:
    """Additive-noise description.

    sigma_sq is the noise variance per quadrature (real/imaginary
    dimension), in W; the total complex noise power is 2*sigma_sq.
    A value of exactly zero is permitted so that the zero-length-span
    limit is representable; operations that divide by sigma_sq validate
    positivity themselves.
    """

    sigma_sq: float = DEFAULT_SIGMA_SQ_W
    nsp: float | None = None

    def __post_init__(self):
        _require(_finite(self.sigma_sq) and self.sigma_sq >= 0,
                 "sigma_sq must be finite and >= 0")
        if self.nsp is not None:
            _require(_finite(self.nsp) and self.nsp >= 1, "nsp must be >= 1")


@dataclass(frozen=True)
class PowerPair:
    """Mean transmit powers of the two users, in W."""

    p1: float
    p2: float

    def __post_init__(self):
        _require(_finite(self.p1) and self.p1 >= 0, "p1 must be finite and >= 0")
        _require(_finite(self.p2) and self.p2 >= 0, "p2 must be finite and >= 0")

    def swapped(self) -> "PowerPair":
        return PowerPair(self.p2, self.p1)


def dbm_to_watts(p_dbm: float) -> float:
    """Convert dBm to W."""
    if not _finite(p_dbm):
        raise ConfigError("power in dBm must be finite")
    return 10.0 ** (p_dbm / 10.0) * 1e-3


def watts_to_dbm(p_watts: float) -> float:
    """Convert W to dBm; requires a strictly positive power."""
    if not _finite(p_watts) or p_watts <= 0:
        raise ConfigError("power in W must be finite and > 0")
    return 10.0 * math.log10(p_watts / 1e-3)


def effective_length(alpha_db_per_km: float, length_km: float) -> float:
    """Nonlinearity-weighted span length (1 - e^(-alpha L)) / alpha, km.

    alpha is converted to nepers; the lossless limit returns length_km.
    """
    _require(_finite(alpha_db_per_km) and alpha_db_per_km >= 0,
             "attenuation must be finite and >= 0")
    _require(_finite(length_km) and length_km >= 0,
             "length must be finite and >= 0")
    alpha_np = alpha_db_per_km * math.log(10.0) / 10.0
    if alpha_np == 0.0:
        return length_km
    return -math.expm1(-alpha_np * length_km) / alpha_np


def ase_noise_variance(link: LinkParams,
                       nsp: float = 1.0,
                       center_freq_hz: float = DEFAULT_CENTER_FREQ_HZ,
                       sigma_sq_override: float | None = None) -> NoiseParams:
    """Amplified-spontaneous-emission noise of a single lumped amplifier.

    The amplifier exactly compensates the span loss G = e^(alpha L), so the
    total noise power over the symbol-rate bandwidth B is
    2*sigma^2 = 2 nsp h f (G - 1) B, and sigma^2 is the per-quadrature half.
    An explicit ``sigma_sq_override`` (W) bypasses the formula entirely.
    """
    if sigma_sq_override is not None:
        _require(_finite(sigma_sq_override) and sigma_sq_override >= 0,
                 "sigma_sq override must be finite and >= 0")
        return NoiseParams(sigma_sq=sigma_sq_override, nsp=None)
    _require(_finite(nsp) and nsp >= 1, "nsp must be >= 1")
    _require(_finite(center_freq_hz) and center_freq_hz > 0,
             "center frequency must be > 0")
    exponent = link.alpha_np_per_km * link.length_km
    if exponent > 700.0:  # e^x overflows binary64 near 709
        raise NumericalError(
            f"amplifier gain e^{exponent:.1f} overflows; span too long for "
            "the lumped-amplification model")
    total = 2.0 * nsp * PLANCK_H * center_freq_hz * math.expm1(exponent) * link.baud_rate
    return NoiseParams(sigma_sq=total / 2.0, nsp=nsp)


# ---------------------------------------------------------------------------
# Configuration file handling (YAML: nested sections of scalar keys)
# ---------------------------------------------------------------------------

_LINK_KEYS = {"gamma", "alpha_db_per_km", "beta2_ps2_per_km", "length_km",
              "baud_rate", "channel_spacing_hz", "memory"}
_NOISE_KEYS = {"sigma_sq_w", "nsp", "center_freq_hz"}
_SWEEP_KEYS = {"powers_dbm", "symmetric", "p2_dbm", "g_real_per_mw",
               "g_abs_sq_per_mw2", "g_w_real_per_mw", "g_w_abs_sq_per_mw2",
               "kappa_per_mw2"}
_SIMULATION_KEYS = {"n", "p1_dbm", "p2_dbm", "model", "seed",
                    "g_real_per_mw", "g_imag_per_mw"}
_PULSE_KEYS = {"kind", "rolloff", "width_s"}
_GRID_KEYS = {"n_samples", "n_symbols"}

_SECTIONS = {
    "link": _LINK_KEYS,
    "noise": _NOISE_KEYS,
    "sweep": _SWEEP_KEYS,
    "simulation": _SIMULATION_KEYS,
    "pulse": _PULSE_KEYS,
    "grid": _GRID_KEYS,
}


@dataclass
class ToolkitConfig:
    """Validated view of a toolkit configuration file."""

    link: LinkParams = field(default_factory=LinkParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    sweep: dict = field(default_factory=dict)
    simulation: dict = field(default_factory=dict)
    pulse: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    source_path: str | None = None

    def echo(self) -> dict:
        """Plain-dict echo of the effective configuration."""
        return {
            "link": self.link.to_dict(),
            "noise": {"sigma_sq_w": self.noise.sigma_sq, "nsp": self.noise.nsp},
            "sweep": dict(self.sweep),
            "simulation": dict(self.simulation),
            "pulse": dict(self.pulse),
            "grid": dict(self.grid),
        }


def _check_keys(section: str, mapping: dict) -> None:
    if not isinstance(mapping, dict):
        raise ConfigError(f"section '{section}' must be a mapping")
    unknown = set(mapping) - _SECTIONS[section]
    if unknown:
        raise ConfigError(
            f"unknown key(s) in section '{section}': {', '.join(sorted(unknown))}")


def config_from_dict(raw: dict, source_path: str | None = None) -> ToolkitConfig:
    """Build a validated ToolkitConfig from a parsed mapping.

    Unknown sections or keys are hard errors.
    """
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("configuration root must be a mapping of sections")
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    for name in raw:
        _check_keys(name, raw[name] or {})

    link_raw = dict(raw.get("link") or {})
    if "memory" in link_raw:
        mem = link_raw["memory"]
        if not isinstance(mem, int) or isinstance(mem, bool):
            raise ConfigError("link.memory must be an integer")
    for key, value in link_raw.items():
        if key != "memory":
            try:
                link_raw[key] = float(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"link.{key} must be a number: {exc}") from exc
    try:
        link = LinkParams(**link_raw)
    except TypeError as exc:
        raise ConfigError(f"bad link section: {exc}") from exc

    noise_raw = dict(raw.get("noise") or {})
    if "sigma_sq_w" in noise_raw:
        noise = NoiseParams(sigma_sq=float(noise_raw["sigma_sq_w"]),
                            nsp=noise_raw.get("nsp"))
    elif "nsp" in noise_raw:
        noise = ase_noise_variance(
            link, nsp=float(noise_raw["nsp"]),
            center_freq_hz=float(noise_raw.get("center_freq_hz",
                                               DEFAULT_CENTER_FREQ_HZ)))
    else:
        noise = NoiseParams()

    return ToolkitConfig(
        link=link,
        noise=noise,
        sweep=dict(raw.get("sweep") or {}),
        simulation=dict(raw.get("simulation") or {}),
        pulse=dict(raw.get("pulse") or {}),
        grid=dict(raw.get("grid") or {}),
        source_path=source_path,
    )


def load_config(path: str) -> ToolkitConfig:
    """Load and validate a YAML configuration file."""
    import yaml

    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    return config_from_dict(raw, source_path=path)
