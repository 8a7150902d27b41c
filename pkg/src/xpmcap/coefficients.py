"""Numerical evaluation of the cross-phase perturbation coefficients.

Each coefficient is a double integral: an overlap of four dispersed,
time-shifted pulse copies over the time axis, weighted by the fiber power
profile e^(-alpha z) and integrated along the span,

    c[l,m,p] = 2j gamma * int_0^L e^(-alpha z)
               * int g*(z,t) g(z,t-lT) gw(z,t-mT) gw*(z,t-pT) dt dz,

where g is the channel-of-interest pulse and gw the interfering-channel
pulse, additionally delayed by the accumulated walk-off between the two
carriers. The distance integral uses composite Gauss-Legendre panels with
refinement; the time integral is a trapezoid sum on the sampling grid.

The carriers walk apart by up to tens of symbol periods over a span, so
all delays are applied on an internally zero-padded copy of the grid wide
enough that the periodic transform cannot wrap the interferer back onto
the channel of interest.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .config import LinkParams
from .errors import ConfigError, GridError, QuadratureError
from .pulses import PulseShape, TimeFreqGrid

USERS = ("x", "w")

DEFAULT_Z_NODES = 64
DEFAULT_MAX_REFINEMENTS = 1
DEFAULT_QUAD_RTOL = 1e-6

#: Hard cap on the internal zero-padding factor (memory guard).
_MAX_PAD_FACTOR = 32


@dataclass
class CoeffTensor:
    """Dense window of complex coefficients for one receiver.

    values[l+M, m+M, p+M] holds c[l,m,p] in 1/W for lags in -M..M.
    """

    user: str
    memory: int
    values: np.ndarray
    link: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.user not in USERS:
            raise ConfigError(f"user must be one of {USERS}")
        if self.memory < 0:
            raise ConfigError("memory must be >= 0")
        side = 2 * self.memory + 1
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (side, side, side):
            raise ConfigError(
                f"values must have shape {(side, side, side)}, "
                f"got {self.values.shape}")
        if not np.all(np.isfinite(self.values.view(np.float64))):
            raise ConfigError("coefficient entries must be finite")

    def get(self, l: int, m: int, p: int) -> complex:
        M = self.memory
        if max(abs(l), abs(m), abs(p)) > M:
            raise IndexError(f"lag ({l},{m},{p}) outside window +-{M}")
        return complex(self.values[l + M, m + M, p + M])

    def lags(self) -> range:
        return range(-self.memory, self.memory + 1)

    def sum_abs_sq(self) -> float:
        """Sum of |c|^2 over the whole window (1/W^2); the cubic
        interference-power coefficient for Gaussian inputs."""
        return float(np.sum(np.abs(self.values) ** 2))

    def coherent_gains(self) -> np.ndarray:
        """s[l] = sum_m c[l,m,m]: gains of the signal-proportional part of
        the interference under unit interferer power."""
        side = 2 * self.memory + 1
        return np.array([np.trace(self.values[i]) for i in range(side)])

    # -- JSON round trip ----------------------------------------------------

    def to_json_dict(self) -> dict:
        entries = []
        M = self.memory
        for l in self.lags():
            for m in self.lags():
                for p in self.lags():
                    c = self.values[l + M, m + M, p + M]
                    entries.append({"l": l, "m": m, "p": p,
                                    "re": float(c.real), "im": float(c.imag)})
        return {"user": self.user, "memory": self.memory,
                "link": dict(self.link), "entries": entries}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CoeffTensor":
        try:
            user = doc["user"]
            memory = int(doc["memory"])
            entries = doc["entries"]
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed tensor document: {exc}") from exc
        side = 2 * memory + 1
        values = np.full((side, side, side), np.nan + 0j, dtype=np.complex128)
        for e in entries:
            l, m, p = int(e["l"]), int(e["m"]), int(e["p"])
            if max(abs(l), abs(m), abs(p)) > memory:
                raise ConfigError(f"entry lag ({l},{m},{p}) outside window")
            values[l + memory, m + memory, p + memory] = complex(
                float(e["re"]), float(e["im"]))
        if np.any(np.isnan(values.view(np.float64))):
            raise ConfigError("tensor document does not fill the full window")
        return cls(user=user, memory=memory, values=values,
                   link=dict(doc.get("link") or {}))

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "CoeffTensor":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Quadrature core
# ---------------------------------------------------------------------------


def _gauss_legendre_nodes(length_km: float, panels: int, nodes: int):
    """Nodes and weights of composite Gauss-Legendre on [0, length_km]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    zs, ws = [], []
    edges = np.linspace(0.0, length_km, panels + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        zs.append(half * x + 0.5 * (a + b))
        ws.append(half * w)
    return np.concatenate(zs), np.concatenate(ws)


def _pad_factor(link: LinkParams, grid: TimeFreqGrid) -> int:
    """Power-of-two enlargement so delays cannot wrap around the window."""
    reach = (abs(link.walkoff_delay_s(link.length_km))
             + link.memory * link.symbol_period)
    needed = grid.t_span + 2.0 * reach
    factor = 1
    while factor * grid.t_span < needed:
        factor *= 2
        if factor > _MAX_PAD_FACTOR:
            raise GridError(
                "walk-off delay exceeds the largest supported internal "
                "window; reduce channel spacing, span length or enlarge "
                "the grid")
    return factor


def _initial_panels(link: LinkParams) -> int:
    """Panel count resolving the walk-off slide of the distance integrand.

    The overlap kernel varies on the distance scale over which the
    carriers slide one symbol period past each other; Gauss-Legendre
    converges spectrally once the composite node spacing resolves that
    scale, so start with enough panels of 64 nodes to cover it.
    """
    T = link.symbol_period
    slide_symbols = abs(link.walkoff_delay_s(link.length_km)) / T
    panels = 1
    while panels * 32 < slide_symbols:
        panels *= 2
    return panels


def _window_sum(link: LinkParams, pulse: PulseShape, grid: TimeFreqGrid,
                ls, ms, ps, walkoff_sign: float,
                panels: int, z_nodes: int) -> np.ndarray:
    """Raw quadrature of the overlap kernel for all requested lag triples.

    Returns an array of shape (len(ls), len(ms), len(ps)) holding
    2j gamma * sum_k w_k e^(-alpha z_k) * dt * sum_t (overlap at z_k).
    """
    T = link.symbol_period
    pgrid = grid.scaled(_pad_factor(link, grid))
    base = pulse.samples(pgrid, T)
    spec0 = np.fft.fft(base)
    w = pgrid.omega
    w_sq = w * w

    shifts = sorted(set(ms) | set(ps))
    m_idx = [shifts.index(m) for m in ms]
    p_idx = [shifts.index(p) for p in ps]
    ramp_l = np.stack([np.exp(-1j * w * (l * T)) for l in ls])
    ramp_s = np.stack([np.exp(-1j * w * (s * T)) for s in shifts])

    zs, wq = _gauss_legendre_nodes(link.length_km, panels, z_nodes)
    weights = wq * np.exp(-link.alpha_np_per_km * zs)

    n = pgrid.n_samples
    shape = (len(ls), len(ms), len(ps))
    out_flat = np.zeros((len(ls), len(ms) * len(ps)), dtype=np.complex128)
    b = np.empty((len(ms) * len(ps), n), dtype=np.complex128)
    for z, wz in zip(zs, weights):
        disp = spec0 * np.exp(0.5j * link.beta2_s2_per_km * z * w_sq)
        tau = walkoff_sign * link.walkoff_delay_s(z)

        gl = np.fft.ifft(disp[None, :] * ramp_l, axis=1)
        g0 = gl[ls.index(0)] if 0 in ls else np.fft.ifft(disp)
        a = np.conj(g0)[None, :] * gl

        disp_w = disp * np.exp(-1j * w * tau)
        gw = np.fft.ifft(disp_w[None, :] * ramp_s, axis=1)
        gw_p_conj = np.conj(gw[p_idx])
        np.multiply(gw[m_idx][:, None, :], gw_p_conj[None, :, :],
                    out=b.reshape(len(ms), len(ps), n))
        out_flat += wz * (a @ b.T)
    return (2j * link.gamma * pgrid.dt) * out_flat.reshape(shape)


def _integrate_window(link: LinkParams, pulse: PulseShape, grid: TimeFreqGrid,
                      ls, ms, ps, walkoff_sign: float,
                      z_nodes: int, max_refinements: int, rtol: float):
    """Refine the distance quadrature until the window is Cauchy-stable.

    Returns (values, report). Raises QuadratureError when the relative
    change between the two finest levels still exceeds rtol.
    """
    if link.length_km == 0.0 or link.gamma == 0.0:
        zeros = np.zeros((len(ls), len(ms), len(ps)), dtype=np.complex128)
        return zeros, {"z_nodes": z_nodes, "panels": 1, "refinements": 0,
                       "residual": 0.0, "rtol": rtol}
    base_panels = _initial_panels(link)
    prev = _window_sum(link, pulse, grid, ls, ms, ps, walkoff_sign,
                       base_panels, z_nodes)
    if max_refinements == 0:
        return prev, {"z_nodes": z_nodes, "panels": base_panels,
                      "refinements": 0, "residual": math.nan, "rtol": rtol}
    residual = math.inf
    for level in range(1, max_refinements + 1):
        panels = base_panels * 2 ** level
        cur = _window_sum(link, pulse, grid, ls, ms, ps, walkoff_sign,
                          panels, z_nodes)
        scale = float(np.max(np.abs(cur)))
        residual = 0.0 if scale == 0.0 else float(np.max(np.abs(cur - prev))) / scale
        if residual <= rtol:
            return cur, {"z_nodes": z_nodes, "panels": panels,
                         "refinements": level, "residual": residual,
                         "rtol": rtol}
        prev = cur
    raise QuadratureError(
        f"distance quadrature residual {residual:.3e} above tolerance "
        f"{rtol:.1e} after {max_refinements} refinement(s)", residual)


def _walkoff_sign(user: str) -> float:
    if user not in USERS:
        raise ConfigError(f"user must be one of {USERS}")
    # Receiver 'x' sees the interferer shifted one way, receiver 'w' the
    # other; the overall sign convention is arbitrary but fixed.
    return 1.0 if user == "x" else -1.0


def xpm_coefficient(link: LinkParams, pulse: PulseShape, grid: TimeFreqGrid,
                    l: int, m: int, p: int, user: str = "x",
                    z_nodes: int = DEFAULT_Z_NODES,
                    max_refinements: int = DEFAULT_MAX_REFINEMENTS,
                    rtol: float = DEFAULT_QUAD_RTOL) -> complex:
    """Single coefficient c[l,m,p] for the given receiver."""
    if max(abs(l), abs(m), abs(p)) > link.memory:
        raise ConfigError(f"lags ({l},{m},{p}) exceed the memory window "
                          f"+-{link.memory}")
    grid.check_covers(link)
    values, _ = _integrate_window(link, pulse, grid, [l], [m], [p],
                                  _walkoff_sign(user), z_nodes,
                                  max_refinements, rtol)
    return complex(values[0, 0, 0])


def coefficient_tensor(link: LinkParams, pulse: PulseShape,
                       grid: TimeFreqGrid, user: str = "x",
                       z_nodes: int = DEFAULT_Z_NODES,
                       max_refinements: int = DEFAULT_MAX_REFINEMENTS,
                       rtol: float = DEFAULT_QUAD_RTOL,
                       with_report: bool = False):
    """Full (2M+1)^3 coefficient window for one receiver."""
    grid.check_covers(link)
    lags = list(range(-link.memory, link.memory + 1))
    values, report = _integrate_window(link, pulse, grid, lags, lags, lags,
                                       _walkoff_sign(user), z_nodes,
                                       max_refinements, rtol)
    tensor = CoeffTensor(user=user, memory=link.memory, values=values,
                         link=link.to_dict())
    if with_report:
        return tensor, report
    return tensor


def coefficient_tensors(link: LinkParams, pulse: PulseShape,
                        grid: TimeFreqGrid,
                        z_nodes: int = DEFAULT_Z_NODES,
                        max_refinements: int = DEFAULT_MAX_REFINEMENTS,
                        rtol: float = DEFAULT_QUAD_RTOL,
                        with_reports: bool = False):
    """Coefficient windows for both receivers.

    In the symmetric two-user setup the second receiver's window follows
    from the same kernel with the walk-off sign flipped.
    """
    tx, rx = coefficient_tensor(link, pulse, grid, "x", z_nodes,
                                max_refinements, rtol, with_report=True)
    tw, rw = coefficient_tensor(link, pulse, grid, "w", z_nodes,
                                max_refinements, rtol, with_report=True)
    if with_reports:
        return (tx, tw), {"x": rx, "w": rw}
    return tx, tw
