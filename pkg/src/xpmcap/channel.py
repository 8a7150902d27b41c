"""Discrete-time channel simulators and input ensembles.

Two models are provided: the full-memory trilinear interference model and
its single-tap (memoryless) approximation. All randomness flows through
numpy Generators seeded explicitly; independent streams are derived from
a master seed with numpy's SeedSequence.spawn, so batches are
reproducible and safely parallelizable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .coefficients import CoeffTensor
from .errors import ConfigError

BATCH_CSV_HEADER = ("k", "x_re", "x_im", "w_re", "w_im", "y_re", "y_im")


def spawn_seeds(master_seed: int, count: int) -> list[np.random.SeedSequence]:
    """Independent child seed sequences derived from a master seed."""
    return np.random.SeedSequence(master_seed).spawn(count)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _cscg(rng: np.random.Generator, n: int, var_per_dim: float) -> np.ndarray:
    scale = np.sqrt(var_per_dim)
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def sample_cscg(n: int, power: float, seed) -> np.ndarray:
    """i.i.d. circularly symmetric complex Gaussian symbols.

    Mean power E|X|^2 = power, i.e. variance power/2 per quadrature.
    """
    if n < 1:
        raise ConfigError("n must be >= 1")
    if power < 0:
        raise ConfigError("power must be >= 0")
    return _cscg(_rng(seed), n, power / 2.0)


def memoryless_channel(x: np.ndarray, w: np.ndarray, g: complex,
                       sigma_sq: float, seed=None) -> np.ndarray:
    """Single-tap model: y = x + g |w|^2 x + noise.

    Noise is CSCG with variance sigma_sq per quadrature; sigma_sq = 0
    makes the map deterministic.
    """
    x = np.asarray(x, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    if x.shape != w.shape:
        raise ConfigError("input sequences must have equal length")
    y = x + (g * (w * np.conj(w))) * x
    if sigma_sq > 0:
        y = y + _cscg(_rng(seed), x.size, sigma_sq)
    return y


def full_channel(x: np.ndarray, w: np.ndarray, coeffs: CoeffTensor,
                 sigma_sq: float, seed=None) -> np.ndarray:
    """Full-memory model over the coefficient window, cyclic block edges.

    y[k] = x[k] + sum_{l,m,p} c[l,m,p] w[k-m] conj(w[k-p]) x[k-l] + noise.

    Lagged indices wrap around the block, which preserves stationarity of
    the interference for moment estimation. Entries are accumulated in a
    fixed (l,m,p) order, so a window whose only nonzero entry is c[0,0,0]
    reproduces memoryless_channel bit for bit.
    """
    x = np.asarray(x, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    if x.shape != w.shape:
        raise ConfigError("input sequences must have equal length")
    y = x + interference_terms(x, w, coeffs)
    if sigma_sq > 0:
        y = y + _cscg(_rng(seed), x.size, sigma_sq)
    return y


def interference_terms(x: np.ndarray, w: np.ndarray,
                       coeffs: CoeffTensor) -> np.ndarray:
    """Trilinear interference sum of the full-memory model (no noise,
    no identity term)."""
    n = x.size
    M = coeffs.memory
    if n < 2 * M + 1:
        raise ConfigError(
            f"block of {n} symbols is shorter than the coefficient window "
            f"({2 * M + 1})")
    rolls_x = {l: np.roll(x, l) for l in coeffs.lags()}
    rolls_w = {m: np.roll(w, m) for m in coeffs.lags()}
    acc = np.zeros(n, dtype=np.complex128)
    for l in coeffs.lags():
        for m in coeffs.lags():
            for p in coeffs.lags():
                c = coeffs.values[l + M, m + M, p + M]
                if c == 0:
                    continue
                acc += (c * (rolls_w[m] * np.conj(rolls_w[p]))) * rolls_x[l]
    return acc


def real_imag_decompose(x: np.ndarray, w: np.ndarray, g: complex):
    """Quadrature form of the single-tap map, before noise.

    Returns (y_r, y_i) with
        y_r = (1 + |w|^2 Re g) Re x - |w|^2 Im g Im x,
        y_i = (1 + |w|^2 Re g) Im x + |w|^2 Im g Re x,
    whose recombination y_r + j y_i equals (1 + g |w|^2) x.
    """
    x = np.asarray(x, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    q = w.real * w.real + w.imag * w.imag
    a = 1.0 + q * g.real
    b = q * g.imag
    y_r = a * x.real - b * x.imag
    y_i = a * x.imag + b * x.real
    return y_r, y_i


@dataclass(frozen=True)
class RealImagView:
    """Per-quadrature view of one receiver's pre-noise output, together
    with the per-dimension input powers that produced it.

    The power split of each user must respect its total budget,
    p_r + p_i <= total; the covariance checks sweep this split.
    """

    y_r: np.ndarray
    y_i: np.ndarray
    p1_r: float
    p1_i: float
    p2_r: float
    p2_i: float

    def __post_init__(self):
        for name in ("p1_r", "p1_i", "p2_r", "p2_i"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if np.asarray(self.y_r).shape != np.asarray(self.y_i).shape:
            raise ConfigError("quadrature sequences must have equal shape")

    def validate_power_budget(self, p1_total: float, p2_total: float,
                              tol: float = 1e-12) -> None:
        if self.p1_r + self.p1_i > p1_total * (1 + tol) + tol:
            raise ConfigError("user-1 per-dimension powers exceed the budget")
        if self.p2_r + self.p2_i > p2_total * (1 + tol) + tol:
            raise ConfigError("user-2 per-dimension powers exceed the budget")


def quadrature_view(x: np.ndarray, w: np.ndarray, g: complex,
                    p1_split: tuple[float, float],
                    p2_split: tuple[float, float]) -> RealImagView:
    """Bundle the decomposed output with its per-dimension input powers."""
    y_r, y_i = real_imag_decompose(x, w, g)
    return RealImagView(y_r=y_r, y_i=y_i, p1_r=p1_split[0], p1_i=p1_split[1],
                        p2_r=p2_split[0], p2_i=p2_split[1])


@dataclass
class SampleBatch:
    """One simulated block: inputs, outputs and the seed that made them."""

    n: int
    x: np.ndarray
    w: np.ndarray
    y: np.ndarray
    z: np.ndarray | None = None
    noise_seed: int | None = None
    model_tag: str = "memoryless"

    def __post_init__(self):
        if self.model_tag not in ("full", "memoryless", "imported"):
            raise ConfigError("model_tag must be 'full', 'memoryless' or "
                              "'imported'")
        for name in ("x", "w", "y"):
            if np.asarray(getattr(self, name)).size != self.n:
                raise ConfigError(f"sequence '{name}' length differs from n")


def simulate_batch(n: int, p1: float, p2: float, sigma_sq: float,
                   master_seed: int, model: str = "memoryless",
                   g_x: complex | None = None, g_w: complex | None = None,
                   coeffs_x: CoeffTensor | None = None,
                   coeffs_w: CoeffTensor | None = None) -> SampleBatch:
    """Draw CSCG inputs and push them through the selected model.

    Child streams for (x, w, noise_y, noise_z) are spawned from the master
    seed, in that order. The second receiver output z is produced only
    when the corresponding coefficient input is given.
    """
    seeds = spawn_seeds(master_seed, 4)
    x = _cscg(_rng(seeds[0]), n, p1 / 2.0)
    w = _cscg(_rng(seeds[1]), n, p2 / 2.0)
    if model == "memoryless":
        if g_x is None:
            raise ConfigError("memoryless model requires g_x")
        y = memoryless_channel(x, w, g_x, sigma_sq, seeds[2])
        z = None
        if g_w is not None:
            z = memoryless_channel(w, x, g_w, sigma_sq, seeds[3])
    elif model == "full":
        if coeffs_x is None:
            raise ConfigError("full model requires coeffs_x")
        y = full_channel(x, w, coeffs_x, sigma_sq, seeds[2])
        z = None
        if coeffs_w is not None:
            z = full_channel(w, x, coeffs_w, sigma_sq, seeds[3])
    else:
        raise ConfigError("model must be 'memoryless' or 'full'")
    return SampleBatch(n=n, x=x, w=w, y=y, z=z, noise_seed=master_seed,
                       model_tag=model)


def write_batch_csv(batch: SampleBatch, path: str) -> None:
    """Export one receiver's view with full round-trip precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BATCH_CSV_HEADER)
        for k in range(batch.n):
            writer.writerow([
                k,
                repr(float(batch.x[k].real)), repr(float(batch.x[k].imag)),
                repr(float(batch.w[k].real)), repr(float(batch.w[k].imag)),
                repr(float(batch.y[k].real)), repr(float(batch.y[k].imag)),
            ])


def read_batch_csv(path: str) -> SampleBatch:
    """Re-import a batch written by write_batch_csv."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != BATCH_CSV_HEADER:
            raise ConfigError(f"unexpected batch CSV header: {header}")
        xs, ws, ys = [], [], []
        for row in reader:
            _, xr, xi, wr, wi, yr, yi = row
            xs.append(complex(float(xr), float(xi)))
            ws.append(complex(float(wr), float(wi)))
            ys.append(complex(float(yr), float(yi)))
    return SampleBatch(n=len(xs), x=np.array(xs), w=np.array(ws),
                       y=np.array(ys), z=None, noise_seed=None,
                       model_tag="imported")
