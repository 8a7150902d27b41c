"""Monte-Carlo and algebraic checks of the covariance inequalities that
underpin the rate bounds.

Stochastic checks accept at the 5-standard-error level: one-sided where
an inequality is being verified, two-sided for moment identities. Under a
correct implementation each one-sided check passes with probability at
least 1 - 1e-6 at desk-scale sample counts. Every check owns a generator
seeded from its explicit seed, so reports are reproducible and checks can
run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .channel import real_imag_decompose, sample_cscg, spawn_seeds
from .config import PowerPair
from .errors import ConfigError, SampleBudgetError

MIN_SAMPLES = 100_000
_N_BATCHES = 16
_SIGMAS = 5.0


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one check, JSON-serializable."""

    name: str
    n_samples: int
    estimate: float
    bound: float
    stderr: float
    verdict: str  # pass | fail | inconclusive
    seed: int | None
    kind: str  # one-sided | identity | exact

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _verdict(estimate: float, bound: float, stderr: float, kind: str) -> str:
    if not (math.isfinite(estimate) and math.isfinite(bound)
            and math.isfinite(stderr)):
        return "inconclusive"
    if kind == "identity":
        return "pass" if abs(estimate - bound) <= _SIGMAS * stderr else "fail"
    return "pass" if estimate <= bound + _SIGMAS * stderr else "fail"


def _report(name, n, estimate, bound, stderr, seed, kind) -> CheckReport:
    return CheckReport(name=name, n_samples=n, estimate=float(estimate),
                       bound=float(bound), stderr=float(stderr),
                       verdict=_verdict(estimate, bound, stderr, kind),
                       seed=seed, kind=kind)


# ---------------------------------------------------------------------------
# Small determinants (no linear-algebra generality needed)
# ---------------------------------------------------------------------------


def _det2(a) -> float:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def _det3(a) -> float:
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))


def _det4(a) -> float:
    total = 0.0
    for j in range(4):
        minor = [[a[r][c] for c in range(4) if c != j] for r in range(1, 4)]
        total += (-1.0) ** j * a[0][j] * _det3(minor)
    return total


def det_small(a: np.ndarray) -> float:
    """Determinant by direct cofactor expansion for sizes up to 4."""
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    if n == 2:
        return float(_det2(a))
    if n == 3:
        return float(_det3(a))
    if n == 4:
        return float(_det4(a))
    return float(np.linalg.det(a))


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def det_trace_check(matrix: np.ndarray, name: str = "det-trace") -> CheckReport:
    """Verify det(A) <= (trace(A)/n)^n for a symmetric PSD matrix.

    Deterministic arithmetic check; no sampling involved.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError("input must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.T))) > 1e-9 * scale:
        raise ConfigError("input must be symmetric")
    if float(np.min(np.linalg.eigvalsh(a))) < -1e-9 * scale:
        raise ConfigError("input must be positive semidefinite")
    n = a.shape[0]
    det = det_small(a)
    bound = (float(np.trace(a)) / n) ** n
    return _report(name, 0, det, bound, 0.0, None, "exact")


def _batched_cov_det(rows: np.ndarray) -> tuple[float, float]:
    """Determinant of the unbiased sample covariance, with a standard
    error estimated from per-batch determinants."""
    n = rows.shape[1]
    det = det_small(np.cov(rows, ddof=1))
    batch = n // _N_BATCHES
    dets = np.array([
        det_small(np.cov(rows[:, i * batch:(i + 1) * batch], ddof=1))
        for i in range(_N_BATCHES)])
    stderr = float(np.std(dets, ddof=1) / math.sqrt(_N_BATCHES))
    return det, stderr


def single_user_covariance_check(g: complex, w: complex, p1: float,
                                 sigma_sq: float, n: int, seed: int,
                                 power_split: float = 0.5,
                                 name: str = "conv4") -> CheckReport:
    """Conditional covariance bound for one receiver, interferer fixed.

    Draws the signal with per-quadrature powers (split*p1, (1-split)*p1),
    forms the output quadratures plus noise, and verifies that the 2x2
    covariance determinant stays below
    ((1 + 2 Re(g) |w|^2 + |g|^2 |w|^4) p1 / 2 + sigma^2)^2.
    The bound is tight at the symmetric split, where the check exercises
    the equality case.
    """
    if n < MIN_SAMPLES:
        raise SampleBudgetError(f"need n >= {MIN_SAMPLES}, got {n}")
    if not 0.0 <= power_split <= 1.0:
        raise ConfigError("power_split must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    x = (math.sqrt(power_split * p1) * rng.standard_normal(n)
         + 1j * math.sqrt((1.0 - power_split) * p1) * rng.standard_normal(n))
    y_r, y_i = real_imag_decompose(x, np.full(n, w), g)
    noise_scale = math.sqrt(sigma_sq)
    y_r = y_r + noise_scale * rng.standard_normal(n)
    y_i = y_i + noise_scale * rng.standard_normal(n)
    det, stderr = _batched_cov_det(np.vstack([y_r, y_i]))
    q = abs(w) ** 2
    bound = ((1.0 + 2.0 * g.real * q + abs(g) ** 2 * q * q) * p1 / 2.0
             + sigma_sq) ** 2
    return _report(name, n, det, bound, stderr, seed, "one-sided")


def joint_covariance_check(g_x: complex, g_w: complex, pp: PowerPair,
                           sigma_sq: float, n: int, seed: int,
                           name: str = "conv6") -> CheckReport:
    """Joint 4x4 covariance bound over both receivers' quadratures.

    Inputs are CSCG at the given powers; verifies that the determinant of
    cov(Y_r, Y_i, Z_r, Z_i) stays below
    (sigma^2 + [(1 + 2 Re(g_x) P2 + 4 |g_x|^2 P2^2) P1
              + (1 + 2 Re(g_w) P1 + 4 |g_w|^2 P1^2) P2] / 4)^4.
    """
    if n < MIN_SAMPLES:
        raise SampleBudgetError(f"need n >= {MIN_SAMPLES}, got {n}")
    seeds = spawn_seeds(seed, 3)
    x = sample_cscg(n, pp.p1, seeds[0])
    w = sample_cscg(n, pp.p2, seeds[1])
    y_r, y_i = real_imag_decompose(x, w, g_x)
    z_r, z_i = real_imag_decompose(w, x, g_w)
    rng = np.random.default_rng(seeds[2])
    s = math.sqrt(sigma_sq)
    rows = np.vstack([
        y_r + s * rng.standard_normal(n),
        y_i + s * rng.standard_normal(n),
        z_r + s * rng.standard_normal(n),
        z_i + s * rng.standard_normal(n),
    ])
    det, stderr = _batched_cov_det(rows)
    p1, p2 = pp.p1, pp.p2
    trace_quarter = ((1.0 + 2.0 * g_x.real * p2 + 4.0 * abs(g_x) ** 2 * p2 * p2) * p1
                     + (1.0 + 2.0 * g_w.real * p1 + 4.0 * abs(g_w) ** 2 * p1 * p1) * p2) / 4.0
    bound = (sigma_sq + trace_quarter) ** 4
    return _report(name, n, det, bound, stderr, seed, "one-sided")


def moment_identity_check(p: float, n: int, seed: int,
                          distribution: str = "cscg",
                          name: str = "moments") -> CheckReport:
    """Verify E|W|^4 = 2 (E|W|^2)^2, reported as the ratio against 1.

    The identity holds for CSCG inputs; a uniform-phase constant-modulus
    input gives ratio 1/2 and a fail verdict, demonstrating it is
    distribution-specific.
    """
    if n < MIN_SAMPLES:
        raise SampleBudgetError(f"need n >= {MIN_SAMPLES}, got {n}")
    if p < 0:
        raise ConfigError("power must be >= 0")
    if p == 0.0:
        return _report(name, n, 0.0, 0.0, 0.0, seed, "identity")
    if distribution == "cscg":
        w = sample_cscg(n, p, seed)
    elif distribution == "constant-modulus":
        rng = np.random.default_rng(seed)
        w = math.sqrt(p) * np.exp(2j * np.pi * rng.random(n))
    else:
        raise ConfigError("distribution must be 'cscg' or 'constant-modulus'")
    fourth = np.abs(w) ** 4
    target = 2.0 * p * p
    ratio = float(np.mean(fourth)) / target
    stderr = float(np.std(fourth, ddof=1)) / (target * math.sqrt(n))
    return _report(name, n, ratio, 1.0, stderr, seed, "identity")


# ---------------------------------------------------------------------------
# Suites (CLI vocabulary: dettrace, conv4, conv6, moments, all)
# ---------------------------------------------------------------------------

_MW = 1e-3

CONV4_SETS = (
    ("conv4-equality-g0", 0.0 + 0.0j, math.sqrt(2 * _MW), 1 * _MW, 1 * _MW),
    ("conv4-imag-g", 50.0j, math.sqrt(2 * _MW), 1 * _MW, 1 * _MW),
    ("conv4-complex-g", 20.0 + 35.0j, math.sqrt(1 * _MW), 2 * _MW, 0.5 * _MW),
)

CONV6_SETS = (
    ("conv6-equality-zero-power", 0.0j, 0.0j, 0.0, 0.0, 1 * _MW),
    ("conv6-g0", 0.0j, 0.0j, 1 * _MW, 1 * _MW, 1 * _MW),
    ("conv6-symmetric", 30.0 + 40.0j, 30.0 + 40.0j, 1 * _MW, 1 * _MW, 1 * _MW),
)


def random_psd_matrix(rng: np.random.Generator, size: int) -> np.ndarray:
    b = rng.standard_normal((size, size))
    return b @ b.T


def run_suite(suite: str, n: int, master_seed: int) -> list[CheckReport]:
    """Run one named suite (or 'all') and return its reports."""
    suites = {
        "dettrace": _run_dettrace,
        "conv4": _run_conv4,
        "conv6": _run_conv6,
        "moments": _run_moments,
    }
    if suite == "all":
        reports = []
        for i, fn in enumerate(suites.values()):
            reports.extend(fn(n, master_seed + i))
        return reports
    if suite not in suites:
        raise ConfigError(f"unknown suite '{suite}'; expected one of "
                          f"{('all',) + tuple(suites)}")
    return suites[suite](n, master_seed)


def _run_dettrace(n: int, seed: int) -> list[CheckReport]:
    reports = [
        det_trace_check(np.eye(2), name="dettrace-identity-2x2"),
        det_trace_check(np.diag([1.0, 3.0]), name="dettrace-diag-1-3"),
    ]
    rng = np.random.default_rng(seed)
    count = 1000
    worst = -math.inf
    for _ in range(count):
        a = random_psd_matrix(rng, int(rng.integers(2, 5)))
        r = det_trace_check(a)
        worst = max(worst, r.estimate - r.bound)
    reports.append(CheckReport(
        name=f"dettrace-random-psd[{count}]", n_samples=count,
        estimate=worst, bound=0.0, stderr=0.0,
        verdict="pass" if worst <= 0.0 else "fail", seed=seed, kind="exact"))
    return reports


def _run_conv4(n: int, seed: int) -> list[CheckReport]:
    seeds = spawn_seeds(seed, len(CONV4_SETS))
    return [
        single_user_covariance_check(g, w, p1, s2, n,
                                     int(cs.generate_state(1)[0]), name=name)
        for (name, g, w, p1, s2), cs in zip(CONV4_SETS, seeds)
    ]


def _run_conv6(n: int, seed: int) -> list[CheckReport]:
    seeds = spawn_seeds(seed, len(CONV6_SETS))
    return [
        joint_covariance_check(gx, gw, PowerPair(p1, p2), s2, n,
                               int(cs.generate_state(1)[0]), name=name)
        for (name, gx, gw, p1, p2, s2), cs in zip(CONV6_SETS, seeds)
    ]


def _run_moments(n: int, seed: int) -> list[CheckReport]:
    return [moment_identity_check(1e-3, n, seed, name="moments-cscg-1mW")]
