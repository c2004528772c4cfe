"""Parameter estimation: phase recovery, covariance statistics, channel inversion, QBER."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CovStats:
    """Empirical moments of the paired Alice/Bob quadrature records."""

    xaxb: float  # <X_A X_B>, pooled over both quadratures
    vb: float  # Bob's pooled variance
    n_symbols: int
    xaxb_x: float = float("nan")
    xaxb_p: float = float("nan")
    vb_x: float = float("nan")
    vb_p: float = float("nan")
    # per-batch values, used for delta-method standard errors
    batch_xaxb: tuple = field(default=())
    batch_vb: tuple = field(default=())


@dataclass(frozen=True)
class EstimationReport:
    t_hat: float
    xi_hat: float
    xaxb: float
    vb: float
    t_std: float = float("nan")
    xi_std: float = float("nan")
    n_symbols: int = 0
    flags: tuple = ()


@dataclass(frozen=True)
class QberReport:
    """Per-basis error fractions over sifted events, with Wilson intervals."""

    qber_z: float
    qber_x: float
    n_z: int
    n_x: int
    m_z: int
    m_x: int
    ci_z: tuple = (float("nan"), float("nan"))
    ci_x: tuple = (float("nan"), float("nan"))
    z_available: bool = True
    x_available: bool = True


def recover_global_phase(alice_alphas, bob_samples) -> float:
    """Rotation of Bob's samples best aligning them with Alice's symbols.

    Returns the maximizer of sum Re(e^{-i theta} beta conj(alpha)), folded
    to the representative of theta + (pi/2) Z nearest zero (the QPSK
    constellation is invariant under quarter turns, so the absolute
    quadrant is unobservable).
    """
    alice = np.asarray(alice_alphas, dtype=complex)
    bob = np.asarray(bob_samples, dtype=complex)
    if alice.shape != bob.shape:
        raise ValueError("Alice and Bob records must have equal length")
    if alice.size < 100:
        raise ValueError(f"phase recovery needs at least 100 paired symbols, got {alice.size}")
    s = np.sum(bob * np.conj(alice))
    if abs(s) == 0.0:
        raise ValueError("degenerate input: zero cross-correlation")
    theta = float(np.angle(s))
    half_quarter = math.pi / 4.0
    while theta > half_quarter:
        theta -= math.pi / 2.0
    while theta < -half_quarter:
        theta += math.pi / 2.0
    return theta


def rotate_samples(bob_samples, theta: float):
    """Undo a global rotation theta on complex Bob samples."""
    return np.asarray(bob_samples, dtype=complex) * np.exp(-1j * theta)


def estimate_covariance(alice_x, alice_p, bob_x, bob_p, batches: int = 1) -> CovStats:
    """Pooled covariance <X_A X_B> and Bob variance V_B from paired records.

    Both quadratures are pooled (x with x, p with p); with `batches` > 1
    the records are split evenly and per-batch moments are retained for
    standard-error propagation.
    """
    ax = np.asarray(alice_x, dtype=float)
    ap = np.asarray(alice_p, dtype=float)
    bx = np.asarray(bob_x, dtype=float)
    bp = np.asarray(bob_p, dtype=float)
    if not (ax.shape == ap.shape == bx.shape == bp.shape):
        raise ValueError("quadrature records must all have equal length")
    n = ax.size
    if n < 1000:
        raise ValueError(f"covariance estimation needs at least 1000 symbols, got {n}")

    xaxb_x = float(np.mean(ax * bx))
    xaxb_p = float(np.mean(ap * bp))
    vb_x = float(np.var(bx))
    vb_p = float(np.var(bp))

    batch_xaxb = []
    batch_vb = []
    if batches > 1:
        for chunk in zip(np.array_split(ax, batches), np.array_split(ap, batches),
                         np.array_split(bx, batches), np.array_split(bp, batches)):
            cax, cap, cbx, cbp = chunk
            batch_xaxb.append(float((np.mean(cax * cbx) + np.mean(cap * cbp)) / 2.0))
            batch_vb.append(float((np.var(cbx) + np.var(cbp)) / 2.0))

    return CovStats(
        xaxb=(xaxb_x + xaxb_p) / 2.0,
        vb=(vb_x + vb_p) / 2.0,
        n_symbols=n,
        xaxb_x=xaxb_x, xaxb_p=xaxb_p, vb_x=vb_x, vb_p=vb_p,
        batch_xaxb=tuple(batch_xaxb), batch_vb=tuple(batch_vb),
    )


def estimate_channel(stats: CovStats, v_a: float, eta: float, v_el: float,
                     t_tol: float = 1e-6) -> EstimationReport:
    """Invert the covariance relations for transmittance and excess noise.

    T_hat = 2 <X_A X_B>^2 / (eta V_A^2);
    xi_hat = (V_B - 1 - V_el) * 2 / (eta T_hat) - V_A.
    Standard errors are propagated by the delta method from the per-batch
    moment spread when batch statistics are available.
    """
    if v_a <= 0:
        raise ValueError("modulation variance must be > 0")
    if not 0.0 < eta <= 1.0:
        raise ValueError("detector efficiency must be in (0, 1]")

    flags = []
    t_hat = 2.0 * stats.xaxb ** 2 / (eta * v_a ** 2)
    if t_hat > 1.0 + t_tol or t_hat < 0.0:
        flags.append("estimation-failure")
    if stats.vb < 1.0 + v_el:
        flags.append("negative-excess-noise")
    xi_hat = (stats.vb - 1.0 - v_el) * 2.0 / (eta * t_hat) - v_a if t_hat > 0 else float("nan")

    t_std = xi_std = float("nan")
    k = len(stats.batch_xaxb)
    if k > 1:
        bx = np.asarray(stats.batch_xaxb)
        bv = np.asarray(stats.batch_vb)
        se_xaxb = float(np.std(bx, ddof=1) / math.sqrt(k))
        se_vb = float(np.std(bv, ddof=1) / math.sqrt(k))
        cov_xv = float(np.cov(bx, bv, ddof=1)[0, 1] / k)
        dt_dx = 4.0 * stats.xaxb / (eta * v_a ** 2)
        t_std = abs(dt_dx) * se_xaxb
        if t_hat > 0:
            dxi_dv = 2.0 / (eta * t_hat)
            dxi_dx = -(stats.vb - 1.0 - v_el) * 2.0 / (eta * t_hat ** 2) * dt_dx
            var_xi = (dxi_dv * se_vb) ** 2 + (dxi_dx * se_xaxb) ** 2 \
                + 2.0 * dxi_dv * dxi_dx * cov_xv
            xi_std = math.sqrt(max(var_xi, 0.0))

    return EstimationReport(
        t_hat=float(t_hat), xi_hat=float(xi_hat),
        xaxb=stats.xaxb, vb=stats.vb,
        t_std=t_std, xi_std=xi_std,
        n_symbols=stats.n_symbols, flags=tuple(flags),
    )


def wilson_interval(errors: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score confidence interval for a binomial fraction."""
    if trials == 0:
        return float("nan"), float("nan")
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def estimate_qber(sifted) -> QberReport:
    """QBER per basis from sifted (sent_bit, basis, measured_bit) triples.

    `basis` is "Z" for the key basis and "X" for the check basis.  An empty
    basis bucket is marked unavailable rather than raising.
    """
    events = list(sifted)
    if not events:
        raise ValueError("sifted record is empty")
    n = {"Z": 0, "X": 0}
    m = {"Z": 0, "X": 0}
    for sent, basis, measured in events:
        if basis not in n:
            raise ValueError(f"unknown basis label {basis!r}")
        n[basis] += 1
        if sent != measured:
            m[basis] += 1
    return QberReport(
        qber_z=m["Z"] / n["Z"] if n["Z"] else float("nan"),
        qber_x=m["X"] / n["X"] if n["X"] else float("nan"),
        n_z=n["Z"], n_x=n["X"], m_z=m["Z"], m_x=m["X"],
        ci_z=wilson_interval(m["Z"], n["Z"]),
        ci_x=wilson_interval(m["X"], n["X"]),
        z_available=n["Z"] > 0, x_available=n["X"] > 0,
    )
