"""End-to-end experiment drivers wiring encoder -> channel -> receiver -> analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, cv_propagate_quadratures, db_to_transmittance
from .core import RandomSource
from .encoder import QPSK_SYMBOL_PHASES
from .estimation import (CovStats, EstimationReport, QberReport, estimate_channel,
                         estimate_covariance, recover_global_phase, wilson_interval)
from .rates import CvRateInput, DvRateInput, RateReport, skr_cv_asymptotic, skr_dv_finite
from .receivers import HetParams, calibrate_snu, heterodyne_measure_quadratures, misalign
from .encoder import D, L, R

_SIM_CHUNK = 1_000_000


@dataclass(frozen=True)
class CvExperimentConfig:
    v_a: float = 0.45
    loss_db: float = float(-10.0 * math.log10(0.72))
    xi_a: float = 0.012
    eta: float = 0.30
    v_el: float = 0.081
    beta: float = 0.95
    symbol_rate: float = 50e6
    n_symbols: int = 1_500_000
    batches: int = 30
    seed: int = 0
    adc_enabled: bool = False
    adc_bits: int = 8
    adc_fullscale: float = 0.5  # volts
    volts_per_snu: float = 0.02
    frame_rotation: float = 0.0  # carrier-frame offset, recovered before estimation

    def __post_init__(self) -> None:
        if self.n_symbols < self.batches:
            raise ValueError("need at least one symbol per batch")
        if self.n_symbols < 1000:
            raise ValueError("CV experiment needs at least 1000 symbols")


@dataclass(frozen=True)
class CvExperimentResult:
    estimation: EstimationReport
    rate: RateReport
    recovered_rotation: float
    calibration_v_el: float
    stats: CovStats
    constellation: dict  # symbol_index, x_a, p_a, x_b, p_b arrays


def run_cv_experiment(cfg: CvExperimentConfig) -> CvExperimentResult:
    """Simulate the QPSK experiment and run the full estimation/rate pipeline."""
    rng = RandomSource(cfg.seed)
    gen = rng.generator

    det = HetParams(eta=cfg.eta, v_el=cfg.v_el, adc_bits=cfg.adc_bits,
                    adc_fullscale=cfg.adc_fullscale, volts_per_snu=cfg.volts_per_snu,
                    adc_enabled=cfg.adc_enabled)

    # receiver calibration from synthetic vacuum/dark records (ADC path only)
    v_el_cal = float("nan")
    snu_scale = cfg.volts_per_snu
    if cfg.adc_enabled:
        n_cal = 200_000
        dark = math.sqrt(cfg.v_el) * cfg.volts_per_snu * gen.standard_normal(n_cal)
        vacuum = cfg.volts_per_snu * gen.standard_normal(n_cal) + \
            math.sqrt(cfg.v_el) * cfg.volts_per_snu * gen.standard_normal(n_cal)
        snu_scale, v_el_cal = calibrate_snu(vacuum, dark)
        det = HetParams(eta=cfg.eta, v_el=cfg.v_el, adc_bits=cfg.adc_bits,
                        adc_fullscale=cfg.adc_fullscale, volts_per_snu=snu_scale,
                        adc_enabled=True)

    ks = gen.integers(0, 4, size=cfg.n_symbols)
    phases = np.asarray(QPSK_SYMBOL_PHASES)[ks]
    amp = math.sqrt(cfg.v_a / 2.0)
    alpha = amp * np.exp(1j * phases)
    x_a, p_a = 2.0 * alpha.real, 2.0 * alpha.imag

    t = db_to_transmittance(cfg.loss_db)
    ch = ChannelParams(t=t, xi_a=cfg.xi_a)
    x_c, p_c = cv_propagate_quadratures(x_a, p_a, ch, rng)
    if cfg.frame_rotation != 0.0:
        field_c = (x_c + 1j * p_c) * np.exp(1j * cfg.frame_rotation)
        x_c, p_c = field_c.real, field_c.imag
    x_b, p_b = heterodyne_measure_quadratures(x_c, p_c, det, rng)

    beta_b = (x_b + 1j * p_b) / 2.0
    theta = recover_global_phase(alpha, beta_b)
    beta_b = beta_b * np.exp(-1j * theta)
    x_b, p_b = 2.0 * beta_b.real, 2.0 * beta_b.imag

    stats = estimate_covariance(x_a, p_a, x_b, p_b, batches=cfg.batches)
    est = estimate_channel(stats, v_a=cfg.v_a, eta=cfg.eta, v_el=cfg.v_el)

    t_for_rate = min(max(est.t_hat, 0.0), 1.0)
    xi_for_rate = max(est.xi_hat, 0.0)
    rate = skr_cv_asymptotic(CvRateInput(
        v_a=cfg.v_a, t=t_for_rate, xi_a=xi_for_rate, eta=cfg.eta,
        v_el=cfg.v_el, beta=cfg.beta, symbol_rate=cfg.symbol_rate))

    n_dump = min(cfg.n_symbols, 50_000)
    constellation = {
        "symbol_index": ks[:n_dump].astype(int),
        "x_a": x_a[:n_dump], "p_a": p_a[:n_dump],
        "x_b": x_b[:n_dump], "p_b": p_b[:n_dump],
    }
    return CvExperimentResult(estimation=est, rate=rate, recovered_rotation=theta,
                              calibration_v_el=v_el_cal, stats=stats,
                              constellation=constellation)


@dataclass(frozen=True)
class DvExperimentConfig:
    pulse_rate: float = 50e6
    mu1: float = 0.5
    mu2: float = 0.1
    p_mu1: float = 0.7
    p_key_alice: float = 0.8  # R and L each get half; D gets the rest
    basis_split: float = 0.5
    loss_db: float = 6.6
    error_rate: float = 0.006  # intrinsic misalignment error, sin^2(theta)
    eta_det: float = 0.05
    dark_prob: float = 1e-7
    block_size: int = 40_000_000
    n_blocks: int = 1
    eps_sec: float = 1e-9
    eps_corr: float = 1e-9
    f_ec: float = 1.06
    seed: int = 0

    def __post_init__(self) -> None:
        if self.block_size < 100_000:
            raise ValueError("block size must be at least 1e5 pulses")
        if not 0.0 <= self.p_key_alice <= 1.0 or not 0.0 <= self.basis_split <= 1.0:
            raise ValueError("probabilities must be in [0, 1]")
        if not 0.0 <= self.error_rate <= 1.0:
            raise ValueError("error rate must be in [0, 1]")


@dataclass(frozen=True)
class DvExperimentResult:
    qber: QberReport
    rate: RateReport  # averaged over blocks
    block_rates_bps: tuple
    counts: dict


def _outcome_table(error_rate: float):
    """P(second outcome) per (state 0=D,1=R,2=L) x (basis 0=KEY,1=CHECK)."""
    theta = math.asin(math.sqrt(error_rate))
    from .encoder import A as state_a, L as state_l
    table = np.zeros((3, 2))
    for i, st in enumerate((D, R, L)):
        rotated = misalign(st, theta)
        table[i, 0] = rotated.fidelity(state_l)
        table[i, 1] = rotated.fidelity(state_a)
    return table


def run_dv_experiment(cfg: DvExperimentConfig) -> DvExperimentResult:
    """Simulate the pulsed three-state one-decoy protocol and rate each block."""
    rng = RandomSource(cfg.seed)
    gen = rng.generator
    t = db_to_transmittance(cfg.loss_db)
    p_second = _outcome_table(cfg.error_rate)

    keys = ("n_z_mu1", "n_z_mu2", "m_z_mu1", "m_z_mu2",
            "n_x_mu1", "n_x_mu2", "m_x_mu1", "m_x_mu2")
    totals = dict.fromkeys(keys, 0)
    block_rates = []
    reports = []

    for _ in range(cfg.n_blocks):
        counts = dict.fromkeys(keys, 0)
        remaining = cfg.block_size
        while remaining > 0:
            n = min(remaining, _SIM_CHUNK)
            remaining -= n

            signal_int = gen.uniform(size=n) < cfg.p_mu1
            mu = np.where(signal_int, cfg.mu1, cfg.mu2)
            # states: 0 = D (check), 1 = R, 2 = L
            u = gen.uniform(size=n)
            state = np.where(u < 1.0 - cfg.p_key_alice, 0,
                             np.where(u < 1.0 - cfg.p_key_alice / 2.0, 1, 2))
            photons = gen.poisson(mu * t)
            basis = (gen.uniform(size=n) >= cfg.basis_split).astype(int)  # 0=KEY, 1=CHECK

            p_click = 1.0 - (1.0 - cfg.eta_det) ** photons
            signal = gen.uniform(size=n) < p_click
            dark = gen.uniform(size=(n, 2)) < cfg.dark_prob

            outcome = (gen.uniform(size=n) < p_second[state, basis]).astype(int)
            # dark on the opposite detector: double click, fair coin
            opposite_dark = dark[np.arange(n), 1 - outcome]
            flip = signal & opposite_dark
            outcome[flip] = (gen.uniform(size=int(flip.sum())) < 0.5).astype(int)
            # dark-only clicks
            dark_only = ~signal & dark.any(axis=1)
            both = dark.all(axis=1)
            outcome[dark_only] = dark[dark_only, 1].astype(int)
            coin = dark_only & both
            outcome[coin] = (gen.uniform(size=int(coin.sum())) < 0.5).astype(int)
            click = signal | dark_only

            z_sift = click & (state > 0) & (basis == 0)
            x_sift = click & (state == 0) & (basis == 1)
            z_err = z_sift & (outcome != (state - 1))
            x_err = x_sift & (outcome == 1)

            for name, mask in (("n_z", z_sift), ("m_z", z_err),
                               ("n_x", x_sift), ("m_x", x_err)):
                counts[name + "_mu1"] += int((mask & signal_int).sum())
                counts[name + "_mu2"] += int((mask & ~signal_int).sum())

        for key in keys:
            totals[key] += counts[key]
        rate = skr_dv_finite(DvRateInput(
            mu1=cfg.mu1, mu2=cfg.mu2, p_mu1=cfg.p_mu1, **{k: float(counts[k]) for k in keys},
            eps_sec=cfg.eps_sec, eps_corr=cfg.eps_corr, f_ec=cfg.f_ec,
            pulse_rate=cfg.pulse_rate, block_size=cfg.block_size))
        reports.append(rate)
        block_rates.append(rate.skr_bps)

    n_z = totals["n_z_mu1"] + totals["n_z_mu2"]
    m_z = totals["m_z_mu1"] + totals["m_z_mu2"]
    n_x = totals["n_x_mu1"] + totals["n_x_mu2"]
    m_x = totals["m_x_mu1"] + totals["m_x_mu2"]
    qber = QberReport(
        qber_z=m_z / n_z if n_z else float("nan"),
        qber_x=m_x / n_x if n_x else float("nan"),
        n_z=n_z, n_x=n_x, m_z=m_z, m_x=m_x,
        ci_z=wilson_interval(m_z, n_z), ci_x=wilson_interval(m_x, n_x),
        z_available=n_z > 0, x_available=n_x > 0,
    )
    mean_bps = float(np.mean(block_rates)) if block_rates else 0.0
    last = reports[-1]
    rate = RateReport(
        skr_per_symbol=mean_bps / cfg.pulse_rate, skr_bps=mean_bps,
        secret_bits=float(sum(r.secret_bits for r in reports)),
        flags=last.flags, details=last.details,
    )
    return DvExperimentResult(qber=qber, rate=rate,
                              block_rates_bps=tuple(block_rates), counts=dict(totals))
