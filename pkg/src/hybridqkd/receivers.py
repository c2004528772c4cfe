"""Receiver models: heterodyne detection chain and the single-photon receiver."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import RandomSource
from .encoder import A, D, JonesState, L, R


class CalibrationError(ValueError):
    """Shot-noise calibration failed (vacuum variance not above dark variance)."""


def clearance_db(v_el: float) -> float:
    """Receiver clearance 10*log10((1 + V_el)/V_el); a derived diagnostic."""
    if v_el <= 0:
        return float("inf")
    return float(10.0 * np.log10((1.0 + v_el) / v_el))


@dataclass(frozen=True)
class HetParams:
    """Heterodyne receiver: efficiency, electronic noise, ADC front end."""

    eta: float
    v_el: float = 0.0
    adc_bits: int = 8
    adc_fullscale: float = 1.0  # volts
    volts_per_snu: float = 0.05  # sqrt(shot-noise variance) in volts
    adc_enabled: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"detection efficiency must be in (0, 1], got {self.eta}")
        if self.v_el < 0:
            raise ValueError(f"electronic noise must be >= 0, got {self.v_el}")
        if self.adc_bits < 1:
            raise ValueError("ADC resolution must be at least 1 bit")

    @property
    def clearance_db(self) -> float:
        return clearance_db(self.v_el)


def heterodyne_measure_quadratures(x_in, p_in, det: HetParams, rng: RandomSource):
    """Measure both quadratures of the incoming field (arrays or scalars).

    The conditional mean is sqrt(eta/2) times the input quadrature; the
    conditional variance about it is 1 + V_el in shot-noise units (channel
    excess noise rides in on x_in/p_in).  When the ADC is enabled, each
    sample is converted to volts, quantized, and converted back.
    """
    x_in = np.asarray(x_in, dtype=float)
    p_in = np.asarray(p_in, dtype=float)
    gen = rng.generator
    scale = np.sqrt(det.eta / 2.0)
    std = np.sqrt(1.0 + det.v_el)
    x = scale * x_in + std * gen.standard_normal(x_in.shape)
    p = scale * p_in + std * gen.standard_normal(p_in.shape)
    if det.adc_enabled:
        x = adc_quantize(x * det.volts_per_snu, det) / det.volts_per_snu
        p = adc_quantize(p * det.volts_per_snu, det) / det.volts_per_snu
    return x, p


@dataclass(frozen=True)
class QuadratureSample:
    x: float
    p: float
    symbol_index: int = -1


def heterodyne_measure(x_in: float, p_in: float, det: HetParams, rng: RandomSource,
                       symbol_index: int = -1) -> QuadratureSample:
    x, p = heterodyne_measure_quadratures(np.atleast_1d(x_in), np.atleast_1d(p_in), det, rng)
    return QuadratureSample(float(x[0]), float(p[0]), symbol_index)


def adc_quantize(v, det: HetParams):
    """Midtread uniform quantizer over +/- fullscale; clips at the rails."""
    v = np.asarray(v, dtype=float)
    half = 2 ** (det.adc_bits - 1)
    step = 2.0 * det.adc_fullscale / (2 ** det.adc_bits)
    code = np.clip(np.round(v / step), -half, half)
    out = code * step
    return float(out) if out.ndim == 0 else out


def calibrate_snu(vacuum_records, dark_records) -> tuple[float, float]:
    """Shot-noise calibration from vacuum and dark voltage records.

    Returns (volts_per_snu, v_el_estimate) where the shot-noise variance is
    Var(vacuum) - Var(dark) and the electronic noise is Var(dark) in those
    units.
    """
    vacuum = np.asarray(vacuum_records, dtype=float)
    dark = np.asarray(dark_records, dtype=float)
    if vacuum.size == 0 or dark.size == 0:
        raise CalibrationError("calibration needs non-empty vacuum and dark records")
    var_vac = float(np.var(vacuum, ddof=1)) if vacuum.size > 1 else 0.0
    var_dark = float(np.var(dark, ddof=1)) if dark.size > 1 else 0.0
    shot = var_vac - var_dark
    if shot <= 0:
        raise CalibrationError(
            f"vacuum variance ({var_vac:g} V^2) does not exceed dark variance ({var_dark:g} V^2)")
    return math.sqrt(shot), var_dark / shot


@dataclass(frozen=True)
class SpadParams:
    """Time-multiplexed single-photon receiver with passive basis choice."""

    eta_det: float
    dark_prob: float = 0.0  # per detector, per gate
    misalignment_angle: float = 0.0
    basis_split: float = 0.5  # probability of the key (R/L) basis

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta_det <= 1.0:
            raise ValueError(f"detector efficiency must be in [0, 1], got {self.eta_det}")
        if not 0.0 <= self.dark_prob <= 1.0:
            raise ValueError("dark-count probability must be in [0, 1]")
        if not 0.0 <= self.basis_split <= 1.0:
            raise ValueError("basis split must be in [0, 1]")


class Basis(Enum):
    KEY = "Z"  # {R, L}
    CHECK = "X"  # {D, A}


@dataclass(frozen=True)
class DetectionEvent:
    basis: Basis
    outcome: int  # 0 = first basis state (R or D), 1 = second (L or A)
    click: bool


def misalign(state: JonesState, theta: float) -> JonesState:
    """Apply the receiver misalignment rotation to a polarization state.

    The rotation is exp(-i theta sigma_x) exp(-i theta sigma_y), which
    leaks sin^2(theta) of each key-basis state into its partner and the
    same fraction of each check-basis state into its partner.
    """
    c, s = math.cos(theta), math.sin(theta)
    # exp(-i theta sigma_y): [[c, -s], [s, c]]
    h1 = c * state.h - s * state.v
    v1 = s * state.h + c * state.v
    # exp(-i theta sigma_x): [[c, -i s], [-i s, c]]
    h2 = c * h1 - 1j * s * v1
    v2 = -1j * s * h1 + c * v1
    return JonesState(h2, v2)


def _born_prob_second(state: JonesState, basis: Basis) -> float:
    """Probability of the second outcome (L or A) for the given state."""
    target = L if basis is Basis.KEY else A
    return state.fidelity(target)


def spad_measure(state: JonesState, n_photons: int, det: SpadParams, rng: RandomSource) -> DetectionEvent:
    """Projective measurement in a passively chosen basis.

    A click fires if any of the incident photons survives the efficiency
    thinning or a dark count triggers either gate.  Double clicks (signal
    and dark on opposite detectors) are resolved by a fair coin.
    """
    if n_photons < 0:
        raise ValueError("photon count must be >= 0")
    gen = rng.generator
    basis = Basis.KEY if gen.uniform() < det.basis_split else Basis.CHECK
    rotated = misalign(state, det.misalignment_angle)
    p_second = _born_prob_second(rotated, basis)

    signal = n_photons > 0 and gen.uniform() < 1.0 - (1.0 - det.eta_det) ** n_photons
    dark = gen.uniform(size=2) < det.dark_prob  # one gate per detector

    if signal:
        outcome = int(gen.uniform() < p_second)
        # dark count on the opposite detector makes a double click
        if dark[1 - outcome]:
            outcome = int(gen.uniform() < 0.5)
        return DetectionEvent(basis, outcome, True)
    if dark.any():
        if dark.all():
            outcome = int(gen.uniform() < 0.5)
        else:
            outcome = int(dark[1])
        return DetectionEvent(basis, outcome, True)
    return DetectionEvent(basis, 0, False)
