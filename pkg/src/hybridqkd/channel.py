"""Quantum channel models: CV loss plus excess noise, DV photon thinning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RandomSource
from .encoder import CoherentSymbol, DvPulse


def db_to_transmittance(loss_db: float) -> float:
    """Power transmittance 10^(-loss_db/10)."""
    if loss_db < 0:
        raise ValueError(f"channel loss must be >= 0 dB, got {loss_db}")
    return float(10.0 ** (-loss_db / 10.0))


@dataclass(frozen=True)
class ChannelParams:
    """Transmittance and excess noise, the latter referred to Alice's output."""

    t: float
    xi_a: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"transmittance must be in [0, 1], got {self.t}")
        if self.xi_a < 0:
            raise ValueError(f"excess noise must be >= 0, got {self.xi_a}")

    @classmethod
    def from_db(cls, loss_db: float, xi_a: float = 0.0) -> "ChannelParams":
        return cls(t=db_to_transmittance(loss_db), xi_a=xi_a)

    @property
    def loss_db(self) -> float:
        return float(-10.0 * np.log10(self.t)) if self.t > 0 else float("inf")


def cv_propagate_quadratures(x, p, ch: ChannelParams, rng: RandomSource):
    """Propagate quadrature arrays: scale by sqrt(T), add excess noise.

    The added noise has variance T * xi_a per quadrature, so the end-to-end
    chain reproduces V_B = 1 + V_el + (eta T / 2)(V_A + xi_a) after
    heterodyne detection and the covariance inversion returns xi_a exactly
    on noiseless moments.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    scale = np.sqrt(ch.t)
    std = np.sqrt(ch.t * ch.xi_a)
    gen = rng.generator
    x_out = scale * x + std * gen.standard_normal(x.shape)
    p_out = scale * p + std * gen.standard_normal(p.shape)
    return x_out, p_out


def cv_propagate(sym: CoherentSymbol, ch: ChannelParams, rng: RandomSource) -> CoherentSymbol:
    """Single-symbol convenience wrapper around the quadrature propagation."""
    x, p = cv_propagate_quadratures(np.atleast_1d(sym.x), np.atleast_1d(sym.p), ch, rng)
    return CoherentSymbol((x[0] + 1j * p[0]) / 2.0)


def dv_propagate(pulse: DvPulse, ch: ChannelParams, rng: RandomSource) -> int:
    """Photon count reaching the receiver input: Poisson(mu * T).

    The polarization state is unchanged; misalignment is a receiver-side
    parameter.
    """
    return rng.poisson(pulse.intensity * ch.t)


def dv_propagate_counts(intensities, ch: ChannelParams, rng: RandomSource):
    """Vectorized photon counts for an array of pulse intensities."""
    mu = np.asarray(intensities, dtype=float)
    return rng.generator.poisson(mu * ch.t)
