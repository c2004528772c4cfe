"""Hybrid Sagnac-loop encoder model.

Covers both operating modes of the dual-path encoder: the asymmetric-loop
polarization mode (balanced H/V superpositions set by the early/late phase
difference), the symmetric-loop phase mode (a sigma_x flip plus a chosen
phase), the delay-line bypass switches, decoy-intensity pulses, and the
electrical pulse timing set by the delay-line length.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .core import SPEED_OF_LIGHT

_NORM_TOL = 1e-12
#: Two states are treated as physically equal when |<a|b>|^2 >= 1 - this.
PHASE_EQ_TOL = 1e-10


@dataclass(frozen=True)
class JonesState:
    """Polarization qubit with complex amplitudes on |H> and |V>."""

    h: complex
    v: complex

    def __post_init__(self) -> None:
        norm = abs(self.h) ** 2 + abs(self.v) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"Jones vector not normalized: |h|^2+|v|^2 = {norm}")

    def overlap(self, other: "JonesState") -> complex:
        """Inner product <self|other>."""
        return self.h.conjugate() * other.h + self.v.conjugate() * other.v

    def fidelity(self, other: "JonesState") -> float:
        """|<self|other>|^2, insensitive to global phase."""
        return abs(self.overlap(other)) ** 2

    def equals_up_to_phase(self, other: "JonesState") -> bool:
        return self.fidelity(other) >= 1.0 - PHASE_EQ_TOL


_INV_SQRT2 = 1.0 / math.sqrt(2.0)

H = JonesState(1.0, 0.0)
V = JonesState(0.0, 1.0)
D = JonesState(_INV_SQRT2, _INV_SQRT2)
A = JonesState(_INV_SQRT2, -_INV_SQRT2)
R = JonesState(_INV_SQRT2, -1j * _INV_SQRT2)
L = JonesState(_INV_SQRT2, 1j * _INV_SQRT2)


class SwitchState(Enum):
    DELAY = "delay"
    BYPASS = "bypass"


class EncoderMode(Enum):
    POL_PATH = "pol"
    PH_PATH = "ph"


class InvalidSwitchConfig(ValueError):
    """The two bypass switches disagree, leaving no consistent optical path."""


def set_mode(sw1: SwitchState, sw2: SwitchState) -> EncoderMode:
    """Resolve the encoder mode from the two delay-line switches."""
    if sw1 is SwitchState.DELAY and sw2 is SwitchState.DELAY:
        return EncoderMode.POL_PATH
    if sw1 is SwitchState.BYPASS and sw2 is SwitchState.BYPASS:
        return EncoderMode.PH_PATH
    raise InvalidSwitchConfig(f"inconsistent switch states: {sw1.value}, {sw2.value}")


def pol_state(phi_e: float, phi_l: float, mode: EncoderMode = EncoderMode.POL_PATH) -> JonesState:
    """Polarization-mode output (|H> + e^{i(phi_l - phi_e)} |V>) / sqrt(2).

    Only the early/late phase difference is physical; any common offset is a
    global phase.
    """
    if mode is not EncoderMode.POL_PATH:
        raise ValueError("polarization output requires the delay-line (POL) path")
    return JonesState(_INV_SQRT2, cmath.exp(1j * (phi_l - phi_e)) * _INV_SQRT2)


def phase_state(psi_in: JonesState, phi: float, mode: EncoderMode = EncoderMode.PH_PATH) -> JonesState:
    """Phase-mode output: sigma_x applied to the input, times e^{i phi}."""
    if mode is not EncoderMode.PH_PATH:
        raise ValueError("phase output requires the bypass (PH) path")
    ph = cmath.exp(1j * phi)
    return JonesState(psi_in.v * ph, psi_in.h * ph)


@dataclass(frozen=True)
class CoherentSymbol:
    """Coherent state of complex amplitude alpha, in shot-noise-linked units.

    Quadratures are x = 2 Re(alpha), p = 2 Im(alpha) so that the vacuum has
    unit variance per quadrature and a symmetric constellation of mean
    photon number mu has per-quadrature modulation variance V_A = 2 mu.
    """

    alpha: complex

    @property
    def x(self) -> float:
        return 2.0 * self.alpha.real

    @property
    def p(self) -> float:
        return 2.0 * self.alpha.imag

    @property
    def mean_photons(self) -> float:
        return abs(self.alpha) ** 2


#: Drive-phase labels of the four QPSK settings, in symbol-index order.
QPSK_DRIVE_PHASES = (math.pi / 2, 3 * math.pi / 2, -3 * math.pi / 2, -math.pi / 2)

# Optical constellation angles realized by the four drive settings: one
# point per quadrant at pi/2 spacing, anchored so indices 0 and 1 sit at
# pi/2 and 3*pi/2.  (The drive labels alone collapse pairwise mod 2*pi.)
QPSK_SYMBOL_PHASES = (math.pi / 2, 3 * math.pi / 2, 0.0, math.pi)


def qpsk_symbol(k: int, v_a: float) -> CoherentSymbol:
    """Coherent symbol k of the QPSK constellation at modulation variance v_a.

    All four symbols share |alpha| = sqrt(v_a / 2); the uniform mixture has
    per-quadrature variance v_a.
    """
    if v_a <= 0:
        raise ValueError(f"modulation variance must be > 0, got {v_a}")
    if k not in (0, 1, 2, 3):
        raise ValueError(f"QPSK symbol index must be in 0..3, got {k}")
    return CoherentSymbol(math.sqrt(v_a / 2.0) * cmath.exp(1j * QPSK_SYMBOL_PHASES[k]))


class IntensityClass(Enum):
    SIGNAL = "signal"
    DECOY = "decoy"


@dataclass(frozen=True)
class DvPulse:
    """One attenuated pulse: polarization state, mean photon number, class."""

    state: JonesState
    intensity: float
    intensity_class: IntensityClass
    slot_index: int = 0

    def __post_init__(self) -> None:
        if self.intensity <= 0:
            raise ValueError(f"pulse intensity must be > 0, got {self.intensity}")


#: Early/late phase differences producing the three protocol states.
DV_PHASE_DIFF = {"D": 0.0, "R": -math.pi / 2, "L": math.pi / 2}


def dv_symbol(name: str, mu: float, cls: IntensityClass, slot_index: int = 0) -> DvPulse:
    """Protocol pulse for state name in {D, R, L} at mean photon number mu."""
    if name not in DV_PHASE_DIFF:
        raise ValueError(f"unknown DV state {name!r}; expected one of D, R, L")
    state = pol_state(0.0, DV_PHASE_DIFF[name])
    return DvPulse(state=state, intensity=mu, intensity_class=cls, slot_index=slot_index)


@dataclass(frozen=True)
class EncoderTiming:
    """Delay-line geometry fixing the early/late electrical pulse spacing."""

    delta_l: float  # meters
    n_f: float  # slow-axis refractive index

    def __post_init__(self) -> None:
        if self.delta_l < 0:
            raise ValueError("delay-line length must be >= 0")
        if self.n_f < 1:
            raise ValueError("refractive index must be >= 1")


def pulse_separation(timing: EncoderTiming) -> float:
    """Electrical pulse separation n_f * delta_l / c, in seconds."""
    return timing.n_f * timing.delta_l / SPEED_OF_LIGHT
