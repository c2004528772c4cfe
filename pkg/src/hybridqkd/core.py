"""Shared numeric primitives: entropies, symplectic spectra, seeded sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s, vacuum

#: Clamp tolerance for tiny negative arguments caused by floating-point noise.
NEG_TOL = 1e-12

# Single-mode symplectic form in (x, p) ordering.
_OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def binary_entropy(p: float) -> float:
    """Shannon entropy h(p) in bits, with h(0) = h(1) = 0."""
    if p < 0.0 or p > 1.0:
        raise ValueError(f"probability out of range: {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def g_entropy(x: float) -> float:
    """Von Neumann entropy G(x) of a thermal state with mean photon number x.

    G(x) = (x+1) log2(x+1) - x log2(x).  Tiny negative inputs (|x| below
    the clamp tolerance) are treated as 0 so that near-pure states do not
    raise spuriously.
    """
    if x < -NEG_TOL:
        raise ValueError(f"mean photon number must be >= 0, got {x}")
    if x <= 0.0:
        return 0.0
    return float((x + 1.0) * np.log2(x + 1.0) - x * np.log2(x))


def _check_symmetric(gamma: np.ndarray) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {gamma.shape}")
    if not np.allclose(gamma, gamma.T, atol=1e-9):
        raise ValueError("covariance matrix is not symmetric")
    return gamma


def symplectic_eigenvalues(gamma: np.ndarray) -> tuple[float, float]:
    """Symplectic eigenvalues of a two-mode covariance matrix, descending.

    Uses the closed form via the two-mode invariants
    Delta = det A + det B + 2 det C and det Gamma, with Gamma in
    (x1, p1, x2, p2) ordering and block form [[A, C], [C^T, B]].
    """
    gamma = _check_symmetric(gamma)
    a = np.linalg.det(gamma[:2, :2])
    b = np.linalg.det(gamma[2:, 2:])
    c = np.linalg.det(gamma[:2, 2:])
    delta = a + b + 2.0 * c
    disc = max(delta * delta - 4.0 * np.linalg.det(gamma), 0.0)
    root = np.sqrt(disc)
    nu1 = np.sqrt(max((delta + root) / 2.0, 0.0))
    nu2 = np.sqrt(max((delta - root) / 2.0, 0.0))
    return float(nu1), float(nu2)


def symplectic_eigenvalues_direct(gamma: np.ndarray) -> tuple[float, ...]:
    """Symplectic eigenvalues via eigendecomposition of i*Omega*Gamma.

    Works for any even dimension; serves as the cross-check oracle for
    :func:`symplectic_eigenvalues` and handles the conditional matrices in
    the Holevo computation (which can have more than two modes).
    """
    gamma = np.asarray(gamma, dtype=float)
    n_modes = gamma.shape[0] // 2
    if gamma.shape != (2 * n_modes, 2 * n_modes):
        raise ValueError(f"expected an even-dimension square matrix, got {gamma.shape}")
    if not np.allclose(gamma, gamma.T, atol=1e-9):
        raise ValueError("covariance matrix is not symmetric")
    omega = np.kron(np.eye(n_modes), _OMEGA_1)
    ev = np.sort(np.abs(np.linalg.eigvals(1j * omega @ gamma)))[::-1]
    # eigenvalues of i*Omega*Gamma come in +/- pairs; keep one per mode
    return tuple(float(v) for v in ev[::2])


@dataclass
class RandomSource:
    """Seeded random stream with a reproducibility contract.

    Identical seeds produce byte-identical sample streams.  Backed by the
    counter-based Philox generator, so streams derived with :meth:`split`
    are independent and themselves deterministic.
    """

    seed: int
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(self.seed)))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def split(self, n: int) -> list["RandomSource"]:
        """Derive n independent child streams; deterministic in the seed."""
        children = np.random.SeedSequence(self.seed).spawn(n)
        out = []
        for i, seq in enumerate(children):
            child = RandomSource.__new__(RandomSource)
            child.seed = self.seed
            child._gen = np.random.Generator(np.random.Philox(seq))
            out.append(child)
        return out

    def normal(self, mean=0.0, std=1.0, size=None):
        return sample_gaussian(self, mean, std, size)

    def poisson(self, mean, size=None):
        return sample_poisson(self, mean, size)

    def integers(self, low, high, size=None):
        return self._gen.integers(low, high, size=size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size=size)


def sample_gaussian(rng: RandomSource, mean, std, size=None):
    """Draw from N(mean, std^2); std = 0 returns the mean exactly."""
    std_arr = np.asarray(std, dtype=float)
    if np.any(std_arr < 0):
        raise ValueError("standard deviation must be >= 0")
    draw = mean + std_arr * rng.generator.standard_normal(size)
    return float(draw) if size is None and np.ndim(draw) == 0 else draw


def sample_poisson(rng: RandomSource, mean, size=None):
    """Poisson draw(s) with the given mean(s)."""
    mean_arr = np.asarray(mean, dtype=float)
    if np.any(mean_arr < 0):
        raise ValueError("Poisson mean must be >= 0")
    draw = rng.generator.poisson(mean_arr, size=size)
    return int(draw) if size is None and np.ndim(draw) == 0 else draw
