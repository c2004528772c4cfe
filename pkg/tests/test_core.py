import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridqkd.core import (RandomSource, binary_entropy, g_entropy, sample_gaussian,
                            sample_poisson, symplectic_eigenvalues,
                            symplectic_eigenvalues_direct)


class TestBinaryEntropy:
    def test_maximum(self):
        assert binary_entropy(0.5) == 1.0

    def test_boundaries(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_frozen_value(self):
        # independent oracle: -p log2 p - (1-p) log2 (1-p) at p = 0.11
        assert binary_entropy(0.11) == pytest.approx(0.499915958164528, abs=1e-12)

    @pytest.mark.parametrize("p", [-0.1, 1.1])
    def test_out_of_range(self, p):
        with pytest.raises(ValueError):
            binary_entropy(p)

    @given(st.floats(min_value=0.0, max_value=1.0))
    @settings(max_examples=200, deadline=None)
    def test_symmetry_and_bounds(self, p):
        h = binary_entropy(p)
        assert 0.0 <= h <= 1.0
        assert h == pytest.approx(binary_entropy(1.0 - p), abs=1e-12)


class TestGEntropy:
    def test_vacuum(self):
        assert g_entropy(0.0) == 0.0

    def test_one_photon(self):
        assert g_entropy(1.0) == pytest.approx(2.0, abs=1e-12)

    def test_frozen_value(self):
        assert g_entropy(0.5) == pytest.approx(1.3774437510817343, abs=1e-12)

    def test_tiny_negative_clamped(self):
        assert g_entropy(-1e-13) == 0.0

    def test_negative_raises(self):
        with pytest.raises(ValueError):
            g_entropy(-0.01)

    @given(st.floats(min_value=1e-6, max_value=100.0))
    @settings(max_examples=200, deadline=None)
    def test_monotone_increasing(self, x):
        assert g_entropy(x * 1.01) > g_entropy(x)


def _epr(v):
    c = math.sqrt(v * v - 1.0)
    z = np.diag([1.0, -1.0])
    g = np.zeros((4, 4))
    g[:2, :2] = v * np.eye(2)
    g[2:, 2:] = v * np.eye(2)
    g[:2, 2:] = c * z
    g[2:, :2] = c * z
    return g


def _random_cm(rng, dim=4):
    a = rng.standard_normal((dim, dim))
    return a @ a.T + np.eye(dim)


def _beamsplitter_symplectic(theta):
    c, s = math.cos(theta), math.sin(theta)
    sp = np.eye(4)
    sp[:2, :2] = c * np.eye(2)
    sp[:2, 2:] = s * np.eye(2)
    sp[2:, :2] = -s * np.eye(2)
    sp[2:, 2:] = c * np.eye(2)
    return sp


def _squeezer_symplectic(r1, r2):
    return np.diag([math.exp(r1), math.exp(-r1), math.exp(r2), math.exp(-r2)])


class TestSymplecticEigenvalues:
    def test_two_mode_vacuum(self):
        assert symplectic_eigenvalues(np.eye(4)) == pytest.approx((1.0, 1.0))

    def test_thermal_product(self):
        nus = symplectic_eigenvalues(np.diag([1.45] * 4))
        assert nus == pytest.approx((1.45, 1.45))

    def test_pure_epr_unit_spectrum(self):
        # near purity the invariant discriminant loses ~half the precision
        nus = symplectic_eigenvalues(_epr(1.45))
        assert nus == pytest.approx((1.0, 1.0), abs=1e-7)
        direct = symplectic_eigenvalues_direct(_epr(1.45))
        assert direct == pytest.approx((1.0, 1.0), abs=1e-7)

    def test_dual_path_agreement(self):
        rng = np.random.default_rng(42)
        for _ in range(300):
            gamma = _random_cm(rng)
            a = sorted(symplectic_eigenvalues(gamma))
            b = sorted(symplectic_eigenvalues_direct(gamma))
            assert a == pytest.approx(b, abs=1e-9)

    def test_invariance_under_symplectics(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            gamma = _random_cm(rng)
            sp = (_beamsplitter_symplectic(rng.uniform(0, math.pi))
                  @ _squeezer_symplectic(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
                  @ _beamsplitter_symplectic(rng.uniform(0, math.pi)))
            before = sorted(symplectic_eigenvalues(gamma))
            after = sorted(symplectic_eigenvalues(sp @ gamma @ sp.T))
            assert after == pytest.approx(before, rel=1e-8, abs=1e-8)

    def test_rejects_asymmetric(self):
        g = np.eye(4)
        g[0, 1] = 0.5
        with pytest.raises(ValueError):
            symplectic_eigenvalues(g)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            symplectic_eigenvalues(np.eye(3))

    def test_direct_handles_larger_systems(self):
        rng = np.random.default_rng(3)
        gamma = _random_cm(rng, dim=6)
        nus = symplectic_eigenvalues_direct(gamma)
        assert len(nus) == 3
        assert all(n > 0 for n in nus)


class TestRandomSource:
    def test_same_seed_identical_streams(self):
        a = RandomSource(123).generator.standard_normal(1000)
        b = RandomSource(123).generator.standard_normal(1000)
        assert a.tobytes() == b.tobytes()

    def test_different_seeds_differ(self):
        a = RandomSource(1).generator.standard_normal(100)
        b = RandomSource(2).generator.standard_normal(100)
        assert not np.array_equal(a, b)

    def test_split_deterministic_and_independent(self):
        kids1 = RandomSource(9).split(3)
        kids2 = RandomSource(9).split(3)
        draws1 = [k.generator.standard_normal(100) for k in kids1]
        draws2 = [k.generator.standard_normal(100) for k in kids2]
        for d1, d2 in zip(draws1, draws2):
            assert d1.tobytes() == d2.tobytes()
        assert not np.array_equal(draws1[0], draws1[1])

    def test_gaussian_zero_std_exact(self):
        assert sample_gaussian(RandomSource(0), 3.25, 0.0) == 3.25

    def test_gaussian_moments(self):
        draws = sample_gaussian(RandomSource(11), 0.0, 1.0, size=1_000_000)
        assert np.var(draws) == pytest.approx(1.0, abs=0.005)

    def test_gaussian_negative_std_raises(self):
        with pytest.raises(ValueError):
            sample_gaussian(RandomSource(0), 0.0, -1.0)

    def test_poisson_zero_mean(self):
        assert sample_poisson(RandomSource(0), 0.0) == 0

    def test_poisson_moments(self):
        draws = sample_poisson(RandomSource(5), 0.5, size=1_000_000)
        assert np.mean(draws) == pytest.approx(0.5, abs=0.004)
        assert np.mean(draws == 0) == pytest.approx(math.exp(-0.5), abs=0.003)

    def test_poisson_negative_mean_raises(self):
        with pytest.raises(ValueError):
            sample_poisson(RandomSource(0), -0.5)
