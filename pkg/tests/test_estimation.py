import math

import numpy as np
import pytest

from hybridqkd.core import RandomSource
from hybridqkd.encoder import QPSK_SYMBOL_PHASES
from hybridqkd.estimation import (estimate_channel, estimate_covariance, estimate_qber,
                                  recover_global_phase, rotate_samples, wilson_interval)


def _chain(n, v_a, t, xi, eta, v_el, seed, rotation=0.0):
    """Synthetic QPSK chain; returns (alpha, x_a, p_a, x_b, p_b)."""
    rng = RandomSource(seed)
    gen = rng.generator
    ks = gen.integers(0, 4, size=n)
    alpha = math.sqrt(v_a / 2) * np.exp(1j * np.asarray(QPSK_SYMBOL_PHASES)[ks])
    x_a, p_a = 2 * alpha.real, 2 * alpha.imag
    x_c = math.sqrt(t) * x_a + math.sqrt(t * xi) * gen.standard_normal(n)
    p_c = math.sqrt(t) * p_a + math.sqrt(t * xi) * gen.standard_normal(n)
    if rotation:
        f = (x_c + 1j * p_c) * np.exp(1j * rotation)
        x_c, p_c = f.real, f.imag
    std = math.sqrt(1 + v_el)
    x_b = math.sqrt(eta / 2) * x_c + std * gen.standard_normal(n)
    p_b = math.sqrt(eta / 2) * p_c + std * gen.standard_normal(n)
    return alpha, x_a, p_a, x_b, p_b


class TestPhaseRecovery:
    def test_unrotated_is_zero(self):
        alpha, _, _, x_b, p_b = _chain(1_000_000, 0.45, 0.72, 0.012, 0.3, 0.081, 1)
        theta = recover_global_phase(alpha, (x_b + 1j * p_b) / 2)
        assert theta == pytest.approx(0.0, abs=0.01)

    def test_injected_rotation_recovered(self):
        alpha, _, _, x_b, p_b = _chain(1_000_000, 0.45, 0.72, 0.012, 0.3, 0.081, 2, rotation=0.3)
        theta = recover_global_phase(alpha, (x_b + 1j * p_b) / 2)
        assert theta == pytest.approx(0.3, abs=0.01)

    def test_quarter_turn_ambiguity(self):
        # the QPSK set is invariant under quarter turns: pi/2 folds to ~0
        alpha, _, _, x_b, p_b = _chain(1_000_000, 0.45, 0.72, 0.012, 0.3, 0.081, 3,
                                       rotation=math.pi / 2)
        theta = recover_global_phase(alpha, (x_b + 1j * p_b) / 2)
        assert theta == pytest.approx(0.0, abs=0.01)

    def test_rotate_samples_inverts(self):
        z = np.exp(1j * np.linspace(0, 2, 200))
        back = rotate_samples(z * np.exp(1j * 0.4), 0.4)
        assert np.allclose(back, z)

    def test_too_few_pairs_raises(self):
        with pytest.raises(ValueError):
            recover_global_phase(np.ones(50), np.ones(50))

    def test_degenerate_raises(self):
        with pytest.raises(ValueError):
            recover_global_phase(np.ones(200), np.zeros(200))


class TestCovariance:
    def test_noiseless_identity_chain(self):
        alpha, x_a, p_a, x_b, p_b = _chain(1_000_000, 0.45, 1.0, 0.0, 1.0, 0.0, 4)
        stats = estimate_covariance(x_a, p_a, x_b, p_b)
        assert stats.xaxb == pytest.approx(math.sqrt(0.5) * 0.45, abs=0.003)
        assert stats.xaxb == pytest.approx(0.3182, abs=0.003)

    def test_table_chain_frozen_moments(self):
        _, x_a, p_a, x_b, p_b = _chain(1_500_000, 0.45, 0.72, 0.012, 0.30, 0.081, 5)
        stats = estimate_covariance(x_a, p_a, x_b, p_b, batches=30)
        assert stats.xaxb == pytest.approx(0.1479, abs=0.003)
        assert stats.vb == pytest.approx(1.1309, abs=0.005)
        assert len(stats.batch_xaxb) == 30

    def test_too_few_symbols_raises(self):
        z = np.zeros(500)
        with pytest.raises(ValueError):
            estimate_covariance(z, z, z, z)

    def test_length_mismatch_raises(self):
        with pytest.raises(ValueError):
            estimate_covariance(np.zeros(2000), np.zeros(2000), np.zeros(2000), np.zeros(1999))


class TestChannelInversion:
    def test_ideal_chain(self):
        _, x_a, p_a, x_b, p_b = _chain(1_000_000, 0.45, 1.0, 0.0, 1.0, 0.0, 6)
        stats = estimate_covariance(x_a, p_a, x_b, p_b, batches=30)
        est = estimate_channel(stats, v_a=0.45, eta=1.0, v_el=0.0)
        assert est.t_hat == pytest.approx(1.0, abs=max(0.02, 3 * est.t_std))
        assert est.xi_hat == pytest.approx(0.0, abs=max(0.01, 3 * est.xi_std))

    def test_zero_excess_noise_chain(self):
        _, x_a, p_a, x_b, p_b = _chain(1_500_000, 0.45, 0.72, 0.0, 0.30, 0.081, 7)
        stats = estimate_covariance(x_a, p_a, x_b, p_b, batches=30)
        est = estimate_channel(stats, v_a=0.45, eta=0.30, v_el=0.081)
        assert est.xi_hat == pytest.approx(0.0, abs=max(0.01, 3 * est.xi_std))

    def test_table_chain_recovery(self):
        _, x_a, p_a, x_b, p_b = _chain(1_500_000, 0.45, 0.72, 0.012, 0.30, 0.081, 8)
        stats = estimate_covariance(x_a, p_a, x_b, p_b, batches=30)
        est = estimate_channel(stats, v_a=0.45, eta=0.30, v_el=0.081)
        assert est.t_hat == pytest.approx(0.72, abs=0.02)
        assert est.xi_hat == pytest.approx(0.012, abs=max(0.01, 3 * est.xi_std))

    def test_exact_on_noiseless_moments(self):
        from hybridqkd.estimation import CovStats
        v_a, t, xi, eta, v_el = 0.45, 0.72, 0.012, 0.30, 0.081
        stats = CovStats(xaxb=math.sqrt(eta * t / 2) * v_a,
                         vb=1 + v_el + eta * t / 2 * (v_a + xi), n_symbols=1)
        est = estimate_channel(stats, v_a=v_a, eta=eta, v_el=v_el)
        assert est.t_hat == pytest.approx(t, abs=1e-12)
        assert est.xi_hat == pytest.approx(xi, abs=1e-12)

    def test_table_round_trip(self):
        from hybridqkd.estimation import CovStats
        stats = CovStats(xaxb=0.1479, vb=1.1309, n_symbols=1)
        est = estimate_channel(stats, v_a=0.45, eta=0.30, v_el=0.081)
        assert est.t_hat == pytest.approx(0.72, abs=0.001)
        assert est.xi_hat == pytest.approx(0.012, abs=0.001)

    def test_unphysical_transmittance_flagged(self):
        stats = estimate_covariance(np.full(2000, 1.0), np.full(2000, 1.0),
                                    np.full(2000, 1.0) + 1e-3 * np.arange(2000) % 2,
                                    np.full(2000, 1.0))
        est = estimate_channel(stats, v_a=0.45, eta=0.30, v_el=0.081)
        assert "estimation-failure" in est.flags

    def test_negative_excess_noise_flagged(self):
        gen = RandomSource(9).generator
        n = 100_000
        x_a = gen.standard_normal(n)
        x_b = 0.1 * x_a + 0.5 * gen.standard_normal(n)  # vb well below 1 + v_el
        stats = estimate_covariance(x_a, x_a, x_b, x_b)
        est = estimate_channel(stats, v_a=1.0, eta=0.5, v_el=0.081)
        assert "negative-excess-noise" in est.flags
        assert est.xi_hat < 0

    def test_bad_args_raise(self):
        stats = estimate_covariance(np.zeros(2000) + 1, np.zeros(2000) + 1,
                                    np.zeros(2000) + 1, np.zeros(2000) + 1)
        with pytest.raises(ValueError):
            estimate_channel(stats, v_a=0.0, eta=0.5, v_el=0.0)
        with pytest.raises(ValueError):
            estimate_channel(stats, v_a=0.45, eta=1.5, v_el=0.0)


class TestQber:
    def test_perfect_chain(self):
        events = [(0, "Z", 0), (1, "Z", 1), (0, "X", 0), (1, "X", 1)] * 100
        rep = estimate_qber(events)
        assert rep.qber_z == 0.0
        assert rep.qber_x == 0.0

    def test_random_guess_channel(self):
        gen = RandomSource(10).generator
        events = [(int(s), "Z" if b else "X", int(m))
                  for s, b, m in zip(gen.integers(0, 2, 20_000), gen.integers(0, 2, 20_000),
                                     gen.integers(0, 2, 20_000))]
        rep = estimate_qber(events)
        assert rep.qber_z == pytest.approx(0.5, abs=0.02)
        assert rep.qber_x == pytest.approx(0.5, abs=0.02)
        lo, hi = rep.ci_z
        assert lo <= 0.5 <= hi

    def test_empty_basis_marked(self):
        rep = estimate_qber([(0, "Z", 0)] * 1000)
        assert rep.z_available and not rep.x_available
        assert math.isnan(rep.qber_x)

    def test_unknown_basis_raises(self):
        with pytest.raises(ValueError):
            estimate_qber([(0, "Y", 0)])

    def test_empty_record_raises(self):
        with pytest.raises(ValueError):
            estimate_qber([])


class TestWilson:
    def test_zero_errors_lower_bound(self):
        lo, hi = wilson_interval(0, 1000)
        assert lo == 0.0
        assert 0 < hi < 0.01

    def test_contains_point_estimate(self):
        lo, hi = wilson_interval(60, 1000)
        assert lo < 0.06 < hi

    def test_empty_is_nan(self):
        lo, hi = wilson_interval(0, 0)
        assert math.isnan(lo) and math.isnan(hi)
