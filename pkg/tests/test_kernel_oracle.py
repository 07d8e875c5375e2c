"""Operator-kernel oracle tests: numeric kernel, region pieces, path equivalence."""

import math

import numpy as np
import pytest

from tunneltimes.barriers import BarrierStack
from tunneltimes.kernel_oracle import (
    KernelParams,
    KernelPiece,
    Region,
    contiguous_tkf,
    delta_tau_zeta,
    free_toa_expectation,
    region_map_calibration,
    weyl_tkf_numeric,
)
from tunneltimes.traversal import dwell_time
from tunneltimes.wavepackets import GaussianPacket, signed_density_pair

# asymmetric stack: all lengths distinct so symbol mix-ups cannot hide
STACK = BarrierStack.from_pairs([(2.4, 0.9), (1.3, 1.1)], right_edge=0.7)


def zero_potential(s):
    return np.zeros_like(np.asarray(s, dtype=float))


class TestNumericKernel:
    def test_free_kernel_recovery(self):
        for eta in (-1000.0, -3.7, -0.2, 0.4, 12.0, 1000.0):
            val = weyl_tkf_numeric(zero_potential, eta, 1.3)
            assert val == pytest.approx(eta / 2.0, abs=1e-12 * max(1.0, abs(eta)))

    def test_zero_zeta_gives_free_value_for_any_potential(self):
        for eta in (-2.5, -1.2, -0.3):
            val = weyl_tkf_numeric(STACK.potential, eta, 0.0,
                                   breakpoints=STACK.edges())
            assert val == pytest.approx(eta / 2.0, abs=1e-12)

    def test_left_region_matches_closed_form(self):
        params = KernelParams.from_stack(STACK)
        # far-left piece with the calibrated constant (total barrier width)
        w_total = params.w1 + params.w2
        piece = KernelPiece(Region.IV, params)
        for eta in (-4.0, -6.5):
            for zeta in (0.4, 1.1, 2.3):
                numeric = weyl_tkf_numeric(STACK.potential, eta, zeta,
                                           breakpoints=STACK.edges())
                printed = contiguous_tkf(piece, eta, zeta)
                # printed uses L = b + w1 + w2; the integral gives w1 + w2
                assert numeric == pytest.approx(printed - params.b / 2.0, rel=1e-9)

    def test_linear_ramp_matches_bessel_antiderivative(self):
        # V(s) = c*s: with A = c*zeta^2/2 (natural units) the kernel is
        # +-sqrt(A|eta|)*I1(2*sqrt(A|eta|))/(2A) on the rising side and the
        # J1 analogue where the argument flips sign. Independent closed form
        # via d/dy[sqrt(y) I1(2 sqrt(y))] = I0(2 sqrt(y)).
        from scipy.special import i1, j1

        c, zeta = 0.8, 1.3
        ramp = lambda s: c * np.asarray(s, dtype=float)
        big_a = c * zeta**2 / 2.0
        for eta in (0.7, 2.4):
            z = big_a * eta
            exact = math.sqrt(z) * i1(2.0 * math.sqrt(z)) / (2.0 * big_a)
            assert weyl_tkf_numeric(ramp, eta, zeta) == pytest.approx(exact, rel=1e-10)
        for eta in (-0.7, -2.4):
            z = big_a * abs(eta)
            exact = -math.sqrt(z) * j1(2.0 * math.sqrt(z)) / (2.0 * big_a)
            assert weyl_tkf_numeric(ramp, eta, zeta) == pytest.approx(exact, rel=1e-10)

    def test_kernel_even_in_zeta(self):
        params = KernelParams.from_stack(STACK)
        for region in Region:
            piece = KernelPiece(region, params)
            for eta, zeta in [(-0.3, 0.7), (-1.5, 1.9), (-5.0, 0.2)]:
                assert contiguous_tkf(piece, eta, zeta) == pytest.approx(
                    contiguous_tkf(piece, eta, -zeta), rel=1e-15)

    def test_region_iv_zero_barrier_limit(self):
        flat = BarrierStack.from_pairs([(0.0, 0.9), (0.0, 1.1)], right_edge=0.7)
        params = KernelParams.from_stack(flat)
        piece = KernelPiece(Region.IV, params)
        # J0(0) = 1 collapses the Bessel terms to (eta + L)/2 - (w1+w2)/2
        eta = -4.0
        expected = (eta + params.L) / 2.0 - (params.w1 + params.w2) / 2.0
        assert contiguous_tkf(piece, eta, 1.7) == pytest.approx(expected, rel=1e-14)
        # the numeric kernel for zero potential is eta/2: the printed L = b + w1 + w2
        # misses by b/2, which is exactly the diagonal-limit consistency datum
        numeric = weyl_tkf_numeric(flat.potential, eta, 1.7, breakpoints=flat.edges())
        assert numeric == pytest.approx(eta / 2.0, abs=1e-12)
        assert expected - numeric == pytest.approx(params.b / 2.0, abs=1e-12)


@pytest.fixture(scope="module")
def calibration():
    return region_map_calibration(STACK)


class TestRegionCalibration:

    def test_interval_assignment(self, calibration):
        regions = [entry.region for entry in calibration.entries]
        assert regions == [Region.I, Region.II, Region.III, Region.IV]

    def test_all_intervals_matched_by_candidates(self, calibration):
        for entry in calibration.entries:
            assert entry.best_max_err < calibration.tolerance

    def test_gap_piece_is_exact(self, calibration):
        entry = calibration.entries[0]
        assert entry.printed_matches
        assert entry.best_label == "eta/2"

    def test_near_slab_width_coefficient_is_b(self, calibration):
        entry = calibration.entries[1]
        # printed form carries w1 where the integral produces b
        assert not entry.printed_matches
        assert "width=b" in entry.best_label
        assert "kappa1" in entry.best_label

    def test_far_slab_printed_form_is_correct(self, calibration):
        entry = calibration.entries[2]
        assert entry.printed_matches

    def test_far_region_constant_is_total_width(self, calibration):
        entry = calibration.entries[3]
        assert not entry.printed_matches  # printed constant is b + w1 + w2
        assert entry.best_label == "offset=w1+w2"

    def test_requires_two_segments(self):
        single = BarrierStack.from_pairs([(1.0, 1.0)], right_edge=1.0)
        with pytest.raises(ValueError):
            region_map_calibration(single)

    def test_piece_lookup_by_position(self, calibration):
        assert calibration.piece_for(-0.3).region is Region.I
        assert calibration.piece_for(-5.0).region is Region.IV


class TestDeltaTau:
    def test_zero_barrier_reduces_to_gap_flight(self):
        flat = BarrierStack.from_pairs([(0.0, 0.9), (0.0, 1.1)], right_edge=0.7)
        packet = GaussianPacket(q0=-50.0, sigma=1.0, k0=6.0)
        breakdown = delta_tau_zeta(packet, flat)
        # J0(0) = 1 makes every R* equal Q*, so delta_tau = b * Im Q* / v0
        v0 = packet.k0
        expected = flat.right_edge * breakdown.q_star.imag / v0
        assert breakdown.delta_tau == pytest.approx(expected, rel=1e-12)
        for r in breakdown.r_star:
            assert r == pytest.approx(breakdown.q_star, rel=1e-10)

    def test_classical_factors(self):
        stack = BarrierStack.from_pairs([(1.0, 1.0), (2.0, 1.0)], right_edge=1.0)
        k0 = 20.0 * stack.kappa_max
        packet = GaussianPacket(q0=-80.0, sigma=1.0, k0=k0)
        breakdown = delta_tau_zeta(packet, stack)
        assert breakdown.q_star.imag == pytest.approx(1.0, abs=0.01)
        for r, kap in zip(breakdown.r_star, stack.kappas):
            assert r.imag == pytest.approx(k0 / math.sqrt(k0**2 - kap**2), rel=0.01)

    def test_barrier_term_equals_k_space_dwell(self):
        stack = STACK
        packet = GaussianPacket(q0=-70.0, sigma=1.2, k0=5.0)  # k0*sigma = 6
        breakdown = delta_tau_zeta(packet, stack)
        pair = signed_density_pair(packet)
        tau_k = dwell_time(pair, stack)
        assert breakdown.tau_barrier_part == pytest.approx(tau_k, rel=1e-6)

    def test_breakdown_identity(self):
        packet = GaussianPacket(q0=-70.0, sigma=1.2, k0=5.0)
        breakdown = delta_tau_zeta(packet, STACK)
        assert breakdown.delta_tau == pytest.approx(
            breakdown.tau_free_part - breakdown.tau_barrier_part, rel=1e-14)

    def test_overlapping_packet_rejected(self):
        packet = GaussianPacket(q0=-4.0, sigma=1.0, k0=5.0)
        with pytest.raises(ValueError, match="sigma"):
            delta_tau_zeta(packet, STACK)


class TestFreeToa:
    def test_classical_flight_time(self):
        packet = GaussianPacket(q0=-50.0, sigma=2.0, k0=10.0)
        tau = free_toa_expectation(packet)
        assert tau == pytest.approx(5.0, rel=0.01)

    def test_doubling_k0_halves_the_time(self):
        slow = free_toa_expectation(GaussianPacket(q0=-50.0, sigma=2.0, k0=10.0))
        fast = free_toa_expectation(GaussianPacket(q0=-50.0, sigma=2.0, k0=20.0))
        assert fast == pytest.approx(0.5 * slow, rel=5e-3)

    def test_broader_packet_converges_to_classical(self):
        # corrections scale like (sigma_k/k0)^2 = 1/(2*sigma*k0)^2
        errs = []
        for sigma in (1.0, 2.0, 4.0):
            packet = GaussianPacket(q0=-50.0, sigma=sigma, k0=10.0)
            errs.append(abs(free_toa_expectation(packet) - 5.0))
        assert errs[1] < errs[0]
        assert errs[2] < errs[1]
