"""Local-knowledge baselines: exact power splits, phase rules, suboptimality."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twobeam.errors import DimensionMismatchError, ReciprocityError
from twobeam.heuristics import equal_power_bf, greedy_phase_bf, max_power_bf
from twobeam.model import (
    ChannelSet,
    IndividualPower,
    SumPower,
    rate_pair,
    relay_powers,
)
from twobeam.nonrecip import algorithm1_sum_power
from twobeam.oracle import hull_bruteforce
from twobeam.recip import (
    individual_power_beamformer,
    matched_phases,
    wsismin_individual,
    wsismin_sum_power,
)
from twobeam.recip import sum_power_beamformer

from helpers import draw_nonreciprocal, draw_reciprocal, pareto_chain_contains, unit_params


class TestPowerPostconditions:
    def test_equal_power_splits_budget_evenly(self):
        rng = np.random.default_rng(70)
        ch = draw_reciprocal(rng, 5)
        sp = unit_params(5)
        w = equal_power_bf(ch, sp, 10.0)
        np.testing.assert_allclose(relay_powers(ch, sp, w), 2.0, rtol=1e-12)

    def test_max_power_hits_caps(self):
        rng = np.random.default_rng(71)
        ch = draw_reciprocal(rng, 4)
        sp = unit_params(4)
        caps = np.array([2.5, 3.0, 0.5, 1.0])
        w = max_power_bf(ch, sp, caps)
        np.testing.assert_allclose(relay_powers(ch, sp, w), caps, rtol=1e-12)

    def test_greedy_inherits_magnitude_rule_from_budget(self):
        rng = np.random.default_rng(72)
        ch = draw_nonreciprocal(rng, 3)
        sp = unit_params(3)
        w_sum = greedy_phase_bf(ch, sp, SumPower(p_r=6.0))
        np.testing.assert_allclose(relay_powers(ch, sp, w_sum), 2.0, rtol=1e-12)
        caps = np.array([1.0, 4.0, 0.25])
        w_ind = greedy_phase_bf(ch, sp, IndividualPower(p=caps))
        np.testing.assert_allclose(relay_powers(ch, sp, w_ind), caps, rtol=1e-12)

    @given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 6))
    @settings(max_examples=50, deadline=None)
    def test_equal_split_holds_for_any_draw(self, seed, k):
        rng = np.random.default_rng(seed)
        ch = draw_reciprocal(rng, k)
        sp = unit_params(k, sigma_relay=float(rng.uniform(0.5, 2.0)))
        w = equal_power_bf(ch, sp, 7.5)
        np.testing.assert_allclose(relay_powers(ch, sp, w), 7.5 / k, rtol=1e-12)

    def test_caps_length_mismatch_rejected(self):
        rng = np.random.default_rng(73)
        ch = draw_reciprocal(rng, 3)
        sp = unit_params(3)
        with pytest.raises(DimensionMismatchError):
            max_power_bf(ch, sp, np.array([1.0, 2.0]))
        with pytest.raises(DimensionMismatchError):
            greedy_phase_bf(ch, sp, IndividualPower(p=np.array([1.0, 2.0])))


class TestSingleRelay:
    def test_equal_power_is_max_power_at_same_budget(self):
        rng = np.random.default_rng(74)
        ch = draw_reciprocal(rng, 1)
        sp = unit_params(1)
        w_eq = equal_power_bf(ch, sp, 3.0)
        w_max = max_power_bf(ch, sp, np.array([3.0]))
        np.testing.assert_array_equal(w_eq.w, w_max.w)

    def test_max_power_matches_individual_optimum(self):
        # One relay always saturates its cap in the optimal solution, so the
        # heuristic and the solver build the same beamformer.
        rng = np.random.default_rng(75)
        ch = draw_reciprocal(rng, 1)
        sp = unit_params(1)
        caps = np.array([2.0])
        sol = wsismin_individual(ch, sp, caps, 0.5)
        assert sol.alpha[0] == 1.0
        w_opt = individual_power_beamformer(ch, sp, caps, sol)
        w_heur = max_power_bf(ch, sp, caps)
        np.testing.assert_array_equal(w_heur.w, w_opt.w)


class TestGreedyPhases:
    def test_reciprocal_candidates_collapse_to_matched_rule(self):
        rng = np.random.default_rng(76)
        ch = draw_reciprocal(rng, 5)
        sp = unit_params(5)
        w_greedy = greedy_phase_bf(ch, sp, SumPower(p_r=10.0))
        w_matched = equal_power_bf(ch, sp, 10.0)
        np.testing.assert_allclose(w_greedy.w, w_matched.w, rtol=0, atol=1e-12)

    def test_stronger_composite_direction_wins(self):
        # Equal noise denominators (unit-magnitude relay-bound channels) make
        # the comparison depend on |h2 h1r| vs |h1 h2r| alone.
        ch = ChannelSet(
            h1=np.array([1.0 + 0.0j]),
            h2=np.array([2.0 * np.exp(1j * 0.7)]),
            h1r=np.array([np.exp(1j * 1.1)]),
            h2r=np.array([1.0 + 0.0j]),
        )
        sp = unit_params(1)
        w = greedy_phase_bf(ch, sp, SumPower(p_r=4.0))
        assert np.angle(w.w[0]) == pytest.approx(-(0.7 + 1.1), abs=1e-12)

    def test_tie_breaks_toward_direction_one(self):
        # Axis-aligned entries keep both selection quantities bit-identical
        # while the two candidate phases differ by pi.
        ch = ChannelSet(
            h1=np.array([2.0j]),
            h2=np.array([2.0 + 0.0j]),
            h1r=np.array([1.0 + 0.0j]),
            h2r=np.array([1.0j]),
        )
        sp = unit_params(1)
        w = greedy_phase_bf(ch, sp, SumPower(p_r=4.0))
        assert np.angle(w.w[0]) == pytest.approx(0.0, abs=1e-15)
        assert w.w[0].real > 0


class TestReciprocityGuard:
    def test_fixed_phase_rules_need_reciprocal_channels(self):
        rng = np.random.default_rng(77)
        ch = draw_nonreciprocal(rng, 3)
        sp = unit_params(3)
        with pytest.raises(ReciprocityError):
            equal_power_bf(ch, sp, 10.0)
        with pytest.raises(ReciprocityError):
            max_power_bf(ch, sp, np.ones(3))

    def test_greedy_accepts_nonreciprocal_channels(self):
        rng = np.random.default_rng(78)
        ch = draw_nonreciprocal(rng, 3)
        sp = unit_params(3)
        w = greedy_phase_bf(ch, sp, SumPower(p_r=10.0))
        assert np.all(np.isfinite(w.w))


class TestSuboptimality:
    def _sum_power_hull(self, ch, sp, p_r):
        pts = []
        for mu in np.linspace(0.0, 1.0, 51):
            sol = wsismin_sum_power(ch, sp, p_r, float(mu))
            r = rate_pair(ch, sp, sum_power_beamformer(ch, sol))
            pts.append([r.r1, r.r2])
        pts = np.array(pts)
        anchors = np.array([[0.0, pts[:, 1].max()], [pts[:, 0].max(), 0.0]])
        return hull_bruteforce(np.vstack([pts, anchors]))

    def test_equal_power_rates_inside_optimal_sum_region(self):
        rng = np.random.default_rng(79)
        for k in (2, 3, 5):
            ch = draw_reciprocal(rng, k)
            sp = unit_params(k)
            chain = self._sum_power_hull(ch, sp, 10.0)
            r = rate_pair(ch, sp, equal_power_bf(ch, sp, 10.0))
            assert pareto_chain_contains(chain, r.r1, r.r2, 1e-6)

    def test_max_power_rates_inside_optimal_individual_region(self):
        rng = np.random.default_rng(80)
        ch = draw_reciprocal(rng, 3)
        sp = unit_params(3)
        caps = np.array([2.0, 1.0, 3.0])
        pts = []
        for mu in np.linspace(0.0, 1.0, 51):
            sol = wsismin_individual(ch, sp, caps, float(mu))
            r = rate_pair(ch, sp, individual_power_beamformer(ch, sp, caps, sol))
            pts.append([r.r1, r.r2])
        pts = np.array(pts)
        anchors = np.array([[0.0, pts[:, 1].max()], [pts[:, 0].max(), 0.0]])
        chain = hull_bruteforce(np.vstack([pts, anchors]))
        r = rate_pair(ch, sp, max_power_bf(ch, sp, caps))
        assert pareto_chain_contains(chain, r.r1, r.r2, 1e-6)

    def test_greedy_never_beats_relaxed_optimum(self):
        # The greedy pair is feasible, so the profile through it cannot exceed
        # the bisected relaxation value by more than the bisection gap.
        rng = np.random.default_rng(81)
        for _ in range(5):
            ch = draw_nonreciprocal(rng, 3)
            sp = unit_params(3)
            w = greedy_phase_bf(ch, sp, SumPower(p_r=10.0))
            r = rate_pair(ch, sp, w)
            total = r.r1 + r.r2
            kappa = r.r1 / total
            r_sum, _ = algorithm1_sum_power(ch, sp, 10.0, kappa)
            assert total <= r_sum + 1e-4 + 1e-6
