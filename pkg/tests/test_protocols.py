import math

import numpy as np
import pytest

from qfridge import oracle, protocols
from qfridge.majorization import InfeasibleTargetError
from qfridge.protocols import RepetitionPlan
from qfridge.thermal import (
    ConfigurationError,
    DomainError,
    INFINITE,
    MachineSpec,
    QubitSpec,
    boltzmann_population,
    hamiltonian_diagonal,
    temperature_from_population,
)


def _r(gap, temp):
    return boltzmann_population(gap, temp)


class TestOneQubitIncoherent:
    def test_equal_gaps_cannot_cool(self):
        spec = MachineSpec.one_qubit(1.0, 1.0, 3.0)
        out = protocols.one_qubit_incoherent(spec)
        assert out.r_final == pytest.approx(_r(1.0, 1.0), abs=1e-15)
        assert out.work_cost == 0.0
        assert "no cooling possible" in out.flag

    def test_no_degeneracy_is_identity(self):
        spec = MachineSpec.one_qubit(0.7, 1.0, 3.0)
        out = protocols.one_qubit_incoherent(spec)
        assert out.r_final == pytest.approx(_r(1.0, 1.0), abs=1e-15)
        assert "no degeneracy" in out.flag

    def test_zero_gap_state_proportional_to_identity(self):
        spec = MachineSpec(QubitSpec(0.0), (QubitSpec(1.0),), 1.0, 3.0)
        out = protocols.one_qubit_incoherent(spec)
        assert out.r_final == 0.5
        assert "identity" in out.flag


class TestOneQubitCoherent:
    def test_no_cooling_requested(self):
        spec = MachineSpec.one_qubit(1.4, 1.0)
        out = protocols.one_qubit_coherent(spec, _r(1.0, 1.0))
        assert out.work_cost == pytest.approx(0.0, abs=1e-14)

    def test_full_swap_temperature_scaling(self):
        spec = MachineSpec.one_qubit(2.0, 1.0)
        out = protocols.one_qubit_coherent(spec, _r(2.0, 1.0))
        assert out.t_final == pytest.approx(0.5, rel=1e-12)

    def test_against_dense_swap_simulation(self):
        spec = MachineSpec.one_qubit(2.0, 1.0)
        r_dense, cost_dense = oracle.simulate_one_qubit_partial_swap(1.0, 2.0, 1.0, 1.0)
        out = protocols.one_qubit_coherent(spec, _r(2.0, 1.0))
        assert out.r_final == pytest.approx(r_dense, abs=1e-14)
        assert out.work_cost == pytest.approx(cost_dense, abs=1e-14)

    def test_work_cost_formula(self):
        spec = MachineSpec.one_qubit(1.4, 1.0)
        r = _r(1.0, 1.0)
        out = protocols.one_qubit_coherent(spec, 0.77)
        assert out.work_cost == pytest.approx((0.77 - r) * 0.4, abs=1e-13)

    def test_inverted_gaps_rejected(self):
        spec = MachineSpec.one_qubit(0.9, 1.0)
        with pytest.raises(DomainError):
            protocols.one_qubit_coherent(spec, 0.8)


class TestTwoQubitIncoherentSingle:
    def test_room_temperature_hot_bath_does_nothing(self):
        spec = MachineSpec.two_qubit(0.4, 1.0, 1.0)
        out = protocols.two_qubit_incoherent_single(spec)
        assert out.r_final == pytest.approx(_r(1.0, 1.0), abs=1e-14)
        assert out.work_cost == 0.0

    def test_infinite_hot_bath_limit(self):
        spec = MachineSpec.two_qubit(0.4, 1.0, INFINITE)
        out = protocols.two_qubit_incoherent_single(spec)
        r, r_b = _r(1.0, 1.0), _r(1.4, 1.0)
        assert out.r_final == pytest.approx(0.5 * (r + r_b), abs=1e-14)
        r_c = _r(0.4, 1.0)
        assert out.work_cost == pytest.approx(0.4 * (r_c - 0.5), abs=1e-14)

    def test_against_dense_simulation(self):
        spec = MachineSpec.two_qubit(0.4, 1.0, 2.0)
        r_dense, heat_dense, work_dense = oracle.simulate_incoherent_single(spec)
        out = protocols.two_qubit_incoherent_single(spec)
        assert out.r_final == pytest.approx(r_dense, abs=1e-14)
        assert out.heat_drawn == pytest.approx(heat_dense, abs=1e-14)
        assert out.work_cost == pytest.approx(work_dense, abs=1e-14)

    def test_missing_hot_bath_is_configuration_error(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        with pytest.raises(ConfigurationError):
            protocols.two_qubit_incoherent_single(spec)


class TestTwoQubitCoherentSingle:
    @pytest.mark.parametrize("e_c", [0.4, 1.7])
    def test_endpoint_cost_both_regimes(self, e_c):
        spec = MachineSpec.two_qubit(e_c, 1.0)
        r, r_b, r_c = _r(1.0, 1.0), _r(1.0 + e_c, 1.0), _r(e_c, 1.0)
        out = protocols.two_qubit_coherent_single(spec, r_b)
        if e_c <= 1.0:
            expected = e_c * (r_b - r)
        else:
            expected = (e_c - 1.0) * (r_c - r) + e_c * (r_b - r_c)
        assert out.work_cost == pytest.approx(expected, abs=1e-13)
        assert out.t_final == pytest.approx(1.0 / (1.0 + e_c), rel=1e-12)

    def test_cost_continuous_with_slope_kink_at_half(self):
        # finite-difference slopes on a dense mu grid: continuous value,
        # discontinuous first derivative at mu = 1/2
        spec = MachineSpec.two_qubit(1.7, 1.0)
        r, r_b, r_c = _r(1.0, 1.0), _r(2.7, 1.0), _r(1.7, 1.0)

        def cost(mu):
            if mu <= 0.5:
                r_target = r + 2 * mu * (r_c - r)
            else:
                r_target = r_c + (2 * mu - 1) * (r_b - r_c)
            return protocols.two_qubit_coherent_single(spec, r_target).work_cost

        eps = 1e-6
        left = (cost(0.5) - cost(0.5 - eps)) / eps
        right = (cost(0.5 + eps) - cost(0.5)) / eps
        assert abs(cost(0.5 + eps) - cost(0.5 - eps)) < 1e-5  # continuity
        assert right > left * 1.5  # derivative kink

    def test_infeasible_target(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        with pytest.raises(InfeasibleTargetError):
            protocols.two_qubit_coherent_single(spec, 0.99)


class TestRepeatedIncoherent:
    def test_zero_steps_pays_only_preheat(self):
        spec = MachineSpec.two_qubit(0.4, 1.0, 3.0)
        out = protocols.repeated_incoherent(spec, RepetitionPlan(n=0))
        r_c, r_ch = _r(0.4, 1.0), _r(0.4, 3.0)
        assert out.r_final == pytest.approx(_r(1.0, 1.0), abs=1e-15)
        assert out.heat_drawn == pytest.approx(0.4 * (r_c - r_ch), abs=1e-15)

    def test_infinite_repetitions_at_infinite_bath_reach_coherent_star(self):
        spec = MachineSpec.two_qubit(0.4, 1.0, INFINITE)
        out = protocols.repeated_incoherent(spec, RepetitionPlan(n=INFINITE))
        assert out.t_final == pytest.approx(1.0 / 1.4, rel=1e-14)
        assert out.r_final == pytest.approx(_r(1.4, 1.0), rel=1e-14)

    def test_three_steps_against_dense_simulation(self):
        spec = MachineSpec.two_qubit(0.4, 1.0, 3.0)
        out = protocols.repeated_incoherent(spec, RepetitionPlan(n=3))
        rs, heats = oracle.simulate_repeated_incoherent(spec, 3)
        assert out.r_final == pytest.approx(rs[-1], abs=1e-14)
        assert out.heat_drawn == pytest.approx(heats[-1], abs=1e-14)
        for point, r_dense in zip(out.trajectory, rs):
            assert point.r == pytest.approx(r_dense, abs=1e-14)

    def test_plan_control_overrides_machine_hot_bath(self):
        spec = MachineSpec.two_qubit(0.4, 1.0, 2.0)
        override = protocols.repeated_incoherent(
            spec, RepetitionPlan(n=2, control={"t_hot": 5.0})
        )
        direct = protocols.repeated_incoherent(
            MachineSpec.two_qubit(0.4, 1.0, 5.0), RepetitionPlan(n=2)
        )
        assert override.r_final == direct.r_final

    def test_missing_hot_bath_rejected(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        with pytest.raises(ConfigurationError):
            protocols.repeated_incoherent(spec, RepetitionPlan(n=2))

    def test_trajectory_monotone(self):
        spec = MachineSpec.two_qubit(0.7, 1.0, 4.0)
        out = protocols.repeated_incoherent(spec, RepetitionPlan(n=8))
        rs = [p.r for p in out.trajectory]
        assert all(b >= a - 1e-15 for a, b in zip(rs, rs[1:]))


class TestAutonomousSteadyState:
    def test_matches_infinite_repetition_exactly(self):
        spec = MachineSpec.two_qubit(0.9, 1.3, 4.2)
        auto = protocols.autonomous_steady_state(spec)
        rep = protocols.repeated_incoherent(spec, RepetitionPlan(n=INFINITE))
        assert auto.r_final == rep.r_final
        assert auto.heat_drawn == rep.heat_drawn

    def test_room_temperature_bath_gives_room_temperature(self):
        spec = MachineSpec.two_qubit(0.4, 1.0, 1.0)
        out = protocols.autonomous_steady_state(spec)
        assert out.t_final == pytest.approx(1.0, rel=1e-14)

    def test_closed_form_value(self):
        # 1/(2 - 1/4) with E = 1, E_C = 1, T_R = 1, T_H = 4
        spec = MachineSpec.two_qubit(1.0, 1.0, 4.0)
        out = protocols.autonomous_steady_state(spec)
        assert out.t_final == pytest.approx(1.0 / 1.75, rel=1e-15)

    def test_long_dense_run_converges_to_steady_state(self):
        spec = MachineSpec.two_qubit(0.8, 1.0, 5.0)
        auto = protocols.autonomous_steady_state(spec)
        rs, heats = oracle.simulate_repeated_incoherent(spec, 120)
        assert rs[-1] == pytest.approx(auto.r_final, abs=1e-12)
        assert heats[-1] == pytest.approx(auto.heat_drawn, abs=1e-12)


class TestRepeatedCoherent:
    def test_single_repetition_is_single_cycle_endpoint(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        out = protocols.repeated_coherent(spec, 1)
        single = protocols.two_qubit_coherent_single(spec, _r(1.4, 1.0))
        assert out.r_final == pytest.approx(single.r_final, abs=1e-14)
        assert out.work_cost == pytest.approx(single.work_cost, abs=1e-14)

    def test_asymptote_population(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        out = protocols.repeated_coherent(spec, INFINITE)
        assert out.r_final == pytest.approx(
            1.0 / (1.0 + math.exp(-1.8)), abs=1e-15
        )
        assert out.t_final == 1.0 * 1.0 / (1.4 + 0.4)

    def test_four_steps_against_dense_simulation(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        out = protocols.repeated_coherent(spec, 4)
        rs, works = oracle.simulate_repeated_coherent(spec, 4)
        for point, r_dense, w_dense in zip(out.trajectory, rs, works):
            assert point.r == pytest.approx(r_dense, abs=1e-13)
            assert point.delta_f == pytest.approx(w_dense, abs=1e-13)

    def test_dense_simulation_large_ec_regime(self):
        spec = MachineSpec.two_qubit(1.6, 1.0)
        out = protocols.repeated_coherent(spec, 4)
        rs, works = oracle.simulate_repeated_coherent(spec, 4)
        assert out.r_final == pytest.approx(rs[-1], abs=1e-13)
        assert out.work_cost == pytest.approx(works[-1], abs=1e-13)


class TestAlgorithmicCooling:
    def test_full_precool_asymptotic_temperature(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        out = protocols.algorithmic_cooling(spec, INFINITE, nu=1.0)
        assert out.t_final == 1.0 * 1.0 / (2.0 * 1.4)

    def test_half_of_single_cycle_coherent_temperature(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        t_coh_star = 1.0 * 1.0 / 1.4
        out = protocols.algorithmic_cooling(spec, INFINITE, nu=1.0)
        assert out.t_final == t_coh_star / 2.0

    def test_zero_mixing_reproduces_repeated_coherent_asymptote(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        coh = protocols.repeated_coherent(spec, INFINITE)
        out = protocols.algorithmic_cooling(spec, INFINITE, nu=0.0, r0=coh.r_final)
        assert out.r_final == pytest.approx(coh.r_final, abs=1e-13)

    def test_two_cycles_against_dense_four_step_simulation(self):
        spec = MachineSpec.two_qubit(1.0, 1.0)
        out = protocols.algorithmic_cooling(spec, 2, nu=1.0)
        rs, works = oracle.simulate_algorithmic(spec, 2, nu=1.0)
        for point, r_dense, w_dense in zip(out.trajectory, rs, works):
            assert point.r == pytest.approx(r_dense, abs=1e-13)
            assert point.delta_f == pytest.approx(w_dense, abs=1e-13)

    def test_partial_precool_against_reset_model_simulation(self):
        spec = MachineSpec.two_qubit(0.9, 1.0)
        for nu in (0.0, 0.35, 0.75):
            out = protocols.algorithmic_cooling(spec, 6, nu=nu)
            rs, works = oracle.simulate_algorithmic(spec, 6, nu=nu, precool="reset")
            assert out.r_final == pytest.approx(rs[-1], abs=1e-13)
            assert out.work_cost == pytest.approx(works[-1], abs=1e-13)

    def test_custom_starting_population(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        r0 = 0.85
        out = protocols.algorithmic_cooling(spec, 3, nu=1.0, r0=r0)
        rs, works = oracle.simulate_algorithmic(spec, 3, nu=1.0, r0=r0)
        assert out.r_final == pytest.approx(rs[-1], abs=1e-13)
        assert out.work_cost == pytest.approx(works[-1], abs=1e-13)

    def test_zero_cycles_cost_nothing(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        out = protocols.algorithmic_cooling(spec, 0)
        assert out.work_cost == 0.0
        assert out.r_final == pytest.approx(_r(1.0, 1.0), abs=1e-15)


class TestOptimalSequence:
    def test_room_temperature_target_is_free(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        out = protocols.optimal_sequence(spec, 1.0)
        assert out.work_cost == 0.0
        assert out.trajectory == ()

    @pytest.mark.parametrize("e_c", [0.4, 1.6])
    def test_full_sequence_total_cost(self, e_c):
        # phase-wise gradient sums down to the algorithmic asymptote
        e = 1.0
        spec = MachineSpec.two_qubit(e_c, 1.0)
        e_b = e + e_c
        r, r_b, r_c = _r(e, 1.0), _r(e_b, 1.0), _r(e_c, 1.0)
        r_coh_inf = _r(e, 1.0 * e / (e_b + e_c))
        r_algo_inf = _r(e, 1.0 * e / (2 * e_b))
        if e_c > e:
            first = (r_c - r) * (e_c - e) + (r_b - r_c) * (e_b - e)
        else:
            first = (r_b - r) * (e_b - e)
        expected = (
            first
            + (r_coh_inf - r_b) * 2 * e_c
            + (r_algo_inf - r_coh_inf) * ((e_b - e_c) + 2 * e_c)
            + (r_b - r_c) * (e_b - e_c)
        )
        out = protocols.optimal_sequence(spec, 1.0 * e / (2 * e_b))
        assert out.work_cost == pytest.approx(expected, rel=1e-12)

    def test_box_identity_with_algorithmic_asymptote(self):
        # total equals the repeated-coherent cost plus the algorithmic tail
        spec = MachineSpec.two_qubit(0.4, 1.0)
        e, e_b, e_c = 1.0, 1.4, 0.4
        r_b, r_c = _r(e_b, 1.0), _r(e_c, 1.0)
        coh_inf = protocols.repeated_coherent(spec, INFINITE)
        r_algo_inf = _r(e, 1.0 * e / (2 * e_b))
        expected = (
            coh_inf.work_cost
            + e * (r_b - r_c)
            + (2 * e_c + e) * (r_algo_inf - coh_inf.r_final)
        )
        out = protocols.optimal_sequence(spec, 1.0 * e / (2 * e_b))
        assert out.work_cost == pytest.approx(expected, rel=1e-12)

    def test_intermediate_target_uses_tuned_precooling(self):
        # nu found by independent bisection on the asymptotic population
        spec = MachineSpec.two_qubit(0.7, 1.0)
        coh_inf = protocols.repeated_coherent(spec, INFINITE)
        algo_inf = protocols.algorithmic_cooling(spec, INFINITE, nu=1.0)
        t_target = 0.5 * (coh_inf.t_final + algo_inf.t_final)
        r_t = _r(1.0, t_target)

        lo, hi = 0.0, 1.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            r_mid = protocols.algorithmic_cooling(spec, INFINITE, nu=mid).r_final
            if r_mid < r_t:
                lo = mid
            else:
                hi = mid
        nu_bisect = 0.5 * (lo + hi)
        nu_closed = protocols.precool_mixing_for_population(spec, r_t)
        assert nu_closed == pytest.approx(nu_bisect, abs=1e-10)

        # cost decomposition: repeated-coherent part plus the nu-tail
        out = protocols.optimal_sequence(spec, t_target)
        c_pop = protocols.precooled_population(spec, nu_closed)
        r_c = _r(0.7, 1.0)
        expected_tail = 1.0 * (c_pop - r_c) + (1.0 + 2 * 0.7) * (r_t - coh_inf.r_final)
        assert out.work_cost == pytest.approx(
            coh_inf.work_cost + expected_tail, rel=1e-11
        )

        # dense verification of the nu-cycle asymptote
        rs, _ = oracle.simulate_algorithmic(spec, 400, nu=nu_closed, precool="reset")
        assert rs[-1] == pytest.approx(r_t, abs=1e-10)

    def test_unreachable_target_rejected(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        with pytest.raises(InfeasibleTargetError):
            protocols.optimal_sequence(spec, 0.1)

    def test_never_more_expensive_than_algorithmic_from_scratch(self):
        spec = MachineSpec.two_qubit(1.0, 1.0)
        for n in range(1, 9):
            algo = protocols.algorithmic_cooling(spec, n, nu=1.0)
            seq = protocols.optimal_sequence(spec, algo.t_final)
            assert seq.work_cost <= algo.work_cost + 1e-12

    def test_phase_milestones_and_mid_phase_gradients(self):
        e, e_c = 1.0, 1.6
        e_b = e + e_c
        spec = MachineSpec.two_qubit(e_c, 1.0)
        r = _r(e, 1.0)
        r_b, r_c = _r(e_b, 1.0), _r(e_c, 1.0)
        # temperature milestones of the phases in order
        t_after_c = 1.0 * e / e_c
        t_after_b = 1.0 * e / e_b
        t_after_rep = 1.0 * e / (e_b + e_c)
        assert protocols.optimal_sequence(spec, t_after_c).work_cost == pytest.approx(
            (r_c - r) * (e_c - e), rel=1e-12
        )
        assert protocols.optimal_sequence(spec, t_after_b).work_cost == pytest.approx(
            (r_c - r) * (e_c - e) + (r_b - r_c) * (e_b - e), rel=1e-12
        )
        # mid-phase targets advance at the phase gradient
        for t_hi, t_lo, gradient, r_lo in (
            (1.0, t_after_c, e_c - e, r),
            (t_after_c, t_after_b, e_b - e, r_c),
            (t_after_b, t_after_rep, 2 * e_c, r_b),
        ):
            t_mid = 0.5 * (t_hi + t_lo)
            base = protocols.optimal_sequence(spec, t_hi).work_cost
            out = protocols.optimal_sequence(spec, t_mid)
            expected = base + (out.r_final - max(r_lo, _r(e, t_hi))) * gradient
            assert out.work_cost == pytest.approx(expected, rel=1e-11)

    def test_cost_continuous_and_increasing_in_target_population(self):
        spec = MachineSpec.two_qubit(1.6, 1.0)
        floor = 1.0 / (2.0 * 2.6)
        temps = np.linspace(1.0, floor, 400)
        costs = [protocols.optimal_sequence(spec, float(t)).work_cost for t in temps]
        assert all(b >= a - 1e-12 for a, b in zip(costs, costs[1:]))
        jumps = np.abs(np.diff(costs))
        assert jumps.max() < 0.01  # no discontinuity at phase boundaries


class TestInternalResource:
    def test_equilibrium_control_costs_nothing(self):
        spec = MachineSpec.two_qubit(1.0 / 3.0, 1.0)
        inc = protocols.internal_resource(spec, "incoherent", 1.0)
        coh = protocols.internal_resource(spec, "coherent", 0.0)
        assert inc.work_cost == pytest.approx(0.0, abs=1e-14)
        assert coh.work_cost == pytest.approx(0.0, abs=1e-14)

    def test_incoherent_dominates_coherent_at_matched_temperature(self):
        spec = MachineSpec.two_qubit(1.0 / 3.0, 1.0)
        r_c = _r(1.0 / 3.0, 1.0)
        for t_hot in (1.5, 2.5, 6.0, 25.0):
            inc = protocols.internal_resource(spec, "incoherent", t_hot)
            r_ch = _r(1.0 / 3.0, t_hot)
            mu = (r_c - r_ch) / (2.0 * r_c - 1.0)
            coh = protocols.internal_resource(spec, "coherent", mu)
            assert coh.r_final == pytest.approx(inc.r_final, abs=1e-13)
            assert inc.work_cost < coh.work_cost

    def test_incoherent_against_dense_free_energy(self):
        # free energy computed from the dense state, entropy term included
        spec = MachineSpec.two_qubit(1.0 / 3.0, 1.0, 2.0)

        def free_energy(state):
            pops = state.diagonal()
            h = hamiltonian_diagonal(spec.gaps)
            entropy = -float(np.sum(pops * np.log(pops)))
            return float(pops @ h) - spec.t_room * entropy

        cold = oracle.build_thermal_state(spec, (1.0, 1.0, 1.0))
        hot = oracle.build_thermal_state(spec, (1.0, 1.0, 2.0))
        expected = free_energy(hot) - free_energy(cold)
        out = protocols.internal_resource(spec, "incoherent", 2.0)
        assert out.work_cost == pytest.approx(expected, abs=1e-12)

        # final population from the dense degenerate-pair swap
        h = hamiltonian_diagonal(spec.gaps)
        swap = oracle.swap_unitary(8, 2, 5, tag="energy_conserving")
        r_dense, _ = oracle.apply_and_measure(hot, swap, h)
        assert out.r_final == pytest.approx(r_dense, abs=1e-14)

    def test_coherent_against_dense_local_unitary(self):
        spec = MachineSpec.two_qubit(1.0 / 3.0, 1.0)
        mu = 0.37
        state = oracle.build_thermal_state(spec, (1.0,) * 3)
        h = hamiltonian_diagonal(spec.gaps)
        c, s = math.sqrt(1 - mu), math.sqrt(mu)
        local = np.kron(np.eye(4), np.array([[c, s], [-s, c]]))
        rotated = oracle.DenseState(local @ state.matrix @ local.conj().T)
        cost_dense = float(
            (rotated.diagonal() - state.diagonal()) @ h
        )
        swap = oracle.swap_unitary(8, 2, 5)
        r_dense, _ = oracle.apply_and_measure(rotated, swap, h)
        out = protocols.internal_resource(spec, "coherent", mu)
        assert out.work_cost == pytest.approx(cost_dense, abs=1e-13)
        assert out.r_final == pytest.approx(r_dense, abs=1e-13)

    def test_unknown_scenario_rejected(self):
        spec = MachineSpec.two_qubit(0.4, 1.0)
        with pytest.raises(DomainError):
            protocols.internal_resource(spec, "hybrid", 0.5)

    def test_incoherent_infinite_bath_limit(self):
        spec = MachineSpec.two_qubit(1.0 / 3.0, 1.0, INFINITE)
        out = protocols.internal_resource(spec, "incoherent", INFINITE)
        r_c = _r(1.0 / 3.0, 1.0)
        expected = (1.0 / 3.0) * 0.5 + math.log(0.5 / r_c)
        assert out.work_cost == pytest.approx(expected, rel=1e-13)

        def free_energy(state):
            pops = state.diagonal()
            h = hamiltonian_diagonal(spec.gaps)
            entropy = -float(np.sum(pops * np.log(pops)))
            return float(pops @ h) - spec.t_room * entropy

        cold = oracle.build_thermal_state(spec, (1.0, 1.0, 1.0))
        hot = oracle.build_thermal_state(spec, (1.0, 1.0, INFINITE))
        assert out.work_cost == pytest.approx(
            free_energy(hot) - free_energy(cold), abs=1e-12
        )


class TestDegeneracyClassifier:
    def test_resonance_enables_cooling(self):
        result = protocols.degeneracy_classifier(1.0, 1.4, 0.4)
        assert result.cooling_enabled
        assert result.enabling_subspace == (2, 5)
        assert "E_B=E_A+E_C" in result.degeneracies

    def test_target_sum_rule_does_not_cool(self):
        result = protocols.degeneracy_classifier(1.0, 0.5, 0.5)
        assert not result.cooling_enabled
        assert "E_A=E_B+E_C" in result.degeneracies
        assert "E_B=E_C" in result.degeneracies

    def test_all_zero_gaps_disabled(self):
        result = protocols.degeneracy_classifier(0.0, 0.0, 0.0)
        assert not result.cooling_enabled
        assert "E_A=0" in result.degeneracies

    def test_dead_resonance_with_zero_ec(self):
        result = protocols.degeneracy_classifier(1.0, 1.0, 0.0)
        assert not result.cooling_enabled
        assert "E_B=E_A+E_C" in result.degeneracies

    def test_zero_target_gap_with_equal_machine_gaps_cools(self):
        result = protocols.degeneracy_classifier(0.0, 0.7, 0.7)
        assert result.cooling_enabled


class TestOutcomeInvariants:
    def _outcomes(self):
        spec = MachineSpec.two_qubit(0.7, 1.0, 4.0)
        yield protocols.two_qubit_incoherent_single(spec)
        yield protocols.two_qubit_coherent_single(spec, 0.78)
        yield protocols.repeated_incoherent(spec, RepetitionPlan(n=5))
        yield protocols.repeated_incoherent(spec, RepetitionPlan(n=INFINITE))
        yield protocols.autonomous_steady_state(spec)
        yield protocols.repeated_coherent(spec, 4)
        yield protocols.repeated_coherent(spec, INFINITE)
        yield protocols.algorithmic_cooling(spec, 4, nu=1.0)
        yield protocols.algorithmic_cooling(spec, INFINITE, nu=1.0)
        yield protocols.optimal_sequence(spec, 0.5)
        yield protocols.internal_resource(spec, "incoherent", 4.0)
        yield protocols.internal_resource(spec, "coherent", 0.6)

    def test_temperature_consistent_with_population(self):
        for out in self._outcomes():
            expected = temperature_from_population(1.0, out.r_final)
            assert out.t_final == pytest.approx(expected, rel=1e-12)

    def test_trajectories_monotone_and_costed(self):
        for out in self._outcomes():
            rs = [p.r for p in out.trajectory]
            fs = [p.delta_f for p in out.trajectory]
            assert all(b >= a - 1e-15 for a, b in zip(rs, rs[1:]))
            assert all(b >= a - 1e-15 for a, b in zip(fs, fs[1:]))
            assert out.work_cost >= -1e-15


class TestEndpointOrderings:
    def test_coherent_beats_incoherent_on_parameter_grid(self):
        for e_c in np.linspace(0.05, 5.0, 10):
            for t_room in np.linspace(0.2, 5.0, 10):
                spec = MachineSpec.two_qubit(float(e_c), float(t_room), INFINITE)
                r = _r(spec.e, spec.t_room)
                r_b = _r(spec.e_b, spec.t_room)
                r_c = _r(spec.e_c, spec.t_room)
                t_coh_star = spec.t_room * spec.e / spec.e_b
                t_inc_star = temperature_from_population(spec.e, 0.5 * (r + r_b))
                df_coh_star = protocols.single_cycle_coherent_cost(spec)
                df_inc_star = spec.e_c * (r_c - 0.5)
                assert t_coh_star < t_inc_star
                assert df_coh_star < df_inc_star

    def test_repeated_regimes_extend_below_single_cycle(self):
        spec = MachineSpec.two_qubit(0.4, 1.0, INFINITE)
        t_coh_star = 1.0 / 1.4
        t_inc_star = protocols.two_qubit_incoherent_single(spec).t_final
        t_auto_star = protocols.autonomous_steady_state(spec).t_final
        t_coh_inf = protocols.repeated_coherent(spec, INFINITE).t_final
        t_algo_inf = protocols.algorithmic_cooling(spec, INFINITE).t_final
        assert t_auto_star < t_inc_star
        assert t_coh_inf < t_coh_star
        assert t_algo_inf < t_coh_inf
