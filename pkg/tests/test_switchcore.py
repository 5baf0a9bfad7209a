"""Controlled-order switch: joint unitary, chi, energy bookkeeping,
control-term minimization, and post-measurement reports."""
from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import (
    random_density,
    random_hermitian,
    random_qubit_scenario,
    random_unitary,
)
from switchwork.qmat import (
    DensityMatrix,
    HermitianOperator,
    UnitaryOperator,
    kron,
    partial_trace,
)
from switchwork.states import BlochState, ControlHamiltonianParams, hamiltonian_control
from switchwork.switchcore import (
    NearZeroPostSelectionError,
    SwitchScenario,
    activation_report,
    build_switch_unitary,
    chi,
    delta_c_min,
    measure_control,
    post_switch_state,
)
from switchwork.verifysuite import numeric_delta_c_minimum, random_passive_scenario

_ANGLE = st.floats(min_value=0.0, max_value=math.pi, allow_nan=False)
_PHASE = st.floats(min_value=0.0, max_value=2.0 * math.pi, exclude_max=True, allow_nan=False)
_SEED = st.integers(min_value=0, max_value=2**31 - 1)


class TestSwitchUnitary:
    def test_block_structure(self, rng):
        u1 = random_unitary(rng, 3)
        u2 = random_unitary(rng, 3)
        u_qs = build_switch_unitary(UnitaryOperator(u1), UnitaryOperator(u2)).mat
        w12 = u2 @ u1
        w21 = u1 @ u2
        p0 = np.diag([1.0, 0.0]).astype(complex)
        p1 = np.diag([0.0, 1.0]).astype(complex)
        expected = kron(w12, p0) + kron(w21, p1)
        assert np.max(np.abs(u_qs - expected)) < 1e-12

    def test_equal_orders_collapse_to_plain_product(self, rng):
        u = random_unitary(rng, 2)
        u_qs = build_switch_unitary(UnitaryOperator(u), UnitaryOperator(u)).mat
        expected = kron(u @ u, np.eye(2, dtype=complex))
        assert np.max(np.abs(u_qs - expected)) < 1e-12


class TestChi:
    def test_definition(self, rng):
        rho = DensityMatrix(random_density(rng, 4))
        u1 = UnitaryOperator(random_unitary(rng, 4))
        u2 = UnitaryOperator(random_unitary(rng, 4))
        w12 = u2.mat @ u1.mat
        w21 = u1.mat @ u2.mat
        expected = complex(np.trace(w12 @ rho.mat @ w21.conj().T))
        assert abs(chi(u1, u2, rho) - expected) < 1e-12

    def test_commuting_unitaries_give_unity(self, rng):
        d = np.diag(np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=3)))
        e = np.diag(np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=3)))
        rho = DensityMatrix(random_density(rng, 3))
        assert abs(chi(UnitaryOperator(d), UnitaryOperator(e), rho) - 1.0) < 1e-12

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(seed=_SEED)
    def test_modulus_bounded_by_one(self, seed):
        rng = np.random.default_rng(seed)
        rho = DensityMatrix(random_density(rng, 3))
        u1 = UnitaryOperator(random_unitary(rng, 3))
        u2 = UnitaryOperator(random_unitary(rng, 3))
        assert abs(chi(u1, u2, rho)) <= 1.0 + 1e-10


class TestPostSwitchState:
    def test_matches_direct_conjugation(self, rng):
        s = random_qubit_scenario(rng)
        u_qs = build_switch_unitary(s.u1, s.u2).mat
        joint = kron(s.rho_s.mat, s.control.to_density().mat)
        expected = u_qs @ joint @ u_qs.conj().T
        assert np.max(np.abs(post_switch_state(s).mat - expected)) < 1e-12

    def test_reduced_control_coherence_is_chi_weighted(self, rng):
        s = random_qubit_scenario(rng)
        rho_c = partial_trace(post_switch_state(s).mat, 2, 2, "b")
        c = s.control.to_density().mat
        x = chi(s.u1, s.u2, s.rho_s)
        assert abs(rho_c[0, 1] - x * c[0, 1]) < 1e-12
        assert abs(rho_c[0, 0] - c[0, 0]) < 1e-12


class TestActivationReport:
    def test_energy_bookkeeping_identity(self, rng):
        for _ in range(25):
            s = random_qubit_scenario(rng)
            rep = activation_report(s)
            assert abs(rep.delta_qs - (rep.delta_s + rep.delta_c)) < 1e-12

    def test_order_energies_are_plain_conjugations(self, rng):
        s = random_qubit_scenario(rng)
        rep = activation_report(s)
        w12 = s.u2.mat @ s.u1.mat
        w21 = s.u1.mat @ s.u2.mat
        e12 = float(np.trace(w12 @ s.rho_s.mat @ w12.conj().T @ s.h_s.mat).real)
        e21 = float(np.trace(w21 @ s.rho_s.mat @ w21.conj().T @ s.h_s.mat).real)
        assert abs(rep.e12 - e12) < 1e-12
        assert abs(rep.e21 - e21) < 1e-12

    def test_tilde_states_split_joint_energy(self, rng):
        for _ in range(10):
            s = random_qubit_scenario(rng)
            rep = activation_report(s)
            joint = post_switch_state(s).mat
            h_joint = kron(s.h_s.mat, np.eye(2)) + kron(np.eye(2), s.h_c.mat)
            total = float(np.trace(joint @ h_joint).real)
            split = float(
                np.trace(rep.tilde_rho_s.mat @ s.h_s.mat).real
                + np.trace(rep.tilde_rho_c.mat @ s.h_c.mat).real
            )
            assert abs(total - split) < 1e-11

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(seed=_SEED)
    def test_passive_inputs_never_activate(self, seed):
        rng = np.random.default_rng(seed)
        s = random_passive_scenario(rng)
        assert activation_report(s).delta_qs >= -1e-8

    def test_identity_unitaries_give_zero(self, rng):
        rho = DensityMatrix(random_density(rng, 3))
        eye = UnitaryOperator(np.eye(3, dtype=complex))
        s = SwitchScenario(
            rho_s=rho,
            control=BlochState(1.0, 0.5),
            u1=eye,
            u2=eye,
            h_s=HermitianOperator(random_hermitian(rng, 3)),
            h_c=HermitianOperator(random_hermitian(rng, 2)),
        )
        rep = activation_report(s)
        assert abs(rep.delta_qs) < 1e-12
        assert abs(rep.chi - 1.0) < 1e-12


class TestDeltaCMin:
    def test_attained_value_and_optimizer_consistency(self):
        h_c = hamiltonian_control(ControlHamiltonianParams(1.0, 0.8, 0.3))
        res = delta_c_min(h_c, 0.2 + 0.5j)
        k = h_c.mat[1, 0] * (0.2 + 0.5j - 1.0)
        assert abs(res.attained - (-abs(k))) < 1e-12
        assert abs(res.tabulated - (-math.sqrt(2.0) * abs(k))) < 1e-12
        assert abs(res.delta_c_at_optimizer(h_c, 0.2 + 0.5j) - res.attained) < 1e-12

    def test_attained_matches_numeric_minimization(self, rng):
        for _ in range(10):
            t_abs = rng.uniform(0.1, 2.0)
            t_phase = rng.uniform(0.0, 2.0 * math.pi)
            x = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
            x /= max(1.0, abs(x))
            h_c = hamiltonian_control(ControlHamiltonianParams(1.0, t_abs, t_phase))
            res = delta_c_min(h_c, x)
            numeric = numeric_delta_c_minimum(h_c, x)
            assert abs(numeric - res.attained) < 1e-6

    def test_tabulated_overshoots_by_sqrt2(self):
        h_c = hamiltonian_control(ControlHamiltonianParams(1.0, 1.0, 0.0))
        res = delta_c_min(h_c, -0.3 + 0.1j)
        assert res.tabulated == pytest.approx(math.sqrt(2.0) * res.attained, rel=1e-12)

    def test_chi_equal_one_gives_zero_minimum(self):
        h_c = hamiltonian_control(ControlHamiltonianParams(1.0, 1.0, 0.0))
        res = delta_c_min(h_c, 1.0 + 0.0j)
        assert res.attained == 0.0


class TestMeasureControl:
    def test_post_selection_weight_formula(self, rng):
        for _ in range(20):
            s = random_qubit_scenario(rng)
            m = BlochState(rng.uniform(0.1, math.pi - 0.1), rng.uniform(0.0, 2.0 * math.pi))
            rep = measure_control(s, m)
            proj = m.to_density().mat
            joint = post_switch_state(s).mat
            big_proj = kron(np.eye(2, dtype=complex), proj)
            expected = float(np.trace(joint @ big_proj).real)
            assert abs(rep.n_m - expected) < 1e-12

    def test_conditioned_state_energy(self, rng):
        s = random_qubit_scenario(rng)
        m = BlochState(1.0, 0.3)
        rep = measure_control(s, m)
        assert abs(rep.e_sm - float(np.trace(rep.rho_sm.mat @ s.h_s.mat).real)) < 1e-11

    def test_divergence_raises_tagged_error(self):
        # chi = 1 with control |+> and measurement |->: N_M = 0 exactly.
        eye = UnitaryOperator(np.eye(2, dtype=complex))
        s = SwitchScenario(
            rho_s=DensityMatrix(np.eye(2, dtype=complex) / 2.0),
            control=BlochState(math.pi / 2.0, 0.0),
            u1=eye,
            u2=eye,
            h_s=HermitianOperator(np.diag([0.0, 1.0]).astype(complex)),
            h_c=HermitianOperator(np.diag([0.0, 1.0]).astype(complex)),
        )
        with pytest.raises(NearZeroPostSelectionError) as exc:
            measure_control(s, BlochState(math.pi / 2.0, math.pi))
        assert exc.value.n_m <= 1e-12

    def test_interference_term_cancels_unconditional_energy(self, rng):
        # The measured energy difference decomposes over (delta_12, delta_21,
        # interference) with no residual dependence on the pre-switch energy.
        for _ in range(10):
            s = random_qubit_scenario(rng)
            m = BlochState(rng.uniform(0.3, math.pi - 0.3), rng.uniform(0.0, 2.0 * math.pi))
            rep_a = activation_report(s)
            try:
                rep_m = measure_control(s, m)
            except NearZeroPostSelectionError:
                continue
            cc = s.control.to_density().mat
            mm = m.to_density().mat
            psi = m.phi - s.control.phi
            num = (
                cc[0, 0].real * mm[0, 0].real * (rep_a.e12 - rep_a.e_s)
                + cc[1, 1].real * mm[1, 1].real * (rep_a.e21 - rep_a.e_s)
                + 0.5
                * math.sin(s.control.theta)
                * math.sin(m.theta)
                * (rep_m.delta_f * cmath.exp(1j * psi)).real
            )
            assert abs(rep_m.delta_sm - num / rep_m.n_m) < 1e-10

    def test_condition_flags_match_reported_sign(self, rng):
        hits = 0
        for _ in range(60):
            s = random_qubit_scenario(rng)
            m = BlochState(rng.uniform(0.2, math.pi - 0.2), rng.uniform(0.0, 2.0 * math.pi))
            try:
                rep = measure_control(s, m)
            except NearZeroPostSelectionError:
                continue
            if all(rep.conditions):
                hits += 1
                assert rep.condition_ii_lhs != 0.0
        assert hits > 0  # the three flags must be attainable simultaneously
