"""Acceptance suite: one test per shipped guarantee (run with -v for one
verdict line each).

Two tests in this file assert documented reference claims that the
oracle-validated closed forms refute; they fail by design and each has a
passing companion test pinning the attainable counterpart:

* ``test_criterion_2_...`` asserts the sqrt(2)-scaled reference value for
  the minimized control interference term; the direct minimization attains
  exactly 1/sqrt(2) of it.
* ``test_criterion_6_anti_aligned_negativity...`` asserts that the
  anti-aligned displacement+squeeze slice reaches negative post-measured
  energy differences on the zero-temperature sweep; with the validated
  forms that sweep never goes below zero (the reference ``_tabulated``
  polynomials do go negative, see the companion).
"""
from __future__ import annotations

import itertools
import math
import time

import numpy as np
import pytest

from switchwork.cvcase import (
    DisplacementParams,
    SqueezeParams,
    alpha_min,
    chi_disp_squeeze,
    delta_f_disp_squeeze,
    delta_qs_displacements,
    delta_qs_displacements_symmetric,
    delta_sm_disp_squeeze,
    delta_sm_displacements,
    delta_sm_xi0,
    delta_sm_xipi,
    delta_sm_xipi_tabulated,
    disp_squeeze_scenario,
    displacement_op,
    displacement_scenario,
    e12_disp_squeeze,
    e21_disp_squeeze,
    f_s_disp_squeeze,
    fock_oracle_report,
)
from switchwork.figures import (
    DEFAULT_FIGURE_SEED,
    FIGURE_IDS,
    FigureSpec,
    baseline_path,
    emit_figure,
    figure_dataset,
)
from switchwork.qmat import HermitianOperator
from switchwork.qubitcase import (
    RotationParams,
    delta_qs_rotations,
    implied_epsilon,
    implied_f,
    minimize_delta_qs_u2,
    minimize_delta_sm_u2,
    rotation_unitary,
)
from switchwork.states import (
    BlochState,
    ControlHamiltonianParams,
    QubitSystemParams,
    ThermalParams,
    ergotropy,
    gibbs_fock,
    gibbs_qubit,
    hamiltonian_control,
    hamiltonian_qubit_system,
    passive_state_from_spectrum,
)
from switchwork.switchcore import (
    SwitchScenario,
    activation_report,
    delta_c_min,
    measure_control,
)
from switchwork.verifysuite import (
    numeric_delta_c_minimum,
    random_passive_scenario,
)

_PLUS = BlochState(math.pi / 2.0, 0.0)


# ---------------------------------------------------------------------------
# 1. No scenario with passive system and passive control ever activates.
# ---------------------------------------------------------------------------


def test_criterion_1_passive_inputs_never_activate_over_ten_thousand_scenarios():
    """10^4 randomized scenarios (system dim up to 30, random unitary pairs,
    passive system and control states): the pre-measurement energy
    difference stays above -1e-8, in under 60 s."""
    rng = np.random.default_rng(2026)
    start = time.perf_counter()
    worst = math.inf
    largest_dim = 0
    for _ in range(10_000):
        scenario = random_passive_scenario(rng)
        largest_dim = max(largest_dim, scenario.h_s.mat.shape[0])
        worst = min(worst, activation_report(scenario).delta_qs)
    elapsed = time.perf_counter() - start
    assert worst >= -1e-8, f"activation {worst:.3e} from passive inputs"
    assert largest_dim <= 30
    assert largest_dim >= 20, "dimension pool should exercise large systems"
    assert elapsed < 60.0, f"sweep took {elapsed:.1f}s"


# ---------------------------------------------------------------------------
# 2. Minimized control interference term.
# ---------------------------------------------------------------------------


def _random_coupling_pairs(n: int) -> list[tuple[HermitianOperator, complex]]:
    rng = np.random.default_rng(41)
    pairs = []
    for _ in range(n):
        t = rng.uniform(0.2, 2.0) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        h_c = HermitianOperator(
            np.array([[0.0, np.conj(t)], [t, rng.uniform(0.5, 3.0)]], dtype=complex)
        )
        chi = rng.uniform(0.0, 1.0) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        pairs.append((h_c, complex(chi)))
    return pairs


def test_criterion_2_control_term_minimum_matches_sqrt2_reference_value():
    """Documented reference value for min over control angles of the
    interference term: -sqrt(2) |<1|H_C|0> (chi - 1)|, to be matched by a
    direct 2-parameter numerical minimization within 1e-6 on 100 random
    (coupling, chi) pairs.

    The direct minimization attains -|<1|H_C|0>(chi - 1)| (the angular
    factors have unit range, so no sqrt(2) is reachable); this test
    therefore fails, and the companion test below pins the attainable
    value.  Both the reference and attained values are exposed by
    delta_c_min for comparison."""
    worst = 0.0
    for h_c, chi in _random_coupling_pairs(100):
        numeric = numeric_delta_c_minimum(h_c, chi)
        reference = delta_c_min(h_c, chi).tabulated
        worst = max(worst, abs(numeric - reference))
    assert worst <= 1e-6, f"worst |numeric - reference| = {worst:.3e}"


def test_criterion_2_companion_control_term_minimum_matches_attained_value():
    """The attainable minimum -|<1|H_C|0>(chi - 1)| agrees with the direct
    2-parameter minimization within 1e-6 on the same 100 random pairs."""
    worst = 0.0
    for h_c, chi in _random_coupling_pairs(100):
        numeric = numeric_delta_c_minimum(h_c, chi)
        attained = delta_c_min(h_c, chi).attained
        worst = max(worst, abs(numeric - attained))
    assert worst <= 1e-6, f"worst |numeric - attained| = {worst:.3e}"


# ---------------------------------------------------------------------------
# 3. Rotation-pair closed form.
# ---------------------------------------------------------------------------


def _rotation_scenario(omega, beta, t_abs, t_phase, r: RotationParams, c: BlochState):
    return SwitchScenario(
        rho_s=gibbs_qubit(ThermalParams(beta, omega)),
        control=c,
        u1=rotation_unitary("x", r.alpha_x),
        u2=rotation_unitary("y", r.alpha_y),
        h_s=hamiltonian_qubit_system(QubitSystemParams(omega)),
        h_c=hamiltonian_control(ControlHamiltonianParams(omega, t_abs, t_phase)),
    )


def test_criterion_3_rotation_closed_form_matches_generic_path_and_uncoupled_floor():
    """1000 random parameter draws: closed-form energy difference equals the
    generic matrix path within 1e-8; with the control coupling switched off
    the value is never negative."""
    rng = np.random.default_rng(17)
    worst = 0.0
    for k in range(1000):
        omega = rng.uniform(0.5, 2.0)
        beta = math.inf if k % 7 == 0 else rng.uniform(0.0, 3.0)
        t_abs = rng.uniform(0.0, 2.0)
        t_phase = rng.uniform(0.0, 2.0 * math.pi)
        r = RotationParams(rng.uniform(0.0, 2.0 * math.pi), rng.uniform(0.0, 2.0 * math.pi))
        c = BlochState(rng.uniform(0.0, math.pi), rng.uniform(0.0, 2.0 * math.pi))
        closed = delta_qs_rotations(omega, beta, t_abs, t_phase, r, c, cross_check=False)
        generic = activation_report(
            _rotation_scenario(omega, beta, t_abs, t_phase, r, c)
        ).delta_qs
        worst = max(worst, abs(closed - generic))
    assert worst <= 1e-8, f"worst closed-vs-generic gap {worst:.3e}"

    floor = math.inf
    for _ in range(300):
        omega = rng.uniform(0.5, 2.0)
        beta = rng.uniform(0.0, 3.0)
        r = RotationParams(rng.uniform(0.0, 2.0 * math.pi), rng.uniform(0.0, 2.0 * math.pi))
        c = BlochState(rng.uniform(0.0, math.pi), rng.uniform(0.0, 2.0 * math.pi))
        floor = min(floor, delta_qs_rotations(omega, beta, 0.0, 0.0, r, c, cross_check=False))
    assert floor >= -1e-12, f"uncoupled slice dipped to {floor:.3e}"


# ---------------------------------------------------------------------------
# 4. Generic-qubit-pair minima recovered by the multistart optimizer.
# ---------------------------------------------------------------------------


def test_criterion_4_u2_minima_recover_slope_and_measured_plateau():
    """Unmeasured: the minimized energy difference implies epsilon = -20
    within 2%, independently of temperature (beta in {0, 0.1, 0.2}) and of
    the coupling phase.  Measured at zero temperature: minimum 0 (within
    1e-4) at measurement phases {0, pi}; a flat plateau (relative std
    < 1e-3) across {pi/4, pi/2, 3pi/4} whose value implies f = -16 within
    2%.  Whole recovery under 10 minutes at the default budget."""
    start = time.perf_counter()

    for beta in (0.0, 0.1, 0.2):
        for theta in (0.0, math.pi / 4.0):
            res = minimize_delta_qs_u2(1.0, beta, 1.0, theta, _PLUS, seed=11)
            eps = implied_epsilon(res.value, theta, 1.0)
            assert abs(eps - (-20.0)) <= 0.02 * 20.0, (
                f"beta={beta} theta={theta}: epsilon {eps:.4f}"
            )

    minima = {}
    for phi_m in (0.0, math.pi / 4.0, math.pi / 2.0, 3.0 * math.pi / 4.0, math.pi):
        res = minimize_delta_sm_u2(1.0, 0.0, _PLUS, BlochState(math.pi / 2.0, phi_m), seed=11)
        minima[phi_m] = res.value

    assert abs(minima[0.0]) <= 1e-4, f"min at phase 0: {minima[0.0]:.2e}"
    assert abs(minima[math.pi]) <= 1e-4, f"min at phase pi: {minima[math.pi]:.2e}"
    plateau = [minima[math.pi / 4.0], minima[math.pi / 2.0], minima[3.0 * math.pi / 4.0]]
    rel_std = float(np.std(plateau) / abs(np.mean(plateau)))
    assert rel_std < 1e-3, f"plateau not flat: rel std {rel_std:.2e}"
    f_value = implied_f(minima[math.pi / 2.0], 1.0)
    assert abs(f_value - (-16.0)) <= 0.02 * 16.0, f"f {f_value:.4f}"

    assert time.perf_counter() - start < 600.0


# ---------------------------------------------------------------------------
# 5. Displacement pair against the truncated-Fock oracle.
# ---------------------------------------------------------------------------


def test_criterion_5_displacement_pair_closed_forms_hold_against_oracle():
    """Interference scalar, unmeasured and measured energy differences,
    temperature independence, measurement-angle independence, the optimal
    activation amplitude, and the composition law all hold against the
    truncated-Fock brute-force path at gaps below 1e-6."""
    a1 = DisplacementParams(0.6, 0.5)
    a2 = DisplacementParams(0.9, 2.6)

    report = fock_oracle_report(
        "displacements",
        omega=1.0,
        beta=1.0,
        a1=a1,
        a2=a2,
        control=BlochState(1.2, 0.8),
        measurement=BlochState(0.9, 2.1),
    )
    assert report.passed, report

    # Temperature independence: the closed form carries no beta, and the
    # generic truncated-Fock value agrees with it at three temperatures.
    closed = delta_qs_displacements(1.0, 0.7, 0.4, a1, a2, _PLUS)
    generic_values = []
    for beta in (0.5, 1.0, 2.0):
        scenario = displacement_scenario(1.0, beta, 0.7, 0.4, a1, a2, _PLUS)
        generic_values.append(activation_report(scenario).delta_qs)
        assert abs(generic_values[-1] - closed) < 1e-6, f"beta={beta}"
    assert max(generic_values) - min(generic_values) < 2e-6

    # Measurement-angle independence of the measured energy difference.
    rng = np.random.default_rng(5)
    scenario = displacement_scenario(1.0, 1.0, 0.7, 0.4, a1, a2, BlochState(1.2, 0.8))
    draws = []
    for _ in range(100):
        m = BlochState(rng.uniform(0.15, math.pi - 0.15), rng.uniform(0.0, 2.0 * math.pi))
        draws.append(measure_control(scenario, m).delta_sm)
    assert float(np.std(draws)) < 1e-6, f"angle dependence std {np.std(draws):.2e}"
    assert abs(float(np.mean(draws)) - delta_sm_displacements(a1, a2, 1.0)) < 1e-6

    # Optimal activation amplitude against direct 1-D minimization.
    from scipy.optimize import minimize_scalar

    for t_abs in (1.5, 2.5, 4.0):
        res = minimize_scalar(
            lambda x: delta_qs_displacements_symmetric(1.0, t_abs, x),
            bounds=(0.4, 1.6),
            method="bounded",
            options={"xatol": 1e-10},
        )
        assert abs(res.x - alpha_min(1.0, t_abs)) < 1e-6, f"t_abs={t_abs}"

    # Composition law on the safe subspace of the truncated space.
    n_max = 60
    d1 = displacement_op(a1, n_max).mat
    d2 = displacement_op(a2, n_max).mat
    w = a1.alpha * a2.alpha.conjugate()
    combined = DisplacementParams(
        abs(a1.alpha + a2.alpha), math.atan2((a1.alpha + a2.alpha).imag, (a1.alpha + a2.alpha).real)
    )
    rhs = np.exp(0.5 * (w - w.conjugate())) * displacement_op(combined, n_max).mat
    k = n_max // 2
    assert np.max(np.abs((d1 @ d2)[:k, :k] - rhs[:k, :k])) < 1e-6


# ---------------------------------------------------------------------------
# 6. Displacement+squeeze closed forms and the zero-temperature sweep.
# ---------------------------------------------------------------------------


def test_criterion_6_disp_squeeze_closed_forms_match_oracle_on_grid():
    """Interference scalar, order-energy difference, measured interference
    functionals, and both phase-locked specializations match the generic
    truncated-Fock path within 1e-6 over amplitudes up to 1.5, squeezing up
    to 0.8, at finite and zero temperature."""
    c = BlochState(1.9, 0.6)
    m = BlochState(1.1, 2.3)
    worst = 0.0
    for aa, zz, beta in itertools.product((0.5, 1.0, 1.5), (0.2, 0.5, 0.8), (1.0, math.inf)):
        a = DisplacementParams(aa, 0.9)
        s = SqueezeParams(zz, 0.4)
        scenario = disp_squeeze_scenario(1.0, beta, 0.5, 0.3, a, s, c)
        rep = activation_report(scenario)
        mrep = measure_control(scenario, m)
        gaps = [
            abs(chi_disp_squeeze(a, s, beta, 1.0) - rep.chi),
            abs(
                (e12_disp_squeeze(1.0, beta, a, s) - e21_disp_squeeze(1.0, beta, a, s))
                - (rep.e12 - rep.e21)
            ),
            abs(f_s_disp_squeeze(1.0, beta, a, s) - (mrep.delta_f + rep.chi * rep.e_s)),
            abs(delta_f_disp_squeeze(1.0, beta, a, s) - mrep.delta_f),
            abs(delta_sm_disp_squeeze(1.0, beta, a, s, c, m) - mrep.delta_sm),
        ]
        for xi, slice_fn in ((0.0, delta_sm_xi0), (math.pi, delta_sm_xipi)):
            sliced = disp_squeeze_scenario(
                1.0, beta, 0.5, 0.3, DisplacementParams(aa, 0.0), SqueezeParams(zz, xi), c
            )
            gaps.append(
                abs(slice_fn(1.0, beta, aa, zz, c, m) - measure_control(sliced, m).delta_sm)
            )
        worst = max(worst, max(gaps))
    assert worst <= 1e-6, f"worst closed-vs-oracle gap {worst:.3e}"


def test_criterion_6_aligned_slice_nonnegative_on_ground_state_sweep():
    """Aligned phase lock: the post-measured energy difference never goes
    negative anywhere on the zero-temperature equal-amplitude sweep."""
    header, rows = figure_dataset("fig9")
    i = {name: k for k, name in enumerate(header)}
    aligned = [
        row[i["delta_sm[energy]"]]
        for row in rows
        if row[i["xi_minus_2phi[rad]"]] == 0.0 and row[i["divergent[flag]"]] == 0
    ]
    assert aligned
    assert min(aligned) >= -1e-12, f"aligned slice dipped to {min(aligned):.3e}"


def test_criterion_6_anti_aligned_negativity_attainable_per_measurement_phase():
    """Documented claim: the anti-aligned phase lock reaches a negative
    post-measured energy difference somewhere on the zero-temperature
    equal-amplitude sweep, for every tested measurement phase.

    With the oracle-validated forms the sweep never dips below zero (the
    floor is 0 exactly, at the origin where both orders are the identity,
    and strictly positive everywhere else), so this test fails; the claim
    does hold for the reference ``_tabulated`` polynomials (companion test
    below), which is where the discrepancy lives."""
    header, rows = figure_dataset("fig9")
    i = {name: k for k, name in enumerate(header)}
    for phi_m in (0.0, math.pi / 2.0, math.pi, 3.0 * math.pi / 2.0):
        values = [
            row[i["delta_sm[energy]"]]
            for row in rows
            if row[i["xi_minus_2phi[rad]"]] == math.pi
            and row[i["phi_m[rad]"]] == phi_m
            and row[i["divergent[flag]"]] == 0
        ]
        assert values
        assert min(values) < 0.0, f"phi_m={phi_m:.3f}: sweep floor {min(values):+.4f}"


def test_criterion_6_companion_reference_polynomials_do_reach_negative_values():
    """The reference ``_tabulated`` anti-aligned polynomial goes clearly
    negative on the same zero-temperature sweep — pinning the sign
    discrepancy to the transcribed reference expressions, not to the sweep
    or measurement machinery."""
    c = _PLUS
    floor = math.inf
    for phi_m in (0.0, math.pi / 2.0, math.pi, 3.0 * math.pi / 2.0):
        m = BlochState(math.pi / 2.0, phi_m)
        for k in range(1, 61):
            x = 0.02 * k
            floor = min(floor, delta_sm_xipi_tabulated(1.0, math.inf, x, x, c, m))
    assert floor < -0.2, f"tabulated floor {floor:+.4f}"


def test_criterion_6_quarter_phase_measurement_series_coincide():
    """Measurement phases pi/2 and 3pi/2 give identical sweeps (within
    1e-10): the post-measured energy difference depends on the measurement
    phase only through its cosine on these slices."""
    header, rows = figure_dataset("fig9")
    i = {name: k for k, name in enumerate(header)}
    for slice_angle in (0.0, math.pi):
        for phi_a, phi_b in ((math.pi / 2.0, 3.0 * math.pi / 2.0),):
            series_a = {
                row[i["alpha_abs[1]"]]: row[i["delta_sm[energy]"]]
                for row in rows
                if row[i["xi_minus_2phi[rad]"]] == slice_angle
                and row[i["phi_m[rad]"]] == phi_a
            }
            series_b = {
                row[i["alpha_abs[1]"]]: row[i["delta_sm[energy]"]]
                for row in rows
                if row[i["xi_minus_2phi[rad]"]] == slice_angle
                and row[i["phi_m[rad]"]] == phi_b
            }
            assert series_a.keys() == series_b.keys()
            for x, va in series_a.items():
                vb = series_b[x]
                if va is None or vb is None:
                    assert va is None and vb is None
                else:
                    assert abs(va - vb) <= 1e-10


# ---------------------------------------------------------------------------
# 7. Figure datasets are byte-stable.
# ---------------------------------------------------------------------------


def test_criterion_7_figure_datasets_regenerate_byte_identically(tmp_path):
    """Every figure dataset regenerates byte-identically from the pinned
    seed, and non-post-selectable sweep points are tagged in a flag column
    with empty value cells, never emitted as numbers."""
    for figure_id in FIGURE_IDS:
        out = emit_figure(
            FigureSpec(figure_id, tmp_path / f"{figure_id}.csv"), seed=DEFAULT_FIGURE_SEED
        )
        assert out.read_bytes() == baseline_path(figure_id).read_bytes(), figure_id

    for figure_id in ("fig8", "fig9"):
        text = baseline_path(figure_id).read_text(encoding="utf-8")
        lines = text.strip().split("\n")
        header = lines[0].split(",")
        i_div = header.index("divergent[flag]")
        i_val = header.index("delta_sm[energy]")
        tagged = 0
        for line in lines[1:]:
            cells = line.split(",")
            if cells[i_div] == "1":
                tagged += 1
                assert cells[i_val] == "", f"{figure_id}: divergent row carries a value"
        assert tagged > 0, f"{figure_id}: expected tagged divergence points"


# ---------------------------------------------------------------------------
# 8. Ergotropy against permutation brute force.
# ---------------------------------------------------------------------------


def _brute_force_ergotropy(rho_mat: np.ndarray, h_mat: np.ndarray) -> float:
    """Minimize final energy over all permutation rearrangements of the
    state's spectrum in the Hamiltonian eigenbasis (exhaustive for the
    unitary orbit of a full-rank state)."""
    pops = np.sort(np.linalg.eigvalsh(rho_mat))[::-1]
    energies, _ = np.linalg.eigh(h_mat)
    e_initial = float(np.trace(rho_mat @ h_mat).real)
    best = math.inf
    for perm in itertools.permutations(range(len(pops))):
        e_final = float(sum(pops[p] * energies[k] for k, p in enumerate(perm)))
        best = min(best, e_final)
    return e_initial - best


def test_criterion_8_ergotropy_matches_permutation_brute_force_and_gibbs_is_inert():
    """100 random 4-dim state/Hamiltonian pairs: the spectral formula equals
    exhaustive minimization over all 24 permutation rearrangements within
    1e-10; thermal states yield zero within 1e-10."""
    from scipy.stats import unitary_group

    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(100):
        basis_r = unitary_group.rvs(4, random_state=rng)
        rho = HermitianOperator(
            basis_r @ np.diag(rng.dirichlet(np.ones(4))).astype(complex) @ basis_r.conj().T
        ).mat
        basis_h = unitary_group.rvs(4, random_state=rng)
        h = HermitianOperator(
            basis_h @ np.diag(rng.uniform(0.0, 3.0, 4)).astype(complex) @ basis_h.conj().T
        )
        from switchwork.qmat import DensityMatrix

        value = ergotropy(DensityMatrix(rho), h)
        worst = max(worst, abs(value - _brute_force_ergotropy(rho, h.mat)))
    assert worst <= 1e-10, f"worst spectral-vs-brute-force gap {worst:.3e}"

    for beta, omega in ((0.5, 1.0), (2.0, 0.7), (math.inf, 1.0)):
        rho_g = gibbs_qubit(ThermalParams(beta, omega))
        h_q = hamiltonian_qubit_system(QubitSystemParams(omega))
        assert abs(ergotropy(rho_g, h_q)) <= 1e-10

    thermal = ThermalParams(1.0, 1.0)
    rho_f = gibbs_fock(thermal, 40)
    h_f = HermitianOperator(np.diag(np.arange(41, dtype=float) + 0.5).astype(complex))
    assert abs(ergotropy(rho_f, h_f)) <= 1e-10
