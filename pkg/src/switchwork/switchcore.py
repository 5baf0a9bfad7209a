"""Controlled-order channel and its energy bookkeeping.

Builds the switch unitary U = U2 U1 (x) |0><0| + U1 U2 (x) |1><1| on the
system (x) control ordering, computes the cross-map scalar
chi = tr{U2 U1 rho U2† U1†}, the pre-measurement energy difference with its
system/control split (delta_qs = delta_s + delta_c), the control-state
optimum of delta_c, and the post-measurement state with its decomposition
into delta_12, delta_21 and the interference term delta_f.

Every derived scalar is computed along two independent routes — direct
trace arithmetic in the joint space and the scalar expansion in terms of
(E12, E21, chi, control matrix elements) — and the routes are required to
agree within TOL_ENERGY at runtime.  A disagreement means a bug, so it
raises instead of returning.

Subsystem ordering is system (x) control everywhere.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .qmat import DensityMatrix, HermitianOperator, UnitaryOperator, kron, partial_trace
from .states import BlochState

TOL_ENERGY = 1e-8
TOL_NM = 1e-12


class NearZeroPostSelectionError(RuntimeError):
    """Post-selection probability at or below TOL_NM: the renormalized state
    is numerically meaningless (the denominator vanishes faster than the
    numerator in this regime), so the caller gets the regime flag instead
    of a junk state."""

    def __init__(self, n_m: float):
        super().__init__(f"post-selection probability {n_m:.3e} <= {TOL_NM:.0e}")
        self.n_m = n_m


@dataclass(frozen=True)
class SwitchScenario:
    """One experiment: system state, control state, the two unitaries, and
    the local Hamiltonians.  Control may be a BlochState (pure) or a general
    2x2 DensityMatrix (pre-measurement paths only)."""

    rho_s: DensityMatrix
    control: BlochState | DensityMatrix
    u1: UnitaryOperator
    u2: UnitaryOperator
    h_s: HermitianOperator
    h_c: HermitianOperator

    def __post_init__(self) -> None:
        d = self.rho_s.dim
        if not (self.u1.dim == self.u2.dim == self.h_s.dim == d):
            raise ValueError("system-side dimensions disagree")
        if self.h_c.dim != 2:
            raise ValueError("control Hamiltonian must be 2x2")
        if isinstance(self.control, DensityMatrix) and self.control.dim != 2:
            raise ValueError("control state must be 2x2")

    @property
    def rho_c(self) -> DensityMatrix:
        if isinstance(self.control, BlochState):
            return self.control.to_density()
        return self.control


@dataclass(frozen=True)
class ActivationReport:
    """All pre-measurement scalars for one scenario.

    delta_qs = delta_s + delta_c (identity holds exactly up to round-off);
    delta_c_min is the attainable minimum of delta_c over control states
    holding (h_c, chi) fixed.
    """

    chi: complex
    e_s: float
    e_c: float
    e12: float
    e21: float
    delta_qs: float
    delta_s: float
    delta_c: float
    delta_c_min: float
    tilde_rho_s: DensityMatrix
    tilde_rho_c: DensityMatrix


@dataclass(frozen=True)
class MeasurementReport:
    """Post-measurement scalars for one scenario + projector direction.

    conditions = (i, ii, iii): the three necessary-but-not-sufficient
    requirements for delta_sm < 0 —
      (i)   neither the control nor the measurement points at a pole;
      (ii)  the interference term is non-zero:  Im{delta_f} sin(psi)
            - Re{delta_f} cos(psi) != 0 with psi = phi_m - phi_c, recorded
            raw in condition_ii_lhs (this is -Re{delta_f e^{i psi}});
      (iii) sin(theta_c) sin(theta_m) Re{delta_f e^{i psi}} < 0.
    """

    n_m: float
    rho_sm: DensityMatrix
    e_sm: float
    delta_12: float
    delta_21: float
    delta_f: complex
    delta_sm: float
    conditions: tuple[bool, bool, bool]
    condition_ii_lhs: float


def build_switch_unitary(u1: UnitaryOperator, u2: UnitaryOperator) -> UnitaryOperator:
    """U2 U1 on the control-|0> block, U1 U2 on the control-|1> block."""
    if u1.dim != u2.dim:
        raise ValueError("unitaries must share a dimension")
    w12 = u2.mat @ u1.mat
    w21 = u1.mat @ u2.mat
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return UnitaryOperator(kron(w12, p0) + kron(w21, p1))


def chi(u1, u2, rho_s) -> complex:
    """Cross-map scalar tr{U2 U1 rho U2† U1†}; |chi| <= 1, and exactly 1
    when the unitaries commute."""
    m_u1, m_u2 = _m(u1), _m(u2)
    m_rho = _m(rho_s)
    return complex(np.trace(m_u2 @ m_u1 @ m_rho @ m_u2.conj().T @ m_u1.conj().T))


def _m(x) -> np.ndarray:
    return x.mat if hasattr(x, "mat") else np.asarray(x, dtype=complex)


def post_switch_state(s: SwitchScenario) -> DensityMatrix:
    """Joint state after the controlled-order channel.

    Generic path: conjugation by the switch unitary.  For a pure control the
    four-term block expansion is evaluated as a cross-check and must agree
    term-for-term.
    """
    u_qs = build_switch_unitary(s.u1, s.u2).mat
    joint = kron(s.rho_s, s.rho_c)
    out = u_qs @ joint @ u_qs.conj().T
    if isinstance(s.control, BlochState):
        expansion = _post_switch_expansion(s)
        if np.max(np.abs(out - expansion)) > TOL_ENERGY:
            raise AssertionError("post-switch expansion disagrees with conjugation path")
    return DensityMatrix(out)


def _post_switch_expansion(s: SwitchScenario) -> np.ndarray:
    """Four-term block form of the post-switch joint state for pure control."""
    c = s.control
    assert isinstance(c, BlochState)
    w12 = s.u2.mat @ s.u1.mat
    w21 = s.u1.mat @ s.u2.mat
    rho = s.rho_s.mat
    cc, ss = math.cos(c.theta / 2.0) ** 2, math.sin(c.theta / 2.0) ** 2
    # <0|rho_c|1> = (1/2) sin(theta) e^{-i phi} for the standard ket.
    coh = 0.5 * math.sin(c.theta) * cmath.exp(-1j * c.phi)
    e = [[np.zeros((2, 2), dtype=complex) for _ in range(2)] for _ in range(2)]
    for i in range(2):
        for j in range(2):
            b = np.zeros((2, 2), dtype=complex)
            b[i, j] = 1.0
            e[i][j] = b
    return (
        cc * kron(w12 @ rho @ w12.conj().T, e[0][0])
        + coh * kron(w12 @ rho @ w21.conj().T, e[0][1])
        + np.conj(coh) * kron(w21 @ rho @ w12.conj().T, e[1][0])
        + ss * kron(w21 @ rho @ w21.conj().T, e[1][1])
    )


def _energies(s: SwitchScenario) -> tuple[float, float, float, float]:
    """E_S, E_C, E12, E21 by direct traces."""
    rho, h_s = s.rho_s.mat, s.h_s.mat
    w12 = s.u2.mat @ s.u1.mat
    w21 = s.u1.mat @ s.u2.mat
    e_s = float(np.real(np.trace(rho @ h_s)))
    e_c = float(np.real(np.trace(s.rho_c.mat @ s.h_c.mat)))
    e12 = float(np.real(np.trace(w12 @ rho @ w12.conj().T @ h_s)))
    e21 = float(np.real(np.trace(w21 @ rho @ w21.conj().T @ h_s)))
    return e_s, e_c, e12, e21


def delta_c_min(h_c: HermitianOperator, chi_value: complex):
    """Control-state optimum of delta_c at fixed (h_c, chi).

    delta_c = 2 Re{<0|rho_c|1> K} with K = <1|h_c|0> (chi - 1).  A qubit
    coherence is bounded by |<0|rho_c|1>| <= 1/2, so the attainable minimum
    over states is -|K|, reached by theta_c = pi/2 and the coherence phased
    against K.  The tabulated closed-form prefactor sqrt(2) corresponds to a
    coherence of modulus 1/sqrt(2), which no qubit state attains; both
    values are returned so callers can compare.

    Returns a DeltaCMinResult with the tabulated scalar, the attainable
    minimum, and the optimizing BlochState.
    """
    if h_c.dim != 2:
        raise ValueError("delta_c_min needs a 2x2 control Hamiltonian")
    k = complex(h_c.mat[1, 0]) * (chi_value - 1.0)
    tabulated = -math.sqrt(2.0) * abs(k)
    attained = -abs(k)
    if abs(k) == 0.0:
        optimizer = BlochState(math.pi / 2.0, 0.0)
    else:
        # <0|rho|1> = e^{-i phi_c}/2 must equal -e^{-i arg K}/2.
        phi_c = (cmath.phase(k) + math.pi) % (2.0 * math.pi)
        optimizer = BlochState(math.pi / 2.0, phi_c)
    return DeltaCMinResult(tabulated, attained, optimizer)


@dataclass(frozen=True)
class DeltaCMinResult:
    tabulated: float
    attained: float
    optimizer: BlochState

    def delta_c_at_optimizer(self, h_c: HermitianOperator, chi_value: complex) -> float:
        coh = 0.5 * math.sin(self.optimizer.theta) * cmath.exp(-1j * self.optimizer.phi)
        k = complex(h_c.mat[1, 0]) * (chi_value - 1.0)
        return 2.0 * (coh * k).real


def activation_report(s: SwitchScenario) -> ActivationReport:
    """Pre-measurement energy bookkeeping with built-in cross-checks.

    Route (a): delta_qs from the 2d-dim conjugated joint state.
    Route (b): the scalar expansion
        E' = rc00 E12 + rc11 E21 + rc00 hc00 + rc11 hc11
             + chi rc01 hc10 + chi* rc10 hc01
    Both must agree within TOL_ENERGY, as must the mixed-state split
    E' = tr{tilde_rho_s h_s} + tr{tilde_rho_c h_c} and the closed form
    delta_c = 2 Re{rc01 hc10 (chi - 1)}.
    """
    rho_c = s.rho_c.mat
    h_c = s.h_c.mat
    e_s, e_c, e12, e21 = _energies(s)
    x = chi(s.u1, s.u2, s.rho_s)

    # Route (a): direct joint-space trace.
    u_qs = build_switch_unitary(s.u1, s.u2).mat
    joint = kron(s.rho_s, s.rho_c)
    joint_out = u_qs @ joint @ u_qs.conj().T
    h_sc = kron(s.h_s.mat, np.eye(2)) + kron(np.eye(s.rho_s.dim), h_c)
    e_out_direct = float(np.real(np.trace(joint_out @ h_sc)))

    # Route (b): scalar expansion.
    e_out_scalar = float(
        np.real(
            rho_c[0, 0] * e12
            + rho_c[1, 1] * e21
            + rho_c[0, 0] * h_c[0, 0]
            + rho_c[1, 1] * h_c[1, 1]
            + x * rho_c[0, 1] * h_c[1, 0]
            + np.conj(x) * rho_c[1, 0] * h_c[0, 1]
        )
    )
    if abs(e_out_direct - e_out_scalar) > TOL_ENERGY:
        raise AssertionError(
            f"energy routes disagree: direct {e_out_direct!r} vs scalar {e_out_scalar!r}"
        )

    tilde_s, tilde_c = _tilde_states(s, x)
    e_tilde = float(np.real(np.trace(tilde_s.mat @ s.h_s.mat))) + float(
        np.real(np.trace(tilde_c.mat @ h_c))
    )
    if abs(e_tilde - e_out_direct) > TOL_ENERGY:
        raise AssertionError("mixed-state split disagrees with the direct route")

    delta_qs = e_out_direct - (e_s + e_c)
    delta_s = float(np.real(np.trace(tilde_s.mat @ s.h_s.mat))) - e_s
    delta_c = float(np.real(np.trace(tilde_c.mat @ h_c))) - e_c
    delta_c_closed = 2.0 * float(np.real(rho_c[0, 1] * h_c[1, 0] * (x - 1.0)))
    if abs(delta_c - delta_c_closed) > TOL_ENERGY:
        raise AssertionError("delta_c closed form disagrees with the tilde route")

    return ActivationReport(
        chi=x,
        e_s=e_s,
        e_c=e_c,
        e12=e12,
        e21=e21,
        delta_qs=delta_qs,
        delta_s=delta_s,
        delta_c=delta_c,
        delta_c_min=delta_c_min(s.h_c, x).attained,
        tilde_rho_s=tilde_s,
        tilde_rho_c=tilde_c,
    )


def _tilde_states(s: SwitchScenario, x: complex) -> tuple[DensityMatrix, DensityMatrix]:
    """Dephasing mixtures whose local energies sum to the post-switch energy.

    tilde_rho_s = rc00 U2U1 rho U1†U2† + rc11 U1U2 rho U2†U1†;
    tilde_rho_c mixes diag(1, ±e^{-i arg chi}) conjugations with convex
    weights (1 ± |chi|)/2, which leaves the diagonal alone and rescales the
    coherence by chi.
    """
    rho_c = s.rho_c.mat
    rho = s.rho_s.mat
    w12 = s.u2.mat @ s.u1.mat
    w21 = s.u1.mat @ s.u2.mat
    tilde_s = np.real(rho_c[0, 0]) * (w12 @ rho @ w12.conj().T) + np.real(
        rho_c[1, 1]
    ) * (w21 @ rho @ w21.conj().T)

    phi = cmath.phase(x) if x != 0 else 0.0
    mag = abs(x)
    u_plus = np.diag([1.0, cmath.exp(-1j * phi)])
    u_minus = np.diag([1.0, -cmath.exp(-1j * phi)])
    tilde_c = 0.5 * (1.0 + mag) * (u_plus @ rho_c @ u_plus.conj().T) + 0.5 * (
        1.0 - mag
    ) * (u_minus @ rho_c @ u_minus.conj().T)
    return DensityMatrix(tilde_s), DensityMatrix(tilde_c)


def measure_control(s: SwitchScenario, m: BlochState) -> MeasurementReport:
    """Project the control onto |m>, renormalize, and decompose the system
    energy change.

    Requires a pure control.  Raises NearZeroPostSelectionError when the
    outcome probability is at or below TOL_NM.  The projected state is
    computed both by direct projection of the joint state and by the
    four-term expansion; the two must agree.

    delta_sm = (1/n_m) [ cos^2(tc/2) cos^2(tm/2) delta_12
                         + sin^2(tc/2) sin^2(tm/2) delta_21
                         + (1/2) sin(tc) sin(tm) Re{delta_f e^{i psi}} ]
    with psi = phi_m - phi_c and delta_f = F_S - chi E_S,
    F_S = tr{U2 U1 rho U2† U1† h_s}.
    """
    if not isinstance(s.control, BlochState):
        raise ValueError("measure_control requires a pure (BlochState) control")
    c = s.control
    d = s.rho_s.dim

    # Direct path: project the conjugated joint state.
    joint_out = post_switch_state(s).mat
    ket_m = m.to_ket()
    proj = kron(np.eye(d), np.outer(ket_m, ket_m.conj()))
    projected = proj @ joint_out @ proj.conj().T
    numerator = partial_trace(projected, d, 2, keep="a")
    n_m_direct = float(np.real(np.trace(numerator)))

    # Expansion path.
    rho, h_s = s.rho_s.mat, s.h_s.mat
    w12 = s.u2.mat @ s.u1.mat
    w21 = s.u1.mat @ s.u2.mat
    x = chi(s.u1, s.u2, s.rho_s)
    psi = m.phi - c.phi
    cc_c, ss_c = math.cos(c.theta / 2.0) ** 2, math.sin(c.theta / 2.0) ** 2
    cc_m, ss_m = math.cos(m.theta / 2.0) ** 2, math.sin(m.theta / 2.0) ** 2
    sin_c, sin_m = math.sin(c.theta), math.sin(m.theta)
    a12 = w12 @ rho @ w21.conj().T  # carries chi = tr{a12}
    numerator_exp = (
        cc_c * cc_m * (w12 @ rho @ w12.conj().T)
        + ss_c * ss_m * (w21 @ rho @ w21.conj().T)
        + 0.25 * sin_c * sin_m * cmath.exp(1j * psi) * a12
        + 0.25 * sin_c * sin_m * cmath.exp(-1j * psi) * a12.conj().T
    )
    n_m_closed = 0.5 * (
        1.0
        + math.cos(c.theta) * math.cos(m.theta)
        + sin_c * sin_m * (x * cmath.exp(1j * psi)).real
    )
    if np.max(np.abs(numerator - numerator_exp)) > TOL_ENERGY:
        raise AssertionError("projection and expansion numerators disagree")
    if abs(n_m_direct - n_m_closed) > TOL_ENERGY:
        raise AssertionError("post-selection probability routes disagree")

    if n_m_direct <= TOL_NM:
        raise NearZeroPostSelectionError(n_m_direct)

    rho_sm = DensityMatrix(numerator / n_m_direct)
    e_s = float(np.real(np.trace(rho @ h_s)))
    e_sm = float(np.real(np.trace(rho_sm.mat @ h_s)))

    e12 = float(np.real(np.trace(w12 @ rho @ w12.conj().T @ h_s)))
    e21 = float(np.real(np.trace(w21 @ rho @ w21.conj().T @ h_s)))
    delta_12 = e12 - e_s
    delta_21 = e21 - e_s
    f_s = complex(np.trace(a12 @ h_s))
    delta_f = f_s - x * e_s

    cross = (delta_f * cmath.exp(1j * psi)).real
    delta_sm_closed = (
        cc_c * cc_m * delta_12 + ss_c * ss_m * delta_21 + 0.5 * sin_c * sin_m * cross
    ) / n_m_direct
    delta_sm_direct = e_sm - e_s
    if abs(delta_sm_closed - delta_sm_direct) > TOL_ENERGY:
        raise AssertionError("post-measurement energy routes disagree")

    cond_i = (sin_c != 0.0) and (sin_m != 0.0)
    cond_ii_lhs = delta_f.imag * math.sin(psi) - delta_f.real * math.cos(psi)
    cond_ii = abs(cond_ii_lhs) > 0.0
    cond_iii = sin_c * sin_m * cross < 0.0

    return MeasurementReport(
        n_m=n_m_direct,
        rho_sm=rho_sm,
        e_sm=e_sm,
        delta_12=delta_12,
        delta_21=delta_21,
        delta_f=delta_f,
        delta_sm=delta_sm_direct,
        conditions=(cond_i, cond_ii, cond_iii),
        condition_ii_lhs=cond_ii_lhs,
    )
