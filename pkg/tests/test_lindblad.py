import math

import numpy as np
import pytest

from dressedrabi.adiabatic import build_basis, displaced_overlap
from dressedrabi.hilbert import basis_ket, max_abs
from dressedrabi.lindblad import (
    JumpTerm,
    MasterEquation,
    RateFunctions,
    add_dephasing,
    add_spectroscopy_drive,
    dephasing_as_jump,
    dephasing_operator,
    dissipator_apply,
    driven_rotating_dme,
    finite_temperature_dme,
    gibbs_state,
    standard_master_equation,
    two_tone_corotating_dme,
    zero_temperature_dme,
)
from dressedrabi.rabi import RabiParams, ground_state

from conftest import fig3_params, fig3_rates, random_density


@pytest.fixture(scope="module")
def basis(dims40):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_basis(fig3_params(), 12, dims40, energy_mode="truncated")


def test_dissipator_basics(dims40):
    a_small = np.diag(np.sqrt(np.arange(1, 4)), 1).astype(complex)
    vac = np.zeros((4, 4), dtype=complex)
    vac[0, 0] = 1.0
    assert max_abs(dissipator_apply(a_small, vac)) == 0.0
    one = np.zeros((4, 4), dtype=complex)
    one[1, 1] = 1.0
    out = dissipator_apply(a_small, one)
    expected = vac - one
    assert max_abs(out - expected) < 1e-14
    rng = np.random.default_rng(5)
    rho = random_density(4, rng)
    assert abs(np.trace(dissipator_apply(a_small, rho))) < 1e-14
    with pytest.raises(ValueError):
        dissipator_apply(a_small, np.eye(3, dtype=complex))


def test_sme_decoupled_stationary(dims40):
    p = RabiParams(1.0, 0.3, 0.0)
    me = standard_master_equation(p, RateFunctions.flat(0.1, 0.1), dims40)
    g0 = basis_ket(1, 0, dims40)
    rho = np.outer(g0, g0.conj())
    assert max_abs(me.rhs(rho)) < 1e-14


def test_sme_disturbs_interacting_ground_state(dims40):
    p = fig3_params()
    rate = 0.1
    me = standard_master_equation(p, RateFunctions.flat(rate, rate), dims40)
    _, gs = ground_state(p, dims40)
    rho = np.outer(gs, gs.conj())
    assert max_abs(me.rhs(rho)) > 1e-4 * rate


def test_generator_trace_and_hermiticity(dims40, basis):
    rng = np.random.default_rng(9)
    for me in (
        standard_master_equation(fig3_params(), RateFunctions.flat(0.1, 0.05), dims40),
        zero_temperature_dme(basis, fig3_rates()),
    ):
        rho = random_density(me.dim, rng)
        out = me.rhs(rho)
        assert abs(np.trace(out)) < 1e-12 * max(max_abs(out), 1e-300)
        assert max_abs(out - out.conj().T) < 1e-12


def test_zero_t_dme_structure(basis):
    rates = fig3_rates()
    me = zero_temperature_dme(basis, rates)
    # dark ground state
    rho = np.zeros((24, 24), dtype=complex)
    rho[0, 0] = 1.0
    assert max_abs(me.rhs(rho)) == 0.0
    # |Psi_0^+> drains into |Psi_0^-> at kappa = gamma + 4 beta^2 Gamma
    top = np.zeros((24, 24), dtype=complex)
    top[12, 12] = 1.0
    out = me.rhs(top)
    kappa = rates.qubit_rate(basis.omega_tilde[0]) + 4 * 0.01 * rates.oscillator_rate(basis.omega_tilde[0])
    assert abs(out[12, 12] + kappa) < 1e-15
    assert abs(out[0, 0] - kappa) < 1e-15


def test_zero_t_dme_decoupled_limit(dims40):
    # beta = 0, qubit bath off: two independently damped ladders
    p = RabiParams(1.0, 0.3, 0.0)
    b = build_basis(p, 6, dims40, energy_mode="truncated")
    rates = RateFunctions.flat(0.2, 0.0)
    me = zero_temperature_dme(b, rates)
    rng = np.random.default_rng(2)
    block = random_density(6, rng)
    rho = np.zeros((12, 12), dtype=complex)
    rho[:6, :6] = block
    out = me.rhs(rho)
    ladder = np.diag(np.sqrt(np.arange(1, 6)), 1).astype(complex)
    h_block = np.diag(b.energies_minus).astype(complex)
    expected = -1j * (h_block @ block - block @ h_block) + 0.2 * dissipator_apply(ladder, block)
    assert max_abs(out[:6, :6] - expected) < 1e-13
    assert max_abs(out[6:, 6:]) < 1e-15


def test_finite_t_recovers_zero_t(basis):
    rates0 = fig3_rates()
    tiny = RateFunctions.flat(rates0.oscillator_rate(1.0), rates0.qubit_rate(1.0), temperature=1e-6)
    me_t = finite_temperature_dme(basis, tiny)
    me_0 = zero_temperature_dme(basis, RateFunctions.flat(rates0.oscillator_rate(1.0), rates0.qubit_rate(1.0)))
    rng = np.random.default_rng(4)
    rho = random_density(24, rng)
    assert max_abs(me_t.rhs(rho) - me_0.rhs(rho)) < 1e-12


@pytest.mark.parametrize("temperature", [0.1, 0.5])
def test_gibbs_stationary_and_detailed_balance(basis, temperature):
    base = fig3_rates()
    rates = RateFunctions.flat(
        base.oscillator_rate(1.0), base.qubit_rate(1.0), temperature=temperature
    )
    me = finite_temperature_dme(basis, rates)
    gb = gibbs_state(basis, temperature)
    assert max_abs(me.rhs(gb)) < 1e-9
    # detailed balance, channel by channel
    by_label = {term.label: term for term in me.jumps}
    for label, term in by_label.items():
        if label.endswith("_down"):
            up = by_label[label[:-5] + "_up"]
            ratio = up.rate / term.rate
            assert ratio == pytest.approx(math.exp(-term.frequency / temperature), rel=5e-14)


def test_finite_t_requires_temperature(basis):
    with pytest.raises(ValueError):
        finite_temperature_dme(basis, fig3_rates())


def test_dephasing_operator(dims40, basis):
    sz = dephasing_operator(basis)
    v = basis.isometry
    red = v.conj().T @ sz @ v
    beta = basis.params.beta
    for n in range(12):
        o = displaced_overlap(n, beta)
        assert abs(red[n + 12, n + 12] - o) < 1e-12  # plus sector
        assert abs(red[n, n] + o) < 1e-12  # minus sector
        for m in range(12):
            assert abs(red[n, m + 12]) < 1e-12
    # beta = 0 limit: 1_+ - 1_-
    b0 = build_basis(RabiParams(1.0, 0.3, 0.0), 4, dims40)
    sz0 = b0.reduced_dephasing_op()
    assert max_abs(sz0 - np.diag([-1, -1, -1, -1, 1, 1, 1, 1])) < 1e-15


def test_dephasing_term(basis):
    rates = fig3_rates()
    me = zero_temperature_dme(basis, rates)
    sz = basis.reduced_dephasing_op()
    gamma_f = rates.gamma_f
    med = add_dephasing(me, gamma_f, sz)
    beta = basis.params.beta

    # populations within one ladder move only at O(beta^4)
    for n, m in ((0, 1), (0, 2), (1, 2)):
        coeff = (displaced_overlap(n, beta) - displaced_overlap(m, beta)) ** 2
        assert coeff <= 6.4e-3
        coherence = np.zeros((24, 24), dtype=complex)
        coherence[n, m] = 1.0
        extra = med.rhs(coherence) - me.rhs(coherence)
        assert abs(extra[n, m] + 0.5 * gamma_f * coeff) < 1e-15

    # cross-ladder coherences decay at (gamma_f/2)(<N_+|N_-> + <M_+|M_->)^2 ~ 2 gamma_f
    cross = np.zeros((24, 24), dtype=complex)
    cross[0, 12] = 1.0
    extra = med.rhs(cross) - me.rhs(cross)
    coeff = (displaced_overlap(0, beta) + displaced_overlap(0, beta)) ** 2
    assert abs(extra[0, 12] + 0.5 * gamma_f * coeff) < 1e-15
    assert abs(coeff - 4.0) < 0.2  # ~ 2 gamma_f decay rate of the element

    # gamma_f = 0 leaves the generator untouched
    assert add_dephasing(me, 0.0, sz) is me

    # double-commutator form equals the Hermitian-jump form
    rng = np.random.default_rng(3)
    rho = random_density(24, rng)
    assert max_abs(med.rhs(rho) - dephasing_as_jump(med).rhs(rho)) < 1e-12


def test_driven_rotating_structure(basis):
    rates = fig3_rates()
    me = driven_rotating_dme(basis, rates, pump_amp=0.0, pump_freq=basis.omega_minus)
    assert not me.time_dependent
    assert me.dephasing is not None
    labels = [t.label for t in me.jumps]
    assert labels.count("ladder_plus") == 1 and labels.count("ladder_minus") == 1
    assert sum(lbl.startswith("cross_") for lbl in labels) == 12
    # pump-frame Hamiltonian: the lower ladder is exactly on resonance
    h = me.hamiltonian
    assert abs((h[1, 1] - h[0, 0]).real) < 1e-15  # Delta_- = 0
    assert abs((h[13, 13] - h[12, 12]).real - (basis.omega_plus - basis.omega_minus)) < 1e-15


def test_coherent_steady_state_of_driven_generator(basis):
    # small pump keeps the coherent state far from the retained-top boundary
    from dressedrabi.dynamics import coherent_dressed_ket

    rates = fig3_rates(gamma_f_scale=0.0)
    gamma = rates.oscillator_rate(basis.omega_minus)
    amp = 0.25 * gamma  # |alpha| = 0.5
    me = driven_rotating_dme(basis, rates, amp, basis.omega_minus)
    alpha = amp / (1j * gamma / 2.0)
    ket = coherent_dressed_ket(basis, alpha, "-")
    rho = np.outer(ket, ket.conj())
    assert max_abs(me.rhs(rho)) < 1e-8


def test_spectroscopy_drive(basis):
    rates = fig3_rates()
    me = driven_rotating_dme(basis, rates, 0.0009, basis.omega_minus)
    assert add_spectroscopy_drive(me, basis, 0.0, 0.29) is me
    med = add_spectroscopy_drive(me, basis, 0.0003, 0.29)
    assert med.time_dependent and len(med.drive) == 1
    tone = med.drive[0]
    assert tone.frequency == 0.29
    # tone operator: -2 beta Omega_s on every equal-N cross element
    for n in range(12):
        assert abs(tone.op[n, 12 + n] - (-2 * 0.1 * 0.0003)) < 1e-18
    # h(t) carries e^{+i w t} + e^{-i w t}: at t=0 the full weight, Hermitian
    h0 = med.hamiltonian_at(0.0)
    assert max_abs(h0 - h0.conj().T) < 1e-15
    assert abs(h0[0, 12] - 2 * tone.op[0, 12]) < 1e-18
    with pytest.raises(ValueError):
        add_spectroscopy_drive(zero_temperature_dme(basis, rates), basis, 1e-4, 0.29)


def test_corotating_two_tone_detunings(basis):
    rates = fig3_rates()
    ws = basis.omega_tilde[0]
    me = two_tone_corotating_dme(basis, rates, 0.0009, basis.omega_minus, 0.0003, ws)
    assert not me.time_dependent
    h = me.hamiltonian
    # pair splitting becomes omega_tilde_N - omega_s: zero on rung 0
    assert abs((h[12, 12] - h[0, 0]).real - 0.0) < 1e-15
    assert abs((h[13, 13] - h[1, 1]).real - (basis.omega_tilde[1] - ws)) < 1e-12


def test_validation_guards(dims40, basis):
    with pytest.raises(ValueError):
        RateFunctions.flat(0.1, 0.1, gamma_f=-1.0)
    with pytest.raises(ValueError):
        RateFunctions(Gamma=lambda w: -1.0).oscillator_rate(1.0)
    with pytest.raises(ValueError):
        MasterEquation(hamiltonian=np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        MasterEquation(
            hamiltonian=np.eye(2, dtype=complex),
            jumps=[JumpTerm(-0.1, np.eye(2, dtype=complex))],
        )
