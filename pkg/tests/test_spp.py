"""Unit tests for the spiral phase plate."""

import cmath
import math

import numpy as np
import pytest
from scipy.special import gammaln

from spinorbit.errors import NormalizationError, ParameterError
from spinorbit.elements.spp import (
    FIG1_MODES,
    SppSpec,
    azimuthal_weight,
    radial_tail_model,
    spp_apply,
    spp_closed_form,
    spp_coefficient,
    spp_probability_table,
)
from spinorbit.numerics.basis import ModeIndex, Spin, SpinOrbitState, basis_state


def test_zero_charge_is_identity() -> None:
    state = basis_state(ModeIndex(2, -1, Spin.DOWN))
    out = spp_apply(state, SppSpec(q=0.0), n_max=10)
    assert dict(out.coeffs) == {ModeIndex(2, -1, Spin.DOWN): 1.0}
    assert out.tail_estimate == 0.0


def test_unit_charge_moves_everything_to_ell_one() -> None:
    out = spp_apply(basis_state(ModeIndex(0, 0)), SppSpec(q=1.0), n_max=200)
    assert out.ells() == (1,)
    assert out.captured_probability >= 0.998
    measured_tail = 1.0 - out.captured_probability
    model = radial_tail_model(1, 200)
    assert 0.5 * model <= measured_tail <= 2.0 * model
    assert out.tail_estimate == pytest.approx(model)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10, 40])
def test_unit_charge_coefficients_match_closed_form(n: int) -> None:
    coefficient = spp_coefficient(1.0, ModeIndex(n, 1))
    assert coefficient.real == pytest.approx(spp_closed_form(n, 1), abs=1e-10)
    assert abs(coefficient.imag) < 1e-14


def test_closed_form_reference_values() -> None:
    assert spp_closed_form(0, 1) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-14)
    assert spp_closed_form(1, 1) == pytest.approx(0.3133285, abs=1e-7)
    expected = 1.5 * math.exp(gammaln(4.5) - 0.5 * (gammaln(4.0) + gammaln(7.0)))
    assert spp_closed_form(3, -3) == pytest.approx(expected, rel=1e-13)
    assert spp_closed_form(0, 0) == 1.0
    assert spp_closed_form(2, 0) == 0.0


def test_closed_form_sums_to_one() -> None:
    total = sum(spp_closed_form(n, 1) ** 2 for n in range(20000))
    assert total == pytest.approx(1.0, abs=2e-5)


@pytest.mark.parametrize("q", [0.25, 0.5, 1.5])
def test_fractional_charge_ground_coefficient_is_sinc(q: float) -> None:
    coefficient = spp_coefficient(q, ModeIndex(0, 0))
    assert abs(coefficient) == pytest.approx(abs(math.sin(q * math.pi) / (q * math.pi)), abs=1e-10)
    expected = cmath.exp(1j * math.pi * q) * math.sin(q * math.pi) / (q * math.pi)
    assert coefficient == pytest.approx(expected, abs=1e-12)


def test_fractional_charge_leaves_no_excited_radial_modes_at_input_ell() -> None:
    out = spp_apply(basis_state(ModeIndex(0, 0)), SppSpec(q=0.5), n_max=20, ell_window=10)
    excited = sum(abs(a) ** 2 for mode, a in out if mode.ell == 0 and mode.n_r >= 1)
    assert excited < 1e-20
    assert out.amplitude(ModeIndex(0, 0)) == pytest.approx(azimuthal_weight(0.5))
    assert 0.9 < out.captured_probability <= 1.0 + 1e-9
    assert out.tail_estimate > 0.0


def test_fractional_charge_spreads_over_window() -> None:
    out = spp_apply(basis_state(ModeIndex(0, 0)), SppSpec(q=0.5), n_max=20, ell_window=3)
    assert out.ells() == tuple(range(-3, 4))


def test_global_phase_multiplies_every_amplitude() -> None:
    plain = spp_apply(basis_state(ModeIndex(0, 0)), SppSpec(q=1.0), n_max=5)
    shifted = spp_apply(basis_state(ModeIndex(0, 0)), SppSpec(q=1.0, alpha0=math.pi / 2), n_max=5)
    for mode, amp in plain:
        assert shifted.amplitude(mode) == pytest.approx(1j * amp, abs=1e-15)


def test_spin_is_untouched() -> None:
    out = spp_apply(basis_state(ModeIndex(0, 0, Spin.DOWN)), SppSpec(q=-1.0), n_max=10)
    assert {mode.spin for mode, _ in out} == {Spin.DOWN}
    assert out.ells() == (-1,)


def test_azimuthal_weight_integer_and_fractional() -> None:
    assert azimuthal_weight(0) == 1.0
    assert azimuthal_weight(3.0) == 0
    assert abs(azimuthal_weight(0.5)) == pytest.approx(2.0 / math.pi)


def test_material_parameters_round_trip() -> None:
    spec = SppSpec.from_material(Nbc=-2.0e14, wavelength=0.271e-9, step_height=2.0 * math.pi / (2.0e14 * 0.271e-9))
    assert spec.q == pytest.approx(1.0, rel=1e-12)
    assert spec.is_integer or spec.q == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        SppSpec(q=2.0, material_Nbc=-2.0e14, wavelength=0.271e-9, step_height=spec.step_height)


def test_invalid_inputs_raise() -> None:
    with pytest.raises(ParameterError):
        SppSpec(q=float("inf"))
    with pytest.raises(ParameterError):
        spp_apply(basis_state(ModeIndex(0, 0)), SppSpec(q=1.0), n_max=600)
    with pytest.raises(NormalizationError):
        spp_apply(SpinOrbitState(coeffs={ModeIndex(0, 0): 2.0}), SppSpec(q=1.0), n_max=5)


def test_probability_table_single_zero_charge_row() -> None:
    table = spp_probability_table([0.0])
    assert table.column_names == ("q", "p_n0_l0", "p_n0_l1", "p_n0_lm1", "p_n1_l1", "p_n1_lm1")
    assert len(table) == 1
    assert table.rows[0] == pytest.approx((0.0, 1.0, 0.0, 0.0, 0.0, 0.0))


def test_probability_table_unit_charge() -> None:
    table = spp_probability_table(np.array([1.0, -1.0]))
    by_q = {row[0]: row for row in table.rows}
    assert by_q[1.0][2] == pytest.approx(math.pi / 4.0, abs=1e-10)
    assert by_q[1.0][3] == 0.0
    assert by_q[-1.0][3] == pytest.approx(math.pi / 4.0, abs=1e-10)
    assert len(FIG1_MODES) == 5
