"""Unit tests for the spin x Laguerre-Gauss mode basis."""

import math

import numpy as np
import pytest
from scipy.constants import electron_volt
from scipy.special import eval_genlaguerre

from spinorbit.config import PhysicalConstants
from spinorbit.errors import NormalizationError, ParameterError
from spinorbit.numerics.basis import (
    ModeIndex,
    Spin,
    SpinOrbitState,
    WavepacketGeometry,
    basis_state,
    inner_product,
    kinetic_energy,
    map_amplitudes,
    mode_radial,
    mode_radial_table,
    quadrature_order_for,
    radial_overlaps,
    require_normalized,
    state_norm,
    total_energy,
    wavenumber_from_wavelength,
)
from spinorbit.numerics.specfun import radial_quadrature


def _reference_radial(n: int, ell: int, xi: float) -> float:
    a = abs(ell)
    norm = math.sqrt(math.factorial(n) / (math.pi * math.factorial(n + a)))
    return norm * xi**a * math.exp(-xi * xi / 2.0) * eval_genlaguerre(n, a, xi * xi)


@pytest.mark.parametrize("n, ell", [(0, 0), (3, 0), (2, -3), (7, 5), (12, 6)])
def test_mode_radial_matches_closed_formula(n: int, ell: int) -> None:
    for xi in (0.0, 0.4, 1.7, 3.2, 6.0):
        assert mode_radial(n, ell, xi) == pytest.approx(_reference_radial(n, ell, xi), rel=1e-11, abs=1e-14)


def test_mode_radial_table_shape_and_origin() -> None:
    xi = np.linspace(0.0, 5.0, 11)
    table = mode_radial_table(4, 2, xi)
    assert table.shape == (5, 11)
    assert np.all(table[:, 0] == 0.0)
    assert mode_radial(0, 0, 0.0) == pytest.approx(1.0 / math.sqrt(math.pi))


def test_basis_is_orthonormal() -> None:
    rule = radial_quadrature()
    worst = 0.0
    for ell in range(-6, 7):
        for n_in in range(13):
            overlaps = radial_overlaps(12, ell, n_in, ell, rule)
            overlaps[n_in] -= 1.0
            worst = max(worst, float(np.max(np.abs(overlaps))))
    assert worst <= 1e-10


def test_inner_product_is_exactly_zero_across_spin_or_ell() -> None:
    assert inner_product(ModeIndex(0, 1, Spin.UP), ModeIndex(0, 1, Spin.DOWN)) == 0
    assert inner_product(ModeIndex(2, 1), ModeIndex(2, 2)) == 0
    assert inner_product(ModeIndex(2, 1), ModeIndex(2, 1)) == pytest.approx(1.0, abs=1e-12)


def test_quadrature_order_for_known_sizes() -> None:
    assert quadrature_order_for(0) == 128
    assert quadrature_order_for(60) == 192
    assert quadrature_order_for(200) == 352
    assert quadrature_order_for(500) == 512


def test_mode_index_validation_and_ordering() -> None:
    with pytest.raises(ParameterError):
        ModeIndex(-1, 0)
    assert ModeIndex(0, 1, 1).spin is Spin.DOWN
    assert sorted([ModeIndex(1, 0), ModeIndex(0, 2), ModeIndex(0, -1, Spin.DOWN)]) == [
        ModeIndex(0, -1, Spin.DOWN),
        ModeIndex(0, 2),
        ModeIndex(1, 0),
    ]


def test_state_prunes_and_sorts_coefficients() -> None:
    state = SpinOrbitState(
        coeffs={ModeIndex(1, 0): 0.6, ModeIndex(0, 0): 0.8j, ModeIndex(5, 5): 1e-16}
    )
    assert list(state.coeffs) == [ModeIndex(0, 0), ModeIndex(1, 0)]
    assert state.captured_probability == pytest.approx(1.0)
    assert state.amplitude(ModeIndex(5, 5)) == 0
    assert state.ells() == (0,)
    assert len(state) == 2


def test_state_rejects_negative_tail() -> None:
    with pytest.raises(ParameterError):
        SpinOrbitState(coeffs={ModeIndex(0, 0): 1.0}, tail_estimate=-0.1)


def test_probability_by_spin() -> None:
    amp = 1.0 / math.sqrt(2.0)
    state = SpinOrbitState(coeffs={ModeIndex(0, 0, Spin.UP): amp, ModeIndex(3, 1, Spin.DOWN): -amp})
    by_spin = state.probability_by_spin()
    assert by_spin[Spin.UP] == pytest.approx(0.5)
    assert by_spin[Spin.DOWN] == pytest.approx(0.5)


def test_require_normalized_honours_tail_allowance() -> None:
    require_normalized(basis_state(ModeIndex(0, 0)))
    short = SpinOrbitState(coeffs={ModeIndex(0, 0): math.sqrt(0.99)}, tail_estimate=0.01)
    require_normalized(short)
    with pytest.raises(NormalizationError):
        require_normalized(SpinOrbitState(coeffs={ModeIndex(0, 0): 2.0}))
    assert state_norm(short) == pytest.approx(0.99)


def test_map_amplitudes_keeps_tail_and_width() -> None:
    state = SpinOrbitState(coeffs={ModeIndex(0, 0): 1.0}, sigma_perp=2e-7, tail_estimate=0.0)
    mapped = map_amplitudes(state, lambda mode, amp: 1j * amp)
    assert mapped.amplitude(ModeIndex(0, 0)) == 1j
    assert mapped.sigma_perp == 2e-7


def test_geometry_round_trip_and_energy() -> None:
    geometry = WavepacketGeometry(sigma_perp=100e-9)
    again = WavepacketGeometry.from_omega(geometry.omega_perp)
    assert again.sigma_perp == pytest.approx(100e-9, rel=1e-12)

    constants = PhysicalConstants()
    ground = total_energy(0, 0, 0.0, 0.0, geometry)
    assert ground == pytest.approx(constants.hbar * geometry.omega_perp)
    excited = total_energy(1, -2, 0.0, 0.0, geometry)
    assert excited == pytest.approx(5.0 * ground)

    k_z = wavenumber_from_wavelength(0.271e-9)
    shifted = total_energy(0, 0, k_z, 1e-27, geometry)
    assert shifted == pytest.approx(ground + kinetic_energy(k_z, constants) - 1e-27)


def test_geometry_rejects_nonpositive_inputs() -> None:
    with pytest.raises(ParameterError):
        WavepacketGeometry(sigma_perp=0.0)
    with pytest.raises(ParameterError):
        WavepacketGeometry.from_omega(-1.0)
    with pytest.raises(ParameterError):
        wavenumber_from_wavelength(0.0)


def test_total_energy_at_design_wavelength_is_kinetic() -> None:
    geometry = WavepacketGeometry(sigma_perp=100e-9)
    k_z = wavenumber_from_wavelength(0.271e-9)
    energy_mev = total_energy(0, 0, k_z, 0.0, geometry) / electron_volt * 1e3
    assert energy_mev == pytest.approx(81.81 / 2.71**2, abs=0.01)
    assert energy_mev == pytest.approx(11.14, abs=0.01)
