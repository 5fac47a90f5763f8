"""Unit tests for concurrence of spin-orbit states."""

import math

import numpy as np
import pytest

from spinorbit.analysis.entanglement import (
    DensityMatrix,
    FilteredState,
    concurrence_at,
    concurrence_mixed,
    concurrence_pure,
    concurrence_sweep,
    filter_radial,
    partial_trace_orbital,
    purity,
    rho_from_coefficients,
    rho_traced,
    spin_flip_eigenvalues,
    two_branch_vector,
    two_qubit_labels,
    x_state_concurrence,
)
from spinorbit.elements.quadrupole import (
    DESIGN_RATIO,
    QuadrupoleSpec,
    ground_series_coefficients,
    quad_apply,
    quad_coefficients,
)
from spinorbit.errors import DensityMatrixError, NormalizationError
from spinorbit.numerics.basis import ModeIndex, Spin, SpinOrbitState, basis_state

BELL = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)


def _random_pure(rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    return psi / np.linalg.norm(psi)


def _random_unitary(rng: np.random.Generator, size: int) -> np.ndarray:
    z = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_mixed(rng: np.random.Generator) -> DensityMatrix:
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    return DensityMatrix(two_qubit_labels(), 0.5 * (rho + rho.conj().T))


def test_trivial_pure_states() -> None:
    assert concurrence_pure(BELL) == pytest.approx(1.0, abs=1e-12)
    assert concurrence_pure([1.0, 0.0, 0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)
    assert concurrence_mixed(DensityMatrix.from_vector(BELL)) == pytest.approx(1.0, abs=1e-12)
    assert concurrence_mixed(DensityMatrix.from_vector([0.0, 1.0, 0.0, 0.0])) == pytest.approx(0.0, abs=1e-12)


def test_maximally_mixed_and_werner_states() -> None:
    mixed = DensityMatrix.maximally_mixed()
    assert concurrence_mixed(mixed) == 0.0
    assert purity(mixed) == pytest.approx(0.25)

    p = 0.8
    werner = DensityMatrix(
        two_qubit_labels(), p * np.outer(BELL, BELL) + (1.0 - p) * np.eye(4) / 4.0
    )
    assert concurrence_mixed(werner) == pytest.approx((3.0 * p - 1.0) / 2.0, abs=1e-12)


def test_random_pure_states_agree_across_routes() -> None:
    rng = np.random.default_rng(20240607)
    for _ in range(200):
        psi = _random_pure(rng)
        closed = 2.0 * abs(psi[0] * psi[3] - psi[1] * psi[2])
        assert concurrence_pure(psi) == pytest.approx(closed, abs=1e-10)
        assert concurrence_mixed(DensityMatrix.from_vector(psi)) == pytest.approx(closed, abs=1e-10)


def test_spin_flip_eigenvalue_route_matches_svd_route() -> None:
    rng = np.random.default_rng(7)
    for _ in range(25):
        rho = _random_mixed(rng)
        lambdas = spin_flip_eigenvalues(rho)
        assert list(lambdas) == sorted(lambdas, reverse=True)
        via_eigenvalues = max(0.0, lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3])
        assert concurrence_mixed(rho) == pytest.approx(via_eigenvalues, abs=1e-8)


def test_concurrence_is_local_unitary_invariant() -> None:
    rng = np.random.default_rng(11)
    for _ in range(20):
        rho = DensityMatrix.from_vector(_random_pure(rng))
        local = np.kron(_random_unitary(rng, 2), _random_unitary(rng, 2))
        assert concurrence_mixed(rho.transformed(local)) == pytest.approx(concurrence_mixed(rho), abs=1e-10)


def test_partial_trace_of_bell_state_is_maximally_mixed() -> None:
    assert np.allclose(partial_trace_orbital(BELL), np.eye(2) / 2.0, atol=1e-15)


def test_validate_rejects_bad_matrices() -> None:
    labels = two_qubit_labels()
    with pytest.raises(DensityMatrixError):
        DensityMatrix(labels, np.eye(3) / 3.0)
    with pytest.raises(DensityMatrixError):
        DensityMatrix(labels, np.eye(4) / 2.0).validate()
    asymmetric = np.eye(4) / 4.0
    asymmetric[0, 1] = 0.1
    with pytest.raises(DensityMatrixError):
        concurrence_mixed(DensityMatrix(labels, asymmetric))
    with pytest.raises(DensityMatrixError):
        DensityMatrix(labels, np.diag([1.5, -0.5, 0.0, 0.0])).validate()


def test_pure_route_rejects_unnormalised_vector() -> None:
    with pytest.raises(NormalizationError):
        concurrence_pure([1.0, 0.0, 0.0, 1.0])


def test_x_state_shortcut() -> None:
    rho = DensityMatrix.from_vector(two_branch_vector(0.6, 0.8j))
    assert x_state_concurrence(rho) == pytest.approx(0.96)
    assert concurrence_mixed(rho) == pytest.approx(0.96, abs=1e-12)
    with pytest.raises(DensityMatrixError):
        x_state_concurrence(DensityMatrix.maximally_mixed())


def test_filtered_concurrences_at_design_ratio() -> None:
    row = concurrence_at(DESIGN_RATIO, (0, 1, 2))
    measured = [state.concurrence for state in row.filtered]
    assert measured[0] == pytest.approx(1.00, abs=0.01)
    assert measured[2] == pytest.approx(0.55, abs=0.01)
    assert measured == pytest.approx([1.0, 0.71158, 0.55405], abs=1e-4)
    for state in row.filtered:
        up, down = ground_series_coefficients(DESIGN_RATIO, state.eta)
        assert state.concurrence == pytest.approx(2.0 * abs(up * down) / (up * up + down * down), abs=1e-10)
    assert row.traced == pytest.approx(0.97, abs=0.01)
    assert len(row.as_tuple()) == 8


def test_filtered_probabilities_sum_to_one() -> None:
    c_up, c_down = quad_coefficients(DESIGN_RATIO, 60)
    total = sum(FilteredState.from_coefficients(eta, c_up, c_down).p_eta for eta in range(61))
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("eta", [0, 1, 2, 5])
def test_filter_radial_matches_coefficient_route(eta: int) -> None:
    spec = QuadrupoleSpec.from_ratio(DESIGN_RATIO, rotation=0.9)
    out = quad_apply(basis_state(ModeIndex(0, 0)), spec, n_max=60)
    c_up, c_down = quad_coefficients(DESIGN_RATIO, 60)
    from_state = filter_radial(out, eta)
    from_coeffs = FilteredState.from_coefficients(eta, c_up, c_down)
    assert from_state.p_eta == pytest.approx(from_coeffs.p_eta, abs=1e-12)
    assert abs(from_state.amp_up) == pytest.approx(abs(from_coeffs.amp_up), abs=1e-10)
    assert abs(from_state.amp_down) == pytest.approx(abs(from_coeffs.amp_down), abs=1e-10)
    assert from_state.concurrence == pytest.approx(from_coeffs.concurrence, abs=1e-10)
    assert concurrence_pure(from_state) == pytest.approx(from_state.concurrence, abs=1e-10)


def test_traced_matrix_from_state_matches_coefficients() -> None:
    out = quad_apply(basis_state(ModeIndex(0, 0)), QuadrupoleSpec.from_ratio(DESIGN_RATIO), n_max=60)
    c_up, c_down = quad_coefficients(DESIGN_RATIO, 60)
    from_state = rho_traced(out)
    from_coeffs = rho_from_coefficients(c_up, c_down)
    assert np.allclose(from_state.entries, from_coeffs.entries, atol=1e-12)

    weight = float(np.sum(c_up**2) + np.sum(c_down**2))
    coherence = from_state.element((0, Spin.UP), (1, Spin.DOWN))
    assert coherence == pytest.approx(-1j * float(np.sum(c_up * c_down)) / weight, abs=1e-12)
    assert coherence.imag < 0.0
    assert concurrence_mixed(from_state) == pytest.approx(x_state_concurrence(from_state), abs=1e-10)


def test_rotation_does_not_change_concurrence() -> None:
    c_up, c_down = quad_coefficients(2.4, 60)
    plain = concurrence_mixed(rho_from_coefficients(c_up, c_down))
    rotated = concurrence_mixed(rho_from_coefficients(c_up, c_down, rotation=1.3))
    assert rotated == pytest.approx(plain, abs=1e-12)


def test_two_branch_form_is_required() -> None:
    amp = 1.0 / math.sqrt(2.0)
    stray = SpinOrbitState(coeffs={ModeIndex(0, 0, Spin.UP): amp, ModeIndex(0, 3, Spin.DOWN): amp})
    with pytest.raises(DensityMatrixError):
        filter_radial(stray, 0)
    with pytest.raises(DensityMatrixError):
        rho_traced(stray)


def test_degenerate_subspace_has_zero_concurrence() -> None:
    state = FilteredState.from_coefficients(5, [1.0, 0.0], [0.0, 0.0])
    assert state.degenerate
    assert state.concurrence == 0.0
    assert concurrence_pure(state) == 0.0


def test_traced_peak_is_flat_around_design_ratio() -> None:
    table = concurrence_sweep(np.arange(1.70, 1.9401, 0.02), etas=(), n_max=60)
    assert table.column_names == ("ratio", "conc_traced")
    ratio, peak = table.argmax("conc_traced")
    assert peak == pytest.approx(0.97, abs=0.01)
    assert float(table.metadata["argmax_ratio"]) == ratio
    assert 1.82 <= ratio <= 1.90

    at_design = concurrence_at(DESIGN_RATIO, ()).traced
    assert at_design == pytest.approx(0.9709, abs=1e-3)
    assert 0.0 <= peak - at_design <= 1e-3


def test_traced_matrix_at_design_ratio_is_mixed() -> None:
    out = quad_apply(basis_state(ModeIndex(0, 0)), QuadrupoleSpec.from_ratio(DESIGN_RATIO), n_max=60)
    rho = rho_traced(out)
    assert complex(np.trace(rho.entries)).real == pytest.approx(1.0, abs=1e-12)
    mixedness = purity(rho)
    assert mixedness < 1.0
    assert mixedness == pytest.approx((0.97**2 + 1.0) / 2.0, abs=0.01)
    assert mixedness == pytest.approx(0.9738, abs=1e-3)


def test_traced_matrix_becomes_pure_without_quadrupole() -> None:
    out = quad_apply(basis_state(ModeIndex(0, 0)), QuadrupoleSpec.from_ratio(1e9), n_max=60)
    rho = rho_traced(out)
    assert purity(rho) == pytest.approx(1.0, abs=1e-9)
    assert rho.element((0, Spin.UP), (0, Spin.UP)) == pytest.approx(1.0, abs=1e-9)
    assert x_state_concurrence(rho) < 1e-8


def test_mixed_concurrence_enforces_spin_flip_residue_tolerance() -> None:
    rng = np.random.default_rng(5)
    rho = _random_mixed(rng)
    with pytest.raises(DensityMatrixError):
        concurrence_mixed(rho, imag_tolerance=-1.0)
    assert concurrence_mixed(rho) == pytest.approx(concurrence_mixed(rho, imag_tolerance=1e-6), abs=1e-15)
