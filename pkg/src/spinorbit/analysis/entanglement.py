"""Concurrence of the spin-orbit states leaving the quadrupole.

Two-qubit objects live in the fixed product basis orbital (x) spin,
ordered ((l0, up), (l0, down), (l0 + 1, up), (l0 + 1, down)). Complex
conjugation in the Wootters construction is taken in this basis.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..elements.quadrupole import DEFAULT_N_MAX, quad_coefficients
from ..errors import DensityMatrixError, NormalizationError, ParameterError
from ..numerics.basis import ModeIndex, Spin, SpinOrbitState, quadrature_order_for
from ..numerics.specfun import QuadratureRule, radial_quadrature
from ..report.table import SweepTable

LOGGER = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-10
EIGENVALUE_FLOOR = -1e-10
SUPPORT_TOLERANCE = 1e-12
PURE_NORM_TOLERANCE = 1e-10
SPIN_FLIP_IMAG_TOLERANCE = 1e-10
SPECTRUM_AGREEMENT = 1e-6
DEGENERATE_PROBABILITY = 1e-300
DEFAULT_ETAS = (0, 1, 2)

Label = Tuple[int, Spin]

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SPIN_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y)


def two_qubit_labels(ell0: int = 0) -> Tuple[Label, ...]:
    return ((ell0, Spin.UP), (ell0, Spin.DOWN), (ell0 + 1, Spin.UP), (ell0 + 1, Spin.DOWN))


@dataclass(frozen=True)
class DensityMatrix:
    basis_labels: Tuple[Label, ...]
    entries: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.array(self.entries, dtype=complex)
        size = len(self.basis_labels)
        if matrix.shape != (size, size):
            raise DensityMatrixError(
                f"matrix shape {matrix.shape} does not match {size} basis labels"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "entries", matrix)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))

    @property
    def dimension(self) -> int:
        return len(self.basis_labels)

    @classmethod
    def from_vector(cls, vector: Sequence[complex], labels: Optional[Sequence[Label]] = None) -> "DensityMatrix":
        psi = np.asarray(vector, dtype=complex)
        return cls(basis_labels=tuple(labels or two_qubit_labels()), entries=np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, labels: Optional[Sequence[Label]] = None) -> "DensityMatrix":
        labels = tuple(labels or two_qubit_labels())
        return cls(basis_labels=labels, entries=np.eye(len(labels)) / len(labels))

    def validate(self) -> "DensityMatrix":
        """Raise DensityMatrixError unless Hermitian, unit trace and PSD up to round-off."""

        rho = self.entries
        asymmetry = float(np.max(np.abs(rho - rho.conj().T)))
        if asymmetry > HERMITIAN_TOLERANCE:
            raise DensityMatrixError(f"matrix is not Hermitian (deviation {asymmetry:.3e})")
        trace = complex(np.trace(rho))
        if abs(trace - 1.0) > TRACE_TOLERANCE:
            raise DensityMatrixError(f"trace {trace.real:.12g} differs from 1")
        lowest = float(np.min(np.linalg.eigvalsh(rho)))
        if lowest < EIGENVALUE_FLOOR:
            raise DensityMatrixError(f"matrix has negative eigenvalue {lowest:.3e}")
        return self

    def index(self, label: Label) -> int:
        return self.basis_labels.index((label[0], Spin(label[1])))

    def element(self, row: Label, col: Label) -> complex:
        return complex(self.entries[self.index(row), self.index(col)])

    def transformed(self, unitary: np.ndarray) -> "DensityMatrix":
        return DensityMatrix(self.basis_labels, unitary @ self.entries @ unitary.conj().T)


@dataclass(frozen=True)
class FilteredState:
    """Renormalised pure state left after post-selecting radial number eta."""

    eta: int
    amp_up: float
    amp_down: float
    p_eta: float
    degenerate: bool = False

    def __post_init__(self) -> None:
        if self.eta < 0:
            raise ParameterError(f"eta must be >= 0, got {self.eta}")
        if not self.degenerate and abs(self.amp_up**2 + self.amp_down**2 - 1.0) > 1e-12:
            raise NormalizationError("filtered amplitudes are not normalised")

    @classmethod
    def from_coefficients(cls, eta: int, c_up: Sequence[float], c_down: Sequence[float]) -> "FilteredState":
        up = float(c_up[eta]) if eta < len(c_up) else 0.0
        down = float(c_down[eta]) if eta < len(c_down) else 0.0
        return cls._normalised(eta, up, down)

    @classmethod
    def _normalised(cls, eta: int, up: float, down: float) -> "FilteredState":
        p_eta = up * up + down * down
        if p_eta <= DEGENERATE_PROBABILITY:
            return cls(eta=eta, amp_up=0.0, amp_down=0.0, p_eta=0.0, degenerate=True)
        norm = math.sqrt(p_eta)
        return cls(eta=eta, amp_up=up / norm, amp_down=down / norm, p_eta=p_eta)

    @property
    def concurrence(self) -> float:
        """2 |amp_up amp_down|; zero for an empty subspace."""

        if self.degenerate:
            return 0.0
        return 2.0 * abs(self.amp_up * self.amp_down)

    def vector(self) -> np.ndarray:
        return two_branch_vector(self.amp_up, self.amp_down)


def two_branch_vector(amp_up: complex, amp_down: complex) -> np.ndarray:
    """amp_up |l0, up> + amp_down |l0 + 1, down> in the two-qubit basis."""

    return np.array([amp_up, 0.0, 0.0, amp_down], dtype=complex)


def _branch_ell(state: SpinOrbitState) -> int:
    ells_up = {mode.ell for mode, _ in state if mode.spin is Spin.UP}
    ells_down = {mode.ell for mode, _ in state if mode.spin is Spin.DOWN}
    if not ells_up and not ells_down:
        raise DensityMatrixError("state has no stored amplitudes")
    ell0 = min(ells_up) if ells_up else min(ells_down) - 1
    if ells_up - {ell0} or ells_down - {ell0 + 1}:
        raise DensityMatrixError(
            f"state is not of two-branch form (up ells {sorted(ells_up)}, down ells {sorted(ells_down)})"
        )
    return ell0


def _branch_phase(amplitudes: Iterable[complex]) -> complex:
    values = list(amplitudes)
    if not values:
        return 1.0 + 0j
    peak = max(values, key=abs)
    return peak / abs(peak)


def filter_radial(state: SpinOrbitState, eta: int) -> FilteredState:
    """Project a two-branch quadrupole output onto radial number eta and renormalise.

    Each branch carries one global phase (1 for the kept branch, i exp(-i theta)
    for the flipped one); it is divided out using the branch's largest amplitude,
    which leaves the real coefficient families.
    """

    ell0 = _branch_ell(state)
    ups = {mode.n_r: amp for mode, amp in state if mode.spin is Spin.UP}
    downs = {mode.n_r: amp for mode, amp in state if mode.spin is Spin.DOWN}
    up_phase = _branch_phase(ups.values())
    down_phase = _branch_phase(downs.values())
    up = (state.amplitude(ModeIndex(eta, ell0, Spin.UP)) / up_phase).real
    down = (state.amplitude(ModeIndex(eta, ell0 + 1, Spin.DOWN)) / down_phase).real
    filtered = FilteredState._normalised(eta, up, down)
    if filtered.degenerate:
        LOGGER.debug("Radial subspace eta=%d is empty", eta)
    return filtered


def partial_trace_orbital(psi: Sequence[complex]) -> np.ndarray:
    """Reduced spin matrix of a pure two-qubit vector (orbital traced out)."""

    amplitudes = np.asarray(psi, dtype=complex).reshape(2, 2)
    return amplitudes.T @ amplitudes.conj()


def concurrence_pure(psi: Union[FilteredState, Sequence[complex]]) -> float:
    """sqrt(2 (1 - Tr rho_S^2)) with rho_S the reduced spin matrix."""

    vector = psi.vector() if isinstance(psi, FilteredState) else np.asarray(psi, dtype=complex)
    if isinstance(psi, FilteredState) and psi.degenerate:
        return 0.0
    if vector.shape != (4,):
        raise ParameterError(f"expected a two-qubit vector, got shape {vector.shape}")
    norm = float(np.vdot(vector, vector).real)
    if abs(norm - 1.0) > PURE_NORM_TOLERANCE:
        raise NormalizationError(f"pure state has norm {norm:.12g}")
    rho_spin = partial_trace_orbital(vector)
    spin_purity = float(np.trace(rho_spin @ rho_spin).real)
    return math.sqrt(max(0.0, 2.0 * (1.0 - spin_purity)))


def _require_two_qubit(rho: DensityMatrix) -> np.ndarray:
    if rho.dimension != 4:
        raise DensityMatrixError(f"concurrence needs a 4x4 matrix, got {rho.dimension}")
    return rho.validate().entries


def _spin_flip_spectrum(matrix: np.ndarray, imag_tolerance: float) -> np.ndarray:
    rho_tilde = SPIN_FLIP @ matrix.conj() @ SPIN_FLIP
    eigenvalues = np.linalg.eigvals(matrix @ rho_tilde)
    residue = float(np.max(np.abs(eigenvalues.imag)))
    if residue > imag_tolerance:
        raise DensityMatrixError(f"spin-flip product has complex eigenvalues (residue {residue:.3e})")
    real = eigenvalues.real
    if float(np.min(real)) < EIGENVALUE_FLOOR:
        raise DensityMatrixError(f"spin-flip product has negative eigenvalue {np.min(real):.3e}")
    return np.sort(np.sqrt(np.clip(real, 0.0, None)))[::-1]


def concurrence_mixed(rho: DensityMatrix, imag_tolerance: float = SPIN_FLIP_IMAG_TOLERANCE) -> float:
    """Wootters concurrence max(0, l1 - l2 - l3 - l4).

    The l_i are the square roots of the eigenvalues of the non-Hermitian
    product rho (sy x sy) rho* (sy x sy); a spectrum with an imaginary residue
    above ``imag_tolerance`` raises DensityMatrixError. The same l_i are the
    singular values of V^T (sy x sy) V with rho = V V^dagger; the result is
    taken from those, which keep the small l_i to full precision.
    """

    matrix = _require_two_qubit(rho)
    spectrum = _spin_flip_spectrum(matrix, imag_tolerance)
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    factor = eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))
    tau = factor.T @ SPIN_FLIP @ factor
    lambdas = np.sort(np.linalg.svd(tau, compute_uv=False))[::-1]
    if abs(float(lambdas[0] - spectrum[0])) > SPECTRUM_AGREEMENT:
        raise DensityMatrixError(
            f"spin-flip spectrum disagrees with its factorised form ({spectrum[0]:.6e} vs {lambdas[0]:.6e})"
        )
    return max(0.0, float(lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]))


def spin_flip_eigenvalues(rho: DensityMatrix, imag_tolerance: float = SPIN_FLIP_IMAG_TOLERANCE) -> np.ndarray:
    """Square roots of the eigenvalues of rho rho~, descending."""

    return _spin_flip_spectrum(_require_two_qubit(rho), imag_tolerance)


def purity(rho: DensityMatrix) -> float:
    return float(np.trace(rho.entries @ rho.entries).real)


def rho_from_vectors(vectors: Iterable[np.ndarray], ell0: int = 0) -> DensityMatrix:
    """sum_n v_n v_n^dagger normalised to unit trace."""

    total = np.zeros((4, 4), dtype=complex)
    for vector in vectors:
        total += np.outer(vector, vector.conj())
    trace = float(np.trace(total).real)
    if trace <= 0:
        raise DensityMatrixError("cannot normalise an empty density matrix")
    total /= trace
    return DensityMatrix(two_qubit_labels(ell0), 0.5 * (total + total.conj().T))


def rho_from_coefficients(
    c_up: Sequence[float],
    c_down: Sequence[float],
    rotation: float = 0.0,
    ell0: int = 0,
) -> DensityMatrix:
    """Radially traced matrix of sum_n C_up(n)|n,l0,up> + i e^{-i theta} C_dn(n)|n,l0+1,down>."""

    phase = 1j * np.exp(-1j * rotation)
    vectors = (two_branch_vector(up, phase * down) for up, down in zip(c_up, c_down))
    return rho_from_vectors(vectors, ell0)


def rho_traced(quad_output: SpinOrbitState) -> DensityMatrix:
    """Trace a two-branch quadrupole output over the radial number.

    Built from the stored amplitudes, so the coherence is -i sum C_up C_dn for an
    unrotated magnet; the trace is renormalised over the captured probability.
    """

    ell0 = _branch_ell(quad_output)
    per_radial: Dict[int, np.ndarray] = {}
    for mode, amp in quad_output:
        vector = per_radial.setdefault(mode.n_r, np.zeros(4, dtype=complex))
        vector[0 if mode.spin is Spin.UP else 3] = amp
    return rho_from_vectors(per_radial.values(), ell0)


def x_state_concurrence(rho: DensityMatrix) -> float:
    """2 |rho[(l0,up),(l0+1,down)]| for a matrix supported on that pair only."""

    mask = np.ones((4, 4), dtype=bool)
    for i, j in ((0, 0), (0, 3), (3, 0), (3, 3)):
        mask[i, j] = False
    stray = float(np.max(np.abs(rho.entries[mask]))) if rho.dimension == 4 else math.inf
    if stray > SUPPORT_TOLERANCE:
        raise DensityMatrixError(f"matrix has support outside the X pair ({stray:.3e})")
    return 2.0 * abs(complex(rho.entries[0, 3]))


@dataclass
class ConcurrenceRow:
    ratio: float
    filtered: List[FilteredState] = field(default_factory=list)
    traced: float = 0.0

    def as_tuple(self) -> Tuple[float, ...]:
        return (
            self.ratio,
            *(state.concurrence for state in self.filtered),
            *(state.p_eta for state in self.filtered),
            self.traced,
        )


def concurrence_at(
    ratio: float,
    etas: Sequence[int] = DEFAULT_ETAS,
    n_max: int = DEFAULT_N_MAX,
    rule: Optional[QuadratureRule] = None,
) -> ConcurrenceRow:
    """Filtered and traced concurrences behind a quadrupole of the given ratio."""

    if etas and max(etas) > n_max:
        raise ParameterError(f"eta {max(etas)} beyond n_max={n_max}")
    c_up, c_down = quad_coefficients(ratio, n_max, rule=rule)
    filtered = [FilteredState.from_coefficients(eta, c_up, c_down) for eta in etas]
    traced = concurrence_mixed(rho_from_coefficients(c_up, c_down))
    return ConcurrenceRow(ratio=float(ratio), filtered=filtered, traced=traced)


def concurrence_sweep(
    ratio_grid: Iterable[float],
    etas: Sequence[int] = DEFAULT_ETAS,
    n_max: int = DEFAULT_N_MAX,
    rule: Optional[QuadratureRule] = None,
) -> SweepTable:
    """Per ratio: filtered concurrences, subspace probabilities and the traced concurrence."""

    ratios = [float(r) for r in ratio_grid]
    rule = rule or radial_quadrature(quadrature_order_for(n_max))
    LOGGER.info("Concurrence sweep: %d ratios, etas=%s, n_max=%d", len(ratios), list(etas), n_max)

    rows = [concurrence_at(ratio, etas, n_max, rule) for ratio in ratios]
    columns = (
        ("ratio",)
        + tuple(f"conc_eta{eta}" for eta in etas)
        + tuple(f"p_eta{eta}" for eta in etas)
        + ("conc_traced",)
    )
    metadata = {
        "input_mode": "n0_l0_up",
        "n_max_quad": str(n_max),
        "quadrature_order": str(rule.order),
    }
    degenerate = sorted({s.eta for row in rows for s in row.filtered if s.degenerate})
    if degenerate:
        metadata["degenerate_etas"] = ",".join(str(eta) for eta in degenerate)
    if rows:
        best = max(rows, key=lambda row: row.traced)
        metadata["argmax_ratio"] = repr(best.ratio)
        metadata["max_conc_traced"] = repr(best.traced)
        LOGGER.info("Traced concurrence peaks at %.6f (ratio %.4f)", best.traced, best.ratio)
    return SweepTable(column_names=columns, rows=[row.as_tuple() for row in rows], metadata=metadata)


__all__ = [
    "ConcurrenceRow",
    "DensityMatrix",
    "FilteredState",
    "SPIN_FLIP",
    "concurrence_at",
    "concurrence_mixed",
    "concurrence_pure",
    "concurrence_sweep",
    "filter_radial",
    "partial_trace_orbital",
    "purity",
    "rho_from_coefficients",
    "rho_from_vectors",
    "rho_traced",
    "spin_flip_eigenvalues",
    "two_branch_vector",
    "two_qubit_labels",
    "x_state_concurrence",
]
