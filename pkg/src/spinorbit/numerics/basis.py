"""Spin x Laguerre-Gauss mode space.

Modes are psi_{n,l}(xi, phi) = R_{n,l}(xi) exp(i l phi) with
R_{n,l}(xi) = sqrt(n! / (pi (n+|l|)!)) xi^|l| exp(-xi^2/2) L_n^|l|(xi^2),
in units where sigma_perp = 1. The azimuthal integral of any overlap is done
analytically, which leaves pi * int 2 xi R_a R_b g(xi) dxi for the radial part.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Tuple

import numpy as np

from ..config import PhysicalConstants
from ..errors import NormalizationError, ParameterError
from .specfun import (
    DEFAULT_QUADRATURE_ORDER,
    LAGUERRE_MAX_ORDER,
    PANEL_NODES,
    QUADRATURE_MAX_ORDER,
    QuadratureRule,
    laguerre_table,
    log_gamma,
    radial_quadrature,
)

LOGGER = logging.getLogger(__name__)

PRUNE_THRESHOLD = 1e-14
NORM_TOLERANCE = 1e-6


class Spin(IntEnum):
    UP = 0
    DOWN = 1

    @property
    def label(self) -> str:
        return "up" if self is Spin.UP else "down"


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Label (n_r, ell, spin); ordering is n_r, then ell, then spin."""

    n_r: int
    ell: int
    spin: Spin = Spin.UP

    def __post_init__(self) -> None:
        if self.n_r < 0:
            raise ParameterError(f"radial quantum number must be >= 0, got {self.n_r}")
        object.__setattr__(self, "spin", Spin(self.spin))


@dataclass(frozen=True)
class WavepacketGeometry:
    """Transverse geometry; omega_perp = hbar / (2 m sigma_perp^2)."""

    sigma_perp: float
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self) -> None:
        if not self.sigma_perp > 0:
            raise ParameterError(f"sigma_perp must be positive, got {self.sigma_perp}")

    @property
    def omega_perp(self) -> float:
        c = self.constants
        return c.hbar / (2.0 * c.mass_n * self.sigma_perp**2)

    @classmethod
    def from_omega(
        cls, omega_perp: float, constants: Optional[PhysicalConstants] = None
    ) -> "WavepacketGeometry":
        constants = constants or PhysicalConstants()
        if not omega_perp > 0:
            raise ParameterError(f"omega_perp must be positive, got {omega_perp}")
        sigma = math.sqrt(constants.hbar / (2.0 * constants.mass_n * omega_perp))
        return cls(sigma_perp=sigma, constants=constants)


@dataclass(frozen=True)
class SpinOrbitState:
    """Sparse, immutable coefficient map over ModeIndex.

    ``captured_probability`` is recomputed from the stored amplitudes on
    construction; ``tail_estimate`` is supplied by the producing element.
    """

    coeffs: Mapping[ModeIndex, complex]
    sigma_perp: float = 100e-9
    tail_estimate: float = 0.0
    captured_probability: float = field(init=False)

    def __post_init__(self) -> None:
        pruned = {
            mode: complex(amp)
            for mode, amp in sorted(self.coeffs.items())
            if abs(amp) >= PRUNE_THRESHOLD
        }
        object.__setattr__(self, "coeffs", pruned)
        object.__setattr__(
            self, "captured_probability", float(sum(abs(a) ** 2 for a in pruned.values()))
        )
        if self.tail_estimate < 0:
            raise ParameterError("tail_estimate must be non-negative")

    def __iter__(self) -> Iterator[Tuple[ModeIndex, complex]]:
        return iter(self.coeffs.items())

    def __len__(self) -> int:
        return len(self.coeffs)

    def amplitude(self, mode: ModeIndex) -> complex:
        return self.coeffs.get(mode, 0j)

    def ells(self) -> Tuple[int, ...]:
        return tuple(sorted({mode.ell for mode in self.coeffs}))

    def probability_by_spin(self) -> Dict[Spin, float]:
        totals = {Spin.UP: 0.0, Spin.DOWN: 0.0}
        for mode, amp in self.coeffs.items():
            totals[mode.spin] += abs(amp) ** 2
        return totals


def basis_state(mode: ModeIndex, sigma_perp: float = 100e-9) -> SpinOrbitState:
    return SpinOrbitState(coeffs={mode: 1.0 + 0j}, sigma_perp=sigma_perp)


def state_norm(state: SpinOrbitState) -> float:
    """Sum of |c|^2 over the stored coefficients."""

    return float(sum(abs(a) ** 2 for a in state.coeffs.values()))


def require_normalized(state: SpinOrbitState, tol: float = NORM_TOLERANCE) -> None:
    norm = state_norm(state)
    if abs(norm - 1.0) > tol + state.tail_estimate:
        raise NormalizationError(
            f"input state has norm {norm:.12g} (tail estimate {state.tail_estimate:.3g})"
        )


def _log_norm(n: np.ndarray, abs_ell: int) -> np.ndarray:
    return 0.5 * (log_gamma(n + 1.0) - log_gamma(n + abs_ell + 1.0) - math.log(math.pi))


def mode_radial_table(n_max: int, ell: int, xi: np.ndarray) -> np.ndarray:
    """R_{n,ell}(xi) for n = 0..n_max, shape (n_max + 1, len(xi))."""

    if n_max > LAGUERRE_MAX_ORDER:
        raise ParameterError(f"n_r cap is {LAGUERRE_MAX_ORDER}, got {n_max}")
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    abs_ell = abs(ell)
    lag = laguerre_table(n_max, abs_ell, xi * xi)
    with np.errstate(divide="ignore"):
        log_power = np.where(xi > 0, abs_ell * np.log(np.where(xi > 0, xi, 1.0)), 0.0)
    envelope = np.exp(log_power - 0.5 * xi * xi)
    if abs_ell > 0:
        envelope = np.where(xi > 0, envelope, 0.0)
    norms = np.exp(_log_norm(np.arange(n_max + 1, dtype=float), abs_ell))
    return norms[:, None] * envelope[None, :] * lag


def mode_radial(n_r: int, ell: int, xi: float) -> float:
    """Radial profile R_{n_r,ell}(xi) of a single mode (sigma_perp = 1)."""

    if n_r < 0:
        raise ParameterError(f"n_r must be >= 0, got {n_r}")
    return float(mode_radial_table(n_r, ell, np.array([xi]))[n_r, 0])


@lru_cache(maxsize=64)
def _cached_table(n_max: int, ell: int, rule: QuadratureRule) -> np.ndarray:
    table = mode_radial_table(n_max, ell, rule.xi)
    table.setflags(write=False)
    return table


def radial_overlaps(
    n_max: int,
    ell_out: int,
    n_in: int,
    ell_in: int,
    rule: QuadratureRule,
    weight: Optional[np.ndarray] = None,
) -> np.ndarray:
    """pi * int 2 xi R_{n,ell_out} R_{n_in,ell_in} g(xi) dxi for n = 0..n_max.

    ``weight`` holds g sampled at the rule nodes; g = 1 when omitted.
    """

    xi = rule.xi
    out_table = _cached_table(n_max, ell_out, rule)
    in_profile = _cached_table(n_in, ell_in, rule)[n_in]
    integrand = 2.0 * math.pi * xi * rule.w * in_profile
    if weight is not None:
        integrand = integrand * weight
    return out_table @ integrand


def inner_product(a: ModeIndex, b: ModeIndex, rule: Optional[QuadratureRule] = None) -> complex:
    """<a|b>: exactly zero across spin or ell, otherwise the radial quadrature."""

    if a.spin != b.spin or a.ell != b.ell:
        return 0j
    rule = rule or radial_quadrature(DEFAULT_QUADRATURE_ORDER)
    return complex(radial_overlaps(a.n_r, a.ell, b.n_r, b.ell, rule)[a.n_r])


def quadrature_order_for(n_max: int, minimum: int = DEFAULT_QUADRATURE_ORDER) -> int:
    """Node count resolving modes up to n_max on every panel."""

    wavenumber = math.sqrt(4.0 * n_max + 2.0)
    panels = math.ceil(0.75 * wavenumber)
    return int(min(QUADRATURE_MAX_ORDER, max(minimum, PANEL_NODES * panels)))


def total_energy(
    n_r: int,
    ell: int,
    k_z: float,
    B_dot_mu: float,
    geometry: WavepacketGeometry,
) -> float:
    """hbar w (2 n_r + |ell| + 1) + hbar^2 k_z^2 / 2m - B.mu, in joules."""

    c = geometry.constants
    transverse = c.hbar * geometry.omega_perp * (2 * n_r + abs(ell) + 1)
    return transverse + kinetic_energy(k_z, c) - B_dot_mu


def kinetic_energy(k_z: float, constants: Optional[PhysicalConstants] = None) -> float:
    c = constants or PhysicalConstants()
    return (c.hbar * k_z) ** 2 / (2.0 * c.mass_n)


def wavenumber_from_wavelength(wavelength: float) -> float:
    if not wavelength > 0:
        raise ParameterError(f"wavelength must be positive, got {wavelength}")
    return 2.0 * math.pi / wavelength


def superpose(states: Iterable[Tuple[complex, SpinOrbitState]], tail_estimate: float = 0.0) -> SpinOrbitState:
    """Linear combination sum_k w_k |state_k>."""

    coeffs: Dict[ModeIndex, complex] = {}
    sigma = None
    for weight, state in states:
        sigma = sigma if sigma is not None else state.sigma_perp
        for mode, amp in state:
            coeffs[mode] = coeffs.get(mode, 0j) + weight * amp
    return SpinOrbitState(coeffs=coeffs, sigma_perp=sigma or 100e-9, tail_estimate=tail_estimate)


def map_amplitudes(
    state: SpinOrbitState, fn: Callable[[ModeIndex, complex], complex]
) -> SpinOrbitState:
    return SpinOrbitState(
        coeffs={mode: fn(mode, amp) for mode, amp in state},
        sigma_perp=state.sigma_perp,
        tail_estimate=state.tail_estimate,
    )


__all__ = [
    "ModeIndex",
    "PRUNE_THRESHOLD",
    "Spin",
    "SpinOrbitState",
    "WavepacketGeometry",
    "basis_state",
    "inner_product",
    "kinetic_energy",
    "map_amplitudes",
    "mode_radial",
    "mode_radial_table",
    "quadrature_order_for",
    "radial_overlaps",
    "require_normalized",
    "state_norm",
    "superpose",
    "total_energy",
    "wavenumber_from_wavelength",
]
