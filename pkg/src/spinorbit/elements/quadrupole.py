"""Quadrupole magnet: the spin-orbit coupling element.

Inside the magnet the spin sees U = cos(pi r / 2 r_c) + i sin(pi r / 2 r_c) M
with M = exp(i(phi - theta)) |down><up| + exp(-i(phi - theta)) |up><down|, so a
spin-up component at ell is split into a non-flipped branch at (ell, up) and a
flipped branch at (ell + 1, down); a spin-down component flips to (ell - 1, up).
The azimuthal integral fixes ell exactly, and the radial coefficients

    C_up(n) = pi int 2 xi R_{n,ell} R_{n_i,ell} cos(pi xi / (2 ratio)) dxi
    C_dn(n) = pi int 2 xi R_{n,ell+1} R_{n_i,ell} sin(pi xi / (2 ratio)) dxi

are real. The flipped amplitudes carry i exp(-i theta) (up -> down) or
i exp(+i theta) (down -> up).
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from ..config import PhysicalConstants
from ..errors import ParameterError
from ..numerics.basis import (
    ModeIndex,
    Spin,
    SpinOrbitState,
    quadrature_order_for,
    radial_overlaps,
    require_normalized,
)
from ..numerics.specfun import (
    LAGUERRE_MAX_ORDER,
    QuadratureRule,
    dawson,
    radial_quadrature,
)
from ..report.table import SweepTable

LOGGER = logging.getLogger(__name__)

DEFAULT_N_MAX = 60
DESIGN_RATIO = 1.82
SPIN_FLIP_PHASE = math.pi
NDFEB_SURFACE_FIELD = 0.7
SERIES_MIN_RATIO = 0.5
SERIES_MAX_N = 20
SERIES_TERMS = 400


def neutron_velocity(wavelength: float, constants: Optional[PhysicalConstants] = None) -> float:
    """v_z = 2 pi hbar / (m lambda), m/s."""

    c = constants or PhysicalConstants()
    _require_positive(wavelength=wavelength)
    return 2.0 * math.pi * c.hbar / (c.mass_n * wavelength)


def transit_time(length: float, wavelength: float, constants: Optional[PhysicalConstants] = None) -> float:
    _require_positive(length=length)
    return length / neutron_velocity(wavelength, constants)


def rc_from_physical(
    gradient: float,
    length: float,
    wavelength: float,
    constants: Optional[PhysicalConstants] = None,
) -> float:
    """Spin-flip radius r_c from gamma |grad B| r_c l_Q / v_z = pi, in metres."""

    c = constants or PhysicalConstants()
    _require_positive(gradient=gradient, length=length, wavelength=wavelength)
    velocity = neutron_velocity(wavelength, c)
    return SPIN_FLIP_PHASE * velocity / (c.gamma_n * gradient * length)


def gradient_from_rc(
    r_c: float,
    length: float,
    wavelength: float,
    constants: Optional[PhysicalConstants] = None,
) -> float:
    """Gradient (T/m) that puts the spin flip at radius r_c."""

    c = constants or PhysicalConstants()
    _require_positive(r_c=r_c, length=length, wavelength=wavelength)
    velocity = neutron_velocity(wavelength, c)
    return SPIN_FLIP_PHASE * velocity / (c.gamma_n * r_c * length)


def bore_radius(gradient: float, surface_field: float = NDFEB_SURFACE_FIELD) -> float:
    """Radius at which a linear quadrupole field reaches ``surface_field``."""

    _require_positive(gradient=gradient, surface_field=surface_field)
    return surface_field / gradient


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ParameterError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class QuadrupoleSpec:
    """Quadrupole in reduced form (ratio = r_c / sigma_perp) with optional physics."""

    ratio: float
    rotation: float = 0.0
    gradient: Optional[float] = None
    length: Optional[float] = None
    wavelength: Optional[float] = None
    r_c: Optional[float] = None
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self) -> None:
        _require_positive(ratio=self.ratio)
        physical = (self.gradient, self.length, self.wavelength, self.r_c)
        if all(value is not None for value in physical):
            phase = (
                self.constants.gamma_n
                * self.gradient
                * self.r_c
                * self.length
                / neutron_velocity(self.wavelength, self.constants)
            )
            if not math.isclose(phase, SPIN_FLIP_PHASE, rel_tol=1e-12):
                raise ParameterError(f"spin-flip condition violated: phase {phase} != pi")

    @classmethod
    def from_ratio(cls, ratio: float, rotation: float = 0.0) -> "QuadrupoleSpec":
        return cls(ratio=ratio, rotation=rotation)

    @classmethod
    def from_physical(
        cls,
        gradient: float,
        length: float,
        wavelength: float,
        sigma_perp: float,
        constants: Optional[PhysicalConstants] = None,
        rotation: float = 0.0,
    ) -> "QuadrupoleSpec":
        constants = constants or PhysicalConstants()
        _require_positive(sigma_perp=sigma_perp)
        r_c = rc_from_physical(gradient, length, wavelength, constants)
        return cls(
            ratio=r_c / sigma_perp,
            rotation=rotation,
            gradient=gradient,
            length=length,
            wavelength=wavelength,
            r_c=r_c,
            constants=constants,
        )

    @property
    def sigma_perp(self) -> Optional[float]:
        return None if self.r_c is None else self.r_c / self.ratio

    @property
    def radial_frequency(self) -> float:
        """pi sigma_perp / (2 r_c): the xi-frequency of the spin rotation angle."""

        return math.pi / (2.0 * self.ratio)


def quad_coefficients(
    ratio: float,
    n_max: int = DEFAULT_N_MAX,
    n_in: int = 0,
    ell_in: int = 0,
    spin_in: Spin = Spin.UP,
    rule: Optional[QuadratureRule] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Real coefficient families (C_keep, C_flip) for n = 0..n_max.

    C_keep stays at (ell_in, spin_in); C_flip lands at ell_in + 1 (spin-up input)
    or ell_in - 1 (spin-down input) with the opposite spin.
    """

    _require_positive(ratio=ratio)
    if not 0 <= n_max <= LAGUERRE_MAX_ORDER:
        raise ParameterError(f"n_max must lie in [0, {LAGUERRE_MAX_ORDER}], got {n_max}")
    rule = rule or radial_quadrature(quadrature_order_for(max(n_max, n_in)))
    angle = (math.pi / (2.0 * ratio)) * rule.xi
    shift = 1 if Spin(spin_in) is Spin.UP else -1
    keep = radial_overlaps(n_max, ell_in, n_in, ell_in, rule, np.cos(angle))
    flip = radial_overlaps(n_max, ell_in + shift, n_in, ell_in, rule, np.sin(angle))
    return keep, flip


def quad_apply(
    state: SpinOrbitState,
    spec: QuadrupoleSpec,
    n_max: int = DEFAULT_N_MAX,
    rule: Optional[QuadratureRule] = None,
) -> SpinOrbitState:
    """Apply the quadrupole to every component of ``state`` (linear extension).

    The output ``tail_estimate`` is the input probability that the n <= n_max
    truncation did not capture; the element is unitary, so nothing else is lost.
    """

    require_normalized(state)
    if rule is None:
        n_top = max([n_max] + [mode.n_r for mode, _ in state])
        rule = radial_quadrature(quadrature_order_for(n_top))
    flip_up_to_down = 1j * cmath.exp(-1j * spec.rotation)
    flip_down_to_up = 1j * cmath.exp(1j * spec.rotation)

    coeffs: Dict[ModeIndex, complex] = {}
    for mode_in, amp_in in state:
        keep, flip = quad_coefficients(
            spec.ratio, n_max, mode_in.n_r, mode_in.ell, mode_in.spin, rule
        )
        if mode_in.spin is Spin.UP:
            flip_ell, flip_spin, flip_phase = mode_in.ell + 1, Spin.DOWN, flip_up_to_down
        else:
            flip_ell, flip_spin, flip_phase = mode_in.ell - 1, Spin.UP, flip_down_to_up
        for n in range(n_max + 1):
            keep_key = ModeIndex(n, mode_in.ell, mode_in.spin)
            flip_key = ModeIndex(n, flip_ell, flip_spin)
            coeffs[keep_key] = coeffs.get(keep_key, 0j) + amp_in * keep[n]
            coeffs[flip_key] = coeffs.get(flip_key, 0j) + amp_in * flip_phase * flip[n]

    provisional = SpinOrbitState(coeffs=coeffs, sigma_perp=state.sigma_perp)
    incoming = state.captured_probability + state.tail_estimate
    tail = max(0.0, incoming - provisional.captured_probability)
    return SpinOrbitState(coeffs=provisional.coeffs, sigma_perp=state.sigma_perp, tail_estimate=tail)


def unitarity_residual(
    ratio: float, n_max: int = DEFAULT_N_MAX, rule: Optional[QuadratureRule] = None
) -> float:
    """|sum_n (C_up^2 + C_dn^2) - 1| for the (0,0,up) input."""

    keep, flip = quad_coefficients(ratio, n_max, rule=rule)
    return abs(float(np.sum(keep**2) + np.sum(flip**2)) - 1.0)


def ground_keep_closed_form(ratio: float) -> float:
    """C_up(0) for the (0,0,up) input: 1 - 2 b F(b) with b = pi / (4 ratio).

    Follows from int_0^inf 2 xi exp(-xi^2) cos(2 b xi) dxi = 1 - 2 b F(b).
    """

    _require_positive(ratio=ratio)
    b = math.pi / (4.0 * ratio)
    return 1.0 - 2.0 * b * dawson(b)


def ground_series_coefficients(ratio: float, n_r: int) -> Tuple[float, float]:
    """(C_up(n_r), C_dn(n_r)) for the (0,0,up) input from their power series in c.

    With c = pi / (2 ratio), expanding the cosine and sine under the Laguerre
    moments int u^m L_n(u) e^-u du gives

        C_up(n) = (-1)^n sum_{m>=n} (-1)^m binom(m, n) c^2m m! / (2m)!
        C_dn(n) = (-1)^n / sqrt(n+1) sum_{m>=n} (-1)^m binom(m, n) c^(2m+1) (m+1)! / (2m+1)!

    The series alternate, so ratio is held to >= SERIES_MIN_RATIO.
    """

    _require_positive(ratio=ratio)
    if ratio < SERIES_MIN_RATIO:
        raise ParameterError(f"series reference needs ratio >= {SERIES_MIN_RATIO}, got {ratio}")
    if not 0 <= n_r <= SERIES_MAX_N:
        raise ParameterError(f"n_r must lie in [0, {SERIES_MAX_N}], got {n_r}")
    c = math.pi / (2.0 * ratio)
    c2 = c * c
    even, odd = 1.0, c
    keep = flip = 0.0
    for m in range(SERIES_TERMS):
        if m > 0:
            even *= c2 / (2.0 * (2 * m - 1))
            odd *= c2 * (m + 1) / (2.0 * m * (2 * m + 1))
        if m < n_r:
            continue
        sign = -1.0 if (m - n_r) % 2 else 1.0
        weight = math.comb(m, n_r)
        keep += sign * weight * even
        flip += sign * weight * odd
        if weight * max(even, odd) < 1e-20:
            break
    return keep, flip / math.sqrt(n_r + 1)


def quad_coefficient_sweep(
    ratio_grid: Iterable[float],
    n_list: Sequence[int] = (0, 1),
    n_max: int = DEFAULT_N_MAX,
    rule: Optional[QuadratureRule] = None,
) -> SweepTable:
    """C_{n,0,up} and C_{n,1,down} for each n in ``n_list`` over the ratio grid."""

    ratios = [float(r) for r in ratio_grid]
    for ratio in ratios:
        _require_positive(ratio=ratio)
    if n_list and max(n_list) > n_max:
        raise ParameterError(f"requested n={max(n_list)} beyond n_max={n_max}")
    rule = rule or radial_quadrature(quadrature_order_for(n_max))

    LOGGER.info("Quadrupole coefficient sweep: %d ratios, n_max=%d", len(ratios), n_max)
    columns = ["ratio"]
    for n in n_list:
        columns += [f"c_up_n{n}", f"c_dn_n{n}"]

    rows = []
    worst = 0.0
    for ratio in ratios:
        keep, flip = quad_coefficients(ratio, n_max, rule=rule)
        worst = max(worst, abs(float(np.sum(keep**2) + np.sum(flip**2)) - 1.0))
        row = [ratio]
        for n in n_list:
            row += [float(keep[n]), float(flip[n])]
        rows.append(tuple(row))

    return SweepTable(
        column_names=tuple(columns),
        rows=rows,
        metadata={
            "input_mode": "n0_l0_up",
            "n_max_quad": str(n_max),
            "quadrature_order": str(rule.order),
            "max_unitarity_residual": f"{worst:.3e}",
        },
    )


__all__ = [
    "DESIGN_RATIO",
    "QuadrupoleSpec",
    "bore_radius",
    "gradient_from_rc",
    "ground_keep_closed_form",
    "ground_series_coefficients",
    "neutron_velocity",
    "quad_apply",
    "quad_coefficient_sweep",
    "quad_coefficients",
    "rc_from_physical",
    "transit_time",
    "unitarity_residual",
]
