"""Spiral phase plate: exp(i q phi) acting on the orbital part of a state.

The azimuthal projection is analytic. For an input component with
azimuthal number l_i, the weight of output sector l is
exp(i pi d) sinc(pi d) with d = q + l_i - l; the radial factor is the
mode overlap between (n, l) and (n_i, l_i), computed by quadrature.

Radial overlaps always come from quadrature. For the (0,0) input they match
(|l|/2) Gamma(n + |l|/2) / sqrt(n! (n+|l|)!), kept in ``spp_closed_form`` as a
cross-check only; the variant with Gamma(1 + |l|/2) and no n dependence sums to
about 0.31 for q = 1 and is not used.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from ..errors import ParameterError
from ..numerics.basis import (
    ModeIndex,
    SpinOrbitState,
    quadrature_order_for,
    radial_overlaps,
    require_normalized,
)
from ..numerics.specfun import (
    LAGUERRE_MAX_ORDER,
    QuadratureRule,
    log_gamma,
    radial_quadrature,
    sinc,
)
from ..report.table import SweepTable

LOGGER = logging.getLogger(__name__)

DEFAULT_N_MAX = 200
DEFAULT_ELL_WINDOW = 50
FIG1_MODES = (
    ModeIndex(0, 0),
    ModeIndex(0, 1),
    ModeIndex(0, -1),
    ModeIndex(1, 1),
    ModeIndex(1, -1),
)


@dataclass(frozen=True)
class SppSpec:
    """Reduced plate parameters with optional physical provenance.

    When the material fields are given they must reproduce q and alpha0:
    q = -N b_c lambda h_s / (2 pi) and alpha0 = -N b_c lambda h_0.
    """

    q: float
    alpha0: float = 0.0
    material_Nbc: Optional[float] = None
    step_height: Optional[float] = None
    base_height: Optional[float] = None
    wavelength: Optional[float] = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.q):
            raise ParameterError(f"topological charge must be finite, got {self.q}")
        if self.material_Nbc is None or self.wavelength is None:
            return
        if self.step_height is not None:
            expected_q = -self.material_Nbc * self.wavelength * self.step_height / (2.0 * math.pi)
            if not math.isclose(self.q, expected_q, rel_tol=1e-12, abs_tol=1e-300):
                raise ParameterError(f"q={self.q} inconsistent with material parameters ({expected_q})")
        if self.base_height is not None:
            expected_alpha = -self.material_Nbc * self.wavelength * self.base_height
            if not math.isclose(self.alpha0, expected_alpha, rel_tol=1e-12, abs_tol=1e-300):
                raise ParameterError(
                    f"alpha0={self.alpha0} inconsistent with material parameters ({expected_alpha})"
                )

    @classmethod
    def from_material(
        cls, Nbc: float, wavelength: float, step_height: float, base_height: float = 0.0
    ) -> "SppSpec":
        return cls(
            q=-Nbc * wavelength * step_height / (2.0 * math.pi),
            alpha0=-Nbc * wavelength * base_height,
            material_Nbc=Nbc,
            step_height=step_height,
            base_height=base_height,
            wavelength=wavelength,
        )

    @property
    def is_integer(self) -> bool:
        return float(self.q).is_integer()


def azimuthal_weight(delta: float) -> complex:
    """(1/2pi) int_0^2pi exp(i delta phi) dphi = exp(i pi delta) sinc(pi delta)."""

    if float(delta).is_integer():
        return 1.0 + 0j if delta == 0 else 0j
    return cmath.exp(1j * math.pi * delta) * sinc(math.pi * delta)


def radial_tail_model(ell_shift: int, n_max: int) -> float:
    """Probability beyond n_max in a sector shifted by ell_shift.

    Large-n asymptote of the closed form, |C_n|^2 ~ ell_shift^2 / (4 n^2), summed
    to ell_shift^2 / (4 n_max); a unit shift gives 1/(4 n_max).
    """

    return min(1.0, ell_shift * ell_shift / (4.0 * max(n_max, 1)))


def _output_ells(ell_in: int, spec: SppSpec, ell_window: int) -> List[int]:
    if spec.is_integer:
        return [ell_in + int(spec.q)]
    centre = int(round(ell_in + spec.q))
    return list(range(centre - ell_window, centre + ell_window + 1))


def spp_apply(
    state: SpinOrbitState,
    spec: SppSpec,
    n_max: int = DEFAULT_N_MAX,
    ell_window: int = DEFAULT_ELL_WINDOW,
    rule: Optional[QuadratureRule] = None,
) -> SpinOrbitState:
    """Expand exp(i alpha0) exp(i q phi)|state> over n <= n_max and the ell window.

    ``tail_estimate`` collects the probability outside the ell window (exact,
    from the sinc^2 sum rule) plus ``radial_tail_model`` for every sector
    whose ell differs from the input's.
    """

    require_normalized(state)
    if not 0 <= n_max <= LAGUERRE_MAX_ORDER:
        raise ParameterError(f"n_max must lie in [0, {LAGUERRE_MAX_ORDER}], got {n_max}")
    if ell_window < 1:
        raise ParameterError(f"ell_window must be >= 1, got {ell_window}")

    if rule is None:
        n_top = max([n_max] + [mode.n_r for mode, _ in state])
        rule = radial_quadrature(quadrature_order_for(n_top))
    global_phase = cmath.exp(1j * spec.alpha0)

    coeffs: Dict[ModeIndex, complex] = {}
    tail = 0.0
    for mode_in, amp_in in state:
        sector_tail = 0.0
        in_window = 0.0
        for ell in _output_ells(mode_in.ell, spec, ell_window):
            weight = azimuthal_weight(spec.q + mode_in.ell - ell)
            if weight == 0:
                continue
            in_window += abs(weight) ** 2
            if ell == mode_in.ell:
                overlaps = np.zeros(n_max + 1)
                if mode_in.n_r <= n_max:
                    overlaps[mode_in.n_r] = 1.0
            else:
                overlaps = radial_overlaps(n_max, ell, mode_in.n_r, mode_in.ell, rule)
                sector_tail += abs(weight) ** 2 * radial_tail_model(ell - mode_in.ell, n_max)
            scale = global_phase * amp_in * weight
            for n, overlap in enumerate(overlaps):
                key = ModeIndex(n, ell, mode_in.spin)
                coeffs[key] = coeffs.get(key, 0j) + scale * overlap
        angular_tail = max(0.0, 1.0 - in_window)
        tail += abs(amp_in) ** 2 * (angular_tail + sector_tail)

    result = SpinOrbitState(coeffs=coeffs, sigma_perp=state.sigma_perp, tail_estimate=tail)
    LOGGER.debug(
        "SPP q=%s: %d coefficients, captured=%.6f, tail=%.3g",
        spec.q,
        len(result),
        result.captured_probability,
        tail,
    )
    return result


def spp_coefficient(
    q: float,
    mode: ModeIndex,
    input_mode: ModeIndex = ModeIndex(0, 0),
    rule: Optional[QuadratureRule] = None,
) -> complex:
    """Single coefficient <mode| exp(i q phi) |input_mode>."""

    if mode.spin != input_mode.spin:
        return 0j
    weight = azimuthal_weight(q + input_mode.ell - mode.ell)
    if weight == 0:
        return 0j
    if mode.ell == input_mode.ell:
        return weight if mode.n_r == input_mode.n_r else 0j
    rule = rule or radial_quadrature(quadrature_order_for(max(mode.n_r, input_mode.n_r)))
    overlap = radial_overlaps(mode.n_r, mode.ell, input_mode.n_r, input_mode.ell, rule)[mode.n_r]
    return complex(weight * overlap)


def spp_closed_form(n_r: int, ell: int) -> float:
    """Radial overlap <n_r, ell | 0, 0> for ell != 0, consistent with unitarity."""

    if ell == 0:
        return 1.0 if n_r == 0 else 0.0
    half = abs(ell) / 2.0
    log_value = log_gamma(n_r + half) - 0.5 * (log_gamma(n_r + 1.0) + log_gamma(n_r + abs(ell) + 1.0))
    return half * math.exp(log_value)


def mode_column(mode: ModeIndex) -> str:
    ell = f"m{abs(mode.ell)}" if mode.ell < 0 else str(mode.ell)
    return f"p_n{mode.n_r}_l{ell}"


def spp_probability_table(
    q_grid: Iterable[float],
    modes: Sequence[ModeIndex] = FIG1_MODES,
    rule: Optional[QuadratureRule] = None,
) -> SweepTable:
    """|C_{n,l}|^2 for ``modes`` from a (0,0) input, one row per q."""

    q_values = [float(q) for q in q_grid]
    if not all(math.isfinite(q) for q in q_values):
        raise ParameterError("q grid must contain finite values")
    rule = rule or radial_quadrature(quadrature_order_for(max((m.n_r for m in modes), default=0)))

    LOGGER.info("SPP probability sweep over %d q values", len(q_values))
    rows = []
    for q in q_values:
        probs = [abs(spp_coefficient(q, mode, rule=rule)) ** 2 for mode in modes]
        rows.append((q, *probs))
    return SweepTable(
        column_names=("q",) + tuple(mode_column(mode) for mode in modes),
        rows=rows,
        metadata={"input_mode": "n0_l0", "quadrature_order": str(rule.order)},
    )


__all__ = [
    "FIG1_MODES",
    "SppSpec",
    "azimuthal_weight",
    "mode_column",
    "radial_tail_model",
    "spp_apply",
    "spp_closed_form",
    "spp_coefficient",
    "spp_probability_table",
]
