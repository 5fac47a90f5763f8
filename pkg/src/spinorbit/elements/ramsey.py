"""Spin-orbit Ramsey interferometer: quadrupole, solenoid, rotated quadrupole.

For a (0, 0, up) input and a common ratio r_c / sigma_perp, the exit spinor at
(xi, phi) is, up to a global phase,

    up:   [cos(pi xi / ratio) cos((beta - theta)/2) - i sin((beta - theta)/2)] u00(xi)
    down: -i sin(pi xi / ratio) cos((beta - theta)/2) exp(i phi) u00(xi)

and the integrated intensities reduce to I_down = a F(a) cos^2((beta - theta)/2)
with a = pi / ratio and F Dawson's integral.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, replace
from typing import Literal, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import ParameterError
from ..numerics.basis import (
    ModeIndex,
    Spin,
    SpinOrbitState,
    basis_state,
    map_amplitudes,
    mode_radial_table,
    quadrature_order_for,
)
from ..numerics.specfun import DEFAULT_QUADRATURE_ORDER, QuadratureRule, dawson, radial_quadrature
from ..report.table import SweepTable
from .quadrupole import DEFAULT_N_MAX, DESIGN_RATIO, QuadrupoleSpec, quad_apply

LOGGER = logging.getLogger(__name__)

SweptAngle = Literal["beta", "theta"]


@dataclass(frozen=True)
class AngleSweep:
    """Inclusive grid start, start + step, ... <= stop for one of beta / theta."""

    variable: SweptAngle = "beta"
    start: float = 0.0
    stop: float = 2.0 * math.pi
    step: float = math.pi / 64.0

    def __post_init__(self) -> None:
        if self.variable not in ("beta", "theta"):
            raise ParameterError(f"swept variable must be 'beta' or 'theta', got {self.variable!r}")
        if not (math.isfinite(self.step) and self.step > 0):
            raise ParameterError(f"sweep step must be positive, got {self.step}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)) or self.stop < self.start:
            raise ParameterError(f"invalid sweep range [{self.start}, {self.stop}]")

    def values(self) -> np.ndarray:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        return self.start + self.step * np.arange(count + 1)


@dataclass(frozen=True)
class RamseyConfig:
    beta: float = 0.0
    theta: float = math.pi
    ratio: float = DESIGN_RATIO
    grid: Optional[AngleSweep] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.ratio) and self.ratio > 0):
            raise ParameterError(f"ratio must be positive, got {self.ratio}")
        if not (math.isfinite(self.beta) and math.isfinite(self.theta)):
            raise ParameterError("beta and theta must be finite")

    @property
    def half_difference(self) -> float:
        return 0.5 * (self.beta - self.theta)

    def at(self, value: float) -> "RamseyConfig":
        """Copy with the swept angle set to ``value``."""

        variable = self.grid.variable if self.grid else "beta"
        return replace(self, **{variable: float(value)})


def _exit_profiles(config: RamseyConfig, xi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    half = config.half_difference
    flip = math.pi * xi / config.ratio
    ground = mode_radial_table(0, 0, xi)[0]
    up = (np.cos(flip) * math.cos(half) - 1j * math.sin(half)) * ground
    down = -1j * np.sin(flip) * math.cos(half) * ground
    return up, down


def ramsey_exit_state(config: RamseyConfig, xi: float, phi: float) -> np.ndarray:
    """Exit spinor (up, down) at the point (xi, phi), global phase excluded."""

    up, down = _exit_profiles(config, np.array([float(xi)]))
    return np.array([up[0], down[0] * cmath.exp(1j * phi)])


def fringe_visibility(ratio: float) -> float:
    """a F(a) with a = pi / ratio: the largest spin-down intensity."""

    a = math.pi / ratio
    return a * dawson(a)


def intensities_analytic(config: RamseyConfig) -> Tuple[float, float]:
    i_down = fringe_visibility(config.ratio) * math.cos(config.half_difference) ** 2
    return 1.0 - i_down, i_down


def intensities_numeric(
    config: RamseyConfig, rule: Optional[QuadratureRule] = None
) -> Tuple[float, float]:
    """Integrate |<s|exit>|^2 xi dxi dphi; the phi integral contributes 2 pi."""

    rule = rule or radial_quadrature(DEFAULT_QUADRATURE_ORDER)
    up, down = _exit_profiles(config, rule.xi)
    measure = 2.0 * math.pi * rule.xi
    return (
        rule.integrate(measure * np.abs(up) ** 2),
        rule.integrate(measure * np.abs(down) ** 2),
    )


def solenoid_apply(state: SpinOrbitState, beta: float) -> SpinOrbitState:
    """U_z(beta) = cos(beta/2) + i sin(beta/2) sigma_z on the spin factor only."""

    up_phase = cmath.exp(0.5j * beta)
    down_phase = cmath.exp(-0.5j * beta)
    return map_amplitudes(
        state, lambda mode, amp: amp * (up_phase if mode.spin is Spin.UP else down_phase)
    )


def composed_intensities(
    config: RamseyConfig,
    n_max: int = DEFAULT_N_MAX,
    rule: Optional[QuadratureRule] = None,
) -> Tuple[float, float]:
    """(I_up, I_down) from quad_apply -> solenoid_apply -> quad_apply(theta)."""

    rule = rule or radial_quadrature(quadrature_order_for(n_max))
    state = basis_state(ModeIndex(0, 0, Spin.UP))
    state = quad_apply(state, QuadrupoleSpec.from_ratio(config.ratio), n_max, rule)
    state = solenoid_apply(state, config.beta)
    state = quad_apply(state, QuadrupoleSpec.from_ratio(config.ratio, config.theta), n_max, rule)
    by_spin = state.probability_by_spin()
    LOGGER.debug("Composed Ramsey pass: captured=%.12f", state.captured_probability)
    return by_spin[Spin.UP], by_spin[Spin.DOWN]


def max_visibility_ratio() -> Tuple[float, float]:
    """Ratio that maximises the fringe amplitude a F(a), and that amplitude."""

    result = minimize_scalar(
        lambda a: -a * dawson(a), bounds=(0.5, 5.0), method="bounded", options={"xatol": 1e-10}
    )
    a_best = float(result.x)
    return math.pi / a_best, a_best * dawson(a_best)


def fringe_sweep(
    config: RamseyConfig,
    method: Literal["analytic", "numeric"] = "analytic",
    rule: Optional[QuadratureRule] = None,
) -> SweepTable:
    """(swept angle, I_up, I_down) over ``config.grid``."""

    if method not in ("analytic", "numeric"):
        raise ParameterError(f"method must be 'analytic' or 'numeric', got {method!r}")
    grid = config.grid or AngleSweep()
    config = replace(config, grid=grid)
    LOGGER.info(
        "Ramsey fringe sweep over %s (%d points), ratio=%s", grid.variable, len(grid.values()), config.ratio
    )
    rows = []
    for value in grid.values():
        point = config.at(value)
        if method == "numeric":
            i_up, i_down = intensities_numeric(point, rule)
        else:
            i_up, i_down = intensities_analytic(point)
        rows.append((float(value), i_up, i_down))

    fixed = "theta" if grid.variable == "beta" else "beta"
    return SweepTable(
        column_names=(grid.variable, "I_up", "I_down"),
        rows=rows,
        metadata={
            "ratio": repr(config.ratio),
            fixed: repr(getattr(config, fixed)),
            "method": method,
        },
    )


__all__ = [
    "AngleSweep",
    "RamseyConfig",
    "composed_intensities",
    "fringe_sweep",
    "fringe_visibility",
    "intensities_analytic",
    "intensities_numeric",
    "max_visibility_ratio",
    "ramsey_exit_state",
    "solenoid_apply",
]
