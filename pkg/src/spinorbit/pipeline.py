"""Figure reproduction, generic sweeps and the quadrupole design calculator."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np

from .analysis.entanglement import concurrence_at, concurrence_sweep
from .config import RunConfig
from .elements.quadrupole import (
    NDFEB_SURFACE_FIELD,
    DESIGN_RATIO,
    bore_radius,
    neutron_velocity,
    quad_coefficient_sweep,
    rc_from_physical,
    transit_time,
)
from .elements.ramsey import AngleSweep, RamseyConfig, fringe_sweep, fringe_visibility
from .elements.spp import SppSpec, spp_apply, spp_probability_table
from .errors import ConvergenceError, ParameterError
from .numerics.basis import ModeIndex, SpinOrbitState, basis_state, quadrature_order_for
from .numerics.specfun import QUADRATURE_MAX_ORDER, QuadratureRule, radial_quadrature
from .report.table import SweepTable

LOGGER = logging.getLogger(__name__)

SweepParameter = Literal["ratio", "q", "beta", "theta"]
SWEEP_PARAMETERS = ("ratio", "q", "beta", "theta")
FIGURES = (1, 2, 3, 4, 5)

FIG3_COLUMNS = ("ratio", "conc_eta0", "conc_eta1", "conc_eta2", "p_eta0", "p_eta1", "p_eta2")
FIG4_COLUMNS = ("ratio", "conc_traced")


@dataclass(frozen=True)
class Grid:
    """Inclusive arithmetic grid start, start + step, ... <= stop."""

    start: float
    stop: float
    step: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.start, self.stop, self.step)):
            raise ParameterError("grid bounds must be finite")
        if self.step <= 0:
            raise ParameterError(f"grid step must be positive, got {self.step}")
        if self.stop < self.start:
            raise ParameterError(f"grid stop {self.stop} is below start {self.start}")

    def values(self) -> np.ndarray:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        return self.start + self.step * np.arange(count + 1)

    def with_overrides(
        self, start: Optional[float] = None, stop: Optional[float] = None, step: Optional[float] = None
    ) -> "Grid":
        return Grid(
            start=self.start if start is None else start,
            stop=self.stop if stop is None else stop,
            step=self.step if step is None else step,
        )


DEFAULT_GRIDS: Dict[int, Grid] = {
    1: Grid(-2.0, 2.0, 0.01),
    2: Grid(0.2, 5.0, 0.01),
    3: Grid(0.2, 5.0, 0.005),
    4: Grid(0.2, 5.0, 0.005),
    5: Grid(0.0, 2.0 * math.pi, math.pi / 64.0),
}
SWEEP_GRIDS: Dict[str, Grid] = {
    "q": DEFAULT_GRIDS[1],
    "ratio": DEFAULT_GRIDS[2],
    "beta": DEFAULT_GRIDS[5],
    "theta": DEFAULT_GRIDS[5],
}


def _with_run_metadata(table: SweepTable, config: RunConfig, **extra: object) -> SweepTable:
    """Attach run settings; values the table already records (the effective
    quadrature order, for one) take precedence."""

    metadata = config.metadata()
    metadata.update({key: str(value) for key, value in extra.items()})
    metadata.update(table.metadata)
    return SweepTable(column_names=table.column_names, rows=table.rows, metadata=metadata)


def rule_for(config: RunConfig, n_max: int) -> QuadratureRule:
    """Configured quadrature, raised where needed to resolve modes up to n_max."""

    return radial_quadrature(
        min(QUADRATURE_MAX_ORDER, max(config.quadrature_order, quadrature_order_for(n_max)))
    )


def check_spp_convergence(config: RunConfig) -> SpinOrbitState:
    """Expand the q = 1 plate output and enforce ``min_captured_probability``."""

    n_max = config.n_max_spp
    state = spp_apply(
        basis_state(ModeIndex(0, 0), config.sigma_perp),
        SppSpec(q=1.0),
        n_max=n_max,
        ell_window=config.ell_window,
        rule=rule_for(config, n_max),
    )
    if state.captured_probability < config.min_captured_probability:
        LOGGER.warning(
            "SPP expansion captured %.6f < %.6f at n_max=%d",
            state.captured_probability,
            config.min_captured_probability,
            n_max,
        )
        raise ConvergenceError(
            f"SPP expansion did not converge at n_max={n_max}",
            captured=state.captured_probability,
            tail_estimate=state.tail_estimate,
        )
    return state


def build_figure(
    number: int,
    config: RunConfig,
    grid: Optional[Grid] = None,
    *,
    ratio: float = DESIGN_RATIO,
    beta: float = math.pi,
    theta: float = math.pi,
    sweep: Literal["beta", "theta"] = "beta",
) -> SweepTable:
    """Table behind figure ``number`` (1-5) with run metadata attached."""

    if number not in FIGURES:
        raise ParameterError(f"figure must be one of {FIGURES}, got {number}")
    grid = grid or DEFAULT_GRIDS[number]
    values = grid.values()
    LOGGER.info("Building figure %d over %d grid points", number, len(values))
    rule = rule_for(config, config.n_max_quad)

    if number == 1:
        captured = check_spp_convergence(config).captured_probability
        table = spp_probability_table(values).with_metadata({"q1_captured_probability": repr(captured)})
    elif number == 2:
        table = quad_coefficient_sweep(values, (0, 1), config.n_max_quad, rule)
    elif number == 3:
        table = concurrence_sweep(values, (0, 1, 2), config.n_max_quad, rule)
        table = table.select(FIG3_COLUMNS)
    elif number == 4:
        table = concurrence_sweep(values, (), config.n_max_quad, rule).select(FIG4_COLUMNS)
    else:
        angles = AngleSweep(sweep, grid.start, grid.stop, grid.step)
        table = fringe_sweep(RamseyConfig(beta=beta, theta=theta, ratio=ratio, grid=angles))

    return _with_run_metadata(table, config, figure=number)


def ratio_sweep(grid: Grid, config: RunConfig) -> SweepTable:
    """Quadrupole coefficients, concurrences and fringe visibility along the ratio grid."""

    rule = rule_for(config, config.n_max_quad)
    values = grid.values()
    coefficients = quad_coefficient_sweep(values, (0, 1), config.n_max_quad, rule)
    concurrences = concurrence_sweep(values, (0, 1, 2), config.n_max_quad, rule)
    columns = coefficients.column_names + concurrences.column_names[1:] + ("visibility",)
    rows = [
        coeff_row + conc_row[1:] + (fringe_visibility(coeff_row[0]),)
        for coeff_row, conc_row in zip(coefficients.rows, concurrences.rows)
    ]
    metadata = dict(coefficients.metadata)
    metadata.update(concurrences.metadata)
    return SweepTable(column_names=columns, rows=rows, metadata=metadata)


def parameter_sweep(
    param: SweepParameter,
    grid: Optional[Grid],
    config: RunConfig,
    *,
    ratio: float = DESIGN_RATIO,
    beta: float = math.pi,
    theta: float = math.pi,
) -> SweepTable:
    if param not in SWEEP_PARAMETERS:
        raise ParameterError(f"sweep parameter must be one of {SWEEP_PARAMETERS}, got {param!r}")
    grid = grid or SWEEP_GRIDS[param]
    if param == "ratio":
        table = ratio_sweep(grid, config)
    elif param == "q":
        table = spp_probability_table(grid.values())
    else:
        angles = AngleSweep(param, grid.start, grid.stop, grid.step)
        table = fringe_sweep(RamseyConfig(beta=beta, theta=theta, ratio=ratio, grid=angles))
    return _with_run_metadata(table, config, sweep=param)


# --- Design calculator --- #

def to_si(
    gradient_t_per_cm: float, length_cm: float, wavelength_nm: float, sigma_nm: float
) -> Tuple[float, float, float, float]:
    """(T/cm, cm, nm, nm) -> (T/m, m, m, m)."""

    return gradient_t_per_cm * 100.0, length_cm / 100.0, wavelength_nm * 1e-9, sigma_nm * 1e-9


def from_si(
    gradient: float, length: float, wavelength: float, sigma_perp: float
) -> Tuple[float, float, float, float]:
    return gradient / 100.0, length * 100.0, wavelength / 1e-9, sigma_perp / 1e-9


@dataclass
class DesignReport:
    gradient: float
    length: float
    wavelength: float
    sigma_perp: float
    velocity: float
    transit_time: float
    r_c: float
    ratio: float
    field_at_rc: float
    surface_field: float
    bore_radius: float
    filtered_concurrences: Dict[int, float] = field(default_factory=dict)
    filtered_probabilities: Dict[int, float] = field(default_factory=dict)
    traced_concurrence: float = 0.0

    def lines(self) -> List[str]:
        out = [
            f"gradient_T_per_m: {self.gradient:.6g}",
            f"length_m: {self.length:.6g}",
            f"wavelength_m: {self.wavelength:.6g}",
            f"sigma_perp_m: {self.sigma_perp:.6g}",
            f"v_z_m_per_s: {self.velocity:.6f}",
            f"t_Q_s: {self.transit_time:.6e}",
            f"r_c_m: {self.r_c:.6e}",
            f"ratio: {self.ratio:.6f}",
            f"field_at_r_c_T: {self.field_at_rc:.6e}",
            f"bore_radius_m: {self.bore_radius:.6e} (surface field {self.surface_field:g} T)",
        ]
        for eta, value in self.filtered_concurrences.items():
            out.append(
                f"concurrence_eta{eta}: {value:.6f} (p_eta{eta}={self.filtered_probabilities[eta]:.6f})"
            )
        out.append(f"concurrence_traced: {self.traced_concurrence:.6f}")
        return out


def design_report(
    gradient_t_per_cm: float,
    length_cm: float,
    wavelength_nm: float,
    sigma_nm: float,
    config: Optional[RunConfig] = None,
    surface_field: float = NDFEB_SURFACE_FIELD,
) -> DesignReport:
    """Physical quadrupole parameters in mixed units -> transit, r_c, ratio, concurrences."""

    config = config or RunConfig()
    for name, value in (
        ("gradient", gradient_t_per_cm),
        ("length", length_cm),
        ("wavelength", wavelength_nm),
        ("sigma", sigma_nm),
        ("surface_field", surface_field),
    ):
        if not (math.isfinite(value) and value > 0):
            raise ParameterError(f"{name} must be positive, got {value}")

    constants = config.constants
    gradient, length, wavelength, sigma_perp = to_si(gradient_t_per_cm, length_cm, wavelength_nm, sigma_nm)
    r_c = rc_from_physical(gradient, length, wavelength, constants)
    ratio = r_c / sigma_perp
    row = concurrence_at(ratio, (0, 1, 2), config.n_max_quad, rule_for(config, config.n_max_quad))
    LOGGER.info("Design: r_c=%.4e m, ratio=%.4f", r_c, ratio)
    return DesignReport(
        gradient=gradient,
        length=length,
        wavelength=wavelength,
        sigma_perp=sigma_perp,
        velocity=neutron_velocity(wavelength, constants),
        transit_time=transit_time(length, wavelength, constants),
        r_c=r_c,
        ratio=ratio,
        field_at_rc=gradient * r_c,
        surface_field=surface_field,
        bore_radius=bore_radius(gradient, surface_field),
        filtered_concurrences={s.eta: s.concurrence for s in row.filtered},
        filtered_probabilities={s.eta: s.p_eta for s in row.filtered},
        traced_concurrence=row.traced,
    )


__all__ = [
    "DEFAULT_GRIDS",
    "DesignReport",
    "FIGURES",
    "Grid",
    "SWEEP_PARAMETERS",
    "build_figure",
    "check_spp_convergence",
    "design_report",
    "from_si",
    "parameter_sweep",
    "ratio_sweep",
    "rule_for",
    "to_si",
]
