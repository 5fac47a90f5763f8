"""Special functions and quadrature used by every element module.

All integrals in the package are written in the dimensionless radial
coordinate xi = r / sigma_perp, so a single half-line rule serves the mode
overlaps, the quadrupole coefficients and the Ramsey intensities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from ..errors import ParameterError

ArrayLike = Union[float, np.ndarray]

LAGUERRE_MAX_ORDER = 500
DAWSON_MAX_ARGUMENT = 50.0
# Series below, continued fraction at and above.
DAWSON_SWITCHOVER = 4.0
DAWSON_CF_MAX_TERMS = 500
SINC_TAYLOR_RADIUS = 1e-4

QUADRATURE_MIN_ORDER = 8
QUADRATURE_MAX_ORDER = 512
DEFAULT_QUADRATURE_ORDER = 128
# exp(-RADIAL_CUTOFF**2) ~ 3e-63. Modes whose turning point sqrt(4n + 2) nears the
# cutoff (n above ~30) are not normalised on this grid; their overlaps with
# Gaussian-dominated inputs still are accurate.
RADIAL_CUTOFF = 12.0
PANEL_NODES = 16


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights approximating the integral of f over [0, inf)."""

    nodes: Tuple[float, ...]
    weights: Tuple[float, ...]

    @property
    def order(self) -> int:
        return len(self.nodes)

    @property
    def xi(self) -> np.ndarray:
        return np.asarray(self.nodes)

    @property
    def w(self) -> np.ndarray:
        return np.asarray(self.weights)

    def integrate(self, values: np.ndarray) -> float:
        """Sum ``values`` (f sampled at the nodes) against the weights."""

        return float(np.dot(self.w, values))


def laguerre(n: int, alpha: float, x: ArrayLike) -> ArrayLike:
    """Associated Laguerre polynomial L_n^alpha(x) by upward recurrence in n."""

    value = laguerre_table(n, alpha, x)[n]
    if value.ndim == 0:
        return float(value)
    return value


def laguerre_table(n_max: int, alpha: float, x: ArrayLike) -> np.ndarray:
    """Rows L_0^alpha(x) .. L_{n_max}^alpha(x), shape (n_max + 1,) + shape(x)."""

    if n_max < 0 or n_max > LAGUERRE_MAX_ORDER:
        raise ParameterError(f"Laguerre order {n_max} outside [0, {LAGUERRE_MAX_ORDER}]")
    x_arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x_arr)):
        raise ParameterError("Laguerre argument must be finite")

    table = np.empty((n_max + 1,) + x_arr.shape)
    table[0] = 1.0
    if n_max >= 1:
        table[1] = 1.0 + alpha - x_arr
    for k in range(1, n_max):
        table[k + 1] = ((2 * k + 1 + alpha - x_arr) * table[k] - (k + alpha) * table[k - 1]) / (k + 1)
    return table


def log_gamma(x: ArrayLike) -> ArrayLike:
    """Natural log of the gamma function for positive arguments."""

    return gammaln(x)


def sinc(x: ArrayLike) -> ArrayLike:
    """Unnormalized sinc, sin(x)/x, with sinc(0) = 1."""

    x_arr = np.asarray(x, dtype=float)
    small = np.abs(x_arr) < SINC_TAYLOR_RADIUS
    safe = np.where(small, 1.0, x_arr)
    value = np.where(small, 1.0 - x_arr * x_arr / 6.0, np.sin(safe) / safe)
    if value.ndim == 0:
        return float(value)
    return value


def _dawson_series(x: float) -> float:
    # exp(-x^2) * sum x^(2k+1) / (k! (2k+1)): every term positive, no cancellation.
    x2 = x * x
    term = x
    total = x
    k = 0
    while True:
        k += 1
        term *= x2 / k
        contribution = term / (2 * k + 1)
        total += contribution
        if contribution < 1e-17 * total:
            break
    return math.exp(-x2) * total


def _dawson_continued_fraction(x: float) -> float:
    # F(x) = x / (1 + 2x^2 - 4x^2/(3 + 2x^2 - 8x^2/(5 + 2x^2 - ...))), modified Lentz.
    tiny = 1e-300
    s2 = 2.0 * x * x
    f = 1.0 + s2
    c = f
    d = 0.0
    for k in range(1, DAWSON_CF_MAX_TERMS + 1):
        a = -2.0 * k * s2
        b = 2 * k + 1 + s2
        d = b + a * d
        if d == 0.0:
            d = tiny
        c = b + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return x / f


def dawson(x: float) -> float:
    """Dawson's integral F(x) = exp(-x^2) * int_0^x exp(t^2) dt.

    The Maclaurin series of the inner integral is used for |x| < 4 and the
    continued fraction beyond. Arguments above 50 are rejected; there the
    value is 1/(2x) to better than 1e-4 relative.
    """

    x = float(x)
    ax = abs(x)
    if ax > DAWSON_MAX_ARGUMENT:
        raise ParameterError(
            f"Dawson argument {x} beyond cap {DAWSON_MAX_ARGUMENT}; use the 1/(2x) limit"
        )
    if ax == 0.0:
        return 0.0
    value = _dawson_series(ax) if ax < DAWSON_SWITCHOVER else _dawson_continued_fraction(ax)
    return math.copysign(value, x)


@lru_cache(maxsize=32)
def radial_quadrature(order: int = DEFAULT_QUADRATURE_ORDER) -> QuadratureRule:
    """Panelled Gauss-Legendre rule on [0, RADIAL_CUTOFF] with ``order`` nodes.

    Panels of equal width carry between PANEL_NODES / 2 and PANEL_NODES nodes;
    a panel with s nodes integrates polynomials of degree 2s - 1 exactly. The
    rule is therefore exact on [0, RADIAL_CUTOFF] for every piecewise
    polynomial of degree 2 * min(s) - 1: at least 15, and 31 whenever order
    is a multiple of 16 (the default 128 included). For a Gaussian moment
    int_0^inf xi^k exp(-xi^2) dxi the truncation at the cutoff costs less than
    exp(-144) times a polynomial in k.
    """

    if not QUADRATURE_MIN_ORDER <= order <= QUADRATURE_MAX_ORDER:
        raise ParameterError(
            f"quadrature order {order} outside [{QUADRATURE_MIN_ORDER}, {QUADRATURE_MAX_ORDER}]"
        )

    n_panels = -(-order // PANEL_NODES)
    sizes = [order // n_panels + (1 if i < order % n_panels else 0) for i in range(n_panels)]
    width = RADIAL_CUTOFF / n_panels

    nodes = []
    weights = []
    for i, size in enumerate(sizes):
        ref_nodes, ref_weights = leggauss(size)
        left = i * width
        nodes.append(left + 0.5 * width * (ref_nodes + 1.0))
        weights.append(0.5 * width * ref_weights)

    return QuadratureRule(
        nodes=tuple(float(v) for v in np.concatenate(nodes)),
        weights=tuple(float(v) for v in np.concatenate(weights)),
    )


__all__ = [
    "DAWSON_SWITCHOVER",
    "DEFAULT_QUADRATURE_ORDER",
    "LAGUERRE_MAX_ORDER",
    "QuadratureRule",
    "dawson",
    "laguerre",
    "laguerre_table",
    "log_gamma",
    "radial_quadrature",
    "sinc",
]
