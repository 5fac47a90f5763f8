"""Special functions, quadrature and the Laguerre-Gauss mode basis."""

__all__ = ["basis", "specfun"]
